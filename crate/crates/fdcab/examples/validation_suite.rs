//! Run the full validation suite and print every check with its measured
//! margin. Checks built on asymptotic closed forms report their finite-block
//! gap honestly, so some fail at the default operating point.
//!
//! ```bash
//! cargo run --release --example validation_suite
//! ```

use fdcab::{validate, SystemConfig};

fn main() {
    let cfg = SystemConfig {
        trials: 2_000, // lighter than the acceptance suite's 10_000
        ..SystemConfig::default()
    };
    let report = validate::run_all(&cfg);
    print!("{}", report.render());
    std::process::exit(if report.passed() { 0 } else { 1 });
}
