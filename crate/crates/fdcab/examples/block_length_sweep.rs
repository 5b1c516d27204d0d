//! Optimal training fraction versus block length: one CSV row per T with
//! the optimal durations, efficiencies, and bounds for both strategies.
//!
//! ```bash
//! cargo run --release --example block_length_sweep > fractions.csv
//! ```

use fdcab::sweep::{sweep_block_length, write_csv, Mode};
use fdcab::SystemConfig;

fn main() {
    let cfg = SystemConfig::default(); // M=8, 10 dB, f=alpha=0.1
    let grid = [500, 1000, 2000, 5000, 10000, 20000, 50000];
    let rows = sweep_block_length(&cfg, &grid, Mode::Analytic);

    // Training fractions on stderr for a quick look; full CSV on stdout.
    for row in rows.iter().flatten() {
        eprintln!(
            "T={:>6}: cab fraction {:.3}, hd fraction {:.3}",
            row.cfg.block_len,
            row.cab.exact_duration as f64 / row.cfg.block_len as f64,
            row.hd.exact_duration as f64 / row.cfg.block_len as f64,
        );
    }
    write_csv(std::io::stdout().lock(), &rows).expect("write CSV");
}
