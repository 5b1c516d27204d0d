//! Optimal training durations: closed-form approximations against the
//! brute-force grid optimum, for both strategies and both rate sources.
//!
//! ```bash
//! cargo run --release --example optimal_training
//! ```

use fdcab::montecarlo::estimate_rate_tables;
use fdcab::optimizer::{brute_force_optimum, Strategy};
use fdcab::{RateModel, SystemConfig};

fn main() {
    let cfg = SystemConfig {
        trials: 2_000,
        ..SystemConfig::default()
    };
    let model = RateModel::new(&cfg);

    println!("analytic mode (bound-based rates):");
    for (name, strategy) in [("cab", Strategy::Cab), ("hd ", Strategy::HalfDuplex)] {
        let plan = brute_force_optimum(&cfg, &model, &model, strategy);
        println!(
            "  {name}: grid optimum {:>5} symbols, closed form {:>8.2}, \
             efficiency {:.6} vs {:.6}",
            plan.exact_duration, plan.approx_duration, plan.rate_at_exact, plan.rate_at_approx
        );
    }

    println!("simulated mode ({} blocks of Monte Carlo rate tables):", cfg.trials);
    let tables = estimate_rate_tables(&cfg, cfg.max_training() / cfg.antennas, 1);
    for (name, strategy) in [("cab", Strategy::Cab), ("hd ", Strategy::HalfDuplex)] {
        let plan = brute_force_optimum(&cfg, &model, &tables, strategy);
        println!(
            "  {name}: grid optimum {:>5} symbols, closed form {:>8.2}, \
             efficiency {:.6} vs {:.6}",
            plan.exact_duration, plan.approx_duration, plan.rate_at_exact, plan.rate_at_approx
        );
    }
}
