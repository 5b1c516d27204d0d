//! Symbol-level Monte Carlo simulation of both protocols at their
//! closed-form training durations, compared against the bound-based
//! analytic efficiencies and the measured full-duplex gain bound.
//!
//! ```bash
//! cargo run --release --example monte_carlo
//! ```

use fdcab::montecarlo::{ergodic_efficiency, measured_gain, simulate_cab, simulate_hd};
use fdcab::optimizer::{
    cab_duration_approx, gain_lower_bound, hd_duration_approx, round_to_cycle,
};
use fdcab::rates::{cab_efficiency, hd_efficiency};
use fdcab::rng::block_rng;
use fdcab::{RateModel, SystemConfig};

fn main() {
    let cfg = SystemConfig {
        trials: 2_000,
        ..SystemConfig::default()
    };
    let model = RateModel::new(&cfg);
    let t_cab = round_to_cycle(&cfg, cab_duration_approx(&cfg, &model));
    let t_hd = round_to_cycle(&cfg, hd_duration_approx(&cfg, &model));

    let cab_traces: Vec<_> = (0..cfg.trials as u64)
        .map(|b| simulate_cab(&cfg, t_cab, &mut block_rng(cfg.seed, 0, b)))
        .collect();
    let hd_traces: Vec<_> = (0..cfg.trials as u64)
        .map(|b| simulate_hd(&cfg, t_hd, &mut block_rng(cfg.seed, 1, b)))
        .collect();

    let cab = ergodic_efficiency(&cfg, t_cab, &cab_traces);
    let hd = ergodic_efficiency(&cfg, t_hd, &hd_traces);
    println!(
        "cab @ t={t_cab}: simulated {:.4} ± {:.4}, bound-based {:.4}",
        cab.mean,
        cab.std_err,
        cab_efficiency(&cfg, &model, t_cab).unwrap()
    );
    println!(
        "hd  @ t={t_hd}: simulated {:.4} ± {:.4}, bound-based {:.4}",
        hd.mean,
        hd.std_err,
        hd_efficiency(&cfg, &model, t_hd).unwrap()
    );

    // Full-duplex gain at equal training duration vs its lower bound.
    let gain = measured_gain(&cfg, t_hd, 2);
    let bound = gain_lower_bound(&cfg, &model, t_hd).unwrap();
    println!(
        "gain @ t={t_hd}: measured {:.4} ± {:.4}, lower bound {:.4}",
        gain.mean, gain.std_err, bound
    );
}
