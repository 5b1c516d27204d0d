//! Evaluate every closed-form rate quantity at one operating point, and
//! cross-check the genie-aided ZF rate against its Monte Carlo estimator.
//!
//! ```bash
//! cargo run --release --example point_rates
//! ```

use fdcab::rates::genie_zf_rate_mc;
use fdcab::{RateModel, SystemConfig};

fn main() {
    let cfg = SystemConfig {
        trials: 20_000,
        ..SystemConfig::default()
    };
    let model = RateModel::new(&cfg);

    println!(
        "operating point: M={} T={} snr={:.1} dB f={} alpha={}",
        cfg.antennas,
        cfg.block_len,
        cfg.snr_db(),
        cfg.feedback_fraction,
        cfg.ini_factor
    );
    println!("genie ZF rate (closed form) : {:.6} bits/s/Hz", model.zf_rate);

    let mc = genie_zf_rate_mc(&cfg, cfg.trials, 0);
    println!(
        "genie ZF rate (Monte Carlo) : {:.6} ± {:.6}  ({} trials)",
        mc.mean, mc.std_err, mc.samples
    );

    println!("invariant INI loss          : {:.6}", model.invariant_ini_loss);
    println!();
    println!(
        "{:>8} {:>12} {:>12} {:>12}",
        "pilots", "data loss", "ini loss", "ini rate"
    );
    for beta in [1usize, 2, 3, 5, 10, 20, 50, 100] {
        println!(
            "{beta:>8} {:>12.6} {:>12.6} {:>12.6}",
            model.data_phase_loss(beta * cfg.antennas),
            model.training_loss_with_ini(beta),
            (model.zf_rate - model.training_loss_with_ini(beta)).max(0.0),
        );
    }
}
