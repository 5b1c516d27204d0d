//! MMSE channel estimation from accumulated pilots: watch the estimation
//! error track its closed form as cycles accumulate, then round-trip a
//! binary dump of the sampled blocks (the reproducibility-audit format).
//!
//! ```bash
//! cargo run --release --example channel_estimation
//! ```

use fdcab::channel::{
    mmse_error_variance, read_blocks_from_path, sample_block, write_blocks_to_path,
    PilotAccumulator,
};
use fdcab::rng::block_rng;
use fdcab::SystemConfig;

fn main() {
    let cfg = SystemConfig::default();
    let blocks = 2_000usize;

    println!("{:>8} {:>16} {:>16}", "pilots", "measured err var", "closed form");
    let mut accs: Vec<(PilotAccumulator, _)> = (0..blocks as u64)
        .map(|b| {
            let mut rng = block_rng(cfg.seed, 0, b);
            let truth = sample_block(&cfg, &mut rng);
            (PilotAccumulator::new(&cfg), (truth, rng))
        })
        .collect();
    for beta in 1..=20usize {
        let mut sq = 0.0;
        let mut n = 0usize;
        for (acc, (truth, rng)) in accs.iter_mut() {
            acc.observe_cycle(truth, &cfg, rng);
            let est = acc.estimate(&cfg);
            sq += (&est.estimate - &truth.downlink).norm_squared();
            n += cfg.antennas * cfg.antennas;
        }
        if [1, 2, 5, 10, 20].contains(&beta) {
            println!(
                "{beta:>8} {:>16.6} {:>16.6}",
                sq / n as f64,
                mmse_error_variance(beta, &cfg)
            );
        }
    }

    // Binary dump round trip.
    let sampled: Vec<_> = (0..8u64)
        .map(|b| sample_block(&cfg, &mut block_rng(cfg.seed, 1, b)))
        .collect();
    let path = std::env::temp_dir().join("fdcab_blocks.bin");
    write_blocks_to_path(&path, &sampled).expect("dump blocks");
    let restored = read_blocks_from_path(&path).expect("read blocks");
    println!(
        "dumped {} blocks to {} and read them back identically: {}",
        sampled.len(),
        path.display(),
        restored == sampled
    );
}
