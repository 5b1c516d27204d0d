//! Rayleigh block-fading channels and MMSE estimation from uplink pilots.
//!
//! Per coherence block the downlink matrix `H` holds one i.i.d. CN(0, 1) row
//! per user. Users send one pilot per cycle at power f·P in TDMA order, so
//! per-user estimation decouples into scalar Gaussian problems: after `beta`
//! cycles the MMSE estimate has per-entry posterior error variance
//! `1 / (1 + beta·f·P)`, and the true channel decomposes as
//! `h = h_hat + e` with `e` independent of `h_hat`.

use crate::config::SystemConfig;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;
use std::io::{self, Read, Write};
use std::path::Path;

/// One coherence block's channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBlock {
    /// M×M downlink matrix; row i is user i's channel.
    pub downlink: DMatrix<Complex64>,
    /// M×M user-to-user matrix; entry (i, k) is the channel from user k to
    /// user i. Diagonal unused. Only consulted by the sampled-INI mode.
    pub user_links: DMatrix<Complex64>,
}

/// Base-station channel estimate after `pilot_cycles` pilot cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    /// M×M MMSE estimate of the downlink matrix.
    pub estimate: DMatrix<Complex64>,
    /// Pilot cycles accumulated so far.
    pub pilot_cycles: usize,
    /// Per-entry posterior error variance, 1 / (1 + beta·f·P).
    pub error_variance: f64,
}

fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

fn complex_gaussian_matrix<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(m, m, |_, _| standard_complex(rng))
}

/// Samples a fresh block: i.i.d. unit-variance circularly symmetric complex
/// Gaussian entries for both matrices. Deterministic given the RNG state.
pub fn sample_block<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> ChannelBlock {
    let m = cfg.antennas;
    ChannelBlock {
        downlink: complex_gaussian_matrix(m, rng),
        user_links: complex_gaussian_matrix(m, rng),
    }
}

/// Closed-form MMSE posterior error variance after `beta` pilot cycles.
pub fn mmse_error_variance(beta: usize, cfg: &SystemConfig) -> f64 {
    1.0 / (1.0 + beta as f64 * cfg.pilot_power())
}

/// Running sufficient statistic for the uplink pilots of one block.
///
/// Each observed cycle contributes `sqrt(fP)·H + N` per entry with fresh
/// unit-variance noise `N`; the MMSE estimate is a deterministic rescaling of
/// the accumulated sum, so refining the estimate cycle by cycle costs one
/// matrix addition.
#[derive(Debug, Clone)]
pub struct PilotAccumulator {
    sum: DMatrix<Complex64>,
    cycles: usize,
}

impl PilotAccumulator {
    pub fn new(cfg: &SystemConfig) -> Self {
        PilotAccumulator {
            sum: DMatrix::zeros(cfg.antennas, cfg.antennas),
            cycles: 0,
        }
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    /// Observes one pilot cycle from every user.
    pub fn observe_cycle<R: Rng + ?Sized>(
        &mut self,
        truth: &ChannelBlock,
        cfg: &SystemConfig,
        rng: &mut R,
    ) {
        let amp = cfg.pilot_power().sqrt();
        let m = cfg.antennas;
        for i in 0..m {
            for j in 0..m {
                self.sum[(i, j)] += amp * truth.downlink[(i, j)] + standard_complex(rng);
            }
        }
        self.cycles += 1;
    }

    /// MMSE estimate from everything observed so far. With zero cycles this
    /// is the prior: a zero matrix with unit error variance.
    pub fn estimate(&self, cfg: &SystemConfig) -> ChannelEstimate {
        let beta = self.cycles;
        let err_var = mmse_error_variance(beta, cfg);
        let scale = cfg.pilot_power().sqrt() / (1.0 + beta as f64 * cfg.pilot_power());
        ChannelEstimate {
            estimate: self.sum.map(|z| z * scale),
            pilot_cycles: beta,
            error_variance: err_var,
        }
    }
}

/// Simulates `beta` pilot cycles against `truth` and returns the MMSE
/// estimate. Equivalent to accumulating cycle by cycle.
pub fn mmse_update<R: Rng + ?Sized>(
    truth: &ChannelBlock,
    beta: usize,
    cfg: &SystemConfig,
    rng: &mut R,
) -> ChannelEstimate {
    let mut acc = PilotAccumulator::new(cfg);
    for _ in 0..beta {
        acc.observe_cycle(truth, cfg, rng);
    }
    acc.estimate(cfg)
}

/// Binary dump of sampled blocks for reproducibility audits.
///
/// Layout (little endian): `u64` M, `u64` block count, then per block the
/// downlink matrix followed by the user-link matrix, each row-major with
/// interleaved real/imaginary `f64` per entry.
pub fn write_blocks<W: Write>(mut w: W, blocks: &[ChannelBlock]) -> io::Result<()> {
    let m = blocks.first().map_or(0, |b| b.downlink.nrows());
    w.write_all(&(m as u64).to_le_bytes())?;
    w.write_all(&(blocks.len() as u64).to_le_bytes())?;
    let mut dump = |mat: &DMatrix<Complex64>| -> io::Result<()> {
        for i in 0..m {
            for j in 0..m {
                w.write_all(&mat[(i, j)].re.to_le_bytes())?;
                w.write_all(&mat[(i, j)].im.to_le_bytes())?;
            }
        }
        Ok(())
    };
    for b in blocks {
        dump(&b.downlink)?;
        dump(&b.user_links)?;
    }
    Ok(())
}

pub fn write_blocks_to_path(path: &Path, blocks: &[ChannelBlock]) -> io::Result<()> {
    write_blocks(
        io::BufWriter::new(std::fs::File::create(path)?),
        blocks,
    )
}

/// Reads a dump produced by [`write_blocks`].
pub fn read_blocks<R: Read>(mut r: R) -> io::Result<Vec<ChannelBlock>> {
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let m = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let count = u64::from_le_bytes(word) as usize;
    let read_matrix = |r: &mut R| -> io::Result<DMatrix<Complex64>> {
        let mut mat = DMatrix::zeros(m, m);
        let mut buf = [0u8; 16];
        for i in 0..m {
            for j in 0..m {
                r.read_exact(&mut buf)?;
                let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
                let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
                mat[(i, j)] = Complex64::new(re, im);
            }
        }
        Ok(mat)
    };
    let mut blocks = Vec::with_capacity(count);
    for _ in 0..count {
        let downlink = read_matrix(&mut r)?;
        let user_links = read_matrix(&mut r)?;
        blocks.push(ChannelBlock {
            downlink,
            user_links,
        });
    }
    Ok(blocks)
}

pub fn read_blocks_from_path(path: &Path) -> io::Result<Vec<ChannelBlock>> {
    read_blocks(io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::block_rng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg() -> SystemConfig {
        SystemConfig {
            trials: 100,
            seed: 3,
            ..SystemConfig::default()
        }
    }

    #[test]
    fn same_seed_same_block() {
        let c = cfg();
        let a = sample_block(&c, &mut block_rng(c.seed, 0, 5));
        let b = sample_block(&c, &mut block_rng(c.seed, 0, 5));
        assert_eq!(a, b);
    }

    #[test]
    fn entries_have_unit_variance_and_zero_mean() {
        // 1563 blocks of 8x8 ~ 1e5 entries.
        let c = cfg();
        let mut rng = block_rng(c.seed, 1, 0);
        let mut power = 0.0;
        let mut mean = Complex64::new(0.0, 0.0);
        let mut n = 0usize;
        for _ in 0..1563 {
            let b = sample_block(&c, &mut rng);
            for z in b.downlink.iter() {
                power += z.norm_sqr();
                mean += z;
                n += 1;
            }
        }
        power /= n as f64;
        mean /= n as f64;
        assert!((power - 1.0).abs() < 0.01, "mean |h|^2 = {power}");
        assert!(mean.re.abs() < 0.01 && mean.im.abs() < 0.01, "mean = {mean}");
    }

    #[test]
    fn zero_cycles_gives_prior() {
        let c = cfg();
        let block = sample_block(&c, &mut block_rng(c.seed, 2, 0));
        let est = mmse_update(&block, 0, &c, &mut block_rng(c.seed, 2, 1));
        assert!(est.estimate.iter().all(|z| z.norm_sqr() == 0.0));
        assert_eq!(est.error_variance, 1.0);
        assert_eq!(est.pilot_cycles, 0);
    }

    #[test]
    fn many_pilots_recover_the_channel() {
        // beta = 1e6 at fP = 1 drives the relative error below 1e-2.
        let c = SystemConfig {
            feedback_fraction: 0.1,
            power: 10.0,
            ..cfg()
        };
        let mut rng = block_rng(c.seed, 3, 0);
        let block = sample_block(&c, &mut rng);
        // Single pilot of power beta*fP is the same sufficient statistic as
        // beta pilots of power fP, so simulate the equivalent one-shot form.
        let big = SystemConfig {
            feedback_fraction: 1.0,
            power: 1e6,
            ..c
        };
        let est = mmse_update(&block, 1, &big, &mut rng);
        let err = (&est.estimate - &block.downlink).norm() / block.downlink.norm();
        assert!(err < 1e-2, "relative error {err}");
    }

    #[test]
    fn posterior_error_variance_matches_closed_form() {
        // beta=5, f=0.1, P=10: err_var = 1/6, measured over 1e4 trials.
        let c = SystemConfig {
            power: 10.0,
            feedback_fraction: 0.1,
            ..cfg()
        };
        assert_relative_eq!(mmse_error_variance(5, &c), 1.0 / 6.0, max_relative = 1e-12);
        let trials = 10_000;
        let mut sq = 0.0;
        let mut n = 0usize;
        for b in 0..trials {
            let mut rng = block_rng(c.seed, 4, b);
            let block = sample_block(&c, &mut rng);
            let est = mmse_update(&block, 5, &c, &mut rng);
            for (e, h) in est.estimate.iter().zip(block.downlink.iter()) {
                sq += (h - e).norm_sqr();
                n += 1;
            }
        }
        let measured = sq / n as f64;
        assert!(
            (measured - 1.0 / 6.0).abs() < 0.01,
            "measured error variance {measured}"
        );
    }

    #[test]
    fn estimate_is_orthogonal_to_error() {
        // E[h_hat * conj(h)] per entry = 1 - err_var.
        let c = cfg();
        let beta = 3;
        let expect = 1.0 - mmse_error_variance(beta, &c);
        let mut corr = Complex64::new(0.0, 0.0);
        let mut n = 0usize;
        for b in 0..4000 {
            let mut rng = block_rng(c.seed, 5, b);
            let block = sample_block(&c, &mut rng);
            let est = mmse_update(&block, beta, &c, &mut rng);
            for (e, h) in est.estimate.iter().zip(block.downlink.iter()) {
                corr += e * h.conj();
                n += 1;
            }
        }
        corr /= n as f64;
        assert!((corr.re - expect).abs() < 0.01, "re = {}, want {expect}", corr.re);
        assert!(corr.im.abs() < 0.01);
    }

    #[test]
    fn accumulated_pilots_equal_one_big_pilot() {
        // beta pilots at power fP give the same posterior variance as one
        // pilot at power beta*fP.
        let c = cfg();
        for beta in [1usize, 4, 9] {
            let one_shot = SystemConfig {
                feedback_fraction: 1.0,
                power: beta as f64 * c.pilot_power(),
                ..c
            };
            assert_relative_eq!(
                mmse_error_variance(1, &one_shot),
                mmse_error_variance(beta, &c),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn dump_round_trips() {
        let c = cfg();
        let mut rng = block_rng(c.seed, 6, 0);
        let blocks: Vec<_> = (0..3).map(|_| sample_block(&c, &mut rng)).collect();
        let mut buf = Vec::new();
        write_blocks(&mut buf, &blocks).unwrap();
        assert_eq!(buf.len(), 16 + 3 * 2 * 64 * 16);
        let back = read_blocks(buf.as_slice()).unwrap();
        assert_eq!(blocks, back);
    }

    proptest! {
        #[test]
        fn error_variance_decreases_in_beta_and_pilot_power(
            beta in 1usize..50,
            f in 0.01f64..1.0,
            p in 0.1f64..100.0,
        ) {
            let c = SystemConfig {
                feedback_fraction: f,
                power: p,
                ..cfg()
            };
            prop_assert!(mmse_error_variance(beta + 1, &c) < mmse_error_variance(beta, &c));
            let stronger = SystemConfig { power: p * 1.5, ..c };
            prop_assert!(mmse_error_variance(beta, &stronger) < mmse_error_variance(beta, &c));
        }
    }
}
