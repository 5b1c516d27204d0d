//! Closed-form rate and rate-loss expressions, and the block-level spectral
//! efficiency of both training strategies.
//!
//! All rates are reported in bits/s/Hz (base-2 logs). The genie-aided
//! zero-forcing rate has the closed form `log2(e) · e^(M/P) · E1(M/P)`
//! because the effective beam gain under ZF with perfect CSI is unit-mean
//! exponential; a Monte Carlo estimator of the same quantity serves as its
//! independent cross-check.
//!
//! Spectral efficiency aggregation is generic over a [`PerCycleRates`]
//! source, so the brute-force optimizer runs unchanged against either the
//! analytic bound-based rates (this module) or Monte Carlo rate tables
//! (`montecarlo::RateTables`).

use crate::channel::sample_block;
use crate::config::SystemConfig;
use crate::expint::e1_scaled;
use crate::precoding::{link_powers, zf_matrix};
use crate::rng::block_rng;
use std::f64::consts::LOG2_E;
use thiserror::Error;

/// Mean and standard error of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples<I: IntoIterator<Item = f64>>(samples: I) -> Estimate {
        let mut n = 0usize;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for x in samples {
            n += 1;
            sum += x;
            sumsq += x * x;
        }
        let nf = n as f64;
        let mean = sum / nf;
        let var = (sumsq / nf - mean * mean).max(0.0);
        Estimate {
            mean,
            std_err: if n > 1 { (var / (nf - 1.0)).sqrt() } else { 0.0 },
            samples: n,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DurationError {
    #[error("training duration {t} is not a multiple of the cycle length {m}")]
    NotCycleAligned { t: usize, m: usize },
    #[error("training duration {t} outside the grid [{min}, {max}]")]
    OutOfRange { t: usize, min: usize, max: usize },
}

/// Per-symbol rates as a function of accumulated pilot cycles. The data
/// phase and the user's own pilot symbol share the interference-free rate;
/// the other users' pilot symbols add INI.
pub trait PerCycleRates {
    /// Rate of an interference-free downlink symbol with `cycles` pilots
    /// collected per user (data phase, or the own-pilot symbol of a cycle).
    fn data_rate(&self, cycles: usize) -> f64;
    /// Rate of a downlink symbol received while another user is sending a
    /// pilot, with `cycles` pilots collected.
    fn ini_rate(&self, cycles: usize) -> f64;
}

/// Genie-aided per-user ZF rate, `log2(e) · e^(M/P) · E1(M/P)`.
pub fn genie_zf_rate(cfg: &SystemConfig) -> f64 {
    LOG2_E * e1_scaled(cfg.antennas as f64 / cfg.power)
}

/// Monte Carlo estimate of the genie rate: sample channels, apply ZF with
/// perfect CSI, average per-user `log2(1 + SINR)`. Oracle for the closed
/// form above. `scope` separates RNG streams between callers.
pub fn genie_zf_rate_mc(cfg: &SystemConfig, trials: usize, scope: u64) -> Estimate {
    let samples = (0..trials).map(|b| {
        let mut rng = block_rng(cfg.seed, scope, b as u64);
        loop {
            let block = sample_block(cfg, &mut rng);
            if let Ok(pre) = zf_matrix(&block.downlink) {
                let lp = link_powers(&block, &pre, cfg);
                let m = cfg.antennas as f64;
                return lp
                    .signal
                    .iter()
                    .zip(&lp.interference)
                    .map(|(s, i)| (1.0 + s / (1.0 + i)).log2())
                    .sum::<f64>()
                    / m;
            }
        }
    });
    Estimate::from_samples(samples)
}

/// Invariant INI rate loss: the residual training-phase loss once pilots
/// have driven the inter-beam interference to zero.
pub fn invariant_ini_loss(cfg: &SystemConfig) -> f64 {
    let ini = cfg.ini_power();
    let per_stream = cfg.power / cfg.antennas as f64;
    ((1.0 + ini) / (1.0 + ini / (1.0 + per_stream))).log2()
}

/// Analytic rate model for one operating point: the genie rate plus the
/// bound-based rate-loss expressions, with rates floored at zero.
#[derive(Debug, Clone, Copy)]
pub struct RateModel {
    antennas: f64,
    power: f64,
    feedback: f64,
    ini_power: f64,
    /// Genie-aided per-user rate (bits/s/Hz).
    pub zf_rate: f64,
    /// Training-phase loss floor as pilots accumulate.
    pub invariant_ini_loss: f64,
}

impl RateModel {
    /// Model with the deterministic closed-form genie rate.
    pub fn new(cfg: &SystemConfig) -> RateModel {
        Self::with_zf_rate(cfg, genie_zf_rate(cfg))
    }

    /// Model with a caller-supplied genie rate (e.g. a Monte Carlo estimate).
    pub fn with_zf_rate(cfg: &SystemConfig, zf_rate: f64) -> RateModel {
        RateModel {
            antennas: cfg.antennas as f64,
            power: cfg.power,
            feedback: cfg.feedback_fraction,
            ini_power: cfg.ini_power(),
            zf_rate,
            invariant_ini_loss: invariant_ini_loss(cfg),
        }
    }

    /// Data-phase rate-loss bound after `trained_symbols` pilot symbols:
    /// `log2(1 + (P/M)(M-1) / (1 + T_tr·f·P/M))`.
    pub fn data_phase_loss(&self, trained_symbols: usize) -> f64 {
        let m = self.antennas;
        let per_stream = self.power / m;
        let pilot_energy = trained_symbols as f64 * self.feedback * self.power / m;
        (1.0 + per_stream * (m - 1.0) / (1.0 + pilot_energy)).log2()
    }

    /// Training-phase rate-loss bound with INI after `cycles` pilot cycles:
    /// `log2((1 + (P/M)(M-1)/(1+beta·f·P) + alpha·f·P) / (1 + alpha·f·P/(1+P/M)))`.
    ///
    /// The pilot energy `beta·f·P` here equals the data-phase expression's
    /// `T_tr·f·P/M` at `T_tr = beta·M`; both count total accumulated pilot
    /// energy per user.
    pub fn training_loss_with_ini(&self, cycles: usize) -> f64 {
        assert!(cycles >= 1, "training loss needs at least one pilot cycle");
        let m = self.antennas;
        let per_stream = self.power / m;
        let pilot_energy = cycles as f64 * self.feedback * self.power;
        let ibi = per_stream * (m - 1.0) / (1.0 + pilot_energy);
        ((1.0 + ibi + self.ini_power) / (1.0 + self.ini_power / (1.0 + per_stream))).log2()
    }
}

impl PerCycleRates for RateModel {
    fn data_rate(&self, cycles: usize) -> f64 {
        let t_tr = cycles * self.antennas as usize;
        (self.zf_rate - self.data_phase_loss(t_tr)).max(0.0)
    }

    fn ini_rate(&self, cycles: usize) -> f64 {
        (self.zf_rate - self.training_loss_with_ini(cycles)).max(0.0)
    }
}

fn check_duration(cfg: &SystemConfig, t: usize) -> Result<(), DurationError> {
    let m = cfg.antennas;
    if t % m != 0 {
        return Err(DurationError::NotCycleAligned { t, m });
    }
    let max = cfg.max_training();
    if t < m || t > max {
        return Err(DurationError::OutOfRange { t, min: m, max });
    }
    Ok(())
}

/// Spectral efficiency of the full-duplex strategy with `t_cab` training
/// symbols: the data phase plus, for every cycle after the first, one
/// interference-free symbol and M-1 symbols degraded by INI, all divided by
/// the block length. The first cycle carries no downlink data (no CSI yet).
pub fn cab_efficiency<R: PerCycleRates>(
    cfg: &SystemConfig,
    rates: &R,
    t_cab: usize,
) -> Result<f64, DurationError> {
    check_duration(cfg, t_cab)?;
    let m = cfg.antennas;
    let cycles = t_cab / m;
    let mut sum = (cfg.block_len - t_cab) as f64 * rates.data_rate(cycles);
    for j in 2..=cycles {
        let pilots = j - 1;
        sum += rates.data_rate(pilots) + (m as f64 - 1.0) * rates.ini_rate(pilots);
    }
    Ok(sum / cfg.block_len as f64)
}

/// Spectral efficiency of the half-duplex strategy: training symbols carry
/// no downlink rate, the remaining fraction of the block runs at the
/// post-training data rate.
pub fn hd_efficiency<R: PerCycleRates>(
    cfg: &SystemConfig,
    rates: &R,
    t_hd: usize,
) -> Result<f64, DurationError> {
    check_duration(cfg, t_hd)?;
    let cycles = t_hd / cfg.antennas;
    Ok((cfg.block_len - t_hd) as f64 / cfg.block_len as f64 * rates.data_rate(cycles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig3_cfg() -> SystemConfig {
        SystemConfig {
            antennas: 8,
            block_len: 2000,
            power: 10.0,
            feedback_fraction: 0.1,
            ini_factor: 0.1,
            trials: 100,
            seed: 17,
        }
    }

    #[test]
    fn genie_rate_matches_monte_carlo() {
        // 1e5 trials vs the closed form, 3 standard errors.
        let cfg = fig3_cfg();
        let closed = genie_zf_rate(&cfg);
        assert_relative_eq!(closed, 0.9972563074474639, max_relative = 1e-12);
        let mc = genie_zf_rate_mc(&cfg, 100_000, 100);
        assert!(
            (mc.mean - closed).abs() <= 3.0 * mc.std_err,
            "mc {} +/- {} vs closed {closed}",
            mc.mean,
            mc.std_err
        );
    }

    #[test]
    fn genie_rate_vanishes_at_zero_snr_and_grows_with_power() {
        let mut cfg = fig3_cfg();
        cfg.power = 1e-9;
        assert!(genie_zf_rate(&cfg) < 1e-9);
        let mut last = 0.0;
        for p in [1.0, 10.0, 100.0] {
            cfg.power = p;
            let r = genie_zf_rate(&cfg);
            assert!(r > last);
            last = r;
        }
    }

    #[test]
    fn data_phase_loss_reference_point() {
        // T_tr=0, M=8, P=10, f=0.1: log2(1 + 1.25*7) = log2(9.75).
        let model = RateModel::new(&fig3_cfg());
        assert_relative_eq!(
            model.data_phase_loss(0),
            3.2854022188622483,
            max_relative = 1e-12
        );
    }

    #[test]
    fn data_phase_loss_vanishes_with_infinite_training() {
        let model = RateModel::new(&fig3_cfg());
        assert!(model.data_phase_loss(1_000_000_000) < 1e-6);
    }

    #[test]
    fn data_phase_loss_maclaurin_tail() {
        // M=2 and pilot energy >> P: loss ~ log2(e)·(M-1)·M/(T_tr·f·P) ... with
        // M=2 the first-order tail is log2(e)·(P/2)/(T_tr·f·P/2).
        let cfg = SystemConfig {
            antennas: 2,
            block_len: 10_000_000,
            power: 10.0,
            feedback_fraction: 1.0,
            ..fig3_cfg()
        };
        let model = RateModel::new(&cfg);
        let t_tr = 1_000_000usize;
        let expect = LOG2_E * (cfg.power / 2.0) / (t_tr as f64 * cfg.power / 2.0);
        assert_relative_eq!(model.data_phase_loss(t_tr), expect, max_relative = 1e-3);
    }

    #[test]
    fn ini_loss_without_ini_reduces_to_pure_ibi() {
        let cfg = SystemConfig {
            ini_factor: 0.0,
            ..fig3_cfg()
        };
        let model = RateModel::new(&cfg);
        for beta in [1usize, 3, 10] {
            // Same accumulated pilot energy: beta cycles = beta*M symbols.
            assert_relative_eq!(
                model.training_loss_with_ini(beta),
                model.data_phase_loss(beta * 8),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn ini_loss_approaches_invariant_floor() {
        let model = RateModel::new(&fig3_cfg());
        let inv = model.invariant_ini_loss;
        assert_relative_eq!(inv, 0.07476776840197212, max_relative = 1e-12);
        assert_relative_eq!(
            model.training_loss_with_ini(1_000_000_000),
            inv,
            max_relative = 1e-6
        );
        // beta=5 sits strictly between the floor and the one-cycle loss.
        let mid = model.training_loss_with_ini(5);
        assert!(inv < mid && mid < model.training_loss_with_ini(1));
    }

    #[test]
    fn invariant_loss_edge_cases() {
        let mut cfg = fig3_cfg();
        cfg.ini_factor = 0.0;
        assert_eq!(invariant_ini_loss(&cfg), 0.0);
        // alpha -> infinity: ceiling log2(1 + P/M).
        cfg.ini_factor = 1e12;
        let ceiling = (1.0f64 + cfg.power / 8.0).log2();
        assert_relative_eq!(invariant_ini_loss(&cfg), ceiling, max_relative = 1e-9);
    }

    #[test]
    fn cab_efficiency_with_short_training_is_mostly_data() {
        // T_cab = 2M in a long block: the single post-first-cycle term is
        // negligible next to the data phase.
        let cfg = SystemConfig {
            block_len: 1_000_000,
            ..fig3_cfg()
        };
        let model = RateModel::new(&cfg);
        let t = 16;
        let ar = cab_efficiency(&cfg, &model, t).unwrap();
        let data_only =
            (cfg.block_len - t) as f64 / cfg.block_len as f64 * model.data_rate(2);
        assert_relative_eq!(ar, data_only, max_relative = 1e-3);
    }

    #[test]
    fn cab_efficiency_is_concave_where_rates_are_positive() {
        // The unfloored bound-based efficiency is concave on the cycle grid.
        // (The zero floor introduces one convex kink where early-cycle rates
        // clip, so the scan below assembles the raw expression directly.)
        let cfg = fig3_cfg();
        let model = RateModel::new(&cfg);
        let raw_ar = |t: usize| {
            let cycles = t / 8;
            let mut sum =
                (cfg.block_len - t) as f64 * (model.zf_rate - model.data_phase_loss(t));
            for j in 2..=cycles {
                let b = j - 1;
                sum += model.zf_rate - model.data_phase_loss(b * 8)
                    + 7.0 * (model.zf_rate - model.training_loss_with_ini(b));
            }
            sum / cfg.block_len as f64
        };
        let grid: Vec<usize> = (1..=cfg.max_training() / 8).map(|n| n * 8).collect();
        for w in grid.windows(3) {
            let (a, b, c) = (raw_ar(w[0]), raw_ar(w[1]), raw_ar(w[2]));
            assert!(
                c - 2.0 * b + a <= 1e-9,
                "second difference positive at t={}",
                w[1]
            );
        }
    }

    #[test]
    fn full_duplex_dominates_half_duplex_without_ini() {
        // alpha=0, f=1: every training symbol still carries data, so CAB is
        // pointwise at least HD at the same duration.
        let cfg = SystemConfig {
            ini_factor: 0.0,
            feedback_fraction: 1.0,
            ..fig3_cfg()
        };
        let model = RateModel::new(&cfg);
        for t in (8..=cfg.max_training()).step_by(8 * 10) {
            let c = cab_efficiency(&cfg, &model, t).unwrap();
            let h = hd_efficiency(&cfg, &model, t).unwrap();
            assert!(c >= h, "t={t}: cab {c} < hd {h}");
        }
    }

    #[test]
    fn hd_efficiency_dies_as_training_fills_the_block() {
        let cfg = fig3_cfg();
        let model = RateModel::new(&cfg);
        let near_full = cfg.max_training();
        let ar = hd_efficiency(&cfg, &model, near_full).unwrap();
        assert!(ar < 0.01);
        // Interior maximum exists: some interior point beats both edges.
        let first = hd_efficiency(&cfg, &model, 8).unwrap();
        let best = (1..=cfg.max_cycles() - 1)
            .map(|n| hd_efficiency(&cfg, &model, n * 8).unwrap())
            .fold(f64::MIN, f64::max);
        assert!(best > first && best > ar);
    }

    #[test]
    fn duration_preconditions_are_enforced() {
        let cfg = fig3_cfg();
        let model = RateModel::new(&cfg);
        assert!(matches!(
            cab_efficiency(&cfg, &model, 12),
            Err(DurationError::NotCycleAligned { .. })
        ));
        assert!(matches!(
            cab_efficiency(&cfg, &model, 2000),
            Err(DurationError::OutOfRange { .. })
        ));
        assert!(matches!(
            hd_efficiency(&cfg, &model, 0),
            Err(DurationError::OutOfRange { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn losses_decrease_in_training(
            beta in 1usize..200,
            db in -5.0f64..25.0,
            f in 0.05f64..1.0,
            alpha in 0.0f64..2.0,
        ) {
            let cfg = SystemConfig {
                power: crate::config::db_to_linear(db),
                feedback_fraction: f,
                ini_factor: alpha,
                ..fig3_cfg()
            };
            let model = RateModel::new(&cfg);
            prop_assert!(model.data_phase_loss((beta + 1) * 8) < model.data_phase_loss(beta * 8));
            prop_assert!(
                model.training_loss_with_ini(beta + 1) < model.training_loss_with_ini(beta)
            );
            // Training loss never drops below its invariant floor.
            prop_assert!(
                model.training_loss_with_ini(beta) >= model.invariant_ini_loss - 1e-12
            );
        }
    }
}
