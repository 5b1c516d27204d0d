//! Training-duration optimization: closed-form approximations, brute-force
//! grid optima, loss bounds against the genie system, and the full-duplex
//! gain lower bound.
//!
//! The closed forms come from a marginal-utility argument: the optimum sits
//! where the data-phase improvement from one more training cycle equals the
//! rate given up during that cycle. That calculus is carried out on
//! natural-log rate expressions (its Maclaurin steps are base-free only
//! there), so the duration constants below convert bits-based rates by ln 2,
//! and the square-root loss bounds convert back with log2(e). Durations
//! themselves are symbol counts, independent of the log base.
//!
//! Brute force is the ground truth: closed forms are validated against it,
//! never the reverse.

use crate::config::SystemConfig;
use crate::rates::{cab_efficiency, hd_efficiency, DurationError, PerCycleRates, RateModel};
use std::f64::consts::{LN_2, LOG2_E};

/// Which training strategy is being optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Cab,
    HalfDuplex,
}

/// Outcome of a training-duration optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingPlan {
    /// Grid-optimal training symbols (multiple of M; ties break small).
    pub exact_duration: usize,
    /// Closed-form approximation before rounding.
    pub approx_duration: f64,
    /// Spectral efficiency at the grid optimum.
    pub rate_at_exact: f64,
    /// Spectral efficiency at the rounded approximation.
    pub rate_at_approx: f64,
}

fn duration_from_constant(c: f64, t_block: f64) -> f64 {
    ((4.0 * c * t_block + 1.0).sqrt() - 1.0) / (2.0 * c)
}

/// Closed-form approximation of the optimal full-duplex training duration:
/// `(sqrt(4cT+1) - 1) / (2c)` with `c = f·L/M`, `L` the invariant INI loss
/// in natural-log units. With `alpha = 0` training costs nothing, so the
/// users train for the whole block except the final data cycle.
pub fn cab_duration_approx(cfg: &SystemConfig, model: &RateModel) -> f64 {
    let loss_nats = model.invariant_ini_loss * LN_2;
    if loss_nats <= 0.0 {
        return (cfg.block_len - cfg.antennas) as f64;
    }
    let c = cfg.feedback_fraction * loss_nats / cfg.antennas as f64;
    duration_from_constant(c, cfg.block_len as f64)
}

/// Large-`cT` simplification of [`cab_duration_approx`]: `sqrt(MT/(f·L))`.
pub fn cab_duration_approx_simplified(cfg: &SystemConfig, model: &RateModel) -> f64 {
    let loss_nats = model.invariant_ini_loss * LN_2;
    if loss_nats <= 0.0 {
        return (cfg.block_len - cfg.antennas) as f64;
    }
    (cfg.antennas as f64 * cfg.block_len as f64 / (cfg.feedback_fraction * loss_nats)).sqrt()
}

/// Closed-form approximation of the optimal half-duplex training duration:
/// same root formula with `c = f·R/( M-1)`, `R` the genie rate in nats.
pub fn hd_duration_approx(cfg: &SystemConfig, model: &RateModel) -> f64 {
    let c = cfg.feedback_fraction * model.zf_rate * LN_2 / (cfg.antennas as f64 - 1.0);
    duration_from_constant(c, cfg.block_len as f64)
}

/// Large-`cT` simplification of [`hd_duration_approx`]: `sqrt((M-1)T/(f·R))`.
pub fn hd_duration_approx_simplified(cfg: &SystemConfig, model: &RateModel) -> f64 {
    ((cfg.antennas as f64 - 1.0) * cfg.block_len as f64
        / (cfg.feedback_fraction * model.zf_rate * LN_2))
        .sqrt()
}

/// Rounds a real duration to the nearest whole training cycle, clamped to
/// the grid `[M, T - M]`.
pub fn round_to_cycle(cfg: &SystemConfig, duration: f64) -> usize {
    let m = cfg.antennas;
    let cycles = (duration / m as f64).round().max(1.0) as usize;
    (cycles * m).clamp(m, cfg.max_training())
}

/// Evaluates the strategy's efficiency at every multiple of M in `[M, T-M]`
/// and returns the argmax (ties break toward the smaller duration), together
/// with the closed-form approximation and the efficiencies at both.
///
/// `rates` supplies the per-cycle rates (analytic model or Monte Carlo
/// tables); `model` always supplies the deterministic closed form inside the
/// approximation so optimizer output is reproducible bit for bit.
pub fn brute_force_optimum<R: PerCycleRates>(
    cfg: &SystemConfig,
    model: &RateModel,
    rates: &R,
    strategy: Strategy,
) -> TrainingPlan {
    let m = cfg.antennas;
    let t_block = cfg.block_len as f64;
    let max_cycles = cfg.max_training() / m;

    let mut training_sum = 0.0;
    let mut best_t = m;
    let mut best_ar = f64::MIN;
    for n in 1..=max_cycles {
        if matches!(strategy, Strategy::Cab) && n >= 2 {
            let pilots = n - 1;
            training_sum +=
                rates.data_rate(pilots) + (m as f64 - 1.0) * rates.ini_rate(pilots);
        }
        let t = n * m;
        let data = (t_block - t as f64) * rates.data_rate(n);
        let ar = match strategy {
            Strategy::Cab => (data + training_sum) / t_block,
            Strategy::HalfDuplex => data / t_block,
        };
        if ar > best_ar {
            best_ar = ar;
            best_t = t;
        }
    }

    let approx = match strategy {
        Strategy::Cab => cab_duration_approx(cfg, model),
        Strategy::HalfDuplex => hd_duration_approx(cfg, model),
    };
    let rounded = round_to_cycle(cfg, approx);
    let rate_at_approx = match strategy {
        Strategy::Cab => cab_efficiency(cfg, rates, rounded),
        Strategy::HalfDuplex => hd_efficiency(cfg, rates, rounded),
    }
    .expect("rounded approximation lies on the grid");

    TrainingPlan {
        exact_duration: best_t,
        approx_duration: approx,
        rate_at_exact: best_ar,
        rate_at_approx,
    }
}

/// Upper bound on the full-duplex efficiency loss against the genie system:
/// `2·sqrt(M·L/(f·T))` with `L` in nats, reported in bits. Asymptotic in T;
/// finite-block comparisons reinstate the dropped `2M·R/T` head term (and
/// the logarithmic cycle-sum term) as explicit slack.
pub fn cab_loss_bound(cfg: &SystemConfig, model: &RateModel) -> f64 {
    let loss_nats = model.invariant_ini_loss * LN_2;
    LOG2_E
        * 2.0
        * (cfg.antennas as f64 * loss_nats / (cfg.feedback_fraction * cfg.block_len as f64))
            .sqrt()
}

/// Upper bound on the half-duplex efficiency loss against the genie system:
/// `2·sqrt((M-1)·R/(f·T))` with `R` in nats, reported in bits.
pub fn hd_loss_bound(cfg: &SystemConfig, model: &RateModel) -> f64 {
    let zf_nats = model.zf_rate * LN_2;
    LOG2_E
        * 2.0
        * ((cfg.antennas as f64 - 1.0) * zf_nats / (cfg.feedback_fraction * cfg.block_len as f64))
            .sqrt()
}

/// Lower bound on the full-duplex gain over half-duplex at equal training
/// duration: `(t/T)(R - L)` minus explicit finite-block slack
/// `(2M/T)·R + (t/T)·((M-1)/(M·f))·log2(t-1)/(t-2)`.
pub fn gain_lower_bound(
    cfg: &SystemConfig,
    model: &RateModel,
    t_tr: usize,
) -> Result<f64, DurationError> {
    let m = cfg.antennas;
    if t_tr % m != 0 {
        return Err(DurationError::NotCycleAligned { t: t_tr, m });
    }
    if t_tr < 2 * m || t_tr >= cfg.block_len {
        return Err(DurationError::OutOfRange {
            t: t_tr,
            min: 2 * m,
            max: cfg.max_training(),
        });
    }
    let t = t_tr as f64;
    let t_block = cfg.block_len as f64;
    let mf = m as f64;
    let main = (t / t_block) * (model.zf_rate - model.invariant_ini_loss);
    let head = 2.0 * mf / t_block * model.zf_rate;
    let jensen =
        (t / t_block) * ((mf - 1.0) / (mf * cfg.feedback_fraction)) * (t - 1.0).log2() / (t - 2.0);
    Ok(main - head - jensen)
}
