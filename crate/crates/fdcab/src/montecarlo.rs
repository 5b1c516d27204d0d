//! Symbol-level Monte Carlo simulation of both training protocols.
//!
//! Rates are computed as `log2(1 + SINR)` from sampled channels, MMSE
//! estimates, and zero-forcing precoders, with interference treated as
//! noise; pilot, noise, and data waveforms are never materialized. One pass
//! over a block yields the per-cycle rate pair for every pilot count at
//! once, because the estimate refines incrementally, so ergodic rate tables
//! for a whole training grid cost a single sweep per block.
//!
//! Every block owns an RNG stream derived from `(seed, scope, block index)`;
//! aggregation folds an ordered buffer, so results are bitwise identical for
//! any worker count.

use crate::channel::{sample_block, ChannelBlock, PilotAccumulator};
use crate::config::SystemConfig;
use crate::precoding::{link_powers, zf_matrix, Precoder};
use crate::rates::{Estimate, PerCycleRates};
use crate::rng::block_rng;
use rand::Rng;
use rayon::prelude::*;

/// How inter-node interference enters the training-phase SINR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IniModel {
    /// Deterministic power alpha·f·P added to the noise floor (the default,
    /// and the model every analytical expression assumes).
    #[default]
    DeterministicPower,
    /// Per-pair sampled gains: alpha·f·P·|g_ik|^2 with unit-mean |g_ik|^2
    /// drawn from the block's user-to-user channels. Sensitivity studies
    /// only; excluded from acceptance checks.
    SampledGains,
}

/// Per-symbol rates of one simulated block for every pilot count.
/// `free[b-1]` / `ini[b-1]` are the interference-free and with-INI rates
/// with `b` pilot cycles accumulated; `genie` is the perfect-CSI rate on the
/// same channel realization (used for paired loss measurements).
#[derive(Debug, Clone)]
pub struct BlockRates {
    pub genie: f64,
    pub free: Vec<f64>,
    pub ini: Vec<f64>,
}

fn mean_rate_free(cfg: &SystemConfig, truth: &ChannelBlock, pre: &Precoder) -> f64 {
    let lp = link_powers(truth, pre, cfg);
    let m = cfg.antennas as f64;
    lp.signal
        .iter()
        .zip(&lp.interference)
        .map(|(s, i)| (1.0 + s / (1.0 + i)).log2())
        .sum::<f64>()
        / m
}

fn mean_rate_pair(
    cfg: &SystemConfig,
    truth: &ChannelBlock,
    pre: &Precoder,
    ini_model: IniModel,
) -> (f64, f64) {
    let lp = link_powers(truth, pre, cfg);
    let m = cfg.antennas;
    let ini_power = cfg.ini_power();
    let mut free = 0.0;
    let mut ini = 0.0;
    for k in 0..m {
        let s = lp.signal[k];
        let i = lp.interference[k];
        free += (1.0 + s / (1.0 + i)).log2();
        match ini_model {
            IniModel::DeterministicPower => {
                ini += (1.0 + s / (1.0 + i + ini_power)).log2();
            }
            IniModel::SampledGains => {
                // Average over the M-1 interfering users' pilot symbols.
                let mut acc = 0.0;
                for j in 0..m {
                    if j != k {
                        let gain = truth.user_links[(k, j)].norm_sqr();
                        acc += (1.0 + s / (1.0 + i + ini_power * gain)).log2();
                    }
                }
                ini += acc / (m as f64 - 1.0);
            }
        }
    }
    (free / m as f64, ini / m as f64)
}

/// Simulates one block: genie rate plus the (free, ini) rate pair for every
/// pilot count `1..=max_pilots`. Resamples the block on a degenerate
/// (singular-estimate) draw.
pub fn per_block_rates<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    max_pilots: usize,
    ini_model: IniModel,
    rng: &mut R,
) -> BlockRates {
    'resample: for _attempt in 0..64 {
        let truth = sample_block(cfg, rng);
        let genie_pre = match zf_matrix(&truth.downlink) {
            Ok(p) => p,
            Err(_) => continue 'resample,
        };
        let genie = mean_rate_free(cfg, &truth, &genie_pre);
        let mut acc = PilotAccumulator::new(cfg);
        let mut free = Vec::with_capacity(max_pilots);
        let mut ini = Vec::with_capacity(max_pilots);
        for _ in 0..max_pilots {
            acc.observe_cycle(&truth, cfg, rng);
            let pre = match zf_matrix(&acc.estimate(cfg).estimate) {
                Ok(p) => p,
                Err(_) => continue 'resample,
            };
            let (f, i) = mean_rate_pair(cfg, &truth, &pre, ini_model);
            free.push(f);
            ini.push(i);
        }
        return BlockRates { genie, free, ini };
    }
    unreachable!("repeated singular draws from a continuous fading distribution");
}

/// Per-cycle downlink rates of one simulated full-duplex block.
/// Index 0 corresponds to cycle 2, the first cycle with CSI; cycle 1 is
/// silent on the downlink.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTrace {
    /// Rate at the user's own pilot symbol of each cycle (no INI).
    pub no_ini_rates: Vec<f64>,
    /// Rate at the other users' pilot symbols of each cycle (INI present).
    pub ini_rates: Vec<f64>,
    /// Rate in the post-training data phase.
    pub data_rate: f64,
}

fn check_sim_duration(cfg: &SystemConfig, t_tr: usize) {
    assert!(
        t_tr % cfg.antennas == 0 && t_tr >= cfg.antennas && t_tr < cfg.block_len,
        "training duration {t_tr} must be a multiple of M in [M, T)"
    );
}

/// Simulates one CAB block with the deterministic INI model.
pub fn simulate_cab<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    t_cab: usize,
    rng: &mut R,
) -> BlockTrace {
    simulate_cab_with(cfg, t_cab, IniModel::DeterministicPower, rng)
}

/// Simulates one CAB block: cycle `j` transmits with the estimate built from
/// the previous `j-1` cycles' pilots, and the data phase uses all
/// `t_cab / M` pilots.
pub fn simulate_cab_with<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    t_cab: usize,
    ini_model: IniModel,
    rng: &mut R,
) -> BlockTrace {
    check_sim_duration(cfg, t_cab);
    let cycles = t_cab / cfg.antennas;
    let rates = per_block_rates(cfg, cycles, ini_model, rng);
    BlockTrace {
        no_ini_rates: rates.free[..cycles - 1].to_vec(),
        ini_rates: rates.ini[..cycles - 1].to_vec(),
        data_rate: rates.free[cycles - 1],
    }
}

/// Simulates one half-duplex block: training symbols carry no downlink rate,
/// then the data phase runs with the full estimate.
pub fn simulate_hd<R: Rng + ?Sized>(cfg: &SystemConfig, t_hd: usize, rng: &mut R) -> BlockTrace {
    check_sim_duration(cfg, t_hd);
    let cycles = t_hd / cfg.antennas;
    'resample: for _attempt in 0..64 {
        let truth = sample_block(cfg, rng);
        let mut acc = PilotAccumulator::new(cfg);
        for _ in 0..cycles {
            acc.observe_cycle(&truth, cfg, rng);
        }
        let pre = match zf_matrix(&acc.estimate(cfg).estimate) {
            Ok(p) => p,
            Err(_) => continue 'resample,
        };
        return BlockTrace {
            no_ini_rates: vec![0.0; cycles - 1],
            ini_rates: vec![0.0; cycles - 1],
            data_rate: mean_rate_free(cfg, &truth, &pre),
        };
    }
    unreachable!("repeated singular draws from a continuous fading distribution");
}

/// Spectral efficiency of one trace under the block-level time weighting.
pub fn trace_efficiency(cfg: &SystemConfig, t_tr: usize, trace: &BlockTrace) -> f64 {
    let m = cfg.antennas as f64;
    let mut sum = (cfg.block_len - t_tr) as f64 * trace.data_rate;
    for (no_ini, ini) in trace.no_ini_rates.iter().zip(&trace.ini_rates) {
        sum += no_ini + (m - 1.0) * ini;
    }
    sum / cfg.block_len as f64
}

/// Ergodic spectral efficiency across traces: mean and standard error of the
/// per-block efficiencies.
pub fn ergodic_efficiency(cfg: &SystemConfig, t_tr: usize, traces: &[BlockTrace]) -> Estimate {
    assert!(traces.len() >= 2, "need at least two traces");
    Estimate::from_samples(traces.iter().map(|tr| trace_efficiency(cfg, t_tr, tr)))
}

/// Ensemble-mean per-cycle rates over many blocks; drop-in rate source for
/// the optimizer's simulated mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTables {
    free: Vec<f64>,
    ini: Vec<f64>,
    pub blocks: usize,
}

impl RateTables {
    pub fn max_pilots(&self) -> usize {
        self.free.len()
    }
}

impl PerCycleRates for RateTables {
    fn data_rate(&self, cycles: usize) -> f64 {
        self.free[cycles - 1]
    }

    fn ini_rate(&self, cycles: usize) -> f64 {
        self.ini[cycles - 1]
    }
}

/// Estimates ergodic rate tables for pilot counts `1..=max_pilots` over
/// `cfg.trials` blocks, in parallel, deterministically.
pub fn estimate_rate_tables(cfg: &SystemConfig, max_pilots: usize, scope: u64) -> RateTables {
    let per_block: Vec<BlockRates> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(cfg.seed, scope, b);
            per_block_rates(cfg, max_pilots, IniModel::DeterministicPower, &mut rng)
        })
        .collect();
    let n = per_block.len() as f64;
    let mut free = vec![0.0; max_pilots];
    let mut ini = vec![0.0; max_pilots];
    for br in &per_block {
        for i in 0..max_pilots {
            free[i] += br.free[i];
            ini[i] += br.ini[i];
        }
    }
    for i in 0..max_pilots {
        free[i] /= n;
        ini[i] /= n;
    }
    RateTables {
        free,
        ini,
        blocks: per_block.len(),
    }
}

/// Measured per-user rate losses against the paired genie rate, per pilot
/// count. Index `b-1` holds the losses with `b` pilot cycles.
#[derive(Debug, Clone)]
pub struct TrainingLossEstimates {
    /// Loss at a with-INI training symbol.
    pub ini_loss: Vec<Estimate>,
    /// Loss at an interference-free (data or own-pilot) symbol.
    pub data_loss: Vec<Estimate>,
}

/// Monte Carlo rate-loss measurement for pilot counts `1..=max_pilots`:
/// the genie rate minus the achieved rate, paired per block.
pub fn training_loss_estimates(
    cfg: &SystemConfig,
    max_pilots: usize,
    scope: u64,
) -> TrainingLossEstimates {
    let per_block: Vec<BlockRates> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(cfg.seed, scope, b);
            per_block_rates(cfg, max_pilots, IniModel::DeterministicPower, &mut rng)
        })
        .collect();
    let ini_loss = (0..max_pilots)
        .map(|i| Estimate::from_samples(per_block.iter().map(|br| br.genie - br.ini[i])))
        .collect();
    let data_loss = (0..max_pilots)
        .map(|i| Estimate::from_samples(per_block.iter().map(|br| br.genie - br.free[i])))
        .collect();
    TrainingLossEstimates { ini_loss, data_loss }
}

/// Measured full-duplex gain over half-duplex at equal training duration:
/// only the training cycles differ between the protocols, so the gain is the
/// time-weighted sum of the training-phase rates.
pub fn measured_gain(cfg: &SystemConfig, t_tr: usize, scope: u64) -> Estimate {
    check_sim_duration(cfg, t_tr);
    let cycles = t_tr / cfg.antennas;
    let m = cfg.antennas as f64;
    let samples: Vec<f64> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(cfg.seed, scope, b);
            let br = per_block_rates(
                cfg,
                cycles.saturating_sub(1),
                IniModel::DeterministicPower,
                &mut rng,
            );
            br.free
                .iter()
                .zip(&br.ini)
                .map(|(f, i)| f + (m - 1.0) * i)
                .sum::<f64>()
                / cfg.block_len as f64
        })
        .collect();
    Estimate::from_samples(samples)
}
