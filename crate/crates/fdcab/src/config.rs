//! Scenario parameters shared by every other module.
//!
//! A [`SystemConfig`] describes one operating point of the downlink: an
//! `antennas`-antenna base station serving the same number of single-antenna
//! users over a coherence block of `block_len` symbols. Noise variance is
//! fixed at 1, so the base-station power `power` (linear scale) doubles as the
//! SNR; the CLI and config files accept SNR in dB and convert through
//! [`db_to_linear`].

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// All scalar parameters governing one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Base-station antennas M; also the number of users.
    pub antennas: usize,
    /// Coherence block length T in symbols.
    pub block_len: usize,
    /// Base-station average transmit power P, linear scale (= SNR, unit noise).
    pub power: f64,
    /// User feedback power fraction f in (0, 1]; users transmit pilots at f·P.
    pub feedback_fraction: f64,
    /// Inter-node interference strength factor alpha; INI power is alpha·f·P.
    pub ini_factor: f64,
    /// Monte Carlo repetitions.
    pub trials: usize,
    /// RNG seed.
    pub seed: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("M must be >= 2 (got {0})")]
    AntennaCount(usize),
    #[error("T must be >= 2M (got T={t}, M={m})")]
    BlockTooShort { t: usize, m: usize },
    #[error("f must satisfy 0 < f <= 1 (got {0})")]
    FeedbackFraction(String),
    #[error("alpha must be >= 0 (got {0})")]
    IniFactor(String),
    #[error("P must be > 0 (got {0})")]
    Power(String),
    #[error("trials must be >= 1")]
    Trials,
    #[error("failed to read config file: {0}")]
    Io(String),
    #[error("failed to parse config file: {0}")]
    Parse(String),
}

impl SystemConfig {
    /// Checks every invariant and returns the config unchanged if all hold.
    /// The first violated invariant is reported by name.
    pub fn validate(self) -> Result<Self, ConfigError> {
        if self.antennas < 2 {
            return Err(ConfigError::AntennaCount(self.antennas));
        }
        if self.block_len < 2 * self.antennas {
            return Err(ConfigError::BlockTooShort {
                t: self.block_len,
                m: self.antennas,
            });
        }
        if !(self.feedback_fraction > 0.0 && self.feedback_fraction <= 1.0) {
            return Err(ConfigError::FeedbackFraction(
                self.feedback_fraction.to_string(),
            ));
        }
        if !(self.ini_factor >= 0.0) {
            return Err(ConfigError::IniFactor(self.ini_factor.to_string()));
        }
        if !(self.power > 0.0) {
            return Err(ConfigError::Power(self.power.to_string()));
        }
        if self.trials == 0 {
            return Err(ConfigError::Trials);
        }
        Ok(self)
    }

    /// Number of whole training cycles that fit in the block.
    pub fn max_cycles(&self) -> usize {
        self.block_len / self.antennas
    }

    /// Largest training duration on the cycle grid `[M, T - M]`.
    pub fn max_training(&self) -> usize {
        ((self.block_len - self.antennas) / self.antennas) * self.antennas
    }

    /// Pilot energy accumulated per user per cycle, f·P.
    pub fn pilot_power(&self) -> f64 {
        self.feedback_fraction * self.power
    }

    /// Deterministic INI power alpha·f·P.
    pub fn ini_power(&self) -> f64 {
        self.ini_factor * self.pilot_power()
    }

    /// SNR of this config in dB.
    pub fn snr_db(&self) -> f64 {
        linear_to_db(self.power)
    }
}

impl Default for SystemConfig {
    /// The operating point used throughout the experiment defaults:
    /// M=8, T=2000, SNR=10 dB, f=alpha=0.1.
    fn default() -> Self {
        SystemConfig {
            antennas: 8,
            block_len: 2000,
            power: db_to_linear(10.0),
            feedback_fraction: 0.1,
            ini_factor: 0.1,
            trials: 10_000,
            seed: 42,
        }
    }
}

/// Converts an SNR in dB to linear power (unit noise variance).
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts linear power back to dB.
pub fn linear_to_db(p: f64) -> f64 {
    10.0 * p.log10()
}

/// On-disk scenario description. Every field is optional; CLI flags override
/// file values and anything left unset falls back to [`SystemConfig::default`].
///
/// ```toml
/// M = 8
/// T = 2000
/// snr_db = 10.0
/// f = 0.1
/// alpha = 0.1
/// trials = 10000
/// seed = 42
/// ```
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[serde(rename = "T")]
    pub t: Option<usize>,
    pub snr_db: Option<f64>,
    pub f: Option<f64>,
    pub alpha: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(e.to_string()))?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Fills a [`SystemConfig`] from this file, with `overrides` taking
    /// precedence and defaults closing the gaps. The result is validated.
    pub fn resolve(&self, overrides: &ConfigFile) -> Result<SystemConfig, ConfigError> {
        let d = SystemConfig::default();
        let cfg = SystemConfig {
            antennas: overrides.m.or(self.m).unwrap_or(d.antennas),
            block_len: overrides.t.or(self.t).unwrap_or(d.block_len),
            power: overrides
                .snr_db
                .or(self.snr_db)
                .map(db_to_linear)
                .unwrap_or(d.power),
            feedback_fraction: overrides.f.or(self.f).unwrap_or(d.feedback_fraction),
            ini_factor: overrides.alpha.or(self.alpha).unwrap_or(d.ini_factor),
            trials: overrides.trials.or(self.trials).unwrap_or(d.trials),
            seed: overrides.seed.or(self.seed).unwrap_or(d.seed),
        };
        cfg.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig4_config() -> SystemConfig {
        SystemConfig {
            antennas: 8,
            block_len: 2000,
            power: 10.0,
            feedback_fraction: 0.1,
            ini_factor: 0.1,
            trials: 100,
            seed: 1,
        }
    }

    #[test]
    fn fig4_operating_point_is_valid() {
        assert!(fig4_config().validate().is_ok());
    }

    #[test]
    fn single_antenna_rejected() {
        let cfg = SystemConfig {
            antennas: 1,
            ..fig4_config()
        };
        assert_eq!(cfg.validate(), Err(ConfigError::AntennaCount(1)));
    }

    #[test]
    fn block_shorter_than_two_cycles_rejected() {
        let cfg = SystemConfig {
            block_len: 8,
            ..fig4_config()
        };
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::BlockTooShort { t: 8, m: 8 })
        ));
    }

    #[test]
    fn out_of_range_scalars_rejected() {
        let base = fig4_config();
        for (cfg, want) in [
            (
                SystemConfig {
                    feedback_fraction: 0.0,
                    ..base
                },
                "f",
            ),
            (
                SystemConfig {
                    feedback_fraction: 1.5,
                    ..base
                },
                "f",
            ),
            (
                SystemConfig {
                    ini_factor: -0.1,
                    ..base
                },
                "alpha",
            ),
            (SystemConfig { power: 0.0, ..base }, "P"),
        ] {
            let err = cfg.validate().unwrap_err().to_string();
            assert!(err.contains(want), "{err} should mention {want}");
        }
    }

    #[test]
    fn cycle_grid_helpers() {
        let cfg = fig4_config();
        assert_eq!(cfg.max_cycles(), 250);
        assert_eq!(cfg.max_training(), 1992);
    }

    #[test]
    fn file_merge_and_override() {
        let file: ConfigFile = toml::from_str("M = 4\nsnr_db = 0.0\nseed = 9").unwrap();
        let overrides = ConfigFile {
            snr_db: Some(20.0),
            ..Default::default()
        };
        let cfg = file.resolve(&overrides).unwrap();
        assert_eq!(cfg.antennas, 4);
        assert_eq!(cfg.seed, 9);
        assert_relative_eq!(cfg.power, 100.0, max_relative = 1e-12);
        // untouched fields fall back to defaults
        assert_eq!(cfg.block_len, 2000);
    }

    proptest! {
        #[test]
        fn db_round_trip(db in -100.0f64..100.0) {
            let lin = db_to_linear(db);
            prop_assert!((linear_to_db(lin) - db).abs() <= 1e-12 * db.abs().max(1.0));
        }

        #[test]
        fn validate_is_idempotent(
            m in 2usize..16,
            cycles in 2usize..64,
            db in -10.0f64..30.0,
            f in 0.01f64..1.0,
            alpha in 0.0f64..10.0,
        ) {
            let cfg = SystemConfig {
                antennas: m,
                block_len: m * cycles,
                power: db_to_linear(db),
                feedback_fraction: f,
                ini_factor: alpha,
                trials: 10,
                seed: 0,
            };
            let once = cfg.validate().unwrap();
            let twice = once.validate().unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
