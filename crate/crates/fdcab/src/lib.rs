//! Full-duplex open-loop training for multiuser MIMO downlink: simulation
//! and analysis.
//!
//! An M-antenna base station serves M single-antenna users over Rayleigh
//! block-fading channels with zero-forcing beams computed from MMSE channel
//! estimates. With full-duplex radios the users' uplink pilots and the
//! downlink data share every symbol (continuously adaptive beamforming: the
//! precoder refines at each cycle boundary), at the price of inter-node
//! interference at the receiving users; the half-duplex reference spends the
//! same symbols on silent training. This crate provides:
//!
//! - closed-form rates, rate-loss expressions, and spectral efficiencies for
//!   both strategies ([`rates`]);
//! - closed-form approximations of the optimal training duration, and the
//!   brute-force grid optima they are validated against ([`optimizer`]);
//! - loss bounds against the genie-aided system and the full-duplex gain
//!   lower bound ([`optimizer`]);
//! - a symbol-level Monte Carlo simulator of both protocols with
//!   deterministic parallel streams ([`montecarlo`]);
//! - block-length and SNR sweeps serialized as byte-reproducible CSV
//!   ([`sweep`]) and a validation suite with measured margins ([`validate`]).
//!
//! Each major capability has a runnable example under `examples/`; the
//! `fdcab` binary exposes the same operations as subcommands.

pub mod channel;
pub mod config;
pub mod expint;
pub mod montecarlo;
pub mod optimizer;
pub mod precoding;
pub mod rates;
pub mod rng;
pub mod sweep;
pub mod validate;

pub use channel::{ChannelBlock, ChannelEstimate, PilotAccumulator};
pub use config::{ConfigError, ConfigFile, SystemConfig};
pub use montecarlo::{BlockTrace, IniModel, RateTables};
pub use optimizer::{Strategy, TrainingPlan};
pub use precoding::{LinkPowers, Precoder};
pub use rates::{Estimate, PerCycleRates, RateModel};
pub use sweep::{Mode, SweepResult};
