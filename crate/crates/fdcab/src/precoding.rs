//! Zero-forcing precoding and per-user link powers.
//!
//! The precoder inverts the (estimated) channel matrix and normalizes each
//! column, so beam k is orthogonal to every other user's estimated channel
//! and carries power P/M under the equal power split. Any residual
//! inter-beam interference at the true channel comes entirely from the
//! estimation error.

use crate::channel::{ChannelBlock, ChannelEstimate};
use crate::config::SystemConfig;
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Condition-number ceiling beyond which an estimate counts as degenerate.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Unit-norm beamforming vectors; column k serves user k.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub beams: DMatrix<Complex64>,
}

/// Per-user received powers under a given precoder and true channel.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkPowers {
    /// |h_k v_k|^2 · P/M per user.
    pub signal: Vec<f64>,
    /// Sum over j != k of |h_k v_j|^2 · P/M per user (inter-beam interference).
    pub interference: Vec<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrecodingError {
    #[error("channel estimate is singular or ill-conditioned (cond_1 ~ {cond:.3e}); resample")]
    SingularEstimate { cond: f64 },
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Zero-forcing precoder for an arbitrary square channel matrix: the column-
/// normalized inverse. Fails when the 1-norm condition estimate exceeds
/// [`CONDITION_LIMIT`].
pub fn zf_matrix(h: &DMatrix<Complex64>) -> Result<Precoder, PrecodingError> {
    let inv = h
        .clone()
        .try_inverse()
        .ok_or(PrecodingError::SingularEstimate { cond: f64::INFINITY })?;
    let cond = one_norm(h) * one_norm(&inv);
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(PrecodingError::SingularEstimate { cond });
    }
    let mut beams = inv;
    for mut col in beams.column_iter_mut() {
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        col /= Complex64::new(norm, 0.0);
    }
    Ok(Precoder { beams })
}

/// Zero-forcing precoder from a channel estimate.
pub fn zf(estimate: &ChannelEstimate) -> Result<Precoder, PrecodingError> {
    zf_matrix(&estimate.estimate)
}

/// Signal and inter-beam interference powers at the TRUE channel.
pub fn link_powers(truth: &ChannelBlock, precoder: &Precoder, cfg: &SystemConfig) -> LinkPowers {
    let m = cfg.antennas;
    let per_stream = cfg.power / m as f64;
    let gains = &truth.downlink * &precoder.beams; // (i, j) = h_i · v_j
    let mut signal = Vec::with_capacity(m);
    let mut interference = Vec::with_capacity(m);
    for k in 0..m {
        let mut ibi = 0.0;
        for j in 0..m {
            if j != k {
                ibi += gains[(k, j)].norm_sqr();
            }
        }
        signal.push(gains[(k, k)].norm_sqr() * per_stream);
        interference.push(ibi * per_stream);
    }
    LinkPowers {
        signal,
        interference,
    }
}
