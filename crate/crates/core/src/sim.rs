//! Monte-Carlo estimates of the block failure probability `p(ε)` of the
//! batch decoder, and its integral over `[0, 1]`.
//!
//! The set decoder commutes with translation by a codeword, so trials send
//! the all-zero word. Trial `t` at grid index `i` draws its erasures from
//! [`trial_rng`] with stream `(i << 32) | t`, which makes results independent
//! of how trials are scheduled across threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelOutput;
use crate::code::LdpcCode;
use crate::decoder::{decode, DecodeOutcome};
use crate::error::{Error, Result};
use crate::gf::Symbol;
pub use crate::onthefly::trial_rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailurePoint {
    pub epsilon: f64,
    pub trials: usize,
    pub block_failures: usize,
    /// Undetermined constituent bits after decoding, summed over trials.
    pub residual_bits: usize,
}

impl FailurePoint {
    pub fn failure_rate(&self) -> f64 {
        self.block_failures as f64 / self.trials as f64
    }

    /// Binomial standard error of [`failure_rate`](Self::failure_rate).
    pub fn std_error(&self) -> f64 {
        let p = self.failure_rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Mean residual erased bits per trial.
    pub fn residual_rate(&self) -> f64 {
        self.residual_bits as f64 / self.trials as f64
    }
}

/// `points` equally spaced values covering `[0, 1]`.
pub fn epsilon_grid(points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.5],
        _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
    }
}

/// Failure rate at one erasure probability. `index` selects the random
/// stream family so that different grid points are independent.
pub fn simulate_point(code: &LdpcCode, epsilon: f64, trials: usize, seed: u64, index: u64) -> Result<FailurePoint> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Invalid(format!("erasure probability {epsilon} is outside [0, 1]")));
    }
    if trials == 0 {
        return Err(Error::Invalid("at least one trial is required".into()));
    }
    let zero = vec![Symbol(0); code.n()];
    let runs: Vec<(bool, usize)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, (index << 32) | t);
            let channel = ChannelOutput::transmit(&zero, code.p(), epsilon, &mut rng);
            let res = decode(code, &channel, None)?;
            Ok((res.outcome == DecodeOutcome::Stalled, res.residual_bits()))
        })
        .collect::<Result<_>>()?;
    Ok(FailurePoint {
        epsilon,
        trials,
        block_failures: runs.iter().filter(|r| r.0).count(),
        residual_bits: runs.iter().map(|r| r.1).sum(),
    })
}

/// Failure rates over a grid of erasure probabilities.
pub fn simulate(code: &LdpcCode, grid: &[f64], trials: usize, seed: u64) -> Result<Vec<FailurePoint>> {
    grid.iter().enumerate().map(|(i, &eps)| simulate_point(code, eps, trials, seed, i as u64)).collect()
}

/// Trapezoidal estimate of `∫ p(ε) dε` over the grid, with the standard
/// error implied by independent binomial estimates at each point.
pub fn failure_integral(points: &[FailurePoint]) -> (f64, f64) {
    let mut weights = vec![0.0; points.len()];
    for (i, w) in points.windows(2).enumerate() {
        let h = w[1].epsilon - w[0].epsilon;
        weights[i] += h / 2.0;
        weights[i + 1] += h / 2.0;
    }
    let integral = points.iter().zip(&weights).map(|(pt, w)| w * pt.failure_rate()).sum();
    let variance: f64 = points.iter().zip(&weights).map(|(pt, w)| (w * pt.std_error()).powi(2)).sum();
    (integral, variance.sqrt())
}
