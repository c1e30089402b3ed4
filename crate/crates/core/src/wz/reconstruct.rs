//! Soft reconstruction of the remote source and its log-loss score.

use crate::channel::bconv;
use crate::error::{Error, Result};
use crate::gf2::BitSequence;

/// Floor applied to the posterior mass of the true symbol before the log.
pub const POSTERIOR_FLOOR: f64 = 1.0 / (1u64 << 20) as f64;

/// Bound on one vote's log-odds so that contradicting certain votes stay finite.
const MAX_WEIGHT: f64 = 700.0;

/// Per-symbol posterior probability that the source bit is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorSequence(Vec<f64>);

impl PosteriorSequence {
    pub fn new(prob_one: Vec<f64>) -> Result<Self> {
        if let Some(q) = prob_one.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return Err(Error::invalid(format!("posterior {q} outside [0, 1]")));
        }
        Ok(Self(prob_one))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prob_one(&self) -> &[f64] {
        &self.0
    }

    /// Posterior mass on `bit` at position `j`.
    pub fn mass(&self, j: usize, bit: bool) -> f64 {
        if bit {
            self.0[j]
        } else {
            1.0 - self.0[j]
        }
    }
}

/// Bayes posterior of `X` from the decoded sequences, each modelled as `X`
/// through a BSC with crossover `P_i = d̂_i ∗ p_i`, under a uniform prior.
pub fn soft_reconstruct(u_hats: &[BitSequence], d_hat: &[f64], p: &[f64]) -> Result<PosteriorSequence> {
    if u_hats.is_empty() || u_hats.len() != d_hat.len() || u_hats.len() != p.len() {
        return Err(Error::invalid(format!(
            "soft reconstruction needs matching per-link inputs, got {} sequences, {} distortions, {} noises",
            u_hats.len(),
            d_hat.len(),
            p.len()
        )));
    }
    let n = u_hats[0].len();
    if let Some(u) = u_hats.iter().find(|u| u.len() != n) {
        return Err(Error::DimensionMismatch {
            context: "soft reconstruction inputs",
            expected: n,
            actual: u.len(),
        });
    }
    // Weight of a vote for 0, in nats of log-odds ln P(x=0)/P(x=1).
    let weights = d_hat
        .iter()
        .zip(p)
        .map(|(&d, &p)| {
            let big_p = bconv(d, p)?;
            Ok(((1.0 - big_p) / big_p).ln().clamp(-MAX_WEIGHT, MAX_WEIGHT))
        })
        .collect::<Result<Vec<f64>>>()?;
    let prob_one = (0..n)
        .map(|j| {
            let log_odds: f64 = u_hats
                .iter()
                .zip(&weights)
                .map(|(u, &w)| if u.get(j) { -w } else { w })
                .sum();
            1.0 / (1.0 + log_odds.exp())
        })
        .collect();
    Ok(PosteriorSequence(prob_one))
}

/// Mean of `log2(1 / q_j(x_j))` with each mass floored at
/// [`POSTERIOR_FLOOR`].
pub fn log_loss(posteriors: &PosteriorSequence, x_true: &BitSequence) -> Result<f64> {
    if posteriors.len() != x_true.len() {
        return Err(Error::DimensionMismatch {
            context: "log-loss posteriors",
            expected: x_true.len(),
            actual: posteriors.len(),
        });
    }
    if x_true.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = x_true
        .iter()
        .enumerate()
        .map(|(j, x)| {
            -posteriors
                .mass(j, x)
                .clamp(POSTERIOR_FLOOR, 1.0 - POSTERIOR_FLOOR)
                .log2()
        })
        .sum();
    Ok(total / x_true.len() as f64)
}
