//! Choice of the number of communities by an integrated classification
//! likelihood score: complete-data log-likelihood at the hard labels minus
//! BIC-style penalties, with the observed-pair count standing in for the
//! full pair count in the connectivity penalty (the likelihood itself only
//! ever sums observed pairs).

use crate::error::{Result, SbmError};
use crate::estimator::extract_labels;
use crate::graph::{AdjacencyMatrix, SamplingMask};
use crate::likelihood::{clamp_prob, log_likelihood_conditional, profile_q};
use crate::varem::{fit_varem, EmConfig, FitResult};

/// Integrated classification likelihood of a fitted model:
///
/// ```text
/// L_X(A; z_hat, Q_hat) + sum_i ln alpha_hat[z_hat(i)]
///   - (k - 1)/2 * ln n  -  k(k+1)/4 * ln(observed pairs)
/// ```
pub fn icl_score(a: &AdjacencyMatrix, x: &SamplingMask, fit: &FitResult) -> Result<f64> {
    let z = extract_labels(&fit.tau);
    let q = profile_q(a, x, &z)?.map(clamp_prob);
    let ll = log_likelihood_conditional(a, x, &z, &q)?;
    let prior: f64 = z.as_slice().iter().map(|&l| fit.alpha[l].ln()).sum();
    let k = fit.tau.k() as f64;
    let n = a.n() as f64;
    let pairs = x.observed_entries() as f64 / 2.0;
    let penalty = 0.5 * (k - 1.0) * n.ln() + 0.5 * (k * (k + 1.0) / 2.0) * pairs.ln();
    Ok(ll + prior - penalty)
}

/// Score of one candidate community count.
#[derive(Debug, Clone)]
pub struct KScore {
    pub k: usize,
    pub score: f64,
    pub converged: bool,
}

/// Outcome of [`select_k`].
#[derive(Debug, Clone)]
pub struct Selection {
    pub k_hat: usize,
    pub scores: Vec<KScore>,
    /// The winning fit.
    pub best: FitResult,
}

/// Fit each candidate `k`, score it, and return the highest-scoring one
/// (the smallest `k` on ties). A candidate whose every restart fails is
/// skipped with a warning; if every candidate is skipped an error is
/// returned.
pub fn select_k(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    k_range: &[usize],
    cfg: &EmConfig,
) -> Result<Selection> {
    if k_range.is_empty() {
        return Err(SbmError::InvalidParameter("k_range must be non-empty".into()));
    }
    let mut entries: Vec<(KScore, FitResult)> = Vec::new();
    for &k in k_range {
        match fit_varem(a, x, k, cfg) {
            Ok(fit) => {
                let score = icl_score(a, x, &fit)?;
                entries.push((KScore { k, score, converged: fit.converged }, fit));
            }
            Err(SbmError::Numerical(msg)) => {
                log::warn!("k = {k} skipped: {msg}");
            }
            Err(other) => return Err(other),
        }
    }
    if entries.is_empty() {
        return Err(SbmError::Numerical("every candidate k failed to fit".into()));
    }
    entries.sort_by_key(|(s, _)| s.k);
    let mut best_idx = 0;
    for (i, (s, _)) in entries.iter().enumerate() {
        if s.score > entries[best_idx].0.score {
            best_idx = i;
        }
    }
    let k_hat = entries[best_idx].0.k;
    let best = entries[best_idx].1.clone();
    Ok(Selection { k_hat, scores: entries.into_iter().map(|(s, _)| s).collect(), best })
}
