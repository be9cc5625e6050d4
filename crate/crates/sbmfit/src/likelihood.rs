//! Conditional likelihood of a labeled block model on the observed entries,
//! its closed-form maximizer in the connectivity matrix, and exhaustive
//! enumeration routines usable as exact references at tiny scale.

use crate::error::{Result, SbmError};
use crate::graph::{AdjacencyMatrix, BlockMatrix, LabelAssignment, SamplingMask};

/// Probabilities are kept this far away from {0, 1} inside logarithms.
pub const PROB_FLOOR: f64 = 1e-9;

/// Hard guard for exhaustive enumeration over the `k^n` label functions.
const ENUMERATION_LIMIT: f64 = 1e7;

#[inline]
pub fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}

/// Per-block-pair tallies of observed entries and edges.
///
/// All matrices are symmetric and counted over ordered pairs `i != j`, so
/// every unordered pair contributes twice; ratios are unaffected.
#[derive(Debug, Clone)]
pub struct BlockCounts {
    k: usize,
    /// Sum of `X_ij * A_ij` over each block pair.
    pub edges_obs: Vec<u64>,
    /// Number of observed entries per block pair.
    pub pairs_obs: Vec<u64>,
    /// Total number of entries per block pair.
    pub pairs_total: Vec<u64>,
}

impl BlockCounts {
    pub fn compute(a: &AdjacencyMatrix, x: &SamplingMask, z: &LabelAssignment) -> Self {
        let k = z.k();
        let mut counts = BlockCounts {
            k,
            edges_obs: vec![0; k * k],
            pairs_obs: vec![0; k * k],
            pairs_total: vec![0; k * k],
        };
        // each unordered pair contributes one count at (za, zb) and one at
        // (zb, za); for za == zb those land on the same cell
        let add = |m: &mut Vec<u64>, za: usize, zb: usize| {
            m[za * k + zb] += 1;
            m[zb * k + za] += 1;
        };
        let n = z.n();
        for i in 0..n {
            for j in i + 1..n {
                let (za, zb) = (z.label(i), z.label(j));
                add(&mut counts.pairs_total, za, zb);
                if x.observed(i, j) {
                    add(&mut counts.pairs_obs, za, zb);
                    if a.edge(i, j) {
                        add(&mut counts.edges_obs, za, zb);
                    }
                }
            }
        }
        counts
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn at(&self, m: &[u64], a: usize, b: usize) -> u64 {
        m[a * self.k + b]
    }
}

/// Fraction of observed entries that are edges, `sum(X . A) / sum(X)`.
/// `None` when nothing is observed.
pub fn observed_density(a: &AdjacencyMatrix, x: &SamplingMask) -> Option<f64> {
    let mut obs = 0u64;
    let mut edges = 0u64;
    for (i, j) in x.pairs() {
        obs += 1;
        edges += a.edge(i, j) as u64;
    }
    (obs > 0).then(|| edges as f64 / obs as f64)
}

/// Observed density with the empty-mask fallback of 1/2.
pub fn observed_density_or_half(a: &AdjacencyMatrix, x: &SamplingMask) -> f64 {
    observed_density(a, x).unwrap_or(0.5)
}

/// Log-likelihood of `(z, q)` on the observed entries, from precomputed
/// counts. Returns `-inf` when a block has observations conflicting with a
/// hard 0/1 probability.
pub fn ll_from_counts(counts: &BlockCounts, q: &BlockMatrix) -> f64 {
    let k = counts.k;
    let mut total = 0.0;
    for a in 0..k {
        for b in a..k {
            // recover unordered tallies from the ordered counts: a diagonal
            // cell holds both orientations of each pair
            let scale = if a == b { 2.0 } else { 1.0 };
            let e = counts.at(&counts.edges_obs, a, b) as f64 / scale;
            let o = counts.at(&counts.pairs_obs, a, b) as f64 / scale;
            let m = o - e;
            let p = q.get(a, b);
            if e > 0.0 {
                if p <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                total += e * p.ln();
            }
            if m > 0.0 {
                if p >= 1.0 {
                    return f64::NEG_INFINITY;
                }
                total += m * (1.0 - p).ln();
            }
        }
    }
    total
}

/// Conditional log-likelihood
/// `sum_{i<j} X_ij (A_ij ln q_{z(i)z(j)} + (1 - A_ij) ln(1 - q_{z(i)z(j)}))`.
///
/// Probabilities exactly 0 or 1 are tolerated; a conflicting observation
/// yields a flagged `-inf` sentinel rather than an error.
pub fn log_likelihood_conditional(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    z: &LabelAssignment,
    q: &BlockMatrix,
) -> Result<f64> {
    check_shapes(a, x, Some(z), q.k())?;
    let counts = BlockCounts::compute(a, x, z);
    let value = ll_from_counts(&counts, q);
    if value == f64::NEG_INFINITY {
        log::warn!("conditional log-likelihood hit a hard 0/1 probability with conflicting data");
    }
    Ok(value)
}

/// Log of the complete-data likelihood `(prod_i alpha_{z(i)}) exp(L_X)`.
pub fn log_complete_likelihood(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    z: &LabelAssignment,
    alpha: &[f64],
    q: &BlockMatrix,
) -> Result<f64> {
    if alpha.len() != q.k() {
        return Err(SbmError::Dimension(format!(
            "alpha has length {}, q is {}x{}",
            alpha.len(),
            q.k(),
            q.k()
        )));
    }
    let ll = log_likelihood_conditional(a, x, z, q)?;
    let prior: f64 = z.as_slice().iter().map(|&l| alpha[l].ln()).sum();
    Ok(prior + ll)
}

/// Per-block empirical mean of the observed entries:
/// `q[a][b] = edges_obs / pairs_obs`, with the global observed density
/// substituted for block pairs with no observed entry (1/2 if the whole
/// mask is empty). Entries may equal 0 or 1 exactly; callers that take
/// logarithms clamp with [`clamp_prob`].
pub fn profile_q(a: &AdjacencyMatrix, x: &SamplingMask, z: &LabelAssignment) -> Result<BlockMatrix> {
    check_shapes(a, x, Some(z), z.k())?;
    let counts = BlockCounts::compute(a, x, z);
    Ok(profile_q_from_counts(&counts, observed_density_or_half(a, x)))
}

fn profile_q_from_counts(counts: &BlockCounts, fallback: f64) -> BlockMatrix {
    let k = counts.k;
    let mut q = BlockMatrix::constant(k, 0.0);
    for a in 0..k {
        for b in a..k {
            let o = counts.at(&counts.pairs_obs, a, b);
            let v = if o > 0 {
                counts.at(&counts.edges_obs, a, b) as f64 / o as f64
            } else {
                fallback
            };
            q.set_sym(a, b, v);
        }
    }
    q
}

fn check_shapes(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    z: Option<&LabelAssignment>,
    _k: usize,
) -> Result<()> {
    if a.n() != x.n() {
        return Err(SbmError::Dimension(format!(
            "adjacency is {}x{0} but mask is {}x{1}",
            a.n(),
            x.n()
        )));
    }
    if let Some(z) = z {
        if z.n() != a.n() {
            return Err(SbmError::Dimension(format!(
                "labels cover {} nodes but the graph has {}",
                z.n(),
                a.n()
            )));
        }
    }
    Ok(())
}

fn enumeration_guard(k: usize, n: usize) -> Result<()> {
    if (k as f64).powi(n as i32) > ENUMERATION_LIMIT {
        return Err(SbmError::Capacity(format!(
            "{k}^{n} label functions exceed the enumeration limit of {ENUMERATION_LIMIT:.0}"
        )));
    }
    Ok(())
}

/// Iterate all label vectors of length `n` over `k` symbols in
/// lexicographic order (last position varies fastest).
pub(crate) struct LabelIter {
    k: usize,
    z: Vec<usize>,
    started: bool,
    done: bool,
}

impl LabelIter {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        LabelIter { k, z: vec![0; n], started: false, done: n == 0 || k == 0 }
    }
}

impl Iterator for LabelIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.z.clone());
        }
        let mut pos = self.z.len();
        loop {
            if pos == 0 {
                self.done = true;
                return None;
            }
            pos -= 1;
            if self.z[pos] + 1 < self.k {
                self.z[pos] += 1;
                for slot in &mut self.z[pos + 1..] {
                    *slot = 0;
                }
                return Some(self.z.clone());
            }
        }
    }
}

/// Exhaustive restricted maximum-likelihood search.
///
/// Enumerates all `k^n` label functions; for each, the likelihood is
/// maximized in closed form by the per-block empirical mean, clamped to the
/// caller's `[gamma, rho_bar]` bounds (or to the default probability floor
/// when unbounded). Ties keep the lexicographically smallest label vector.
pub fn brute_force_mle(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    k: usize,
    bounds: Option<(f64, f64)>,
) -> Result<(LabelAssignment, BlockMatrix, f64)> {
    check_shapes(a, x, None, k)?;
    if k == 0 {
        return Err(SbmError::InvalidParameter("community count must be at least 1".into()));
    }
    let n = a.n();
    enumeration_guard(k, n)?;
    let (lo, hi) = match bounds {
        Some((gamma, rho_bar)) => {
            if !(0.0 < gamma && gamma <= rho_bar && rho_bar < 1.0) {
                return Err(SbmError::InvalidParameter(format!(
                    "bounds ({gamma}, {rho_bar}) must satisfy 0 < gamma <= rho_bar < 1"
                )));
            }
            (gamma.max(PROB_FLOOR), rho_bar.min(1.0 - PROB_FLOOR))
        }
        None => (PROB_FLOOR, 1.0 - PROB_FLOOR),
    };
    let fallback = observed_density_or_half(a, x);

    let mut best: Option<(Vec<usize>, BlockMatrix, f64)> = None;
    for zvec in LabelIter::new(n, k) {
        let z = LabelAssignment::new(zvec, k)?;
        let counts = BlockCounts::compute(a, x, &z);
        let q = profile_q_from_counts(&counts, fallback).map(|v| v.clamp(lo, hi));
        let value = ll_from_counts(&counts, &q);
        if best.as_ref().is_none_or(|(_, _, b)| value > *b) {
            best = Some((z.as_slice().to_vec(), q, value));
        }
    }
    let (zvec, q, value) = best.expect("enumeration yields at least one labeling");
    Ok((LabelAssignment::new(zvec, k)?, q, value))
}

/// Log of the marginal likelihood
/// `sum_z (prod_i alpha_{z(i)}) exp(L_X(A; z, q))`
/// computed by exhaustive enumeration with a streaming log-sum-exp.
pub fn log_marginal_likelihood(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    alpha: &[f64],
    q: &BlockMatrix,
) -> Result<f64> {
    check_shapes(a, x, None, q.k())?;
    let k = q.k();
    if alpha.len() != k {
        return Err(SbmError::Dimension(format!(
            "alpha has length {}, q is {k}x{k}",
            alpha.len()
        )));
    }
    let s: f64 = alpha.iter().sum();
    if alpha.iter().any(|&v| v < 0.0) || (s - 1.0).abs() > 1e-9 {
        return Err(SbmError::InvalidParameter("alpha must be a probability vector".into()));
    }
    let n = a.n();
    enumeration_guard(k, n)?;
    let log_alpha: Vec<f64> = alpha.iter().map(|&v| v.ln()).collect();

    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for zvec in LabelIter::new(n, k) {
        let prior: f64 = zvec.iter().map(|&l| log_alpha[l]).sum();
        if prior == f64::NEG_INFINITY {
            continue;
        }
        let z = LabelAssignment::new(zvec, k)?;
        let counts = BlockCounts::compute(a, x, &z);
        let term = prior + ll_from_counts(&counts, q);
        if term == f64::NEG_INFINITY {
            continue;
        }
        if term > max {
            sum = sum * (max - term).exp() + 1.0;
            max = term;
        } else {
            sum += (term - max).exp();
        }
    }
    if max == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(max + sum.ln())
}
