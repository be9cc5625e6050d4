//! Iterative low-rank completion of the observed adjacency matrix
//! (soft-impute): alternately fill the unobserved entries with the current
//! low-rank reconstruction and re-fit the reconstruction by singular-value
//! soft-thresholding plus rank truncation.
//!
//! The working matrix stays symmetric throughout, so the SVD is taken via
//! the symmetric eigendecomposition: singular values are `|lambda_i|` and
//! the reconstruction keeps the eigenvalue signs.

use nalgebra::DMatrix;

use crate::error::{Result, SbmError};
use crate::graph::{AdjacencyMatrix, SamplingMask, ThetaMatrix};
use crate::likelihood::observed_density_or_half;

/// Options of the completion iteration.
#[derive(Debug, Clone)]
pub struct SvtConfig {
    /// Rank the reconstruction is truncated to.
    pub rank: usize,
    /// Soft-threshold subtracted from every singular value.
    pub lambda: f64,
    pub max_iter: usize,
    /// Relative Frobenius change of the reconstruction below which the
    /// iteration stops.
    pub tol: f64,
}

impl SvtConfig {
    /// The protocol used for comparisons: zero penalty, rank equal to the
    /// number of communities.
    pub fn for_rank(rank: usize) -> Self {
        SvtConfig { rank, ..SvtConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank < 1 {
            return Err(SbmError::InvalidParameter("rank must be at least 1".into()));
        }
        if self.lambda < 0.0 {
            return Err(SbmError::InvalidParameter("lambda must be non-negative".into()));
        }
        if self.max_iter < 1 {
            return Err(SbmError::InvalidParameter("max_iter must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(SbmError::InvalidParameter("tol must be positive".into()));
        }
        Ok(())
    }
}

impl Default for SvtConfig {
    fn default() -> Self {
        SvtConfig { rank: 1, lambda: 0.0, max_iter: 200, tol: 1e-6 }
    }
}

/// Low-rank completion estimate of the connection probabilities.
pub fn soft_impute(a: &AdjacencyMatrix, x: &SamplingMask, cfg: &SvtConfig) -> Result<ThetaMatrix> {
    Ok(soft_impute_trace(a, x, cfg)?.0)
}

/// As [`soft_impute`], also returning the value of the penalized objective
/// `|P_obs(A - M)|_F^2 + lambda * |M|_nuclear` after every iteration.
pub fn soft_impute_trace(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    cfg: &SvtConfig,
) -> Result<(ThetaMatrix, Vec<f64>)> {
    cfg.validate()?;
    if a.n() != x.n() {
        return Err(SbmError::Dimension(format!(
            "adjacency is {}x{0} but mask is {}x{1}",
            a.n(),
            x.n()
        )));
    }
    let n = a.n();
    let mean = observed_density_or_half(a, x);
    // unobserved entries (the diagonal included) start at the observed mean
    let mut work = DMatrix::from_fn(n, n, |i, j| {
        if i != j && x.observed(i, j) {
            a.edge(i, j) as u8 as f64
        } else {
            mean
        }
    });

    let mut recon = work.clone();
    let mut objective = Vec::new();
    for iter in 0..cfg.max_iter {
        let eigen = work.clone().try_symmetric_eigen(1e-12, 10_000).ok_or_else(|| {
            SbmError::Numerical(format!(
                "eigendecomposition failed at completion iteration {iter} (n = {n})"
            ))
        })?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            eigen.eigenvalues[j]
                .abs()
                .partial_cmp(&eigen.eigenvalues[i].abs())
                .expect("eigenvalues are finite")
        });

        let mut next = DMatrix::zeros(n, n);
        let mut nuclear = 0.0;
        for &idx in order.iter().take(cfg.rank.min(n)) {
            let lam = eigen.eigenvalues[idx];
            let shrunk = (lam.abs() - cfg.lambda).max(0.0);
            if shrunk == 0.0 {
                continue;
            }
            nuclear += shrunk;
            let v = eigen.eigenvectors.column(idx);
            let scaled = v * (shrunk * lam.signum());
            // rank-one update: next += scaled * v^T
            next.ger(1.0, &scaled, &v, 1.0);
        }

        let mut obs_err = 0.0;
        for (i, j) in x.pairs() {
            let d = a.edge(i, j) as u8 as f64 - next[(i, j)];
            obs_err += 2.0 * d * d;
        }
        objective.push(obs_err + cfg.lambda * nuclear);

        let diff = (&next - &recon).norm();
        let scale = recon.norm().max(f64::MIN_POSITIVE);
        let converged = iter > 0 && diff / scale < cfg.tol;
        recon = next;
        if converged {
            break;
        }
        for i in 0..n {
            for j in 0..n {
                if i == j || !x.observed(i, j) {
                    work[(i, j)] = recon[(i, j)];
                } else {
                    work[(i, j)] = a.edge(i, j) as u8 as f64;
                }
            }
        }
    }

    let theta = ThetaMatrix::from_fn(n, |i, j| {
        let v = 0.5 * (recon[(i, j)] + recon[(j, i)]);
        v.clamp(0.0, 1.0)
    });
    Ok((theta, objective))
}
