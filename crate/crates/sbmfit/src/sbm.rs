//! Stochastic block model parameters, graph generation and masking.

use rand::Rng;

use crate::error::{Result, SbmError};
use crate::graph::{AdjacencyMatrix, BlockMatrix, LabelAssignment, SamplingMask, ThetaMatrix};
use crate::rng::{stream_rng, STREAM_EDGES, STREAM_LABELS, STREAM_MASK};

/// Parameters of a stochastic block model.
#[derive(Debug, Clone)]
pub struct SbmParams {
    /// Community proportions; positive, summing to one.
    pub alpha: Vec<f64>,
    /// Inter-community connection probabilities, entries in `(0, 1)`.
    pub q: BlockMatrix,
    /// Optional sparsity scale applied to `q` at generation time.
    pub rho: Option<f64>,
    /// Optional probability bounds `(gamma, rho_bar)` for restricted
    /// likelihood maximization.
    pub bounds: Option<(f64, f64)>,
}

impl SbmParams {
    pub fn new(alpha: Vec<f64>, q: BlockMatrix) -> Self {
        SbmParams { alpha, q, rho: None, bounds: None }
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = Some(rho);
        self
    }

    pub fn k(&self) -> usize {
        self.q.k()
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.len() != self.q.k() {
            return Err(SbmError::InvalidParameter(format!(
                "alpha has length {} but q is {k}x{k}",
                self.alpha.len(),
                k = self.q.k()
            )));
        }
        if self.alpha.iter().any(|&a| a <= 0.0) {
            return Err(SbmError::InvalidParameter("alpha entries must be positive".into()));
        }
        let s: f64 = self.alpha.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(SbmError::InvalidParameter(format!("alpha sums to {s}, expected 1")));
        }
        if self.q.entries().any(|v| v <= 0.0 || v >= 1.0) {
            return Err(SbmError::InvalidParameter("q entries must lie in (0, 1)".into()));
        }
        if let Some(rho) = self.rho {
            if rho <= 0.0 || rho > 1.0 {
                return Err(SbmError::InvalidParameter(format!("rho = {rho} outside (0, 1]")));
            }
            if self.q.entries().any(|v| rho * v <= 0.0 || rho * v >= 1.0) {
                return Err(SbmError::InvalidParameter(
                    "rho * q leaves the open interval (0, 1)".into(),
                ));
            }
        }
        if let Some((gamma, rho_bar)) = self.bounds {
            if !(0.0 < gamma && gamma <= rho_bar && rho_bar < 1.0) {
                return Err(SbmError::InvalidParameter(format!(
                    "bounds ({gamma}, {rho_bar}) must satisfy 0 < gamma <= rho_bar < 1"
                )));
            }
        }
        Ok(())
    }

    /// Connectivity actually used for generation: `rho * q` (`rho = 1` if absent).
    pub fn effective_q(&self) -> Result<BlockMatrix> {
        match self.rho {
            Some(rho) => scale_sparsity(&self.q, rho),
            None => Ok(self.q.clone()),
        }
    }
}

/// Entrywise product `rho * q0`, checking the result stays in `(0, 1)`.
pub fn scale_sparsity(q0: &BlockMatrix, rho: f64) -> Result<BlockMatrix> {
    let scaled = q0.map(|v| rho * v);
    if scaled.entries().any(|v| v <= 0.0 || v >= 1.0) {
        return Err(SbmError::InvalidParameter(format!(
            "rho = {rho} drives a connectivity entry outside (0, 1)"
        )));
    }
    Ok(scaled)
}

/// Expand a block matrix to the node-pair probability matrix
/// `Theta[i][j] = q[z(i)][z(j)]`, zero diagonal.
pub fn theta_from(z: &LabelAssignment, q: &BlockMatrix) -> Result<ThetaMatrix> {
    if z.k() > q.k() {
        return Err(SbmError::Consistency(format!(
            "labels use {} communities but q is {}x{}",
            z.k(),
            q.k(),
            q.k()
        )));
    }
    if q.entries().any(|v| !(0.0..=1.0).contains(&v)) {
        return Err(SbmError::InvalidParameter("q entries must lie in [0, 1]".into()));
    }
    Ok(ThetaMatrix::from_fn(z.n(), |i, j| q.get(z.label(i), z.label(j))))
}

/// Draw a graph from the stochastic block model.
///
/// Labels are i.i.d. multinomial(`alpha`) from the label stream of `seed`;
/// edges are independent Bernoulli(`rho * q[z(i)][z(j)]`) from the edge
/// stream. The returned `ThetaMatrix` is the exact generative matrix.
pub fn generate_sbm(
    params: &SbmParams,
    n: usize,
    seed: u64,
) -> Result<(LabelAssignment, AdjacencyMatrix, ThetaMatrix)> {
    params.validate()?;
    if n < 2 {
        return Err(SbmError::InvalidParameter(format!("need at least 2 nodes, got {n}")));
    }
    let k = params.k();

    let mut label_rng = stream_rng(seed, STREAM_LABELS, 0);
    let mut z = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = label_rng.random();
        let mut cum = 0.0;
        let mut picked = k - 1;
        for (a, &w) in params.alpha.iter().enumerate() {
            cum += w;
            if u < cum {
                picked = a;
                break;
            }
        }
        z.push(picked);
    }
    let labels = LabelAssignment::new(z, k)?;

    let theta = theta_from(&labels, &params.effective_q()?)?;
    let mut edge_rng = stream_rng(seed, STREAM_EDGES, 0);
    let mut a = AdjacencyMatrix::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let u: f64 = edge_rng.random();
            if u < theta.get(i, j) {
                a.set_edge(i, j, true);
            }
        }
    }
    Ok((labels, a, theta))
}

/// Draw a graph of the inhomogeneous random graph model: independent
/// Bernoulli edges with per-pair probabilities `theta`.
pub fn generate_inhomogeneous(theta: &ThetaMatrix, seed: u64) -> Result<AdjacencyMatrix> {
    let n = theta.n();
    if n < 2 {
        return Err(SbmError::InvalidParameter(format!("need at least 2 nodes, got {n}")));
    }
    let mut rng = stream_rng(seed, STREAM_EDGES, 0);
    let mut a = AdjacencyMatrix::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let u: f64 = rng.random();
            if u < theta.get(i, j) {
                a.set_edge(i, j, true);
            }
        }
    }
    Ok(a)
}

/// Draw a Bernoulli(`p`) observation mask (symmetric, zero diagonal).
pub fn generate_mask(n: usize, p: f64, seed: u64) -> Result<SamplingMask> {
    if !(0.0 < p && p <= 1.0) {
        return Err(SbmError::InvalidParameter(format!("sampling rate {p} outside (0, 1]")));
    }
    let mut rng = stream_rng(seed, STREAM_MASK, 0);
    let mut m = SamplingMask::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let u: f64 = rng.random();
            if u < p {
                m.set_observed(i, j, true);
            }
        }
    }
    Ok(m)
}
