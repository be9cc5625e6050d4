//! Mean-field variational EM for the block model with missing observations.
//!
//! The evidence lower bound maximized here is
//!
//! ```text
//! J = sum_i sum_a tau[i][a] (ln alpha[a] - ln tau[i][a])
//!   + sum_{i<j observed} sum_{a,b} tau[i][a] tau[j][b]
//!         (A_ij ln q[a][b] + (1 - A_ij) ln(1 - q[a][b]))
//! ```
//!
//! The estimation step updates node rows sequentially in index order using
//! the freshest values (coordinate ascent): synchronous updates can
//! oscillate, sequential ones improve the bound row by row. All products
//! over observed neighbours are accumulated in log-domain with a per-row
//! max subtraction before exponentiation.

mod init;

pub use init::init_tau;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SbmError};
use crate::graph::{AdjacencyMatrix, BlockMatrix, LabelAssignment, SamplingMask};
use crate::likelihood::{clamp_prob, observed_density_or_half};
use crate::rng::{stream_rng, STREAM_RESTART};

/// Entries of a posterior row never drop below this after normalization;
/// keeps every entropy term finite.
pub const TAU_FLOOR: f64 = 1e-10;

/// Row-stochastic `n x k` matrix of per-node community responsibilities.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalPosterior {
    k: usize,
    tau: Vec<f64>,
}

impl VariationalPosterior {
    /// Uniform responsibilities `1/k`.
    pub fn uniform(n: usize, k: usize) -> Self {
        VariationalPosterior { k, tau: vec![1.0 / k as f64; n * k] }
    }

    /// Near-degenerate posterior encoding a hard labeling (rows floored
    /// at [`TAU_FLOOR`] so the type invariant holds).
    pub fn hard(z: &LabelAssignment) -> Self {
        let k = z.k();
        let mut p = VariationalPosterior { k, tau: vec![0.0; z.n() * k] };
        for i in 0..z.n() {
            p.tau[i * k + z.label(i)] = 1.0;
            normalize_row(&mut p.tau[i * k..(i + 1) * k]);
        }
        p
    }

    /// Build from a dense row-major buffer, normalizing each row.
    pub fn from_rows(n: usize, k: usize, mut tau: Vec<f64>) -> Result<Self> {
        if tau.len() != n * k || k == 0 {
            return Err(SbmError::InvalidParameter(format!(
                "posterior buffer of length {} does not match {n} x {k}",
                tau.len()
            )));
        }
        if tau.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(SbmError::InvalidParameter(
                "posterior entries must be finite and non-negative".into(),
            ));
        }
        for row in tau.chunks_exact_mut(k) {
            if row.iter().sum::<f64>() <= 0.0 {
                return Err(SbmError::InvalidParameter("posterior row sums to zero".into()));
            }
            normalize_row(row);
        }
        Ok(VariationalPosterior { k, tau })
    }

    pub fn n(&self) -> usize {
        self.tau.len() / self.k
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.tau[i * self.k..(i + 1) * self.k]
    }

    #[inline]
    pub fn get(&self, i: usize, a: usize) -> f64 {
        self.tau[i * self.k + a]
    }
}

/// Normalize a row to sum one while keeping every entry at least
/// [`TAU_FLOOR`]. The final floor pass re-raises entries the renormalization
/// nudged below the floor; it perturbs the sum by at most `k^2 * floor^2`.
pub(crate) fn normalize_row(row: &mut [f64]) {
    let sum: f64 = row.iter().sum();
    for v in row.iter_mut() {
        *v = (*v / sum).max(TAU_FLOOR);
    }
    let sum: f64 = row.iter().sum();
    for v in row.iter_mut() {
        *v = (*v / sum).max(TAU_FLOOR);
    }
}

/// Options of the EM loop.
#[derive(Debug, Clone)]
pub struct EmConfig {
    /// Maximum number of outer (E+M) iterations per restart.
    pub max_iter: usize,
    /// Convergence threshold on `|dJ| / (1 + |J|)`.
    pub tol: f64,
    /// Number of restarts; the first uses the spectral initialization as is,
    /// later ones perturb it.
    pub restarts: usize,
    /// Blend factor in `[0, 1)` between the previous and the updated row;
    /// 0 applies the fixed-point update unchanged.
    pub damping: f64,
    /// Master seed for initialization and restart noise.
    pub seed: u64,
    /// Full fixed-point sweeps over the nodes per estimation step.
    pub fixed_point_sweeps: usize,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig { max_iter: 100, tol: 1e-6, restarts: 5, damping: 0.0, seed: 0, fixed_point_sweeps: 3 }
    }
}

impl EmConfig {
    pub fn with_seed(seed: u64) -> Self {
        EmConfig { seed, ..EmConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(SbmError::InvalidParameter("max_iter must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(SbmError::InvalidParameter("tol must be positive".into()));
        }
        if self.restarts < 1 {
            return Err(SbmError::InvalidParameter("restarts must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(SbmError::InvalidParameter("damping must lie in [0, 1)".into()));
        }
        if self.fixed_point_sweeps < 1 {
            return Err(SbmError::InvalidParameter("fixed_point_sweeps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a fit: the winning restart's posterior, parameters and
/// objective trace.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub tau: VariationalPosterior,
    pub alpha: Vec<f64>,
    pub q: BlockMatrix,
    /// Objective value after each outer iteration; non-decreasing up to
    /// 1e-8 absolute slack.
    pub elbo_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Which restart produced this result.
    pub restart_index: usize,
}

impl FitResult {
    /// Final objective value.
    pub fn elbo(&self) -> f64 {
        *self.elbo_trace.last().expect("at least one iteration runs")
    }
}

/// Log-probability tables for the two observation outcomes.
struct LogQ {
    edge: Vec<f64>,
    gap: Vec<f64>,
}

impl LogQ {
    fn new(q: &BlockMatrix) -> Self {
        let k = q.k();
        let mut edge = vec![0.0; k * k];
        let mut gap = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                let p = clamp_prob(q.get(a, b));
                edge[a * k + b] = p.ln();
                gap[a * k + b] = (1.0 - p).ln();
            }
        }
        LogQ { edge, gap }
    }

    #[inline]
    fn table(&self, is_edge: bool) -> &[f64] {
        if is_edge {
            &self.edge
        } else {
            &self.gap
        }
    }
}

fn observed_neighbours(x: &SamplingMask) -> Vec<Vec<usize>> {
    let n = x.n();
    let mut nb = vec![Vec::new(); n];
    for (i, j) in x.pairs() {
        nb[i].push(j);
        nb[j].push(i);
    }
    nb
}

/// Evidence lower bound at `(tau, alpha, q)`.
pub fn elbo(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    tau: &VariationalPosterior,
    alpha: &[f64],
    q: &BlockMatrix,
) -> f64 {
    let k = tau.k();
    let lq = LogQ::new(q);
    let log_alpha: Vec<f64> = alpha.iter().map(|&v| v.ln()).collect();

    let mut total = 0.0;
    for i in 0..tau.n() {
        let row = tau.row(i);
        for aa in 0..k {
            total += row[aa] * (log_alpha[aa] - row[aa].ln());
        }
    }
    for (i, j) in x.pairs() {
        let table = lq.table(a.edge(i, j));
        let (ri, rj) = (tau.row(i), tau.row(j));
        let mut w = 0.0;
        for aa in 0..k {
            let tia = ri[aa];
            for bb in 0..k {
                w += tia * rj[bb] * table[aa * k + bb];
            }
        }
        total += w;
    }
    total
}

/// One estimation step: `sweeps` sequential fixed-point passes over the
/// nodes, rows updated in index order using the freshest values.
pub fn e_step(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    tau: &VariationalPosterior,
    alpha: &[f64],
    q: &BlockMatrix,
    sweeps: usize,
) -> VariationalPosterior {
    e_step_damped(a, x, tau, alpha, q, sweeps, 0.0)
}

/// As [`e_step`], blending each updated row with the previous one:
/// `row <- (1 - damping) * update + damping * row`.
pub fn e_step_damped(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    tau: &VariationalPosterior,
    alpha: &[f64],
    q: &BlockMatrix,
    sweeps: usize,
    damping: f64,
) -> VariationalPosterior {
    let k = tau.k();
    let n = tau.n();
    let lq = LogQ::new(q);
    let log_alpha: Vec<f64> = alpha.iter().map(|&v| v.ln()).collect();
    let nb = observed_neighbours(x);

    let mut cur = tau.clone();
    let mut field = vec![0.0; k];
    for _ in 0..sweeps {
        for i in 0..n {
            field.copy_from_slice(&log_alpha);
            for &j in &nb[i] {
                let table = lq.table(a.edge(i, j));
                let rj = cur.row(j);
                for (aa, f) in field.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for bb in 0..k {
                        acc += rj[bb] * table[aa * k + bb];
                    }
                    *f += acc;
                }
            }
            let max = field.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let row = &mut cur.tau[i * k..(i + 1) * k];
            for (slot, &f) in row.iter_mut().zip(field.iter()) {
                let fresh = (f - max).exp();
                *slot = if damping > 0.0 { damping * *slot + (1.0 - damping) * fresh } else { fresh };
            }
            normalize_row(row);
        }
    }
    cur
}

/// One maximization step: `alpha` is the column mean of `tau` and `q` the
/// responsibility-weighted empirical mean of the observed entries, with the
/// global observed density substituted when a block pair carries no weight.
pub fn m_step(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    tau: &VariationalPosterior,
) -> (Vec<f64>, BlockMatrix) {
    let k = tau.k();
    let n = tau.n();
    let mut alpha = vec![0.0; k];
    for i in 0..n {
        for (aa, v) in tau.row(i).iter().enumerate() {
            alpha[aa] += v;
        }
    }
    for v in alpha.iter_mut() {
        *v /= n as f64;
    }

    let mut num = vec![0.0; k * k];
    let mut den = vec![0.0; k * k];
    for (i, j) in x.pairs() {
        let (ri, rj) = (tau.row(i), tau.row(j));
        let edge = a.edge(i, j);
        for aa in 0..k {
            for bb in 0..k {
                // both orientations of the ordered sum
                let w = ri[aa] * rj[bb] + rj[aa] * ri[bb];
                den[aa * k + bb] += w;
                if edge {
                    num[aa * k + bb] += w;
                }
            }
        }
    }
    let fallback = observed_density_or_half(a, x);
    let mut q = BlockMatrix::constant(k, 0.0);
    for aa in 0..k {
        for bb in aa..k {
            let d = den[aa * k + bb];
            let v = if d > 0.0 { num[aa * k + bb] / d } else { fallback };
            q.set_sym(aa, bb, clamp_prob(v));
        }
    }
    (alpha, q)
}

/// Multiply every entry by `exp(0.5 g)`, `g` standard normal, then
/// renormalize: a seeded perturbation that stays on the simplex.
fn perturb(tau: &VariationalPosterior, rng: &mut impl Rng) -> VariationalPosterior {
    let mut out = tau.clone();
    let k = out.k;
    for row in out.tau.chunks_exact_mut(k) {
        for v in row.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *v *= (0.5 * g).exp();
        }
        normalize_row(row);
    }
    out
}

fn run_restart(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    tau0: VariationalPosterior,
    cfg: &EmConfig,
    restart_index: usize,
) -> Option<FitResult> {
    let mut tau = tau0;
    let (mut alpha, mut q) = m_step(a, x, &tau);
    let mut prev = elbo(a, x, &tau, &alpha, &q);
    let mut trace = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        tau = e_step_damped(a, x, &tau, &alpha, &q, cfg.fixed_point_sweeps, cfg.damping);
        let (na, nq) = m_step(a, x, &tau);
        alpha = na;
        q = nq;
        let j = elbo(a, x, &tau, &alpha, &q);
        if !j.is_finite() {
            log::warn!("restart {restart_index}: non-finite objective, discarding");
            return None;
        }
        trace.push(j);
        if (j - prev).abs() / (1.0 + j.abs()) < cfg.tol {
            converged = true;
            break;
        }
        prev = j;
    }
    Some(FitResult {
        tau,
        alpha,
        q,
        iterations: trace.len(),
        elbo_trace: trace,
        converged,
        restart_index,
    })
}

/// Fit the variational block model by restarted EM and return the restart
/// with the highest final objective.
pub fn fit_varem(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    k: usize,
    cfg: &EmConfig,
) -> Result<FitResult> {
    cfg.validate()?;
    if a.n() != x.n() {
        return Err(SbmError::Dimension(format!(
            "adjacency is {}x{0} but mask is {}x{1}",
            a.n(),
            x.n()
        )));
    }
    let base = init_tau(a, x, k, cfg.seed)?;
    let mut best: Option<FitResult> = None;
    for r in 0..cfg.restarts {
        let tau0 = if r == 0 {
            base.clone()
        } else {
            let mut rng = stream_rng(cfg.seed, STREAM_RESTART, r as u64);
            perturb(&base, &mut rng)
        };
        if let Some(fit) = run_restart(a, x, tau0, cfg, r) {
            if best.as_ref().is_none_or(|b| fit.elbo() > b.elbo()) {
                best = Some(fit);
            }
        }
    }
    best.ok_or_else(|| SbmError::Numerical("every EM restart was discarded".into()))
}
