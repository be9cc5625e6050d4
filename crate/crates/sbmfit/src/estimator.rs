//! Connection-probability estimators behind a common interface.
//!
//! Every estimator consumes the observed graph `(A, X)` plus whatever side
//! information it needs from the [`EstimatorContext`] and produces a
//! [`ThetaMatrix`]. Estimators register by name so experiment configs and
//! the CLI can select them at runtime: `var`, `oracle`, `trivial`, `naive`,
//! `svt`.

use crate::error::{Result, SbmError};
use crate::graph::{AdjacencyMatrix, BlockMatrix, LabelAssignment, SamplingMask, ThetaMatrix};
use crate::likelihood::{clamp_prob, observed_density, profile_q};
use crate::svt::{soft_impute, SvtConfig};
use crate::varem::{fit_varem, EmConfig, VariationalPosterior};

/// Hard labels from the posterior: per-row argmax, ties to the smallest
/// community index.
pub fn extract_labels(tau: &VariationalPosterior) -> LabelAssignment {
    let k = tau.k();
    let z = (0..tau.n())
        .map(|i| {
            let row = tau.row(i);
            let mut arg = 0;
            for a in 1..k {
                if row[a] > row[arg] {
                    arg = a;
                }
            }
            arg
        })
        .collect();
    LabelAssignment::new(z, k).expect("argmax labels are in range")
}

/// The headline estimator: hard labels from the posterior combined with the
/// per-block empirical mean of the observed entries. The block matrix is
/// clamped away from {0, 1} so downstream likelihood evaluations stay finite.
pub fn var_theta(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    tau: &VariationalPosterior,
) -> Result<(LabelAssignment, BlockMatrix, ThetaMatrix)> {
    let z = extract_labels(tau);
    let q = profile_q(a, x, &z)?.map(clamp_prob);
    let theta = block_theta(&z, &q);
    Ok((z, q, theta))
}

/// Reference estimator with hindsight knowledge of the true labels: the
/// per-block empirical mean evaluated at `z_true`.
pub fn oracle_theta(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    z_true: &LabelAssignment,
) -> Result<ThetaMatrix> {
    let q = profile_q(a, x, z_true)?.map(clamp_prob);
    Ok(block_theta(z_true, &q))
}

fn block_theta(z: &LabelAssignment, q: &BlockMatrix) -> ThetaMatrix {
    ThetaMatrix::from_fn(z.n(), |i, j| q.get(z.label(i), z.label(j)))
}

/// Constant estimator equal to the observed edge density everywhere (under
/// full observation this is the mean degree divided by `n - 1`).
pub fn trivial_theta(a: &AdjacencyMatrix, x: &SamplingMask) -> ThetaMatrix {
    let density = match observed_density(a, x) {
        Some(d) => d,
        None => {
            log::warn!("empty mask: trivial estimator falls back to 1/2");
            0.5
        }
    };
    ThetaMatrix::from_fn(a.n(), |_, _| density)
}

/// Persistence baseline: observed entries are copied verbatim, unobserved
/// ones are set to the average observed degree divided by `n`.
pub fn naive_persistent_theta(a: &AdjacencyMatrix, x: &SamplingMask) -> ThetaMatrix {
    let n = a.n();
    let mut observed_degree_total = 0usize;
    for (i, j) in x.pairs() {
        observed_degree_total += 2 * a.edge(i, j) as usize;
    }
    let fill = observed_degree_total as f64 / (n as f64) / (n as f64);
    ThetaMatrix::from_fn(n, |i, j| {
        if x.observed(i, j) {
            a.edge(i, j) as u8 as f64
        } else {
            fill
        }
    })
}

/// Everything an estimator may consume.
pub struct EstimatorContext<'a> {
    pub a: &'a AdjacencyMatrix,
    pub x: &'a SamplingMask,
    /// Number of communities assumed by model-based estimators.
    pub k: usize,
    pub em: EmConfig,
    pub svt: SvtConfig,
    /// Planted labels, available in simulations only.
    pub z_true: Option<&'a LabelAssignment>,
}

impl<'a> EstimatorContext<'a> {
    pub fn new(a: &'a AdjacencyMatrix, x: &'a SamplingMask, k: usize) -> Self {
        EstimatorContext {
            a,
            x,
            k,
            em: EmConfig::default(),
            svt: SvtConfig::for_rank(k),
            z_true: None,
        }
    }
}

/// Estimator output: the probability matrix plus hard labels when the
/// method produces them.
pub struct Estimate {
    pub theta: ThetaMatrix,
    pub labels: Option<LabelAssignment>,
}

/// A named connection-probability estimation strategy.
pub trait ThetaEstimator: Send + Sync {
    fn name(&self) -> &'static str;
    fn estimate(&self, ctx: &EstimatorContext) -> Result<Estimate>;
}

struct VarEstimator;

impl ThetaEstimator for VarEstimator {
    fn name(&self) -> &'static str {
        "var"
    }

    fn estimate(&self, ctx: &EstimatorContext) -> Result<Estimate> {
        let fit = fit_varem(ctx.a, ctx.x, ctx.k, &ctx.em)?;
        let (z, _, theta) = var_theta(ctx.a, ctx.x, &fit.tau)?;
        Ok(Estimate { theta, labels: Some(z) })
    }
}

struct OracleEstimator;

impl ThetaEstimator for OracleEstimator {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn estimate(&self, ctx: &EstimatorContext) -> Result<Estimate> {
        let z = ctx.z_true.ok_or_else(|| {
            SbmError::InvalidParameter("oracle estimator needs the true labels".into())
        })?;
        Ok(Estimate { theta: oracle_theta(ctx.a, ctx.x, z)?, labels: Some(z.clone()) })
    }
}

struct TrivialEstimator;

impl ThetaEstimator for TrivialEstimator {
    fn name(&self) -> &'static str {
        "trivial"
    }

    fn estimate(&self, ctx: &EstimatorContext) -> Result<Estimate> {
        Ok(Estimate { theta: trivial_theta(ctx.a, ctx.x), labels: None })
    }
}

struct NaiveEstimator;

impl ThetaEstimator for NaiveEstimator {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn estimate(&self, ctx: &EstimatorContext) -> Result<Estimate> {
        Ok(Estimate { theta: naive_persistent_theta(ctx.a, ctx.x), labels: None })
    }
}

struct SvtEstimator;

impl ThetaEstimator for SvtEstimator {
    fn name(&self) -> &'static str {
        "svt"
    }

    fn estimate(&self, ctx: &EstimatorContext) -> Result<Estimate> {
        Ok(Estimate { theta: soft_impute(ctx.a, ctx.x, &ctx.svt)?, labels: None })
    }
}

/// All registered estimators.
pub fn registry() -> Vec<Box<dyn ThetaEstimator>> {
    vec![
        Box::new(VarEstimator),
        Box::new(OracleEstimator),
        Box::new(TrivialEstimator),
        Box::new(NaiveEstimator),
        Box::new(SvtEstimator),
    ]
}

/// Look an estimator up by its registered name.
pub fn by_name(name: &str) -> Result<Box<dyn ThetaEstimator>> {
    registry()
        .into_iter()
        .find(|e| e.name() == name)
        .ok_or_else(|| {
            let known: Vec<&str> = registry().iter().map(|e| e.name()).collect();
            SbmError::InvalidParameter(format!(
                "unknown estimator {name:?}; registered: {}",
                known.join(", ")
            ))
        })
}
