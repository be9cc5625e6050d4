//! Estimation of the connection-probability matrix of a stochastic block
//! model from a partially observed adjacency matrix.
//!
//! The pipeline: a mean-field variational EM ([`varem`]) fits per-node
//! community responsibilities on the observed entries only; hard labels are
//! extracted from the posterior and the connectivity matrix is re-estimated
//! by the per-block empirical mean ([`estimator::var_theta`]). Exact
//! enumeration references ([`likelihood`]), comparison baselines
//! ([`estimator`], [`svt`]), community-count selection ([`modelselect`]),
//! evaluation metrics ([`evaluation`]) and a seeded generator ([`sbm`])
//! round out the toolkit.

pub mod error;
pub mod estimator;
pub mod evaluation;
pub mod graph;
pub mod io;
pub mod likelihood;
pub mod modelselect;
pub mod rng;
pub mod sbm;
pub mod svt;
pub mod varem;

pub use error::{Result, SbmError};
pub use graph::{AdjacencyMatrix, BlockMatrix, LabelAssignment, SamplingMask, ThetaMatrix};
pub use sbm::SbmParams;
pub use svt::SvtConfig;
pub use varem::{EmConfig, FitResult, VariationalPosterior};
