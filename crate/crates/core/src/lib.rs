//! Evolution strategies with pluggable mutation distributions.
//!
//! The mutation vector of an ES is ordinarily standard normal. Here it is
//! produced by inverse-transform sampling through the percent point
//! function of any of six symmetric distributions, so the same strategies
//! — a (1+1)-ES with 1/5th success rule, a self-adaptive (mu/mu, lambda)
//! ES, and comma/plus CMA-ES — run unchanged on Cauchy, double Weibull,
//! Gaussian, Laplace, logistic, or uniform mutations. The crate also ships
//! the benchmark problems, step-length and angle probes, and the
//! attainment-based performance analysis used to compare them.

pub mod distributions;
pub mod perf;
pub mod problems;
pub mod rng;
pub mod sampling;
pub mod special;
pub mod strategies;

pub use distributions::{DistKind, Moment, MomentSummary};
pub use perf::{EafCurve, RunEvent, RunHeader, RunLog, Sigma0};
pub use problems::{FunctionId, Precision, ProblemInstance};
pub use sampling::{MutationPipeline, NormStats, PipelineMode};
pub use strategies::{Algorithm, RunSpec, StepOutcome};

// The matrix and vector types used throughout the public API.
pub use nalgebra;
