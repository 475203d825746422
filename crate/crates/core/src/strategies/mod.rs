//! The four optimizers, a shared run driver, and run-log assembly.

mod cma;
mod objective;
mod one_plus_one;
mod sigma_sa;

pub use cma::{cma_step, CmaParams, CmaState};
pub use objective::{EvalBudgetedObjective, DEFAULT_TARGET_PRECISION, PRECISION_DISPLAY_FLOOR};
pub use one_plus_one::{one_plus_one_step, OnePlusOneState};
pub use sigma_sa::{sigma_sa_step, SigmaSaState};

use nalgebra::DVector;
use std::fmt;
use std::str::FromStr;

use crate::distributions::{norm_normalizer, DistKind, UnknownName};
use crate::perf::{RunHeader, RunLog, Sigma0};
use crate::problems::{EvalError, ProblemInstance};
use crate::sampling::{MutationPipeline, PipelineMode};

/// Evaluations per run when nothing else is configured: 10^4 n.
pub fn default_budget(n: usize) -> u64 {
    10_000 * n as u64
}

/// Default initial step size: 2 for the single-sigma strategies, 10^(1/4)
/// per coordinate for the self-adaptive one.
pub fn default_sigma0(algorithm: Algorithm) -> Sigma0 {
    match algorithm {
        Algorithm::SigmaSa => Sigma0::Scalar(10f64.powf(0.25)),
        _ => Sigma0::Scalar(2.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    OnePlusOne,
    SigmaSa,
    CmaComma,
    CmaPlus,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::OnePlusOne,
        Algorithm::SigmaSa,
        Algorithm::CmaComma,
        Algorithm::CmaPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::OnePlusOne => "one_plus_one",
            Algorithm::SigmaSa => "sigma_sa",
            Algorithm::CmaComma => "cma_comma",
            Algorithm::CmaPlus => "cma_plus",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| UnknownName(s.to_string()))
    }
}

/// Result of advancing a strategy by one step or generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Continued,
    TargetReached,
    BudgetExhausted,
}

/// Everything that defines a run except the problem instance and the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub algorithm: Algorithm,
    pub kind: DistKind,
    pub mode: PipelineMode,
    pub sigma0: Sigma0,
    pub budget: u64,
    pub target: f64,
    /// Overrides the evolution-path normalizer of the CMA variants;
    /// defaults to `norm_normalizer` for the configured distribution.
    pub rho_override: Option<f64>,
}

impl RunSpec {
    pub fn new(algorithm: Algorithm, kind: DistKind, mode: PipelineMode, budget: u64) -> Self {
        RunSpec {
            algorithm,
            kind,
            mode,
            sigma0: default_sigma0(algorithm),
            budget,
            target: DEFAULT_TARGET_PRECISION,
            rho_override: None,
        }
    }
}

fn sigma0_vector(sigma0: &Sigma0, n: usize) -> DVector<f64> {
    match sigma0 {
        Sigma0::Scalar(s) => DVector::from_element(n, *s),
        Sigma0::Vector(v) => {
            assert_eq!(v.len(), n, "sigma0 vector must match the dimension");
            DVector::from_vec(v.clone())
        }
    }
}

fn sigma0_scalar(sigma0: &Sigma0) -> f64 {
    match sigma0 {
        Sigma0::Scalar(s) => *s,
        Sigma0::Vector(_) => panic!("this strategy takes a scalar sigma0"),
    }
}

/// Runs one strategy on one instance until the precision target or the
/// evaluation budget is reached, and returns the completed log.
pub fn run(
    spec: &RunSpec,
    problem: &ProblemInstance,
    x0: &DVector<f64>,
    run_seed: u64,
) -> Result<RunLog, EvalError> {
    let n = problem.dimension();
    assert_eq!(x0.len(), n);
    let mut pipe = MutationPipeline::new(spec.kind, spec.mode, run_seed);
    let mut obj = EvalBudgetedObjective::new(problem, spec.budget, spec.target);

    match spec.algorithm {
        Algorithm::OnePlusOne => {
            if let Some(mut state) =
                OnePlusOneState::new(x0.clone(), sigma0_scalar(&spec.sigma0), &mut obj)?
            {
                if !obj.target_reached() {
                    while one_plus_one_step(&mut state, &mut pipe, &mut obj)?
                        == StepOutcome::Continued
                    {}
                }
            }
        }
        Algorithm::SigmaSa => {
            let mut state = SigmaSaState::new(x0.clone(), sigma0_vector(&spec.sigma0, n));
            while sigma_sa_step(&mut state, &mut pipe, &mut obj)? == StepOutcome::Continued {}
        }
        Algorithm::CmaComma | Algorithm::CmaPlus => {
            let rho = spec
                .rho_override
                .unwrap_or_else(|| norm_normalizer(spec.kind, n));
            let params = CmaParams::new(n, rho);
            let elitist = spec.algorithm == Algorithm::CmaPlus;
            let mut state =
                CmaState::new(x0.clone(), sigma0_scalar(&spec.sigma0), params, elitist);
            while cma_step(&mut state, &mut pipe, &mut obj)? == StepOutcome::Continued {}
        }
    }

    Ok(RunLog {
        header: RunHeader {
            algorithm: spec.algorithm.name().to_string(),
            distribution: spec.kind.name().to_string(),
            mode: spec.mode.name().to_string(),
            function: problem.function().name().to_string(),
            n,
            instance_seed: problem.instance_seed(),
            run_seed,
            sigma0: spec.sigma0.clone(),
            budget: spec.budget,
        },
        events: obj.into_events(),
    })
}

/// Step-size trajectory of the (1+1) strategy: sigma after every candidate
/// evaluation, run to the full budget with no precision target so the
/// adaptation behaviour stays visible.
pub fn sigma_trace_one_plus_one(
    kind: DistKind,
    mode: PipelineMode,
    problem: &ProblemInstance,
    x0: &DVector<f64>,
    sigma0: f64,
    budget: u64,
    run_seed: u64,
) -> Result<Vec<f64>, EvalError> {
    let mut pipe = MutationPipeline::new(kind, mode, run_seed);
    // Target 0 never triggers, so the trace spans the whole budget.
    let mut obj = EvalBudgetedObjective::new(problem, budget, 0.0);
    let mut trace = Vec::with_capacity(budget as usize);
    let Some(mut state) = OnePlusOneState::new(x0.clone(), sigma0, &mut obj)? else {
        return Ok(trace);
    };
    trace.push(state.sigma);
    while one_plus_one_step(&mut state, &mut pipe, &mut obj)? == StepOutcome::Continued {
        trace.push(state.sigma);
    }
    if (obj.evals_used() as usize) > trace.len() {
        trace.push(state.sigma);
    }
    Ok(trace)
}
