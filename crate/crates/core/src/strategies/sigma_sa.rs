//! (mu/mu, lambda) evolution strategy with self-adaptive per-coordinate
//! step sizes and global intermediate recombination, comma selection.

use nalgebra::DVector;

use super::objective::EvalBudgetedObjective;
use super::StepOutcome;
use crate::problems::EvalError;
use crate::sampling::MutationPipeline;

/// Population mean, step-size vector, and the fixed strategy constants
/// lambda = 5n, mu = floor(lambda/4), tau = 1/sqrt(n), tau_i = n^(-1/4).
#[derive(Debug, Clone)]
pub struct SigmaSaState {
    pub m: DVector<f64>,
    pub sigma: DVector<f64>,
    pub lambda: usize,
    pub mu: usize,
    pub tau: f64,
    pub tau_i: f64,
}

impl SigmaSaState {
    pub fn new(x0: DVector<f64>, sigma0: DVector<f64>) -> Self {
        let n = x0.len();
        assert!(n >= 1);
        assert_eq!(sigma0.len(), n, "sigma0 must have one entry per coordinate");
        assert!(sigma0.iter().all(|&s| s > 0.0), "step sizes must be positive");
        let lambda = 5 * n;
        SigmaSaState {
            m: x0,
            sigma: sigma0,
            lambda,
            mu: (lambda / 4).max(1),
            tau: 1.0 / (n as f64).sqrt(),
            tau_i: (n as f64).powf(-0.25),
        }
    }
}

/// One generation: lambda offspring, each with its own lognormally mutated
/// step-size vector, ranked by precision; mean and step sizes recombine
/// over the best mu. The step-size mutation noise is always Gaussian no
/// matter which distribution drives the object mutation.
///
/// When the budget runs out mid-generation the evaluated offspring still
/// count but no recombination happens.
pub fn sigma_sa_step(
    state: &mut SigmaSaState,
    pipe: &mut MutationPipeline,
    obj: &mut EvalBudgetedObjective,
) -> Result<StepOutcome, EvalError> {
    if obj.budget_exhausted() {
        return Ok(StepOutcome::BudgetExhausted);
    }
    let n = state.m.len();
    let mut offspring: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(state.lambda);
    for _ in 0..state.lambda {
        let global = (state.tau * pipe.gaussian_scalar()).exp();
        let component = pipe.gaussian_vector(n);
        let sigma_i = DVector::from_iterator(
            n,
            state
                .sigma
                .iter()
                .zip(component.iter())
                .map(|(&s, &g)| s * (state.tau_i * g).exp() * global),
        );
        let z = pipe.sample_z(n);
        let x = &state.m + sigma_i.component_mul(&z);
        let Some(p) = obj.try_evaluate(&x)? else {
            return Ok(StepOutcome::BudgetExhausted);
        };
        offspring.push((p.value(), x, sigma_i));
        if obj.target_reached() {
            return Ok(StepOutcome::TargetReached);
        }
    }
    // Stable sort: ties keep generation order.
    offspring.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mu = state.mu as f64;
    let mut m = DVector::zeros(n);
    let mut sigma = DVector::zeros(n);
    for (_, x, s) in offspring.iter().take(state.mu) {
        m += x;
        sigma += s;
    }
    state.m = m / mu;
    state.sigma = sigma / mu;
    Ok(StepOutcome::Continued)
}
