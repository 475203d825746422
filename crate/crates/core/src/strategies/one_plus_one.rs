//! Elitist (1+1) evolution strategy with the 1/5th success rule.

use nalgebra::DVector;

use super::objective::EvalBudgetedObjective;
use super::StepOutcome;
use crate::problems::EvalError;
use crate::sampling::MutationPipeline;

/// Search point, step size, and damping of the (1+1) strategy. The mean is
/// the best point seen so far.
#[derive(Debug, Clone)]
pub struct OnePlusOneState {
    pub m: DVector<f64>,
    pub sigma: f64,
    pub d: f64,
    best: f64,
}

impl OnePlusOneState {
    /// Evaluates the start point (one evaluation) and initializes
    /// d = sqrt(n + 1). Returns `None` when the budget is already spent.
    pub fn new(
        x0: DVector<f64>,
        sigma0: f64,
        obj: &mut EvalBudgetedObjective,
    ) -> Result<Option<Self>, EvalError> {
        assert!(sigma0 > 0.0, "sigma0 must be positive");
        let n = x0.len();
        let Some(p) = obj.try_evaluate(&x0)? else {
            return Ok(None);
        };
        Ok(Some(OnePlusOneState {
            m: x0,
            sigma: sigma0,
            d: ((n + 1) as f64).sqrt(),
            best: p.value(),
        }))
    }

    /// Precision of the current search point.
    pub fn best(&self) -> f64 {
        self.best
    }
}

/// One candidate evaluation: x = m + sigma z, multiplicative step-size
/// update from the success indicator, elitist replacement on f(x) <= f(m).
pub fn one_plus_one_step(
    state: &mut OnePlusOneState,
    pipe: &mut MutationPipeline,
    obj: &mut EvalBudgetedObjective,
) -> Result<StepOutcome, EvalError> {
    if obj.budget_exhausted() {
        return Ok(StepOutcome::BudgetExhausted);
    }
    let z = pipe.sample_z(state.m.len());
    let x = &state.m + state.sigma * z;
    let Some(p) = obj.try_evaluate(&x)? else {
        return Ok(StepOutcome::BudgetExhausted);
    };
    let success = p.value() <= state.best;
    let indicator = if success { 1.0 } else { 0.0 };
    state.sigma *= ((indicator - 0.2) / state.d).exp();
    if success {
        state.m = x;
        state.best = p.value();
    }
    Ok(if obj.target_reached() {
        StepOutcome::TargetReached
    } else {
        StepOutcome::Continued
    })
}
