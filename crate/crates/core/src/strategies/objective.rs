//! Budget-tracked objective shared by all strategies.

use nalgebra::DVector;

use crate::perf::RunEvent;
use crate::problems::{EvalError, Precision, ProblemInstance};

/// Precision below which a run counts as solved.
pub const DEFAULT_TARGET_PRECISION: f64 = 1e-8;
/// Logged precision values are floored here; the raw value still drives
/// termination.
pub const PRECISION_DISPLAY_FLOOR: f64 = 1e-8;

/// Wraps a problem instance with an evaluation budget, best-so-far
/// tracking, and the improvement event log.
#[derive(Debug)]
pub struct EvalBudgetedObjective<'a> {
    problem: &'a ProblemInstance,
    budget: u64,
    target: f64,
    evals_used: u64,
    best_precision: f64,
    events: Vec<RunEvent>,
}

impl<'a> EvalBudgetedObjective<'a> {
    pub fn new(problem: &'a ProblemInstance, budget: u64, target: f64) -> Self {
        EvalBudgetedObjective {
            problem,
            budget,
            target,
            evals_used: 0,
            best_precision: f64::INFINITY,
            events: Vec::new(),
        }
    }

    pub fn problem(&self) -> &ProblemInstance {
        self.problem
    }

    pub fn dimension(&self) -> usize {
        self.problem.dimension()
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn evals_used(&self) -> u64 {
        self.evals_used
    }

    pub fn best_precision(&self) -> f64 {
        self.best_precision
    }

    pub fn target_reached(&self) -> bool {
        self.best_precision <= self.target
    }

    pub fn budget_exhausted(&self) -> bool {
        self.evals_used >= self.budget
    }

    /// Evaluates a candidate, consuming one evaluation. Returns `None`
    /// without evaluating once the budget is spent.
    pub fn try_evaluate(&mut self, x: &DVector<f64>) -> Result<Option<Precision>, EvalError> {
        if self.budget_exhausted() {
            return Ok(None);
        }
        let p = self.problem.evaluate(x)?;
        self.evals_used += 1;
        if p.value() < self.best_precision {
            self.best_precision = p.value();
            let displayed = p.value().max(PRECISION_DISPLAY_FLOOR);
            let improves_display = self
                .events
                .last()
                .is_none_or(|last| displayed < last.best_precision);
            if improves_display {
                self.events.push(RunEvent {
                    evals: self.evals_used,
                    best_precision: displayed,
                });
            }
        }
        Ok(Some(p))
    }

    pub fn events(&self) -> &[RunEvent] {
        &self.events
    }

    pub fn into_events(self) -> Vec<RunEvent> {
        self.events
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_instance, FunctionId};

    #[test]
    fn budget_is_exact_and_events_monotone() {
        let inst = make_instance(FunctionId::Sphere, 3, 1);
        let mut obj = EvalBudgetedObjective::new(&inst, 5, DEFAULT_TARGET_PRECISION);
        let x = inst.center_start();
        for _ in 0..5 {
            assert!(obj.try_evaluate(&x).unwrap().is_some());
        }
        assert!(obj.budget_exhausted());
        assert!(obj.try_evaluate(&x).unwrap().is_none());
        assert_eq!(obj.evals_used(), 5);
        // Re-evaluating the same point yields exactly one event.
        assert_eq!(obj.events().len(), 1);
        assert_eq!(obj.events()[0].evals, 1);
    }

    #[test]
    fn displayed_precision_is_floored() {
        let inst = make_instance(FunctionId::Sphere, 3, 1);
        let mut obj = EvalBudgetedObjective::new(&inst, 10, DEFAULT_TARGET_PRECISION);
        let exact = inst.x_opt().clone();
        obj.try_evaluate(&exact).unwrap();
        assert_eq!(obj.events()[0].best_precision, PRECISION_DISPLAY_FLOOR);
        assert!(obj.target_reached());
    }
}
