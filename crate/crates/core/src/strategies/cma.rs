//! Covariance matrix adaptation ES, comma and plus (elitist) selection.
//!
//! The sampler is pluggable: candidate i is m + sigma A z_i with z_i drawn
//! from the configured mutation pipeline. The evolution-path length is
//! normalized by a constant rho suited to the mutation distribution
//! (sqrt(n) for finite-variance kinds, 1.18 n for Cauchy) instead of the
//! Gaussian norm expectation baked into the classic update.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::objective::EvalBudgetedObjective;
use super::StepOutcome;
use crate::problems::EvalError;
use crate::sampling::MutationPipeline;

// Eigenvalue floor relative to the largest eigenvalue.
const EIGENVALUE_FLOOR_REL: f64 = 1e-20;
// Overflow guards only; legitimate runs never approach these.
const SIGMA_MIN: f64 = 1e-300;
const SIGMA_MAX: f64 = 1e150;

/// Population size and learning-rate constants for dimension n.
#[derive(Debug, Clone, PartialEq)]
pub struct CmaParams {
    pub lambda: usize,
    pub mu: usize,
    pub weights: DVector<f64>,
    pub mu_eff: f64,
    pub c_sigma: f64,
    pub d_sigma: f64,
    pub c_c: f64,
    pub c_1: f64,
    pub c_mu: f64,
    pub c_m: f64,
    /// Evolution-path normalization constant.
    pub rho: f64,
}

impl CmaParams {
    pub fn new(n: usize, rho: f64) -> Self {
        assert!(n >= 2);
        assert!(rho > 0.0);
        let nf = n as f64;
        let lambda = 4 + (3.0 * nf.ln()).floor() as usize;
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights = DVector::from_iterator(mu, raw.iter().map(|w| w / total));
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let c_sigma = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
        let c_1 = 2.0 / ((nf + 1.3) * (nf + 1.3) + mu_eff);
        let c_mu =
            (1.0 - c_1).min(2.0 * (mu_eff - 0.25 + 1.0 / mu_eff) / ((nf + 2.0) * (nf + 2.0) + mu_eff));
        CmaParams {
            lambda,
            mu,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            c_m: 1.0,
            rho,
        }
    }

    /// Multiplicative step-size factor for an observed path length.
    pub fn sigma_update_factor(&self, p_sigma_norm: f64) -> f64 {
        ((self.c_sigma / self.d_sigma) * (p_sigma_norm / self.rho - 1.0)).exp()
    }
}

// One evaluated individual: its precision and its scaled mutation step A z
// from the generation it was sampled in.
#[derive(Debug, Clone)]
struct Individual {
    precision: f64,
    az: DVector<f64>,
}

/// Full adaptation state of one CMA run.
#[derive(Debug, Clone)]
pub struct CmaState {
    pub m: DVector<f64>,
    pub sigma: f64,
    params: CmaParams,
    elitist: bool,
    c: DMatrix<f64>,
    a: DMatrix<f64>,
    a_inv: DMatrix<f64>,
    p_sigma: DVector<f64>,
    p_c: DVector<f64>,
    // Selected parents of the previous generation (plus selection only).
    parents: Option<Vec<Individual>>,
    covariance_resets: u32,
}

impl CmaState {
    pub fn new(x0: DVector<f64>, sigma0: f64, params: CmaParams, elitist: bool) -> Self {
        assert!(sigma0 > 0.0);
        let n = x0.len();
        CmaState {
            m: x0,
            sigma: sigma0,
            params,
            elitist,
            c: DMatrix::identity(n, n),
            a: DMatrix::identity(n, n),
            a_inv: DMatrix::identity(n, n),
            p_sigma: DVector::zeros(n),
            p_c: DVector::zeros(n),
            parents: None,
            covariance_resets: 0,
        }
    }

    pub fn params(&self) -> &CmaParams {
        &self.params
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn transform_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn path_sigma(&self) -> &DVector<f64> {
        &self.p_sigma
    }

    /// Number of times the covariance lost positive definiteness beyond
    /// repair and was reset to the identity.
    pub fn covariance_resets(&self) -> u32 {
        self.covariance_resets
    }

    fn reset_covariance(&mut self) {
        let n = self.m.len();
        self.c = DMatrix::identity(n, n);
        self.a = DMatrix::identity(n, n);
        self.a_inv = DMatrix::identity(n, n);
        self.p_sigma = DVector::zeros(n);
        self.p_c = DVector::zeros(n);
        self.covariance_resets += 1;
    }

    // Eigendecompose C = B D^2 B^T, set A = B D and A^-1 = D^-1 B^T.
    // Eigenvalues below the relative floor are lifted (and C rebuilt from
    // the lifted spectrum); an unusable spectrum triggers a full reset.
    fn refresh_decomposition(&mut self) {
        if self.c.iter().any(|v| !v.is_finite()) {
            self.reset_covariance();
            return;
        }
        let eigen = SymmetricEigen::new(self.c.clone());
        let max_eig = eigen.eigenvalues.fold(f64::NEG_INFINITY, |a, b| a.max(b));
        if !max_eig.is_finite() || max_eig <= 0.0 {
            self.reset_covariance();
            return;
        }
        let floor = max_eig * EIGENVALUE_FLOOR_REL;
        let needs_floor = eigen.eigenvalues.iter().any(|&v| v < floor);
        let values = eigen.eigenvalues.map(|v| v.max(floor));
        let b = eigen.eigenvectors;
        let d = values.map(f64::sqrt);
        self.a = &b * DMatrix::from_diagonal(&d);
        self.a_inv = DMatrix::from_diagonal(&d.map(|v| 1.0 / v)) * b.transpose();
        if needs_floor {
            let rebuilt = &b * DMatrix::from_diagonal(&values) * b.transpose();
            self.c = 0.5 * (&rebuilt + rebuilt.transpose());
        }
    }
}

/// One generation of CMA.
///
/// Samples lambda candidates, ranks by precision (the plus variant ranks
/// the union with the stored parents, which keep the A z of the generation
/// that created them), recombines the best mu with the log weights, and
/// runs the path, step-size, and covariance updates.
pub fn cma_step(
    state: &mut CmaState,
    pipe: &mut MutationPipeline,
    obj: &mut EvalBudgetedObjective,
) -> Result<StepOutcome, EvalError> {
    if obj.budget_exhausted() {
        return Ok(StepOutcome::BudgetExhausted);
    }
    let n = state.m.len();
    let mut offspring: Vec<Individual> = Vec::with_capacity(state.params.lambda);
    for _ in 0..state.params.lambda {
        let z = pipe.sample_z(n);
        let az = &state.a * z;
        let x = &state.m + state.sigma * &az;
        let Some(p) = obj.try_evaluate(&x)? else {
            return Ok(StepOutcome::BudgetExhausted);
        };
        offspring.push(Individual {
            precision: p.value(),
            az,
        });
        if obj.target_reached() {
            return Ok(StepOutcome::TargetReached);
        }
    }

    // Parents come first so the stable sort breaks ties by seniority.
    let mut pool = match (&state.parents, state.elitist) {
        (Some(parents), true) => {
            let mut pool = parents.clone();
            pool.extend(offspring);
            pool
        }
        _ => offspring,
    };
    pool.sort_by(|a, b| a.precision.partial_cmp(&b.precision).unwrap());
    pool.truncate(state.params.mu);
    if state.elitist {
        state.parents = Some(pool.clone());
    }

    let mut y_w = DVector::zeros(n);
    for (individual, &w) in pool.iter().zip(state.params.weights.iter()) {
        y_w += w * &individual.az;
    }

    state.m += state.params.c_m * state.sigma * &y_w;

    let cs = state.params.c_sigma;
    let z_w = &state.a_inv * &y_w;
    state.p_sigma = (1.0 - cs) * &state.p_sigma
        + (cs * (2.0 - cs) * state.params.mu_eff).sqrt() * z_w;
    state.sigma *= state.params.sigma_update_factor(state.p_sigma.norm());
    state.sigma = state.sigma.clamp(SIGMA_MIN, SIGMA_MAX);

    let cc = state.params.c_c;
    state.p_c =
        (1.0 - cc) * &state.p_c + (cc * (2.0 - cc) * state.params.mu_eff).sqrt() * &y_w;

    let mut rank_mu = DMatrix::zeros(n, n);
    for (individual, &w) in pool.iter().zip(state.params.weights.iter()) {
        rank_mu += w * &individual.az * individual.az.transpose();
    }
    // Weights sum to one, so the decay factor is 1 - c1 - c_mu.
    state.c = (1.0 - state.params.c_1 - state.params.c_mu) * &state.c
        + state.params.c_1 * &state.p_c * state.p_c.transpose()
        + state.params.c_mu * rank_mu;
    state.c = 0.5 * (&state.c + state.c.transpose());
    state.refresh_decomposition();
    Ok(StepOutcome::Continued)
}
