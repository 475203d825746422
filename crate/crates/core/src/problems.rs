//! Benchmark objectives with seeded instances and a box-boundary penalty.
//!
//! Each instance shifts the optimum to a seeded location (and rotates the
//! coordinate frame for the non-separable functions), reports precision
//! f(x) - f_opt with f_opt = 0, and adds a penalty of 1e20 per unit of
//! Euclidean distance outside the recommended box [-5, 5]^n. The penalty
//! keeps algorithms from attaining better-than-optimal values by sampling
//! outside the domain, which the linear slope would otherwise permit.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::fmt;
use std::str::FromStr;

use crate::rng::{mix_seeds, stream_rng};

/// Recommended search domain, per coordinate.
pub const DOMAIN_LOWER: f64 = -5.0;
pub const DOMAIN_UPPER: f64 = 5.0;
/// Optimum locations are drawn uniformly from [-4, 4]^n (linear slope
/// instances instead place the optimum on a box corner).
pub const OPTIMUM_RANGE: f64 = 4.0;
/// Penalty per unit of boundary violation.
pub const BOUNDARY_PENALTY_SCALE: f64 = 1e20;

// Location of the maximum of w sin(sqrt(w)) on [0, 500]; the deceptive
// optimum structure of the Schwefel function is built around it.
const SCHWEFEL_X_STAR: f64 = 420.9687462275036;

/// The benchmark subset: one representative per difficulty class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionId {
    Sphere,
    LinearSlope,
    RastriginSep,
    Ellipsoid,
    Rosenbrock,
    Schwefel,
}

impl FunctionId {
    pub const ALL: [FunctionId; 6] = [
        FunctionId::Sphere,
        FunctionId::LinearSlope,
        FunctionId::RastriginSep,
        FunctionId::Ellipsoid,
        FunctionId::Rosenbrock,
        FunctionId::Schwefel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionId::Sphere => "sphere",
            FunctionId::LinearSlope => "linear_slope",
            FunctionId::RastriginSep => "rastrigin",
            FunctionId::Ellipsoid => "ellipsoid",
            FunctionId::Rosenbrock => "rosenbrock",
            FunctionId::Schwefel => "schwefel",
        }
    }

    /// Difficulty group: 1 separable, 2 low/moderate conditioning,
    /// 3 high conditioning, 4 multimodal with global structure,
    /// 5 multimodal with weak global structure.
    pub fn group(self) -> u8 {
        match self {
            FunctionId::Sphere | FunctionId::LinearSlope | FunctionId::RastriginSep => 1,
            FunctionId::Rosenbrock => 2,
            FunctionId::Ellipsoid => 3,
            FunctionId::Schwefel => 5,
        }
    }

    fn rotated(self) -> bool {
        matches!(self, FunctionId::Ellipsoid | FunctionId::Rosenbrock)
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionId {
    type Err = crate::distributions::UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FunctionId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| crate::distributions::UnknownName(s.to_string()))
    }
}

/// Nonnegative gap to the instance optimum, penalty included.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Precision(f64);

impl Precision {
    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("candidate contains a non-finite component")]
    NonFiniteInput,
    #[error("candidate has dimension {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
}

/// One seeded problem instance; immutable after construction, evaluation is
/// pure and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    function: FunctionId,
    n: usize,
    x_opt: DVector<f64>,
    f_opt: f64,
    rotation: Option<DMatrix<f64>>,
    instance_seed: u64,
    // Per-coordinate gradient of the linear slope, sign pointing at x_opt.
    slope: Option<DVector<f64>>,
}

/// Builds the instance determined by (function, n, instance_seed).
pub fn make_instance(function: FunctionId, n: usize, instance_seed: u64) -> ProblemInstance {
    assert!(n >= 2, "instances need dimension at least 2");
    let mut rng = stream_rng(
        mix_seeds(&[0x7075_6c73, function as u64, n as u64, instance_seed]),
        0,
    );
    let x_opt = if function == FunctionId::LinearSlope {
        // The slope's optimum sits on a corner of the box.
        DVector::from_iterator(
            n,
            (0..n).map(|_| if rng.gen::<bool>() { DOMAIN_UPPER } else { DOMAIN_LOWER }),
        )
    } else {
        DVector::from_iterator(
            n,
            (0..n).map(|_| OPTIMUM_RANGE * (2.0 * rng.gen::<f64>() - 1.0)),
        )
    };
    let rotation = function.rotated().then(|| random_rotation(n, &mut rng));
    let slope = (function == FunctionId::LinearSlope).then(|| {
        DVector::from_iterator(
            n,
            (0..n).map(|i| {
                let magnitude = 10f64.powf(i as f64 / (n - 1) as f64);
                x_opt[i].signum() * magnitude
            }),
        )
    });
    ProblemInstance {
        function,
        n,
        x_opt,
        f_opt: 0.0,
        rotation,
        instance_seed,
        slope,
    }
}

// Orthogonal matrix from the QR factorization of a Gaussian matrix, sign
// fixed so the factorization is unique.
fn random_rotation(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let gauss = DMatrix::from_fn(n, n, |_, _| {
        crate::special::norm_ppf(crate::rng::open_unit(rng))
    });
    let qr = gauss.qr();
    let r_diag: Vec<f64> = (0..n).map(|i| qr.r()[(i, i)]).collect();
    let mut q = qr.q();
    for (j, d) in r_diag.iter().enumerate() {
        if *d < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Euclidean distance from `x` to the box [-5, 5]^n; zero inside.
pub fn distance_to_box(x: &DVector<f64>) -> f64 {
    x.iter()
        .map(|&xi| {
            let v = (xi.abs() - DOMAIN_UPPER).max(0.0);
            v * v
        })
        .sum::<f64>()
        .sqrt()
}

impl ProblemInstance {
    pub fn function(&self) -> FunctionId {
        self.function
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn instance_seed(&self) -> u64 {
        self.instance_seed
    }

    pub fn x_opt(&self) -> &DVector<f64> {
        &self.x_opt
    }

    pub fn rotation(&self) -> Option<&DMatrix<f64>> {
        self.rotation.as_ref()
    }

    pub fn group(&self) -> u8 {
        self.function.group()
    }

    /// Center of the search domain, the prescribed start point.
    pub fn center_start(&self) -> DVector<f64> {
        DVector::zeros(self.n)
    }

    /// Precision of a candidate: base value plus boundary penalty.
    ///
    /// The penalty is kept as a separate additive term so the 1e20 scale
    /// cannot poison the base computation. Values that overflow to NaN for
    /// astronomically infeasible candidates rank as worst possible.
    pub fn evaluate(&self, x: &DVector<f64>) -> Result<Precision, EvalError> {
        if x.len() != self.n {
            return Err(EvalError::DimensionMismatch {
                got: x.len(),
                expected: self.n,
            });
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(EvalError::NonFiniteInput);
        }
        let value = self.base_value(x) - self.f_opt + BOUNDARY_PENALTY_SCALE * distance_to_box(x);
        if value.is_nan() {
            Ok(Precision(f64::INFINITY))
        } else {
            Ok(Precision(value.max(0.0)))
        }
    }

    fn base_value(&self, x: &DVector<f64>) -> f64 {
        if self.function == FunctionId::LinearSlope {
            // f = sum_i (5 |s_i| - s_i z_i); z clamps at the optimum-side
            // boundary so the plateau beyond the corner never goes negative.
            let slope = self.slope.as_ref().unwrap();
            return x
                .iter()
                .zip(slope.iter())
                .map(|(&xi, &si)| {
                    let z = if xi * si.signum() > DOMAIN_UPPER {
                        DOMAIN_UPPER * si.signum()
                    } else {
                        xi
                    };
                    DOMAIN_UPPER * si.abs() - si * z
                })
                .sum();
        }
        let shifted = x - &self.x_opt;
        let y = match &self.rotation {
            Some(r) => r * shifted,
            None => shifted,
        };
        match self.function {
            FunctionId::Sphere => y.norm_squared(),
            FunctionId::RastriginSep => {
                let cos_sum: f64 = y.iter().map(|&v| (2.0 * std::f64::consts::PI * v).cos()).sum();
                10.0 * (self.n as f64 - cos_sum) + y.norm_squared()
            }
            FunctionId::Ellipsoid => y
                .iter()
                .enumerate()
                .map(|(i, &v)| 10f64.powf(6.0 * i as f64 / (self.n - 1) as f64) * v * v)
                .sum(),
            FunctionId::Rosenbrock => {
                let c = (self.n as f64).sqrt().max(8.0) / 8.0;
                let z: Vec<f64> = y.iter().map(|&v| c * v + 1.0).collect();
                (0..self.n - 1)
                    .map(|i| {
                        let a = z[i] * z[i] - z[i + 1];
                        let b = z[i] - 1.0;
                        100.0 * a * a + b * b
                    })
                    .sum()
            }
            FunctionId::Schwefel => {
                let peak = SCHWEFEL_X_STAR * SCHWEFEL_X_STAR.sqrt().sin();
                y.iter()
                    .map(|&v| {
                        let w = 100.0 * v + SCHWEFEL_X_STAR;
                        let excess = (w.abs() - 500.0).max(0.0);
                        (peak - w * w.abs().sqrt().sin() + 0.25 * excess * excess) / 100.0
                    })
                    .sum()
            }
            FunctionId::LinearSlope => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("problem key must look like `<function>:<n>:<instance_seed>`, got `{0}`")]
pub struct BadProblemKey(pub String);

/// Parses a registry key of the form `sphere:10:3`.
pub fn parse_problem_key(key: &str) -> Result<(FunctionId, usize, u64), BadProblemKey> {
    let parts: Vec<&str> = key.split(':').collect();
    if parts.len() != 3 {
        return Err(BadProblemKey(key.to_string()));
    }
    let function = parts[0]
        .parse::<FunctionId>()
        .map_err(|_| BadProblemKey(key.to_string()))?;
    let n = parts[1]
        .parse::<usize>()
        .map_err(|_| BadProblemKey(key.to_string()))?;
    let seed = parts[2]
        .parse::<u64>()
        .map_err(|_| BadProblemKey(key.to_string()))?;
    Ok((function, n, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_deterministic() {
        for function in FunctionId::ALL {
            let a = make_instance(function, 6, 42);
            let b = make_instance(function, 6, 42);
            assert_eq!(a, b, "{function}");
            let c = make_instance(function, 6, 43);
            assert_ne!(a.x_opt, c.x_opt, "{function}");
        }
    }

    #[test]
    fn optimum_attains_zero_precision() {
        for function in FunctionId::ALL {
            for seed in 0..20 {
                let inst = make_instance(function, 5, seed);
                let p = inst.evaluate(inst.x_opt()).unwrap().value();
                assert!(p.abs() < 1e-9, "{function} seed {seed}: {p}");
            }
        }
    }

    #[test]
    fn optimum_lies_in_expected_range() {
        for function in FunctionId::ALL {
            let inst = make_instance(function, 8, 7);
            for &v in inst.x_opt().iter() {
                if function == FunctionId::LinearSlope {
                    assert!(v == DOMAIN_LOWER || v == DOMAIN_UPPER);
                } else {
                    assert!(v.abs() <= OPTIMUM_RANGE);
                }
            }
        }
    }

    #[test]
    fn sphere_center_value_is_squared_optimum_norm() {
        let inst = make_instance(FunctionId::Sphere, 4, 11);
        let at_center = inst.evaluate(&inst.center_start()).unwrap().value();
        assert!((at_center - inst.x_opt().norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn penalty_examples() {
        let inst = make_instance(FunctionId::Sphere, 2, 1);
        // Inside the box: no penalty beyond the base value.
        let x = DVector::from_vec(vec![4.9, -4.9]);
        assert!(inst.evaluate(&x).unwrap().value() < 1e3);
        // One unit outside: penalty 1e20 dominates.
        let x = DVector::from_vec(vec![6.0, 0.0]);
        assert!((distance_to_box(&x) - 1.0).abs() < 1e-15);
        let p = inst.evaluate(&x).unwrap().value();
        assert!(p >= 1e20 && p < 2e20, "penalty {p}");
    }

    #[test]
    fn penalty_grows_along_outward_rays() {
        let inst = make_instance(FunctionId::Sphere, 3, 5);
        let dir = DVector::from_vec(vec![1.0, -0.5, 0.25]).normalize();
        let mut last = -1.0;
        for k in 1..10 {
            let x = &dir * (5.0 + k as f64);
            let pen = distance_to_box(&x);
            assert!(pen > last);
            last = pen;
            assert!(inst.evaluate(&x).unwrap().value() > 1e19 * pen);
        }
    }

    #[test]
    fn center_start_is_feasible_zero_vector() {
        let inst = make_instance(FunctionId::Schwefel, 3, 2);
        let c = inst.center_start();
        assert_eq!(c, DVector::zeros(3));
        assert_eq!(distance_to_box(&c), 0.0);
    }

    #[test]
    fn rotations_are_orthogonal() {
        for function in [FunctionId::Ellipsoid, FunctionId::Rosenbrock] {
            let inst = make_instance(function, 7, 3);
            let r = inst.rotation().expect("rotated function");
            let err = (r.transpose() * r - DMatrix::identity(7, 7)).norm();
            assert!(err < 1e-10, "{function}: {err}");
        }
        assert!(make_instance(FunctionId::Sphere, 7, 3).rotation().is_none());
        assert!(make_instance(FunctionId::RastriginSep, 7, 3).rotation().is_none());
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let inst = make_instance(FunctionId::Sphere, 2, 1);
        let x = DVector::from_vec(vec![f64::NAN, 0.0]);
        assert_eq!(inst.evaluate(&x), Err(EvalError::NonFiniteInput));
        let x = DVector::from_vec(vec![f64::INFINITY, 0.0]);
        assert_eq!(inst.evaluate(&x), Err(EvalError::NonFiniteInput));
        let x = DVector::from_vec(vec![0.0]);
        assert!(matches!(
            inst.evaluate(&x),
            Err(EvalError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn linear_slope_never_negative_on_grid() {
        // Dense grid over the box at n = 2; the penalty-protected slope
        // must not dip below the instance optimum.
        for seed in 0..5 {
            let inst = make_instance(FunctionId::LinearSlope, 2, seed);
            for i in 0..=60 {
                for j in 0..=60 {
                    let x = DVector::from_vec(vec![
                        -5.0 + 10.0 * i as f64 / 60.0,
                        -5.0 + 10.0 * j as f64 / 60.0,
                    ]);
                    let p = inst.evaluate(&x).unwrap().value();
                    assert!(p >= 0.0, "seed {seed} at {x:?}: {p}");
                }
            }
        }
    }

    #[test]
    fn functions_nonnegative_on_random_points() {
        let mut rng = stream_rng(9, 0);
        for function in FunctionId::ALL {
            let inst = make_instance(function, 4, 1);
            for _ in 0..2000 {
                let x = DVector::from_iterator(4, (0..4).map(|_| 10.0 * rng.gen::<f64>() - 5.0));
                let p = inst.evaluate(&x).unwrap().value();
                assert!(p >= 0.0, "{function} at {x:?}: {p}");
            }
        }
    }

    #[test]
    fn rotated_evaluation_matches_base_in_rotated_frame() {
        // evaluate(x) must equal the unrotated base applied to R (x - x_opt).
        let inst = make_instance(FunctionId::Ellipsoid, 5, 13);
        let r = inst.rotation().unwrap().clone();
        let mut rng = stream_rng(10, 0);
        for _ in 0..1000 {
            let x = DVector::from_iterator(5, (0..5).map(|_| 8.0 * rng.gen::<f64>() - 4.0));
            let y = &r * (&x - inst.x_opt());
            let direct: f64 = y
                .iter()
                .enumerate()
                .map(|(i, &v)| 10f64.powf(6.0 * i as f64 / 4.0) * v * v)
                .sum();
            let via = inst.evaluate(&x).unwrap().value() - BOUNDARY_PENALTY_SCALE * distance_to_box(&x);
            assert!((via - direct).abs() <= 1e-9 * direct.max(1.0));
        }
    }

    #[test]
    fn problem_keys_parse() {
        let (f, n, s) = parse_problem_key("sphere:10:3").unwrap();
        assert_eq!(f, FunctionId::Sphere);
        assert_eq!(n, 10);
        assert_eq!(s, 3);
        assert!(parse_problem_key("sphere:10").is_err());
        assert!(parse_problem_key("circle:10:3").is_err());
        assert!(parse_problem_key("sphere:x:3").is_err());
    }
}
