//! Closed-form kernels for the six mutation distributions.
//!
//! Each kind carries one fixed parameterization: unit variance for every
//! distribution except the Cauchy, which uses unit scale. The global step
//! size of a strategy carries all further scaling, so the parameters are
//! frozen constants rather than user inputs.
//!
//! | kind           | parameters              |
//! |----------------|-------------------------|
//! | Cauchy         | x0 = 0, eta = 1         |
//! | DoubleWeibull  | alpha = 1, beta = 2     |
//! | Gaussian       | mu = 0, sigma = 1       |
//! | Laplace        | mu = 0, b = 1/sqrt(2)   |
//! | Logistic       | mu = 0, s = sqrt(3)/pi  |
//! | Uniform        | a = -sqrt(3), b = sqrt(3) |

use std::f64::consts::{E, LN_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::special;

/// Laplace scale parameter b = 1/sqrt(2), giving variance 2 b^2 = 1.
pub const LAPLACE_B: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Logistic scale parameter s = sqrt(3)/pi, giving variance s^2 pi^2 / 3 = 1.
pub const LOGISTIC_S: f64 = 0.5513288954217921;
/// Uniform half-width sqrt(3); support [-sqrt(3), sqrt(3)] has variance 1.
pub const UNIFORM_HALF_WIDTH: f64 = 1.7320508075688772;
/// Double Weibull shape; with alpha = 1 the variance is Gamma(1 + 2/beta) = 1.
pub const DWEIBULL_BETA: f64 = 2.0;

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.5772156649015329;

/// Empirical slope of the median mutation length for Cauchy vectors.
///
/// The median of ||z||_2 for n i.i.d. standard Cauchy components grows
/// linearly in n with slope ~1.18 (the mean and variance do not exist).
/// The constant can be re-estimated with `sampling::norm_statistics`.
pub const CAUCHY_NORM_MEDIAN_SLOPE: f64 = 1.18;

/// The six supported mutation distributions, each with its frozen
/// parameterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistKind {
    Cauchy,
    DoubleWeibull,
    Gaussian,
    Laplace,
    Logistic,
    Uniform,
}

impl DistKind {
    pub const ALL: [DistKind; 6] = [
        DistKind::Cauchy,
        DistKind::DoubleWeibull,
        DistKind::Gaussian,
        DistKind::Laplace,
        DistKind::Logistic,
        DistKind::Uniform,
    ];

    /// Stable lowercase name used in configs, CLI arguments and run logs.
    pub fn name(self) -> &'static str {
        match self {
            DistKind::Cauchy => "cauchy",
            DistKind::DoubleWeibull => "dweibull",
            DistKind::Gaussian => "gaussian",
            DistKind::Laplace => "laplace",
            DistKind::Logistic => "logistic",
            DistKind::Uniform => "uniform",
        }
    }

    /// True for every kind except the Cauchy, whose second moment diverges.
    pub fn has_finite_variance(self) -> bool {
        self != DistKind::Cauchy
    }
}

impl fmt::Display for DistKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown distribution name `{0}` (expected one of cauchy, dweibull, gaussian, laplace, logistic, uniform)")]
pub struct UnknownName(pub String);

impl FromStr for DistKind {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DistKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownName(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum DistError {
    #[error("probability must lie strictly inside (0,1), got {0}")]
    ProbabilityOutOfRange(f64),
}

/// A moment that may diverge (the Cauchy case).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Undefined,
}

impl Moment {
    pub fn is_finite(self) -> bool {
        matches!(self, Moment::Finite(_))
    }

    /// Finite value, or NaN for undefined moments.
    pub fn value(self) -> f64 {
        match self {
            Moment::Finite(v) => v,
            Moment::Undefined => f64::NAN,
        }
    }
}

/// First four moments (mean, variance, skewness, excess kurtosis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub mean: Moment,
    pub variance: Moment,
    pub skewness: Moment,
    pub excess_kurtosis: Moment,
}

/// Percent point function (inverse CDF) at `p` in the open interval (0,1).
pub fn ppf(kind: DistKind, p: f64) -> Result<f64, DistError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(DistError::ProbabilityOutOfRange(p));
    }
    Ok(ppf_interior(kind, p))
}

/// PPF for `p` already validated to lie inside (0,1).
///
/// The upper half mirrors the lower half (`1 - p` is exact in floating
/// point for p > 1/2), so the antisymmetry Q(1-p) = -Q(p) holds by
/// construction and Q(1/2) = 0 for every kind.
pub(crate) fn ppf_interior(kind: DistKind, p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    if p == 0.5 {
        0.0
    } else if p > 0.5 {
        -ppf_lower(kind, 1.0 - p)
    } else {
        ppf_lower(kind, p)
    }
}

// Strictly negative branch, 0 < p < 1/2.
fn ppf_lower(kind: DistKind, p: f64) -> f64 {
    match kind {
        // tan(pi (p - 1/2)) = -cot(pi p); the cotangent form stays accurate
        // as p approaches 0 where the direct tangent loses all precision.
        DistKind::Cauchy => {
            let t = PI * p;
            -t.cos() / t.sin()
        }
        DistKind::DoubleWeibull => -(-(2.0 * p).ln()).powf(1.0 / DWEIBULL_BETA),
        DistKind::Gaussian => special::norm_ppf(p),
        DistKind::Laplace => LAPLACE_B * (2.0 * p).ln(),
        DistKind::Logistic => LOGISTIC_S * (p / (1.0 - p)).ln(),
        DistKind::Uniform => UNIFORM_HALF_WIDTH * (2.0 * p - 1.0),
    }
}

/// Probability density at `x`.
pub fn pdf(kind: DistKind, x: f64) -> f64 {
    match kind {
        DistKind::Cauchy => 1.0 / (PI * (1.0 + x * x)),
        DistKind::DoubleWeibull => x.abs() * (-x * x).exp(),
        DistKind::Gaussian => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
        DistKind::Laplace => (-x.abs() / LAPLACE_B).exp() / (2.0 * LAPLACE_B),
        DistKind::Logistic => {
            let t = (-x.abs() / LOGISTIC_S).exp();
            t / (LOGISTIC_S * (1.0 + t) * (1.0 + t))
        }
        DistKind::Uniform => {
            if x.abs() <= UNIFORM_HALF_WIDTH {
                1.0 / (2.0 * UNIFORM_HALF_WIDTH)
            } else {
                0.0
            }
        }
    }
}

/// Cumulative distribution function at `x`.
pub fn cdf(kind: DistKind, x: f64) -> f64 {
    match kind {
        DistKind::Cauchy => 0.5 + x.atan() / PI,
        DistKind::DoubleWeibull => {
            let half_tail = 0.5 * (-x * x).exp();
            if x < 0.0 {
                half_tail
            } else {
                1.0 - half_tail
            }
        }
        DistKind::Gaussian => special::norm_cdf(x),
        DistKind::Laplace => {
            let half_tail = 0.5 * (-x.abs() / LAPLACE_B).exp();
            if x < 0.0 {
                half_tail
            } else {
                1.0 - half_tail
            }
        }
        DistKind::Logistic => 1.0 / (1.0 + (-x / LOGISTIC_S).exp()),
        DistKind::Uniform => {
            ((x + UNIFORM_HALF_WIDTH) / (2.0 * UNIFORM_HALF_WIDTH)).clamp(0.0, 1.0)
        }
    }
}

/// Differential entropy in nats, closed form for the frozen parameters.
pub fn entropy(kind: DistKind) -> f64 {
    match kind {
        DistKind::Cauchy => (4.0 * PI).ln(),
        // gamma (1 - 1/beta) + ln(alpha/beta) + 1 + ln 2, with alpha = 1.
        DistKind::DoubleWeibull => {
            EULER_GAMMA * (1.0 - 1.0 / DWEIBULL_BETA) - DWEIBULL_BETA.ln() + 1.0 + LN_2
        }
        DistKind::Gaussian => 0.5 * (2.0 * PI * E).ln(),
        DistKind::Laplace => (2.0 * LAPLACE_B).ln() + 1.0,
        DistKind::Logistic => LOGISTIC_S.ln() + 2.0,
        DistKind::Uniform => (2.0 * UNIFORM_HALF_WIDTH).ln(),
    }
}

/// First four moments under the frozen parameters.
pub fn moments(kind: DistKind) -> MomentSummary {
    use Moment::Undefined;
    match kind {
        DistKind::Cauchy => MomentSummary {
            mean: Undefined,
            variance: Undefined,
            skewness: Undefined,
            excess_kurtosis: Undefined,
        },
        // Variance Gamma(1 + 2/beta) = Gamma(2) = 1; excess kurtosis
        // Gamma(1 + 4/beta) / Gamma(1 + 2/beta)^2 - 3 = Gamma(3) - 3 = -1.
        DistKind::DoubleWeibull => summary(1.0, -1.0),
        DistKind::Gaussian => summary(1.0, 0.0),
        DistKind::Laplace => summary(2.0 * LAPLACE_B * LAPLACE_B, 3.0),
        DistKind::Logistic => summary(LOGISTIC_S * LOGISTIC_S * PI * PI / 3.0, 6.0 / 5.0),
        DistKind::Uniform => summary(
            (2.0 * UNIFORM_HALF_WIDTH) * (2.0 * UNIFORM_HALF_WIDTH) / 12.0,
            -6.0 / 5.0,
        ),
    }
}

fn summary(variance: f64, excess_kurtosis: f64) -> MomentSummary {
    MomentSummary {
        mean: Moment::Finite(0.0),
        variance: Moment::Finite(variance),
        skewness: Moment::Finite(0.0),
        excess_kurtosis: Moment::Finite(excess_kurtosis),
    }
}

/// Evolution-path normalization constant rho for dimension `n`.
///
/// sqrt(n) approximates the expected mutation length for every
/// finite-variance kind; the Cauchy median length instead grows linearly,
/// so its normalizer is 1.18 n.
pub fn norm_normalizer(kind: DistKind, n: usize) -> f64 {
    debug_assert!(n >= 1);
    match kind {
        DistKind::Cauchy => CAUCHY_NORM_MEDIAN_SLOPE * n as f64,
        _ => (n as f64).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT3: f64 = 1.7320508075688772;

    fn q(kind: DistKind, p: f64) -> f64 {
        ppf(kind, p).unwrap()
    }

    #[test]
    fn ppf_rejects_boundary_probabilities() {
        for kind in DistKind::ALL {
            for p in [0.0, 1.0, -0.2, 1.3, f64::NAN] {
                assert!(ppf(kind, p).is_err(), "{kind} should reject p={p}");
            }
        }
    }

    #[test]
    fn ppf_median_is_zero_for_every_kind() {
        for kind in DistKind::ALL {
            assert_eq!(q(kind, 0.5), 0.0, "{kind}");
        }
    }

    #[test]
    fn ppf_known_values() {
        assert_eq!(q(DistKind::Gaussian, 0.5), 0.0);
        // a + (b - a) p at p = 1/4 is -sqrt(3)/2
        assert!((q(DistKind::Uniform, 0.25) + SQRT3 / 2.0).abs() < 1e-15);
        assert!((q(DistKind::Uniform, 0.25) + 0.8660254037844386).abs() < 1e-12);
        // tan(pi/4) = 1
        assert!((q(DistKind::Cauchy, 0.75) - 1.0).abs() < 1e-15);
        // b ln 2 at the upper quartile
        assert!((q(DistKind::Laplace, 0.75) - LAPLACE_B * LN_2).abs() < 1e-15);
        assert!((q(DistKind::Laplace, 0.75) - 0.49013).abs() < 1e-5);
    }

    #[test]
    fn dweibull_ppf_inverts_its_cdf() {
        // Q(0.9) solves 1 - exp(-x^2)/2 = 0.9, i.e. x = sqrt(ln 5).
        let expected = 5.0f64.ln().sqrt();
        assert!((q(DistKind::DoubleWeibull, 0.9) - expected).abs() < 1e-14);
        assert!((cdf(DistKind::DoubleWeibull, expected) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn pdf_known_values() {
        assert!((pdf(DistKind::Gaussian, 0.0) - 0.3989422804014327).abs() < 1e-15);
        // Bimodal with zero density at the origin; peaks at +-sqrt(1/2).
        assert_eq!(pdf(DistKind::DoubleWeibull, 0.0), 0.0);
        let peak = 0.5f64.sqrt();
        assert!(pdf(DistKind::DoubleWeibull, peak) > pdf(DistKind::DoubleWeibull, peak + 0.1));
        assert!(pdf(DistKind::DoubleWeibull, peak) > pdf(DistKind::DoubleWeibull, peak - 0.1));
        assert_eq!(pdf(DistKind::Uniform, 2.0), 0.0);
        assert!((pdf(DistKind::Uniform, 0.3) - 1.0 / (2.0 * SQRT3)).abs() < 1e-15);
        assert!((pdf(DistKind::Cauchy, 0.0) - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn pdf_is_symmetric() {
        for kind in DistKind::ALL {
            for &x in &[0.1, 0.5, 1.0, 1.7, 3.0, 12.0] {
                assert_eq!(pdf(kind, x), pdf(kind, -x), "{kind} at {x}");
            }
        }
    }

    #[test]
    fn cdf_known_values() {
        assert_eq!(cdf(DistKind::Gaussian, 0.0), 0.5);
        assert!((cdf(DistKind::Cauchy, 1.0) - 0.75).abs() < 1e-15);
        let x = q(DistKind::Laplace, 0.75);
        assert!((cdf(DistKind::Laplace, x) - 0.75).abs() < 1e-15);
        assert_eq!(cdf(DistKind::Uniform, -2.0), 0.0);
        assert_eq!(cdf(DistKind::Uniform, 2.0), 1.0);
    }

    #[test]
    fn entropy_closed_forms() {
        assert!((entropy(DistKind::Gaussian) - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-15);
        assert!((entropy(DistKind::Uniform) - (2.0 * SQRT3).ln()).abs() < 1e-15);
        assert!((entropy(DistKind::Cauchy) - (4.0 * PI).ln()).abs() < 1e-15);
        assert!((entropy(DistKind::Laplace) - (2.0f64.sqrt().ln() + 1.0)).abs() < 1e-14);
        // Numeric spot checks.
        assert!((entropy(DistKind::Gaussian) - 1.4189385332046727).abs() < 1e-12);
        assert!((entropy(DistKind::Uniform) - 1.2424533248940002).abs() < 1e-12);
        assert!((entropy(DistKind::Cauchy) - 2.5310242469692907).abs() < 1e-12);
        assert!((entropy(DistKind::Laplace) - 1.3465735902799727).abs() < 1e-12);
        assert!((entropy(DistKind::Logistic) - 1.4045853677173856).abs() < 1e-12);
        assert!((entropy(DistKind::DoubleWeibull) - 1.2886078324507664).abs() < 1e-12);
    }

    #[test]
    fn moments_closed_forms() {
        let dw = moments(DistKind::DoubleWeibull);
        assert_eq!(dw.variance, Moment::Finite(1.0));
        assert_eq!(dw.excess_kurtosis, Moment::Finite(-1.0));

        let u = moments(DistKind::Uniform);
        assert!((u.variance.value() - 1.0).abs() < 1e-15);
        assert!((u.excess_kurtosis.value() + 1.2).abs() < 1e-15);

        let c = moments(DistKind::Cauchy);
        assert!(!c.mean.is_finite());
        assert!(!c.variance.is_finite());
        assert!(!c.skewness.is_finite());
        assert!(!c.excess_kurtosis.is_finite());
        assert!(c.mean.value().is_nan());

        for kind in DistKind::ALL {
            if kind.has_finite_variance() {
                let m = moments(kind);
                assert_eq!(m.mean, Moment::Finite(0.0), "{kind}");
                assert!((m.variance.value() - 1.0).abs() < 1e-14, "{kind}");
                assert_eq!(m.skewness, Moment::Finite(0.0), "{kind}");
            }
        }
    }

    #[test]
    fn norm_normalizer_values() {
        assert_eq!(norm_normalizer(DistKind::Gaussian, 16), 4.0);
        assert!((norm_normalizer(DistKind::Cauchy, 10) - 11.8).abs() < 1e-12);
        assert_eq!(norm_normalizer(DistKind::Uniform, 9), 3.0);
    }

    #[test]
    fn names_roundtrip() {
        for kind in DistKind::ALL {
            assert_eq!(kind.name().parse::<DistKind>().unwrap(), kind);
        }
        assert!("normal".parse::<DistKind>().is_err());
    }

    #[test]
    fn ppf_antisymmetry_is_exact_on_representable_pairs() {
        // For p = k/1024 both p and 1-p are exact in binary floating point,
        // so the mirrored construction must negate bitwise.
        for kind in DistKind::ALL {
            for k in 1..512u32 {
                let p = k as f64 / 1024.0;
                let lo = q(kind, p);
                let hi = q(kind, 1.0 - p);
                assert_eq!(lo.to_bits(), (-hi).to_bits(), "{kind} at p={p}");
            }
        }
    }
}
