//! Three-stage mutation sampling with a pluggable percent point function.
//!
//! Raw mutation vectors are built by inverse-transform sampling: each
//! component maps an independent uniform deviate through the PPF of the
//! configured distribution. Two additional pipeline modes decouple the two
//! properties that distinguish the distributions — direction and length —
//! and a set of statistical probes measures both.

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

use crate::distributions::{ppf_interior, DistKind, UnknownName};
use crate::rng::{open_unit, stream_rng};
use crate::special;

/// How raw mutation vectors are post-processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PipelineMode {
    /// Components straight from the PPF.
    Plain,
    /// Every vector rescaled to unit length; only direction varies.
    DirectionNormalized,
    /// Isotropic (Gaussian) direction with the raw vector's length; only
    /// length follows the configured distribution.
    MagnitudeSwapped,
}

impl PipelineMode {
    pub const ALL: [PipelineMode; 3] = [
        PipelineMode::Plain,
        PipelineMode::DirectionNormalized,
        PipelineMode::MagnitudeSwapped,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PipelineMode::Plain => "plain",
            PipelineMode::DirectionNormalized => "direction_normalized",
            PipelineMode::MagnitudeSwapped => "magnitude_swapped",
        }
    }
}

impl fmt::Display for PipelineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PipelineMode {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PipelineMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownName(s.to_string()))
    }
}

/// A seeded mutation source: distribution kind, pipeline mode, and its own
/// random streams. Single-owner; create one pipeline per run.
#[derive(Debug, Clone)]
pub struct MutationPipeline {
    kind: DistKind,
    mode: PipelineMode,
    seed: u64,
    rng: ChaCha8Rng,
    // Independent substream for the isotropic direction source, so swapped
    // magnitudes and directions stay independent.
    direction_rng: ChaCha8Rng,
}

impl MutationPipeline {
    pub fn new(kind: DistKind, mode: PipelineMode, seed: u64) -> Self {
        MutationPipeline {
            kind,
            mode,
            seed,
            rng: stream_rng(seed, 0),
            direction_rng: stream_rng(seed, 1),
        }
    }

    pub fn kind(&self) -> DistKind {
        self.kind
    }

    pub fn mode(&self) -> PipelineMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// One raw mutation vector of dimension `n` under the configured mode.
    pub fn sample_z(&mut self, n: usize) -> DVector<f64> {
        assert!(n >= 1, "dimension must be at least 1");
        let raw = self.raw_vector(n);
        match self.mode {
            PipelineMode::Plain => raw,
            PipelineMode::DirectionNormalized => {
                let mut v = raw;
                loop {
                    let norm = v.norm();
                    if norm > 0.0 {
                        return v / norm;
                    }
                    v = self.raw_vector(n);
                }
            }
            PipelineMode::MagnitudeSwapped => {
                let magnitude = raw.norm();
                loop {
                    let dir = DVector::from_iterator(
                        n,
                        (0..n).map(|_| special::norm_ppf(open_unit(&mut self.direction_rng))),
                    );
                    let norm = dir.norm();
                    if norm > 0.0 {
                        return dir * (magnitude / norm);
                    }
                }
            }
        }
    }

    fn raw_vector(&mut self, n: usize) -> DVector<f64> {
        DVector::from_iterator(
            n,
            (0..n).map(|_| ppf_interior(self.kind, open_unit(&mut self.rng))),
        )
    }

    /// One standard normal deviate from the pipeline's primary stream,
    /// regardless of the configured distribution. Strategy-level noise
    /// (step-size self-adaptation) is always Gaussian.
    pub fn gaussian_scalar(&mut self) -> f64 {
        special::norm_ppf(open_unit(&mut self.rng))
    }

    /// `n` standard normal deviates from the primary stream.
    pub fn gaussian_vector(&mut self, n: usize) -> DVector<f64> {
        DVector::from_iterator(n, (0..n).map(|_| self.gaussian_scalar()))
    }
}

/// Applies the remaining two sampling stages: x = m + sigma * A * z.
pub fn transform(
    z: &DVector<f64>,
    m: &DVector<f64>,
    sigma: f64,
    a: &DMatrix<f64>,
) -> DVector<f64> {
    assert_eq!(z.len(), m.len(), "z and m must share a dimension");
    assert_eq!(a.nrows(), z.len(), "A must be n x n");
    assert_eq!(a.ncols(), z.len(), "A must be n x n");
    assert!(sigma > 0.0, "sigma must be positive");
    m + sigma * (a * z)
}

/// Expected Euclidean norm of an n-dimensional standard normal vector:
/// sqrt(2) Gamma((n+1)/2) / Gamma(n/2). Always below sqrt(n), approaching
/// it as n grows.
pub fn expected_norm_gaussian(n: usize) -> f64 {
    assert!(n >= 1);
    let n = n as f64;
    std::f64::consts::SQRT_2
        * (special::ln_gamma((n + 1.0) / 2.0) - special::ln_gamma(n / 2.0)).exp()
}

/// Monte-Carlo summary of the mutation length ||z||_2 under the plain
/// pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormStats {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub iqr: f64,
    pub samples_used: usize,
}

/// Estimates mean, standard deviation, median, and inter-quartile range of
/// the mutation length for `kind` at dimension `n`.
pub fn norm_statistics(kind: DistKind, n: usize, samples: usize, seed: u64) -> NormStats {
    assert!(samples >= 1_000, "need at least 1000 samples");
    let mut pipe = MutationPipeline::new(kind, PipelineMode::Plain, seed);
    let mut norms: Vec<f64> = (0..samples).map(|_| pipe.sample_z(n).norm()).collect();
    let mean = norms.iter().sum::<f64>() / samples as f64;
    let var = norms.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (samples as f64 - 1.0);
    norms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    NormStats {
        n,
        mean,
        std: var.sqrt(),
        median: quantile_sorted(&norms, 0.5),
        iqr: quantile_sorted(&norms, 0.75) - quantile_sorted(&norms, 0.25),
        samples_used: samples,
    }
}

/// Linear-interpolation quantile of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!((0.0..=1.0).contains(&q));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < sorted.len() {
        sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
    } else {
        sorted[lo]
    }
}

/// Normalized histogram of the signed angle between samples and the
/// all-ones direction, over [0, 360) degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleHistogram {
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub samples: usize,
    /// Set when fewer than 100 samples per bin were requested; the
    /// histogram is still produced but should be treated as noisy.
    pub undersampled: bool,
}

impl AngleHistogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Center of bin `i` in degrees.
    pub fn bin_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * 360.0 / self.bins() as f64
    }
}

/// Measures the angle distribution of `samples` mutation vectors against
/// the all-ones vector.
///
/// For n = 2 the angle is the counter-clockwise angle from the ones
/// direction. For n > 2 it is the angle inside the plane spanned by the
/// sample and the ones vector, with the sign taken against a fixed
/// reference direction so the full [0, 360) range is used.
pub fn angle_to_ones_histogram(
    kind: DistKind,
    mode: PipelineMode,
    n: usize,
    samples: usize,
    bins: usize,
    seed: u64,
) -> AngleHistogram {
    assert!(n >= 2, "angles need dimension at least 2");
    assert!(bins >= 1 && samples >= 1);
    let undersampled = samples < bins * 100;
    let mut pipe = MutationPipeline::new(kind, mode, seed);
    let ones_unit = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    // Reference direction orthogonal to the ones vector; for n = 2 this is
    // the 90-degree counter-clockwise rotation of it.
    let mut reference = DVector::zeros(n);
    reference[n - 1] = 1.0;
    reference -= ones_unit[0] * &ones_unit;
    reference /= reference.norm();

    let mut counts = vec![0u64; bins];
    for _ in 0..samples {
        let z = pipe.sample_z(n);
        let along = z.dot(&ones_unit);
        let ortho = (&z - along * &ones_unit).norm();
        let unsigned = ortho.atan2(along); // in [0, pi]
        let theta = if z.dot(&reference) >= 0.0 {
            unsigned
        } else {
            2.0 * std::f64::consts::PI - unsigned
        };
        let mut deg = theta.to_degrees();
        if deg >= 360.0 {
            deg -= 360.0;
        }
        let bin = ((deg / 360.0 * bins as f64) as usize).min(bins - 1);
        counts[bin] += 1;
    }
    let frequencies = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    AngleHistogram {
        counts,
        frequencies,
        samples,
        undersampled,
    }
}
