//! Mixture-of-Gaussians benchmark tasks on the plane.
//!
//! Four preset families: regular grids, equally spaced annuli, and randomized
//! variants with seeded mode locations and per-mode covariances. Tasks expose
//! seeded sampling and ground-truth mode metadata for coverage evaluation.

use crate::error::{Error, Result};
use crate::gang::DataSampler;
use crate::seed;
use rand::Rng;
use rand_distr::StandardNormal;
use std::fmt::Write as _;

/// Isotropic standard deviation of the preset modes.
pub const PRESET_SIGMA: f64 = 0.05;

/// Isotropic variance of the preset modes, written as the exact literal so
/// grid covariances match the random presets' 0.0025 floor bit-for-bit.
pub const PRESET_VARIANCE: f64 = 0.0025;

/// Fraction of fake points a mode must attract to count as covered.
pub const DEFAULT_COVERAGE_FRACTION: f64 = 0.01;

/// Radius multiplier (in units of the largest covariance standard deviation)
/// for coverage counting.
pub const DEFAULT_COVERAGE_RADIUS: f64 = 3.0;

/// One Gaussian component: mean, covariance, and mixture weight.
#[derive(Debug, Clone)]
pub struct GaussianMode {
    pub mean: [f64; 2],
    /// Symmetric positive definite, stored as [[xx, xy], [xy, yy]].
    pub cov: [[f64; 2]; 2],
    pub weight: f64,
    /// Lower Cholesky factor (l11, l21, l22), cached at construction.
    chol: [f64; 3],
}

impl GaussianMode {
    fn new(mean: [f64; 2], cov: [[f64; 2]; 2], weight: f64) -> Result<Self> {
        if mean.iter().any(|m| !m.is_finite()) || weight < 0.0 || !weight.is_finite() {
            return Err(Error::InvalidArgument(
                "mode mean and weight must be finite, weight non-negative".to_string(),
            ));
        }
        if (cov[0][1] - cov[1][0]).abs() > 1e-12 {
            return Err(Error::InvalidArgument(
                "covariance must be symmetric".to_string(),
            ));
        }
        let chol = cholesky2(cov)?;
        Ok(Self {
            mean,
            cov,
            weight,
            chol,
        })
    }

    /// Largest covariance eigenvalue, closed form for the 2x2 case.
    pub fn lambda_max(&self) -> f64 {
        let (a, b, c) = (self.cov[0][0], self.cov[0][1], self.cov[1][1]);
        0.5 * ((a + c) + ((a - c).powi(2) + 4.0 * b * b).sqrt())
    }

    /// Smallest covariance eigenvalue.
    pub fn lambda_min(&self) -> f64 {
        let (a, b, c) = (self.cov[0][0], self.cov[0][1], self.cov[1][1]);
        0.5 * ((a + c) - ((a - c).powi(2) + 4.0 * b * b).sqrt())
    }
}

/// Lower Cholesky factor of a 2x2 SPD matrix.
fn cholesky2(cov: [[f64; 2]; 2]) -> Result<[f64; 3]> {
    let (a, b, c) = (cov[0][0], cov[1][0], cov[1][1]);
    if !(a > 0.0) {
        return Err(Error::Numerical(format!(
            "covariance is not positive definite (leading entry {a})"
        )));
    }
    let l11 = a.sqrt();
    let l21 = b / l11;
    let rem = c - l21 * l21;
    if !(rem > 0.0) {
        return Err(Error::Numerical(format!(
            "covariance is not positive definite (Schur complement {rem})"
        )));
    }
    Ok([l11, l21, rem.sqrt()])
}

/// A named finite mixture of planar Gaussians.
#[derive(Debug, Clone)]
pub struct GaussianMixtureTask {
    name: String,
    modes: Vec<GaussianMode>,
}

impl GaussianMixtureTask {
    /// Builds a task from explicit (mean, covariance, weight) triples.
    /// Weights must sum to 1 within 1e-9.
    pub fn from_modes(
        name: &str,
        modes: Vec<([f64; 2], [[f64; 2]; 2], f64)>,
    ) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument(
                "task needs at least one mode".to_string(),
            ));
        }
        let total: f64 = modes.iter().map(|(_, _, w)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProbability(format!(
                "mode weights sum to {total}, expected 1"
            )));
        }
        let modes = modes
            .into_iter()
            .map(|(mean, cov, w)| GaussianMode::new(mean, cov, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: name.to_string(),
            modes,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn modes(&self) -> &[GaussianMode] {
        &self.modes
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// Axis-aligned box containing every mode mean plus three standard
    /// deviations of its widest direction.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for mode in &self.modes {
            let r = 3.0 * mode.lambda_max().sqrt();
            for d in 0..2 {
                lo[d] = lo[d].min(mode.mean[d] - r);
                hi[d] = hi[d].max(mode.mean[d] + r);
            }
        }
        (lo, hi)
    }

    /// Mode table as CSV, one row per component.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mean_x,mean_y,cov_xx,cov_xy,cov_yy,weight\n");
        for m in &self.modes {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                m.mean[0], m.mean[1], m.cov[0][0], m.cov[0][1], m.cov[1][1], m.weight
            )
            .expect("string write");
        }
        out
    }
}

impl DataSampler for GaussianMixtureTask {
    fn dim(&self) -> usize {
        2
    }

    fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        sample_real(self, n, seed)
    }
}

fn evenly_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Builds a named preset. Grid and annulus presets ignore the seed; the
/// random presets are fully determined by it.
pub fn make_task(name: &str, seed: u64) -> Result<GaussianMixtureTask> {
    let iso = [[PRESET_VARIANCE, 0.0], [0.0, PRESET_VARIANCE]];
    let grid = |side: usize| -> Result<GaussianMixtureTask> {
        let coords = evenly_spaced(-1.0, 1.0, side);
        let w = 1.0 / (side * side) as f64;
        let mut modes = Vec::with_capacity(side * side);
        for &y in &coords {
            for &x in &coords {
                modes.push(([x, y], iso, w));
            }
        }
        GaussianMixtureTask::from_modes(name, modes)
    };
    let annulus = |count: usize| -> Result<GaussianMixtureTask> {
        let w = 1.0 / count as f64;
        let modes = (0..count)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                ([theta.cos(), theta.sin()], iso, w)
            })
            .collect();
        GaussianMixtureTask::from_modes(name, modes)
    };
    let random = |count: usize| -> Result<GaussianMixtureTask> {
        let mut rng = seed::rng(seed::derive(seed, "task", 0));
        let w = 1.0 / count as f64;
        let mut modes = Vec::with_capacity(count);
        for _ in 0..count {
            let mean = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let a: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-0.05..0.05));
            // A.A^T + 0.0025 I: positive definite by construction.
            let cov = [
                [a[0] * a[0] + a[1] * a[1] + 0.0025, a[0] * a[2] + a[1] * a[3]],
                [a[0] * a[2] + a[1] * a[3], a[2] * a[2] + a[3] * a[3] + 0.0025],
            ];
            modes.push((mean, cov, w));
        }
        GaussianMixtureTask::from_modes(name, modes)
    };
    match name {
        "grid9" => grid(3),
        "grid16" => grid(4),
        "annulus9" => annulus(9),
        "annulus16" => annulus(16),
        "random9" => random(9),
        "random16" => random(16),
        other => Err(Error::InvalidArgument(format!(
            "unknown task '{other}' (expected grid9, grid16, annulus9, annulus16, random9, random16)"
        ))),
    }
}

/// Draws `n` points: a mode per its weight, then a Gaussian draw through the
/// cached Cholesky factor. Row-major `n x 2`.
pub fn sample_real(task: &GaussianMixtureTask, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = seed::rng(seed);
    let mut out = Vec::with_capacity(n * 2);
    for _ in 0..n {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut idx = task.modes.len() - 1;
        for (k, mode) in task.modes.iter().enumerate() {
            acc += mode.weight;
            if u < acc {
                idx = k;
                break;
            }
        }
        let mode = &task.modes[idx];
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let [l11, l21, l22] = mode.chol;
        out.push(mode.mean[0] + l11 * z1);
        out.push(mode.mean[1] + l21 * z1 + l22 * z2);
    }
    out
}

/// Counts covered modes: a mode is covered iff at least `min_fraction` of the
/// points lie within `radius_mult * sqrt(lambda_max)` of its mean. Returns the
/// covered count and each mode's captured fraction.
pub fn mode_coverage(
    task: &GaussianMixtureTask,
    points: &[f64],
    radius_mult: f64,
    min_fraction: f64,
) -> Result<(usize, Vec<f64>)> {
    if points.is_empty() || points.len() % 2 != 0 {
        return Err(Error::InvalidArgument(
            "coverage needs a non-empty set of planar points".to_string(),
        ));
    }
    let n = (points.len() / 2) as f64;
    let mut fractions = Vec::with_capacity(task.modes.len());
    let mut covered = 0;
    for mode in &task.modes {
        let r2 = (radius_mult * mode.lambda_max().sqrt()).powi(2);
        let inside = points
            .chunks_exact(2)
            .filter(|p| {
                let dx = p[0] - mode.mean[0];
                let dy = p[1] - mode.mean[1];
                dx * dx + dy * dy <= r2
            })
            .count();
        let frac = inside as f64 / n;
        if frac >= min_fraction {
            covered += 1;
        }
        fractions.push(frac);
    }
    Ok((covered, fractions))
}
