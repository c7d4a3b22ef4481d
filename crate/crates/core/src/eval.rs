//! Solution-quality measurement.
//!
//! Exploitability sends fresh resource-bounded attackers of fixed capacity
//! against a trained mixture pair and reports the best combined advantage
//! found; it estimates how far the pair is from a resource-bounded
//! equilibrium and can be negative when the attacks fail to find any gain.
//! Also here: the classifier mixture's response surface on a grid, the
//! indifference statistic over real data, and the CSV emitters behind the
//! figures.

use crate::error::{Error, Result};
use crate::gang::{
    payoff_uc, payoff_ug, rbbr_classifier, rbbr_generator, GangSpec, MixtureStrategy, RbbrConfig,
};
use crate::neural::Architecture;
use crate::seed;
use crate::tasks::GaussianMixtureTask;
use std::fmt::Write as _;

/// Classifier outputs inside this band count as indifferent.
pub const INDIFFERENCE_BAND: (f64, f64) = (0.4, 0.6);

/// A fixed-capacity attack: architectures, training budget, and restarts.
#[derive(Debug, Clone)]
pub struct AttackConfig {
    pub gen_arch: Architecture,
    pub clf_arch: Architecture,
    pub rbbr: RbbrConfig,
    /// Independent attack trainings per player; the best one counts.
    pub n_restarts: usize,
    /// Monte Carlo samples per payoff evaluation.
    pub eval_samples: usize,
}

impl AttackConfig {
    /// Attackers shaped like the defenders, three restarts.
    pub fn matching(spec: &GangSpec, rbbr: RbbrConfig) -> Self {
        Self {
            gen_arch: spec.gen_arch().clone(),
            clf_arch: spec.clf_arch().clone(),
            rbbr,
            n_restarts: 3,
            eval_samples: 10_000,
        }
    }

    /// Attacker capacity, reported alongside results.
    pub fn param_counts(&self) -> (usize, usize) {
        (self.gen_arch.param_count(), self.clf_arch.param_count())
    }
}

/// Trains `n_restarts` fresh best responses per player against the fixed
/// mixtures and returns `(expl, g_term, c_term)` where `g_term` is the best
/// generator advantage `u_G(attack, mu_C)`, `c_term` the best classifier
/// advantage `u_C(mu_G, attack)`, and `expl` their sum (no flooring; may be
/// negative). All attacks are evaluated on one shared sample draw so the max
/// picks the genuinely best attack, and restart `k` uses the same seeds for
/// every `n_restarts >= k`, making the result non-decreasing in restarts.
pub fn exploitability(
    mu_g: &MixtureStrategy,
    mu_c: &MixtureStrategy,
    spec: &GangSpec,
    atk: &AttackConfig,
    eval_seed: u64,
) -> Result<(f64, f64, f64)> {
    if atk.n_restarts == 0 {
        return Err(Error::InvalidArgument(
            "exploitability needs at least one attack restart".to_string(),
        ));
    }
    if atk.eval_samples == 0 {
        return Err(Error::InvalidArgument(
            "eval_samples must be positive".to_string(),
        ));
    }
    let attack_spec = spec.with_archs(atk.gen_arch.clone(), atk.clf_arch.clone())?;
    let mut g_term = f64::NEG_INFINITY;
    let mut c_term = f64::NEG_INFINITY;
    for k in 0..atk.n_restarts {
        let g_cfg = atk
            .rbbr
            .with_seed(seed::derive(eval_seed, "attack-g", k as u64));
        let c_cfg = atk
            .rbbr
            .with_seed(seed::derive(eval_seed, "attack-c", k as u64));
        let (g_atk, c_atk) = rayon::join(
            || rbbr_generator(mu_c, &attack_spec, &g_cfg),
            || rbbr_classifier(mu_g, &attack_spec, &c_cfg),
        );
        let ug = payoff_ug(
            &MixtureStrategy::pure(g_atk?),
            mu_c,
            &attack_spec,
            atk.eval_samples,
            seed::derive(eval_seed, "eval-g", 0),
        )?;
        let uc = payoff_uc(
            mu_g,
            &MixtureStrategy::pure(c_atk?),
            &attack_spec,
            atk.eval_samples,
            seed::derive(eval_seed, "eval-c", 0),
        )?;
        g_term = g_term.max(ug);
        c_term = c_term.max(uc);
    }
    Ok((g_term + c_term, g_term, c_term))
}

/// An axis-aligned evaluation lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(x_min < x_max && y_min < y_max) || [x_min, x_max, y_min, y_max].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "grid bounds must be finite with min < max".to_string(),
            ));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidArgument(
                "grid needs at least 2 cells per axis".to_string(),
            ));
        }
        Ok(Self { x_min, x_max, y_min, y_max, nx, ny })
    }

    /// The task bounding box inflated by 20 percent about its center.
    pub fn from_task(task: &GaussianMixtureTask, nx: usize, ny: usize) -> Result<Self> {
        let (lo, hi) = task.bounding_box();
        let cx = 0.5 * (lo[0] + hi[0]);
        let cy = 0.5 * (lo[1] + hi[1]);
        let hx = 0.6 * (hi[0] - lo[0]);
        let hy = 0.6 * (hi[1] - lo[1]);
        Self::new(cx - hx, cx + hx, cy - hy, cy + hy, nx, ny)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx)
            .map(|i| self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64)
            .collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny)
            .map(|j| self.y_min + (self.y_max - self.y_min) * j as f64 / (self.ny - 1) as f64)
            .collect()
    }
}

/// Expected classifier mixture output at every lattice point, row-major with
/// `y` as the outer axis. Values stay in [0, 1] because each component's
/// sigmoid output does.
pub fn classifier_response_surface(
    mu_c: &MixtureStrategy,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    let xs = grid.xs();
    let ys = grid.ys();
    let mut values = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            values.push(mixture_output(mu_c, &[x, y])?);
        }
    }
    Ok(values)
}

/// Weighted classifier mixture output at one point.
pub fn mixture_output(mu_c: &MixtureStrategy, point: &[f64]) -> Result<f64> {
    let mut out = 0.0;
    for (net, &w) in mu_c.components().iter().zip(mu_c.weights().probs()) {
        if w == 0.0 {
            continue;
        }
        out += w * net.forward(point)?[0];
    }
    Ok(out)
}

/// Mean mixture output over `n` real points and the fraction inside the
/// indifference band; both near-trivial at a converged solution where the
/// classifier cannot distinguish real from fake.
pub fn indifference_stat(
    mu_c: &MixtureStrategy,
    task: &GaussianMixtureTask,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "indifference statistic needs at least one sample".to_string(),
        ));
    }
    let pts = crate::tasks::sample_real(task, n, seed);
    let mut total = 0.0;
    let mut in_band = 0usize;
    for p in pts.chunks_exact(2) {
        let out = mixture_output(mu_c, p)?;
        total += out;
        if out >= INDIFFERENCE_BAND.0 && out <= INDIFFERENCE_BAND.1 {
            in_band += 1;
        }
    }
    Ok((total / n as f64, in_band as f64 / n as f64))
}

/// Surface CSV: `x,y,value` per lattice point, y-outer order matching
/// [`classifier_response_surface`].
pub fn surface_to_csv(grid: &GridSpec, values: &[f64]) -> Result<String> {
    let xs = grid.xs();
    let ys = grid.ys();
    if values.len() != xs.len() * ys.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} surface values for a {}x{} grid",
            values.len(),
            grid.nx,
            grid.ny
        )));
    }
    let mut out = String::from("x,y,value\n");
    let mut k = 0;
    for &y in &ys {
        for &x in &xs {
            writeln!(out, "{x},{y},{}", values[k]).expect("string write");
            k += 1;
        }
    }
    Ok(out)
}

/// Scatter CSV: `x,y,label` with labels `real` and `fake`.
pub fn scatter_to_csv(real: &[f64], fake: &[f64]) -> Result<String> {
    if real.len() % 2 != 0 || fake.len() % 2 != 0 {
        return Err(Error::DimensionMismatch(
            "scatter points must be planar".to_string(),
        ));
    }
    let mut out = String::from("x,y,label\n");
    for p in real.chunks_exact(2) {
        writeln!(out, "{},{},real", p[0], p[1]).expect("string write");
    }
    for p in fake.chunks_exact(2) {
        writeln!(out, "{},{},fake", p[0], p[1]).expect("string write");
    }
    Ok(out)
}
