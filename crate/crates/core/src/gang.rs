//! Generator/classifier games over neural strategies.
//!
//! A game instance pairs a real-data distribution with a latent distribution
//! and two network architectures. Pure strategies are parameterizations of
//! those networks; mixed strategies are finite mixtures of trained nets. The
//! classifier's payoff is
//!
//! `u_C = E_real[phi(C(x))] - E_fake[phi(C(G(z)))]`
//!
//! with `u_G = -u_C`, where `phi` is a measuring function applied to the
//! classifier output. Payoffs are estimated by seeded Monte Carlo. Best
//! responses are resource-bounded: a fixed number of seeded gradient steps
//! from a fresh random initialization, with no early stopping, so a "best"
//! response is exactly what the given compute budget can find.

use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::neural::{Activation, Architecture, MlpNet};
use crate::seed;
use rand::Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

/// Default clamp applied inside the logarithmic measuring function.
pub const DEFAULT_CLAMP_EPS: f64 = 1e-7;

/// Measuring function applied to classifier outputs inside the payoff.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasuringFn {
    /// `ln(clamp(p, eps, 1 - eps))`; keeps payoffs finite on saturated
    /// classifier outputs.
    Log { clamp_eps: f64 },
    Identity,
}

impl MeasuringFn {
    pub fn log(clamp_eps: f64) -> Result<Self> {
        if !(clamp_eps > 0.0 && clamp_eps < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "clamp epsilon must lie in (0, 0.5), got {clamp_eps}"
            )));
        }
        Ok(MeasuringFn::Log { clamp_eps })
    }

    pub fn apply(&self, p: f64) -> f64 {
        match *self {
            MeasuringFn::Log { clamp_eps } => p.clamp(clamp_eps, 1.0 - clamp_eps).ln(),
            MeasuringFn::Identity => p,
        }
    }

    /// Derivative with respect to `p`; zero inside the clamped bands.
    pub fn derivative(&self, p: f64) -> f64 {
        match *self {
            MeasuringFn::Log { clamp_eps } => {
                if p > clamp_eps && p < 1.0 - clamp_eps {
                    1.0 / p
                } else {
                    0.0
                }
            }
            MeasuringFn::Identity => 1.0,
        }
    }
}

impl Default for MeasuringFn {
    fn default() -> Self {
        MeasuringFn::Log {
            clamp_eps: DEFAULT_CLAMP_EPS,
        }
    }
}

/// Seeded sampler producing row-major `n x dim` points.
pub trait DataSampler: Send + Sync {
    fn dim(&self) -> usize;
    /// Draws `n` points fully determined by `seed`.
    fn sample(&self, n: usize, seed: u64) -> Vec<f64>;
}

/// Standard normal latent distribution.
#[derive(Debug, Clone)]
pub struct GaussianLatent {
    dim: usize,
}

impl GaussianLatent {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "latent dimension must be positive".to_string(),
            ));
        }
        Ok(Self { dim })
    }
}

impl DataSampler for GaussianLatent {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = seed::rng(seed);
        (0..n * self.dim).map(|_| rng.sample(StandardNormal)).collect()
    }
}

/// A complete game instance: data distributions, architectures, and the
/// measuring function.
#[derive(Clone)]
pub struct GangSpec {
    real: Arc<dyn DataSampler>,
    latent: Arc<dyn DataSampler>,
    gen_arch: Architecture,
    clf_arch: Architecture,
    phi: MeasuringFn,
}

impl GangSpec {
    pub fn new(
        real: Arc<dyn DataSampler>,
        latent: Arc<dyn DataSampler>,
        gen_arch: Architecture,
        clf_arch: Architecture,
        phi: MeasuringFn,
    ) -> Result<Self> {
        if gen_arch.input_dim() != latent.dim() {
            return Err(Error::DimensionMismatch(format!(
                "generator takes {} inputs but the latent space has {} dimensions",
                gen_arch.input_dim(),
                latent.dim()
            )));
        }
        if gen_arch.output_dim() != real.dim() {
            return Err(Error::DimensionMismatch(format!(
                "generator emits {} outputs but data has {} dimensions",
                gen_arch.output_dim(),
                real.dim()
            )));
        }
        if clf_arch.input_dim() != real.dim() || clf_arch.output_dim() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "classifier must map {} inputs to 1 output, got {} to {}",
                real.dim(),
                clf_arch.input_dim(),
                clf_arch.output_dim()
            )));
        }
        let last_gen = *gen_arch.activations().last().expect("validated arch");
        if last_gen != Activation::Linear {
            return Err(Error::InvalidArgument(
                "generator output activation must be linear".to_string(),
            ));
        }
        let last_clf = *clf_arch.activations().last().expect("validated arch");
        if last_clf != Activation::Sigmoid {
            return Err(Error::InvalidArgument(
                "classifier output activation must be sigmoid".to_string(),
            ));
        }
        Ok(Self {
            real,
            latent,
            gen_arch,
            clf_arch,
            phi,
        })
    }

    /// Builds a spec with relu hidden layers, a linear generator head, and a
    /// sigmoid classifier head.
    pub fn standard(
        real: Arc<dyn DataSampler>,
        latent_dim: usize,
        gen_hidden: &[usize],
        clf_hidden: &[usize],
        phi: MeasuringFn,
    ) -> Result<Self> {
        let data_dim = real.dim();
        let latent = Arc::new(GaussianLatent::new(latent_dim)?);
        let mut gen_sizes = vec![latent_dim];
        gen_sizes.extend_from_slice(gen_hidden);
        gen_sizes.push(data_dim);
        let mut gen_acts = vec![Activation::Relu; gen_hidden.len()];
        gen_acts.push(Activation::Linear);
        let mut clf_sizes = vec![data_dim];
        clf_sizes.extend_from_slice(clf_hidden);
        clf_sizes.push(1);
        let mut clf_acts = vec![Activation::Relu; clf_hidden.len()];
        clf_acts.push(Activation::Sigmoid);
        Self::new(
            real,
            latent,
            Architecture::new(gen_sizes, gen_acts)?,
            Architecture::new(clf_sizes, clf_acts)?,
            phi,
        )
    }

    /// Same game with different network architectures, used to field attackers
    /// whose capacity differs from the defending networks.
    pub fn with_archs(&self, gen_arch: Architecture, clf_arch: Architecture) -> Result<Self> {
        Self::new(
            Arc::clone(&self.real),
            Arc::clone(&self.latent),
            gen_arch,
            clf_arch,
            self.phi.clone(),
        )
    }

    pub fn real(&self) -> &Arc<dyn DataSampler> {
        &self.real
    }

    pub fn latent(&self) -> &Arc<dyn DataSampler> {
        &self.latent
    }

    pub fn data_dim(&self) -> usize {
        self.real.dim()
    }

    pub fn latent_dim(&self) -> usize {
        self.latent.dim()
    }

    pub fn gen_arch(&self) -> &Architecture {
        &self.gen_arch
    }

    pub fn clf_arch(&self) -> &Architecture {
        &self.clf_arch
    }

    pub fn phi(&self) -> &MeasuringFn {
        &self.phi
    }
}

/// Finite mixture over trained networks of one role.
#[derive(Debug, Clone)]
pub struct MixtureStrategy {
    components: Vec<MlpNet>,
    weights: MixedStrategy,
}

impl MixtureStrategy {
    pub fn new(components: Vec<MlpNet>, weights: MixedStrategy) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument(
                "mixture needs at least one component".to_string(),
            ));
        }
        if components.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} components but {} weights",
                components.len(),
                weights.len()
            )));
        }
        let (din, dout) = (
            components[0].arch().input_dim(),
            components[0].arch().output_dim(),
        );
        if components
            .iter()
            .any(|c| c.arch().input_dim() != din || c.arch().output_dim() != dout)
        {
            return Err(Error::DimensionMismatch(
                "mixture components must share input and output dimensions".to_string(),
            ));
        }
        Ok(Self { components, weights })
    }

    /// Point mass on a single network.
    pub fn pure(net: MlpNet) -> Self {
        Self {
            weights: MixedStrategy::pure(0, 1).expect("one strategy"),
            components: vec![net],
        }
    }

    pub fn components(&self) -> &[MlpNet] {
        &self.components
    }

    pub fn weights(&self) -> &MixedStrategy {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Total parameter count over components with positive weight.
    pub fn support_param_total(&self) -> usize {
        self.weights
            .support()
            .into_iter()
            .map(|i| self.components[i].param_count())
            .sum()
    }

    fn input_dim(&self) -> usize {
        self.components[0].arch().input_dim()
    }

    fn output_dim(&self) -> usize {
        self.components[0].arch().output_dim()
    }
}

/// Draws `n` component indices from the mixture weights, one uniform draw per
/// index regardless of mixture size.
pub fn sample_categorical(weights: &MixedStrategy, n: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (i, &p) in weights.probs().iter().enumerate() {
                acc += p;
                if u < acc {
                    return i;
                }
            }
            weights.len() - 1
        })
        .collect()
}

/// Draws `n` points from the generator mixture: a component per its weight,
/// then a latent pushed through that component.
pub fn sample_mixture(
    g: &MixtureStrategy,
    spec: &GangSpec,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    sample_mixture_with(
        g,
        spec.latent(),
        n,
        seed::derive(seed, "component", 0),
        seed::derive(seed, "latent", 0),
    )
}

fn sample_mixture_with(
    g: &MixtureStrategy,
    latent: &Arc<dyn DataSampler>,
    n: usize,
    component_seed: u64,
    latent_seed: u64,
) -> Result<Vec<f64>> {
    let dz = latent.dim();
    if g.input_dim() != dz {
        return Err(Error::DimensionMismatch(format!(
            "generator mixture takes {} inputs but latents have {dz}",
            g.input_dim()
        )));
    }
    let choices = sample_categorical(g.weights(), n, component_seed);
    let latents = latent.sample(n, latent_seed);
    let mut out = Vec::with_capacity(n * g.output_dim());
    for (t, &k) in choices.iter().enumerate() {
        let x = g.components()[k].forward(&latents[t * dz..(t + 1) * dz])?;
        out.extend_from_slice(&x);
    }
    Ok(out)
}

fn mixture_phi_of_point(
    c: &MixtureStrategy,
    phi: &MeasuringFn,
    point: &[f64],
) -> Result<f64> {
    let mut total = 0.0;
    for (net, &w) in c.components().iter().zip(c.weights().probs()) {
        if w == 0.0 {
            continue;
        }
        let y = net.forward(point)?[0];
        total += w * phi.apply(y);
    }
    Ok(total)
}

/// Deterministic payoff kernel on explicit samples: the classifier payoff
/// `mean_real[phi(C(x))] - mean_fake[phi(C(G(z)))]` with the fake side built
/// from `g_choices[t]` applied to the `t`-th latent. The classifier mixture is
/// averaged exactly per point.
pub fn payoff_uc_on_samples(
    g: &MixtureStrategy,
    c: &MixtureStrategy,
    phi: &MeasuringFn,
    real: &[f64],
    data_dim: usize,
    latents: &[f64],
    latent_dim: usize,
    g_choices: &[usize],
) -> Result<f64> {
    if data_dim == 0 || latent_dim == 0 || real.is_empty() || latents.is_empty() {
        return Err(Error::InvalidArgument(
            "payoff estimation needs non-empty samples".to_string(),
        ));
    }
    if real.len() % data_dim != 0 || latents.len() % latent_dim != 0 {
        return Err(Error::DimensionMismatch(
            "sample buffers are not a whole number of points".to_string(),
        ));
    }
    let n_fake = latents.len() / latent_dim;
    if g_choices.len() != n_fake {
        return Err(Error::DimensionMismatch(format!(
            "{} component choices for {n_fake} latents",
            g_choices.len()
        )));
    }
    if g_choices.iter().any(|&k| k >= g.len()) {
        return Err(Error::InvalidArgument(
            "component choice out of range".to_string(),
        ));
    }
    if g.input_dim() != latent_dim || g.output_dim() != data_dim {
        return Err(Error::DimensionMismatch(
            "generator mixture does not map latents to data points".to_string(),
        ));
    }
    if c.input_dim() != data_dim || c.output_dim() != 1 {
        return Err(Error::DimensionMismatch(
            "classifier mixture does not map data points to one output".to_string(),
        ));
    }

    let n_real = real.len() / data_dim;
    let mut real_total = 0.0;
    for t in 0..n_real {
        real_total += mixture_phi_of_point(c, phi, &real[t * data_dim..(t + 1) * data_dim])?;
    }
    let mut fake_total = 0.0;
    for (t, &k) in g_choices.iter().enumerate() {
        let x = g.components()[k].forward(&latents[t * latent_dim..(t + 1) * latent_dim])?;
        fake_total += mixture_phi_of_point(c, phi, &x)?;
    }
    Ok(real_total / n_real as f64 - fake_total / n_fake as f64)
}

/// Monte Carlo estimate of the classifier payoff with `n_samples` real and
/// `n_samples` fake points, all draws derived from `seed`.
pub fn payoff_uc(
    g: &MixtureStrategy,
    c: &MixtureStrategy,
    spec: &GangSpec,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument(
            "payoff estimation needs at least one sample".to_string(),
        ));
    }
    let real = spec.real().sample(n_samples, seed::derive(seed, "real", 0));
    let latents = spec
        .latent()
        .sample(n_samples, seed::derive(seed, "latent", 0));
    let choices = sample_categorical(g.weights(), n_samples, seed::derive(seed, "component", 0));
    payoff_uc_on_samples(
        g,
        c,
        spec.phi(),
        &real,
        spec.data_dim(),
        &latents,
        spec.latent_dim(),
        &choices,
    )
}

/// Generator payoff: exactly the negated classifier payoff on the same draws.
pub fn payoff_ug(
    g: &MixtureStrategy,
    c: &MixtureStrategy,
    spec: &GangSpec,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    Ok(-payoff_uc(g, c, spec, n_samples, seed)?)
}

/// Like [`payoff_uc`] but the generator mixture is enumerated exactly: every
/// component is evaluated on the common latent draw and combined by weight,
/// so the estimate is linear in the mixture weights.
pub fn payoff_uc_enumerated(
    g: &MixtureStrategy,
    c: &MixtureStrategy,
    spec: &GangSpec,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument(
            "payoff estimation needs at least one sample".to_string(),
        ));
    }
    let data_dim = spec.data_dim();
    let dz = spec.latent_dim();
    if g.input_dim() != dz || g.output_dim() != data_dim {
        return Err(Error::DimensionMismatch(
            "generator mixture does not map latents to data points".to_string(),
        ));
    }
    let real = spec.real().sample(n_samples, seed::derive(seed, "real", 0));
    let latents = spec.latent().sample(n_samples, seed::derive(seed, "latent", 0));

    let mut real_total = 0.0;
    for t in 0..n_samples {
        real_total += mixture_phi_of_point(c, spec.phi(), &real[t * data_dim..(t + 1) * data_dim])?;
    }
    let mut fake_mean = 0.0;
    for (gnet, &w) in g.components().iter().zip(g.weights().probs()) {
        if w == 0.0 {
            continue;
        }
        let mut total = 0.0;
        for t in 0..n_samples {
            let x = gnet.forward(&latents[t * dz..(t + 1) * dz])?;
            total += mixture_phi_of_point(c, spec.phi(), &x)?;
        }
        fake_mean += w * (total / n_samples as f64);
    }
    Ok(real_total / n_samples as f64 - fake_mean)
}

/// Gradient optimizer for the training loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerKind {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl OptimizerKind {
    pub fn adam_default() -> Self {
        OptimizerKind::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl Default for OptimizerKind {
    fn default() -> Self {
        Self::adam_default()
    }
}

struct Optimizer {
    kind: OptimizerKind,
    lr: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u32,
}

impl Optimizer {
    fn new(kind: OptimizerKind, lr: f64, dim: usize) -> Self {
        let state_dim = match kind {
            OptimizerKind::Sgd => 0,
            OptimizerKind::Adam { .. } => dim,
        };
        Self {
            kind,
            lr,
            m: vec![0.0; state_dim],
            v: vec![0.0; state_dim],
            t: 0,
        }
    }

    /// One ascent step along `grad`.
    fn ascend(&mut self, params: &mut [f64], grad: &[f64]) {
        match self.kind {
            OptimizerKind::Sgd => {
                for (p, &g) in params.iter_mut().zip(grad) {
                    *p += self.lr * g;
                }
            }
            OptimizerKind::Adam { beta1, beta2, eps } => {
                self.t += 1;
                let bc1 = 1.0 - beta1.powi(self.t as i32);
                let bc2 = 1.0 - beta2.powi(self.t as i32);
                for ((p, &g), (m, v)) in params
                    .iter_mut()
                    .zip(grad)
                    .zip(self.m.iter_mut().zip(self.v.iter_mut()))
                {
                    *m = beta1 * *m + (1.0 - beta1) * g;
                    *v = beta2 * *v + (1.0 - beta2) * g * g;
                    let m_hat = *m / bc1;
                    let v_hat = *v / bc2;
                    *p += self.lr * m_hat / (v_hat.sqrt() + eps);
                }
            }
        }
    }
}

/// Budget and hyperparameters of one resource-bounded best response.
#[derive(Debug, Clone)]
pub struct RbbrConfig {
    /// Gradient steps; the entire compute budget. Zero returns the random
    /// initialization untouched.
    pub steps: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    /// Adds a batch of uniform points from the bounding box of each step's
    /// real and fake batches, labeled fake, to regularize the classifier.
    pub uniform_fake: bool,
    pub seed: u64,
}

impl RbbrConfig {
    pub fn new(steps: usize, batch_size: usize, learning_rate: f64, seed: u64) -> Self {
        Self {
            steps,
            batch_size,
            learning_rate,
            optimizer: OptimizerKind::adam_default(),
            uniform_fake: false,
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument(
                "batch size must be positive".to_string(),
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

fn ensure_finite(net: MlpNet, what: &str) -> Result<MlpNet> {
    if net.params().iter().any(|p| !p.is_finite()) {
        return Err(Error::Numerical(format!(
            "{what} training produced non-finite parameters"
        )));
    }
    Ok(net)
}

/// Bounding box of the combined batches, then `n` uniform points inside it.
/// The box has zero margin and is recomputed from the given batches alone.
fn uniform_box_batch(real: &[f64], fake: &[f64], dim: usize, n: usize, seed: u64) -> Vec<f64> {
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for chunk in real.chunks_exact(dim).chain(fake.chunks_exact(dim)) {
        for (d, &x) in chunk.iter().enumerate() {
            lo[d] = lo[d].min(x);
            hi[d] = hi[d].max(x);
        }
    }
    let mut rng = seed::rng(seed);
    let mut out = Vec::with_capacity(n * dim);
    for _ in 0..n {
        for d in 0..dim {
            let u: f64 = rng.gen();
            out.push(lo[d] + u * (hi[d] - lo[d]));
        }
    }
    out
}

/// Parameter gradient of one classifier ascent objective:
/// `mean_real[phi(C(x))] - mean_fake[phi(C(x))]` where the fake side is the
/// concatenation of generated and (optionally) uniform box points.
fn classifier_step_gradient(
    clf: &MlpNet,
    phi: &MeasuringFn,
    real: &[f64],
    fake: &[f64],
    uniform: Option<&[f64]>,
    dim: usize,
) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; clf.param_count()];
    let n_real = real.len() / dim;
    let n_fake = (fake.len() + uniform.map_or(0, |u| u.len())) / dim;
    let mut accumulate = |points: &[f64], coeff: f64| -> Result<()> {
        for point in points.chunks_exact(dim) {
            let trace = clf.trace(point)?;
            let y = trace.output()[0];
            let up = coeff * phi.derivative(y);
            if up == 0.0 {
                continue;
            }
            let (pg, _) = clf.backward_from_trace(&trace, &[up], true)?;
            for (g, x) in grad.iter_mut().zip(pg.expect("parameter gradient")) {
                *g += x;
            }
        }
        Ok(())
    };
    accumulate(real, 1.0 / n_real as f64)?;
    accumulate(fake, -1.0 / n_fake as f64)?;
    if let Some(u) = uniform {
        accumulate(u, -1.0 / n_fake as f64)?;
    }
    Ok(grad)
}

/// Trains a classifier best response against a fixed generator mixture:
/// `cfg.steps` seeded gradient steps from a fresh random initialization.
pub fn rbbr_classifier(
    g_mix: &MixtureStrategy,
    spec: &GangSpec,
    cfg: &RbbrConfig,
) -> Result<MlpNet> {
    cfg.validate()?;
    let dim = spec.data_dim();
    let mut net = MlpNet::init_random(&spec.clf_arch, seed::derive(cfg.seed, "init", 0));
    let mut opt = Optimizer::new(cfg.optimizer, cfg.learning_rate, net.param_count());
    for step in 0..cfg.steps {
        let s = step as u64;
        let real = spec
            .real()
            .sample(cfg.batch_size, seed::derive(cfg.seed, "real", s));
        let fake = sample_mixture_with(
            g_mix,
            spec.latent(),
            cfg.batch_size,
            seed::derive(cfg.seed, "component", s),
            seed::derive(cfg.seed, "latent", s),
        )?;
        let uniform = cfg.uniform_fake.then(|| {
            uniform_box_batch(
                &real,
                &fake,
                dim,
                cfg.batch_size,
                seed::derive(cfg.seed, "uniform", s),
            )
        });
        let grad =
            classifier_step_gradient(&net, spec.phi(), &real, &fake, uniform.as_deref(), dim)?;
        opt.ascend(net.params_mut(), &grad);
    }
    ensure_finite(net, "classifier")
}

/// The generator-dependent part of `u_G` on an explicit latent batch:
/// `mean_z sum_k w_k phi(C_k(G(z)))`.
pub fn generator_mixture_objective(
    gen: &MlpNet,
    c_mix: &MixtureStrategy,
    phi: &MeasuringFn,
    latents: &[f64],
) -> Result<f64> {
    let dz = gen.arch().input_dim();
    if latents.is_empty() || latents.len() % dz != 0 {
        return Err(Error::DimensionMismatch(
            "latent buffer is not a whole number of points".to_string(),
        ));
    }
    let n = latents.len() / dz;
    let mut total = 0.0;
    for z in latents.chunks_exact(dz) {
        let x = gen.forward(z)?;
        total += mixture_phi_of_point(c_mix, phi, &x)?;
    }
    Ok(total / n as f64)
}

/// Parameter gradient of [`generator_mixture_objective`]: each classifier
/// component's input gradient, weighted by its mixture weight, chained through
/// the generator. Zero-weight components are skipped entirely.
pub fn generator_mixture_gradient(
    gen: &MlpNet,
    c_mix: &MixtureStrategy,
    phi: &MeasuringFn,
    latents: &[f64],
) -> Result<Vec<f64>> {
    let dz = gen.arch().input_dim();
    if latents.is_empty() || latents.len() % dz != 0 {
        return Err(Error::DimensionMismatch(
            "latent buffer is not a whole number of points".to_string(),
        ));
    }
    let n = latents.len() / dz;
    let data_dim = gen.arch().output_dim();
    let mut grad = vec![0.0; gen.param_count()];
    for z in latents.chunks_exact(dz) {
        let gtrace = gen.trace(z)?;
        let x = gtrace.output().to_vec();
        let mut dphi_dx = vec![0.0; data_dim];
        let mut any = false;
        for (clf, &w) in c_mix.components().iter().zip(c_mix.weights().probs()) {
            if w == 0.0 {
                continue;
            }
            let ctrace = clf.trace(&x)?;
            let y = ctrace.output()[0];
            let up = w * phi.derivative(y);
            if up == 0.0 {
                continue;
            }
            let (_, xg) = clf.backward_from_trace(&ctrace, &[up], false)?;
            for (acc, g) in dphi_dx.iter_mut().zip(xg) {
                *acc += g;
            }
            any = true;
        }
        if !any {
            continue;
        }
        let (pg, _) = gen.backward_from_trace(&gtrace, &dphi_dx, true)?;
        for (acc, g) in grad.iter_mut().zip(pg.expect("parameter gradient")) {
            *acc += g;
        }
    }
    for g in grad.iter_mut() {
        *g /= n as f64;
    }
    Ok(grad)
}

/// Trains a generator best response against a fixed classifier mixture:
/// `cfg.steps` seeded ascent steps on `u_G` from a fresh random
/// initialization.
pub fn rbbr_generator(
    c_mix: &MixtureStrategy,
    spec: &GangSpec,
    cfg: &RbbrConfig,
) -> Result<MlpNet> {
    cfg.validate()?;
    let mut net = MlpNet::init_random(&spec.gen_arch, seed::derive(cfg.seed, "init", 0));
    let mut opt = Optimizer::new(cfg.optimizer, cfg.learning_rate, net.param_count());
    for step in 0..cfg.steps {
        let latents = spec
            .latent()
            .sample(cfg.batch_size, seed::derive(cfg.seed, "latent", step as u64));
        let grad = generator_mixture_gradient(&net, c_mix, spec.phi(), &latents)?;
        opt.ascend(net.params_mut(), &grad);
    }
    ensure_finite(net, "generator")
}

/// Alternating single-pair training: per round one classifier ascent step on
/// `u_C` against the current generator, then one generator ascent step on
/// `u_G` against the updated classifier. The conventional baseline the
/// mixture solver is compared against.
pub fn train_gan(
    spec: &GangSpec,
    g_cfg: &RbbrConfig,
    c_cfg: &RbbrConfig,
    rounds: usize,
    seed: u64,
) -> Result<(MlpNet, MlpNet)> {
    g_cfg.validate()?;
    c_cfg.validate()?;
    let dim = spec.data_dim();
    let dz = spec.latent_dim();
    let mut gen = MlpNet::init_random(&spec.gen_arch, seed::derive(seed, "g-init", 0));
    let mut clf = MlpNet::init_random(&spec.clf_arch, seed::derive(seed, "c-init", 0));
    let mut g_opt = Optimizer::new(g_cfg.optimizer, g_cfg.learning_rate, gen.param_count());
    let mut c_opt = Optimizer::new(c_cfg.optimizer, c_cfg.learning_rate, clf.param_count());
    for round in 0..rounds {
        let r = round as u64;
        let real = spec
            .real()
            .sample(c_cfg.batch_size, seed::derive(seed, "real", r));
        let latents = spec
            .latent()
            .sample(c_cfg.batch_size, seed::derive(seed, "c-latent", r));
        let mut fake = Vec::with_capacity(c_cfg.batch_size * dim);
        for z in latents.chunks_exact(dz) {
            fake.extend_from_slice(&gen.forward(z)?);
        }
        let uniform = c_cfg.uniform_fake.then(|| {
            uniform_box_batch(
                &real,
                &fake,
                dim,
                c_cfg.batch_size,
                seed::derive(seed, "uniform", r),
            )
        });
        let c_grad =
            classifier_step_gradient(&clf, spec.phi(), &real, &fake, uniform.as_deref(), dim)?;
        c_opt.ascend(clf.params_mut(), &c_grad);

        let g_latents = spec
            .latent()
            .sample(g_cfg.batch_size, seed::derive(seed, "g-latent", r));
        let c_pure = MixtureStrategy::pure(clf.clone());
        let g_grad = generator_mixture_gradient(&gen, &c_pure, spec.phi(), &g_latents)?;
        g_opt.ascend(gen.params_mut(), &g_grad);
    }
    let gen = ensure_finite(gen, "generator")?;
    let clf = ensure_finite(clf, "classifier")?;
    Ok((gen, clf))
}
