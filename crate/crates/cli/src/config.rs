//! Experiment configuration.
//!
//! The file format is TOML restricted to flat `key = value` pairs grouped
//! into sections; the exact grammar ships in the repository README. Every
//! key has a default, so a config file may be partial; only `task.name` must
//! be given. The fully resolved config is echoed into the output directory,
//! making each run dir self-describing and re-runnable.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use gangs_core::defaults::{
    DEFAULT_BATCH_SIZE, DEFAULT_CLASSIFIER_STEPS, DEFAULT_GENERATOR_STEPS, DEFAULT_HIDDEN,
    DEFAULT_LATENT_DIM, DEFAULT_LEARNING_RATE,
};
use gangs_core::{
    make_task, AttackConfig, GangSpec, GaussianMixtureTask, MeasuringFn, OptimizerKind, PnmConfig,
    PnmMode, RbbrConfig, DEFAULT_CLAMP_EPS,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSection {
    /// One of: grid9, grid16, annulus9, annulus16, random9, random16.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Mode-placement seed for the random task families. Defaults to
    /// `master_seed`, so changing the master seed draws a fresh instance
    /// unless the task is pinned explicitly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GangSection {
    pub latent_dim: usize,
    pub gen_hidden: Vec<usize>,
    pub clf_hidden: Vec<usize>,
    /// Measuring function tag: "log" or "identity".
    pub phi: String,
    pub clamp_eps: f64,
}

impl Default for GangSection {
    fn default() -> Self {
        Self {
            latent_dim: DEFAULT_LATENT_DIM,
            gen_hidden: DEFAULT_HIDDEN.to_vec(),
            clf_hidden: DEFAULT_HIDDEN.to_vec(),
            phi: "log".to_string(),
            clamp_eps: DEFAULT_CLAMP_EPS,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PnmSection {
    /// "fixed" or "deterministic-stop".
    pub mode: String,
    /// Iteration budget in "fixed" mode.
    pub iterations: usize,
    /// Safety cap in "deterministic-stop" mode.
    pub max_iterations: usize,
    pub eval_samples: usize,
    pub rb_ne_tolerance: f64,
}

impl Default for PnmSection {
    fn default() -> Self {
        Self {
            mode: "fixed".to_string(),
            iterations: 30,
            max_iterations: 200,
            eval_samples: 10_000,
            rb_ne_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RbbrSection {
    /// Defaults differ per player: generators get the larger budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// "adam" or "sgd".
    pub optimizer: String,
    pub uniform_fake: bool,
}

impl Default for RbbrSection {
    fn default() -> Self {
        Self {
            steps: None,
            batch_size: DEFAULT_BATCH_SIZE,
            learning_rate: DEFAULT_LEARNING_RATE,
            optimizer: "adam".to_string(),
            uniform_fake: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttackSection {
    pub restarts: usize,
    /// Gradient steps per attack training; batch size and learning rate are
    /// inherited from `[rbbr_generator]`.
    pub steps: usize,
    pub eval_samples: usize,
}

impl Default for AttackSection {
    fn default() -> Self {
        Self {
            restarts: 3,
            steps: DEFAULT_GENERATOR_STEPS,
            eval_samples: 10_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub surface_nx: usize,
    pub surface_ny: usize,
    /// Points per class in scatter.csv and the figure.
    pub scatter_samples: usize,
    pub coverage_samples: usize,
    pub indifference_samples: usize,
    pub radius_mult: f64,
    pub min_fraction: f64,
    /// Snapshot cadence in iterations; 0 writes only the final solution.
    pub checkpoint_every: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            surface_nx: 200,
            surface_ny: 200,
            scatter_samples: 512,
            coverage_samples: 10_000,
            indifference_samples: 10_000,
            radius_mult: 3.0,
            min_fraction: 0.01,
            checkpoint_every: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Root of every random draw in the run; no ambient entropy anywhere.
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub task: TaskSection,
    pub gang: GangSection,
    pub pnm: PnmSection,
    pub rbbr_generator: RbbrSection,
    pub rbbr_classifier: RbbrSection,
    pub attack: AttackSection,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            output_dir: PathBuf::from("gangs-out"),
            task: TaskSection::default(),
            gang: GangSection::default(),
            pnm: PnmSection::default(),
            rbbr_generator: RbbrSection::default(),
            rbbr_classifier: RbbrSection::default(),
            attack: AttackSection::default(),
            output: OutputSection::default(),
        }
    }
}

fn optimizer_kind(tag: &str, key: &str) -> Result<OptimizerKind> {
    match tag {
        "adam" => Ok(OptimizerKind::adam_default()),
        "sgd" => Ok(OptimizerKind::Sgd),
        other => Err(CliError::Config(format!(
            "config key `{key}` must be \"adam\" or \"sgd\", got \"{other}\""
        ))),
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// Validates everything that has a named key and fills derived defaults.
    /// Must run before any `build_*` call.
    pub fn resolve(&mut self) -> Result<()> {
        if self.task.name.as_deref().unwrap_or("").is_empty() {
            return Err(CliError::Config(
                "config key `task.name` is required: no task selected".to_string(),
            ));
        }
        if self.task.seed.is_none() {
            self.task.seed = Some(self.master_seed);
        }
        if self.rbbr_generator.steps.is_none() {
            self.rbbr_generator.steps = Some(DEFAULT_GENERATOR_STEPS);
        }
        if self.rbbr_classifier.steps.is_none() {
            self.rbbr_classifier.steps = Some(DEFAULT_CLASSIFIER_STEPS);
        }
        self.measuring()?;
        self.mode()?;
        optimizer_kind(&self.rbbr_generator.optimizer, "rbbr_generator.optimizer")?;
        optimizer_kind(&self.rbbr_classifier.optimizer, "rbbr_classifier.optimizer")?;
        for (value, key) in [
            (self.rbbr_generator.batch_size, "rbbr_generator.batch_size"),
            (self.rbbr_classifier.batch_size, "rbbr_classifier.batch_size"),
            (self.pnm.eval_samples, "pnm.eval_samples"),
            (self.attack.restarts, "attack.restarts"),
            (self.attack.eval_samples, "attack.eval_samples"),
            (self.output.coverage_samples, "output.coverage_samples"),
            (self.output.indifference_samples, "output.indifference_samples"),
            (self.output.scatter_samples, "output.scatter_samples"),
        ] {
            if value == 0 {
                return Err(CliError::Config(format!(
                    "config key `{key}` must be positive"
                )));
            }
        }
        for (value, key) in [
            (self.output.surface_nx, "output.surface_nx"),
            (self.output.surface_ny, "output.surface_ny"),
        ] {
            if value < 2 {
                return Err(CliError::Config(format!(
                    "config key `{key}` must be at least 2"
                )));
            }
        }
        Ok(())
    }

    fn measuring(&self) -> Result<MeasuringFn> {
        match self.gang.phi.as_str() {
            "log" => MeasuringFn::log(self.gang.clamp_eps).map_err(|e| {
                CliError::Config(format!("config key `gang.clamp_eps` is invalid: {e}"))
            }),
            "identity" => Ok(MeasuringFn::Identity),
            other => Err(CliError::Config(format!(
                "config key `gang.phi` must be \"log\" or \"identity\", got \"{other}\""
            ))),
        }
    }

    fn mode(&self) -> Result<PnmMode> {
        match self.pnm.mode.as_str() {
            "fixed" => Ok(PnmMode::FixedIterations(self.pnm.iterations)),
            "deterministic-stop" => Ok(PnmMode::DeterministicStop {
                max_iterations: self.pnm.max_iterations,
            }),
            other => Err(CliError::Config(format!(
                "config key `pnm.mode` must be \"fixed\" or \"deterministic-stop\", got \"{other}\""
            ))),
        }
    }

    pub fn build_task(&self) -> Result<Arc<GaussianMixtureTask>> {
        let name = self.task.name.as_deref().expect("resolved config");
        let seed = self.task.seed.expect("resolved config");
        Ok(Arc::new(make_task(name, seed)?))
    }

    pub fn build_spec(&self, task: Arc<GaussianMixtureTask>) -> Result<GangSpec> {
        Ok(GangSpec::standard(
            task,
            self.gang.latent_dim,
            &self.gang.gen_hidden,
            &self.gang.clf_hidden,
            self.measuring()?,
        )?)
    }

    fn rbbr(&self, section: &RbbrSection, key: &str) -> Result<RbbrConfig> {
        let mut cfg = RbbrConfig::new(
            section.steps.expect("resolved config"),
            section.batch_size,
            section.learning_rate,
            0,
        );
        cfg.optimizer = optimizer_kind(&section.optimizer, key)?;
        cfg.uniform_fake = section.uniform_fake;
        Ok(cfg)
    }

    pub fn build_pnm(&self) -> Result<PnmConfig> {
        let mut cfg = PnmConfig::new(
            self.rbbr(&self.rbbr_generator, "rbbr_generator.optimizer")?,
            self.rbbr(&self.rbbr_classifier, "rbbr_classifier.optimizer")?,
            self.master_seed,
        );
        cfg.mode = self.mode()?;
        cfg.eval_samples = self.pnm.eval_samples;
        cfg.rb_ne_tolerance = self.pnm.rb_ne_tolerance;
        Ok(cfg)
    }

    /// Attackers shaped like the configured defenders, with the attack
    /// section's budget.
    pub fn build_attack(&self, spec: &GangSpec) -> Result<AttackConfig> {
        let mut rbbr = self.rbbr(&self.rbbr_generator, "rbbr_generator.optimizer")?;
        rbbr.steps = self.attack.steps;
        rbbr.uniform_fake = false;
        let mut atk = AttackConfig::matching(spec, rbbr);
        atk.n_restarts = self.attack.restarts;
        atk.eval_samples = self.attack.eval_samples;
        Ok(atk)
    }

    pub fn echo(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("cannot serialize resolved config: {e}")))
    }
}
