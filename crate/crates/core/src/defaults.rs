//! Frozen reference setup shared by the CLI, the benchmarks, and the
//! acceptance suite.
//!
//! Everything here is configuration, not algorithm. The values pin down the
//! networks, budgets, and optimizer settings that headline results are quoted
//! on, so they live in one place and are guarded by regression tests below.

use std::sync::Arc;

use crate::gang::{DataSampler, GangSpec, MeasuringFn, RbbrConfig};
use crate::pnm::PnmConfig;
use crate::Result;

/// Latent dimension of the reference generator.
pub const DEFAULT_LATENT_DIM: usize = 8;
/// Gradient steps per generator best response. The generator gets the larger
/// budget: it must relocate probability mass between distant modes, while the
/// classifier only refits a decision surface. Pushing the classifier budget
/// up instead saturates its outputs and collapses the indifference
/// diagnostics at the mixture.
pub const DEFAULT_GENERATOR_STEPS: usize = 3000;
/// Gradient steps per classifier best response.
pub const DEFAULT_CLASSIFIER_STEPS: usize = 1000;
/// Minibatch size for every trainer.
pub const DEFAULT_BATCH_SIZE: usize = 128;
/// Adam learning rate for both players.
pub const DEFAULT_LEARNING_RATE: f64 = 1e-3;
/// Reduced generator learning rate applied by the `slow-g` preset.
pub const SLOW_G_LEARNING_RATE: f64 = 1e-4;
/// Hidden widths of the reference networks for both players.
pub const DEFAULT_HIDDEN: [usize; 2] = [32, 32];
/// Hidden widths of the single-pair baseline. One pair of this size carries
/// a parameter budget in the range of a typical converged mixture built from
/// reference-sized components, keeping capacity comparisons between the two
/// kinds of solution honest.
pub const BASELINE_HIDDEN: [usize; 2] = [64, 64];

/// Reference game for a 2-d data distribution: generator
/// `latent(8) -> 32 -> 32 -> 2` (relu, relu, linear), classifier
/// `2 -> 32 -> 32 -> 1` (relu, relu, sigmoid), clamped-log measuring function.
pub fn default_spec(real: Arc<dyn DataSampler>) -> Result<GangSpec> {
    GangSpec::standard(
        real,
        DEFAULT_LATENT_DIM,
        &DEFAULT_HIDDEN,
        &DEFAULT_HIDDEN,
        MeasuringFn::default(),
    )
}

/// Single-pair baseline game: same shape as [`default_spec`] but with
/// [`BASELINE_HIDDEN`] widths.
pub fn baseline_spec(real: Arc<dyn DataSampler>) -> Result<GangSpec> {
    GangSpec::standard(
        real,
        DEFAULT_LATENT_DIM,
        &BASELINE_HIDDEN,
        &BASELINE_HIDDEN,
        MeasuringFn::default(),
    )
}

/// Reference generator trainer budget.
pub fn default_rbbr_generator(seed: u64) -> RbbrConfig {
    RbbrConfig::new(
        DEFAULT_GENERATOR_STEPS,
        DEFAULT_BATCH_SIZE,
        DEFAULT_LEARNING_RATE,
        seed,
    )
}

/// Reference classifier trainer budget. Uniform fake data stays off by
/// default: mixing box-uniform points into the fake batch shifts the
/// equilibrium classifier response on real data above one half (it then
/// discriminates against generator *and* box noise), which breaks the
/// indifference diagnostics. The flag is exposed for convergence-speed runs.
pub fn default_rbbr_classifier(seed: u64) -> RbbrConfig {
    RbbrConfig::new(
        DEFAULT_CLASSIFIER_STEPS,
        DEFAULT_BATCH_SIZE,
        DEFAULT_LEARNING_RATE,
        seed,
    )
}

/// Reference memory-loop configuration: fixed 30 iterations, 10,000-sample
/// payoff estimates, certificate slack 0.05.
pub fn default_pnm_config(master_seed: u64) -> PnmConfig {
    PnmConfig::new(
        default_rbbr_generator(0),
        default_rbbr_classifier(0),
        master_seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pnm::PnmMode;
    use crate::tasks::make_task;

    /// Parameter budgets are quoted in reports and must not drift silently.
    #[test]
    fn reference_parameter_counts_are_frozen() {
        let task = Arc::new(make_task("grid9", 0).unwrap());
        let spec = default_spec(task).unwrap();
        assert_eq!(spec.gen_arch().param_count(), 1410);
        assert_eq!(spec.clf_arch().param_count(), 1185);
        assert_eq!(
            spec.gen_arch().param_count() + spec.clf_arch().param_count(),
            2595
        );
    }

    #[test]
    fn baseline_pair_is_several_times_one_reference_pair() {
        let task = Arc::new(make_task("grid9", 0).unwrap());
        let spec = baseline_spec(task).unwrap();
        assert_eq!(spec.gen_arch().param_count(), 4866);
        assert_eq!(spec.clf_arch().param_count(), 4417);
        let pair = spec.gen_arch().param_count() + spec.clf_arch().param_count();
        assert_eq!(pair, 9283);
        assert!(pair > 3 * 2595 && pair < 4 * 2595);
    }

    #[test]
    fn default_configs_wire_the_frozen_values() {
        let g = default_rbbr_generator(7);
        let c = default_rbbr_classifier(7);
        assert_eq!(g.steps, DEFAULT_GENERATOR_STEPS);
        assert_eq!(c.steps, DEFAULT_CLASSIFIER_STEPS);
        assert_eq!(g.batch_size, DEFAULT_BATCH_SIZE);
        assert_eq!(g.learning_rate, DEFAULT_LEARNING_RATE);
        assert!(!g.uniform_fake);
        assert!(!c.uniform_fake);
        let pnm = default_pnm_config(42);
        assert_eq!(pnm.mode, PnmMode::FixedIterations(30));
        assert_eq!(pnm.eval_samples, 10_000);
        assert_eq!(pnm.rb_ne_tolerance, 0.05);
        assert_eq!(pnm.master_seed, 42);
    }
}
