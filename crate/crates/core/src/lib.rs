//! Two-player zero-sum games over trained networks.
//!
//! Building blocks, bottom up: exact payoff matrices and mixed strategies
//! ([`game`]), a dense simplex solver for matrix games ([`solver`]), a small
//! feed-forward network engine ([`neural`]), generator/classifier payoffs and
//! resource-bounded best responses ([`gang`]), the Nash-memory training loop
//! ([`pnm`]), mixture-of-Gaussians tasks ([`tasks`]), and evaluation
//! ([`eval`]).

pub mod checkpoint;
pub mod defaults;
pub mod error;
pub mod eval;
pub mod game;
pub mod gang;
pub mod neural;
pub mod pnm;
pub mod seed;
pub mod solver;
pub mod svg;
pub mod tasks;

pub use error::{Error, Result};
pub use eval::{
    classifier_response_surface, exploitability, indifference_stat, AttackConfig, GridSpec,
};
pub use game::{
    best_pure_response, epsilon_of_profile, expected_payoff, MixedStrategy, PayoffMatrix, Player,
    StrategyProfile,
};
pub use gang::{
    payoff_uc, payoff_uc_enumerated, payoff_uc_on_samples, payoff_ug, rbbr_classifier,
    rbbr_generator, sample_mixture, train_gan, DataSampler, GangSpec, GaussianLatent, MeasuringFn,
    MixtureStrategy, OptimizerKind, RbbrConfig, DEFAULT_CLAMP_EPS,
};
pub use neural::{Activation, Architecture, MlpNet};
pub use pnm::{
    pnm_init, pnm_iterate, pnm_on_matrix, rb_ne_certificate, IterationRecord, PnmConfig, PnmMode,
    PnmState,
};
pub use solver::{solve_zero_sum, GameSolution};
pub use tasks::{make_task, mode_coverage, sample_real, GaussianMixtureTask};
