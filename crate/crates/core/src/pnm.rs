//! Parallel Nash memory over generator/classifier strategies.
//!
//! The loop keeps every strategy it ever accepted. Each iteration trains one
//! resource-bounded best response per player against the current subgame
//! equilibrium mixtures, and tests the combined raw payoff
//! `u_brs = u_G(g_new, mu_C) + u_C(mu_G, c_new)`. A positive sum means at
//! least one player can still gain, so the payoff matrix is augmented with
//! both candidates and re-solved; a non-positive sum certifies a
//! resource-bounded equilibrium under the configured best-response budget.
//!
//! Matrix entries are Monte Carlo estimates of `u_G` sharing one sample draw
//! across all entries (common random numbers), so entries are directly
//! comparable and never re-estimated as the matrix grows.

use crate::error::{Error, Result};
use crate::game::{best_pure_response, MixedStrategy, PayoffMatrix, Player};
use crate::gang::{
    payoff_uc, payoff_ug, rbbr_classifier, rbbr_generator, GangSpec, MixtureStrategy, RbbrConfig,
};
use crate::neural::MlpNet;
use crate::seed;
use crate::solver::{solve_zero_sum, GameSolution};
use std::time::Instant;

/// Tolerance for "no profitable deviation" in the exact-oracle harness.
const EXACT_TOL: f64 = 1e-9;

/// Termination policy of the memory loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnmMode {
    /// Stop at the first iteration whose combined best-response advantage is
    /// non-positive; `max_iterations` caps runaway runs.
    DeterministicStop { max_iterations: usize },
    /// Run exactly this many iterations, discarding candidates from rejected
    /// tests and continuing with fresh best-response seeds.
    FixedIterations(usize),
}

impl PnmMode {
    fn budget(&self) -> usize {
        match *self {
            PnmMode::DeterministicStop { max_iterations } => max_iterations,
            PnmMode::FixedIterations(n) => n,
        }
    }
}

/// Configuration of one training run.
#[derive(Debug, Clone)]
pub struct PnmConfig {
    pub mode: PnmMode,
    pub rbbr_g: RbbrConfig,
    pub rbbr_c: RbbrConfig,
    /// Monte Carlo sample count for matrix entries and best-response tests.
    pub eval_samples: usize,
    pub master_seed: u64,
    /// Certification slack absorbing Monte Carlo noise in payoff units.
    pub rb_ne_tolerance: f64,
}

impl PnmConfig {
    pub fn new(rbbr_g: RbbrConfig, rbbr_c: RbbrConfig, master_seed: u64) -> Self {
        Self {
            mode: PnmMode::FixedIterations(30),
            rbbr_g,
            rbbr_c,
            eval_samples: 10_000,
            master_seed,
            rb_ne_tolerance: 0.05,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.mode.budget() == 0 {
            return Err(Error::InvalidArgument(
                "iteration budget must be at least 1".to_string(),
            ));
        }
        if self.eval_samples == 0 {
            return Err(Error::InvalidArgument(
                "eval_samples must be positive".to_string(),
            ));
        }
        if !(self.rb_ne_tolerance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "certificate tolerance must be non-negative, got {}",
                self.rb_ne_tolerance
            )));
        }
        Ok(())
    }
}

/// One iteration's test outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub u_brs_g: f64,
    pub u_brs_c: f64,
    pub u_brs: f64,
    pub accepted: bool,
    /// Subgame value after this iteration (recorded, not monotone).
    pub value: f64,
    /// Wall-clock seconds; in-memory diagnostics only, never serialized.
    pub wall_secs: f64,
}

/// The growing memory: strategy lists, their estimated payoff matrix, and the
/// current subgame equilibrium.
#[derive(Debug, Clone)]
pub struct PnmState {
    g_strats: Vec<MlpNet>,
    c_strats: Vec<MlpNet>,
    matrix: PayoffMatrix,
    ne: GameSolution,
    history: Vec<IterationRecord>,
    iteration: usize,
    terminated: bool,
}

impl PnmState {
    /// Reassembles a state (e.g. from a checkpoint), revalidating the
    /// dimensional invariants and that `ne` still solves `matrix`.
    pub fn from_parts(
        g_strats: Vec<MlpNet>,
        c_strats: Vec<MlpNet>,
        matrix: PayoffMatrix,
        ne: GameSolution,
        history: Vec<IterationRecord>,
        iteration: usize,
        terminated: bool,
    ) -> Result<Self> {
        if matrix.rows() != g_strats.len() || matrix.cols() != c_strats.len() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but there are {} generators and {} classifiers",
                matrix.rows(),
                matrix.cols(),
                g_strats.len(),
                c_strats.len()
            )));
        }
        if ne.row_strategy.len() != matrix.rows() || ne.col_strategy.len() != matrix.cols() {
            return Err(Error::DimensionMismatch(
                "equilibrium dimensions do not match the matrix".to_string(),
            ));
        }
        // Integrity check against mismatched or corrupted files, not a
        // precision claim: near-duplicate strategies make some stored
        // matrices ill-conditioned, so the solver's slack can legitimately
        // reach its drift tolerance there.
        let eps = crate::game::epsilon_of_profile(&matrix, &ne.profile())?;
        if eps > 1e-6 {
            return Err(Error::Numerical(format!(
                "stored equilibrium has exploitability {eps} on the stored matrix"
            )));
        }
        Ok(Self {
            g_strats,
            c_strats,
            matrix,
            ne,
            history,
            iteration,
            terminated,
        })
    }

    pub fn g_strats(&self) -> &[MlpNet] {
        &self.g_strats
    }

    pub fn c_strats(&self) -> &[MlpNet] {
        &self.c_strats
    }

    pub fn matrix(&self) -> &PayoffMatrix {
        &self.matrix
    }

    pub fn ne(&self) -> &GameSolution {
        &self.ne
    }

    pub fn history(&self) -> &[IterationRecord] {
        &self.history
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    /// Current equilibrium mixture over stored generators.
    pub fn generator_mixture(&self) -> MixtureStrategy {
        MixtureStrategy::new(self.g_strats.clone(), self.ne.row_strategy.clone())
            .expect("state invariants guarantee matching dimensions")
    }

    /// Current equilibrium mixture over stored classifiers.
    pub fn classifier_mixture(&self) -> MixtureStrategy {
        MixtureStrategy::new(self.c_strats.clone(), self.ne.col_strategy.clone())
            .expect("state invariants guarantee matching dimensions")
    }
}

/// Estimated `u_G(g, c)` for pure strategies; every entry of a run shares the
/// sample draw derived from the master seed.
fn matrix_entry(g: &MlpNet, c: &MlpNet, spec: &GangSpec, cfg: &PnmConfig) -> Result<f64> {
    let sample_seed = seed::derive(cfg.master_seed, "matrix", 0);
    Ok(-payoff_uc(
        &MixtureStrategy::pure(g.clone()),
        &MixtureStrategy::pure(c.clone()),
        spec,
        cfg.eval_samples,
        sample_seed,
    )?)
}

/// Builds the initial memory: one random generator and one classifier best
/// response to it, with their 1x1 payoff matrix.
pub fn pnm_init(spec: &GangSpec, cfg: &PnmConfig) -> Result<PnmState> {
    cfg.validate()?;
    let g0 = MlpNet::init_random(spec.gen_arch(), seed::derive(cfg.master_seed, "g0", 0));
    let mu_g = MixtureStrategy::pure(g0.clone());
    let c_cfg = cfg
        .rbbr_c
        .with_seed(seed::derive(cfg.master_seed, "rbbr-c", 0));
    let c0 = rbbr_classifier(&mu_g, spec, &c_cfg)?;
    let entry = matrix_entry(&g0, &c0, spec, cfg)?;
    let matrix = PayoffMatrix::new(1, 1, vec![entry])?;
    let ne = solve_zero_sum(&matrix)?;
    Ok(PnmState {
        g_strats: vec![g0],
        c_strats: vec![c0],
        matrix,
        ne,
        history: Vec::new(),
        iteration: 0,
        terminated: false,
    })
}

/// Runs one iteration: train both best responses, test the combined
/// advantage, and either augment-and-resolve or record a rejection. A
/// terminated state is left untouched.
pub fn pnm_iterate(state: &mut PnmState, spec: &GangSpec, cfg: &PnmConfig) -> Result<()> {
    if state.terminated {
        return Ok(());
    }
    let start = Instant::now();
    state.iteration += 1;
    let i = state.iteration as u64;
    let mu_g = state.generator_mixture();
    let mu_c = state.classifier_mixture();

    let g_cfg = cfg
        .rbbr_g
        .with_seed(seed::derive(cfg.master_seed, "rbbr-g", i));
    let c_cfg = cfg
        .rbbr_c
        .with_seed(seed::derive(cfg.master_seed, "rbbr-c", i));
    let (g_new, c_new) = rayon::join(
        || rbbr_generator(&mu_c, spec, &g_cfg),
        || rbbr_classifier(&mu_g, spec, &c_cfg),
    );
    let (g_new, c_new) = (g_new?, c_new?);

    let u_brs_g = payoff_ug(
        &MixtureStrategy::pure(g_new.clone()),
        &mu_c,
        spec,
        cfg.eval_samples,
        seed::derive(cfg.master_seed, "ubrs-g", i),
    )?;
    let u_brs_c = payoff_uc(
        &mu_g,
        &MixtureStrategy::pure(c_new.clone()),
        spec,
        cfg.eval_samples,
        seed::derive(cfg.master_seed, "ubrs-c", i),
    )?;
    let u_brs = u_brs_g + u_brs_c;
    let accepted = u_brs > 0.0;

    if accepted {
        let mut new_row = state
            .c_strats
            .iter()
            .map(|c| matrix_entry(&g_new, c, spec, cfg))
            .collect::<Result<Vec<f64>>>()?;
        new_row.push(matrix_entry(&g_new, &c_new, spec, cfg)?);
        let new_col = state
            .g_strats
            .iter()
            .map(|g| matrix_entry(g, &c_new, spec, cfg))
            .collect::<Result<Vec<f64>>>()?;
        state.matrix = state.matrix.augmented(&new_row, &new_col)?;
        state.g_strats.push(g_new);
        state.c_strats.push(c_new);
        state.ne = solve_zero_sum(&state.matrix)?;
    } else if matches!(cfg.mode, PnmMode::DeterministicStop { .. }) {
        state.terminated = true;
    }
    if state.iteration >= cfg.mode.budget() {
        state.terminated = true;
    }
    state.history.push(IterationRecord {
        iteration: state.iteration,
        u_brs_g,
        u_brs_c,
        u_brs,
        accepted,
        value: state.ne.value,
        wall_secs: start.elapsed().as_secs_f64(),
    });
    Ok(())
}

/// Full training run: init, then iterate until the mode terminates. The
/// callback sees the state after initialization and after every iteration
/// (checkpointing hook).
pub fn run_with(
    spec: &GangSpec,
    cfg: &PnmConfig,
    mut on_iter: impl FnMut(&PnmState) -> Result<()>,
) -> Result<PnmState> {
    let mut state = pnm_init(spec, cfg)?;
    on_iter(&state)?;
    while !state.terminated {
        pnm_iterate(&mut state, spec, cfg)?;
        on_iter(&state)?;
    }
    Ok(state)
}

pub fn run(spec: &GangSpec, cfg: &PnmConfig) -> Result<PnmState> {
    run_with(spec, cfg, |_| Ok(()))
}

/// Certifies the final mixtures with one fresh best-response pair under new
/// seeds: `certified` iff the combined advantage stays within tolerance.
pub fn rb_ne_certificate(
    state: &PnmState,
    spec: &GangSpec,
    cfg: &PnmConfig,
    attack_seed: u64,
) -> Result<(f64, bool)> {
    let mu_g = state.generator_mixture();
    let mu_c = state.classifier_mixture();
    let g_cfg = cfg.rbbr_g.with_seed(seed::derive(attack_seed, "cert-g", 0));
    let c_cfg = cfg.rbbr_c.with_seed(seed::derive(attack_seed, "cert-c", 0));
    let (g_atk, c_atk) = rayon::join(
        || rbbr_generator(&mu_c, spec, &g_cfg),
        || rbbr_classifier(&mu_g, spec, &c_cfg),
    );
    let g_term = payoff_ug(
        &MixtureStrategy::pure(g_atk?),
        &mu_c,
        spec,
        cfg.eval_samples,
        seed::derive(attack_seed, "cert-eval-g", 0),
    )?;
    let c_term = payoff_uc(
        &mu_g,
        &MixtureStrategy::pure(c_atk?),
        spec,
        cfg.eval_samples,
        seed::derive(attack_seed, "cert-eval-c", 0),
    )?;
    let u_brs_fresh = g_term + c_term;
    Ok((u_brs_fresh, u_brs_fresh <= cfg.rb_ne_tolerance))
}

/// Result of the exact-oracle harness on a known full matrix.
#[derive(Debug, Clone)]
pub struct PnmMatrixOutcome {
    /// Final subgame equilibrium lifted to the full index space.
    pub solution: GameSolution,
    pub iterations: usize,
    /// Row indices ever added, in insertion order.
    pub rows_visited: Vec<usize>,
    pub cols_visited: Vec<usize>,
}

fn lift(strategy: &MixedStrategy, idxs: &[usize], dim: usize) -> Result<MixedStrategy> {
    let mut probs = vec![0.0; dim];
    for (k, &i) in idxs.iter().enumerate() {
        probs[i] += strategy.prob(k);
    }
    MixedStrategy::new(probs)
}

/// The identical memory loop with exact best-response oracles over a known
/// finite game: start from one row and the column best response to it, then
/// repeatedly add the full-game best responses to the current subgame
/// equilibrium until the combined advantage vanishes. Terminates in at most
/// `rows + cols` iterations because every non-terminal iteration adds at
/// least one fresh index.
pub fn pnm_on_matrix(full: &PayoffMatrix, start_row: usize) -> Result<PnmMatrixOutcome> {
    if start_row >= full.rows() {
        return Err(Error::InvalidArgument(format!(
            "start row {start_row} out of range for {} rows",
            full.rows()
        )));
    }
    let mut rows = vec![start_row];
    let pure_row = lift(&MixedStrategy::pure(0, 1)?, &rows, full.rows())?;
    let (c0, _) = best_pure_response(full, &pure_row, Player::Col)?;
    let mut cols = vec![c0];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let sub = full.submatrix(&rows, &cols)?;
        let sol = solve_zero_sum(&sub)?;
        let row_full = lift(&sol.row_strategy, &rows, full.rows())?;
        let col_full = lift(&sol.col_strategy, &cols, full.cols())?;
        let (br_row, br_row_payoff) = best_pure_response(full, &col_full, Player::Row)?;
        let (br_col, br_col_payoff) = best_pure_response(full, &row_full, Player::Col)?;
        // Raw best-response payoffs; at a subgame equilibrium their sum equals
        // the combined advantage because the equilibrium payoffs cancel.
        let u_brs = br_row_payoff + br_col_payoff;
        let fresh_row = !rows.contains(&br_row);
        let fresh_col = !cols.contains(&br_col);
        if u_brs <= EXACT_TOL || (!fresh_row && !fresh_col) {
            return Ok(PnmMatrixOutcome {
                solution: GameSolution {
                    row_strategy: row_full,
                    col_strategy: col_full,
                    value: sol.value,
                },
                iterations,
                rows_visited: rows,
                cols_visited: cols,
            });
        }
        if fresh_row {
            rows.push(br_row);
        }
        if fresh_col {
            cols.push(br_col);
        }
    }
}
