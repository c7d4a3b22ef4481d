//! The eight acceptance criteria for the deliverable, run sequentially in one
//! test so timings are honest and heavy runs are shared. One line per
//! criterion is printed: `acceptance N [PASS/FAIL] <detail>`. Use
//! `cargo test --test acceptance -- --nocapture` to watch them appear.

mod common;

use std::sync::Arc;
use std::time::Instant;

use common::{central_diff, random_matrix, solve_by_support_enumeration};
use gangs_core::defaults::{
    baseline_spec, default_pnm_config, default_rbbr_generator, default_spec,
    DEFAULT_CLASSIFIER_STEPS, DEFAULT_GENERATOR_STEPS,
};
use gangs_core::gang::{generator_mixture_gradient, generator_mixture_objective};
use gangs_core::{
    epsilon_of_profile, exploitability, indifference_stat, make_task, mode_coverage, payoff_uc,
    payoff_ug, pnm, rbbr_generator, sample_mixture, seed, solve_zero_sum, train_gan, Activation,
    Architecture, AttackConfig, GangSpec, GaussianMixtureTask, IterationRecord, MeasuringFn,
    MixedStrategy, MixtureStrategy, MlpNet, PayoffMatrix, PnmMode,
};

// Pinned thresholds. Changing any of these weakens the gate; don't.
const LP_CLOSED_FORM_TOL: f64 = 1e-9;
const LP_ORACLE_TOL: f64 = 1e-8;
const LP_GAMES: usize = 100;
const LP_BUDGET_SECS: f64 = 5.0;
const GRAD_REL_TOL: f64 = 1e-4;
const GRAD_INSTANCES: usize = 50;
const GRAD_BUDGET_SECS: f64 = 30.0;
const DO_VALUE_TOL: f64 = 1e-8;
const DO_GAMES: usize = 20;
const DO_MAX_ITERS: usize = 24;
const DO_BUDGET_SECS: f64 = 10.0;
const ZS_PAIRS: usize = 100;
const MASTER_SEEDS: [u64; 3] = [1, 2, 3];
const COVERAGE_RADIUS_MULT: f64 = 3.0;
const COVERAGE_MIN_FRACTION: f64 = 0.01;
const EVAL_SAMPLES: usize = 10_000;
const PER_SEED_BUDGET_SECS: f64 = 20.0 * 60.0;
const BASELINE_COVERAGE_MAX: usize = 8;
const BAND_PNM_MIN: f64 = 0.6;
const BAND_BASELINE_MAX: f64 = 0.3;
const COARSE_STEPS: usize = 200;
const COARSE_CAP: usize = 200;
const CERT_SEEDS_NEEDED: usize = 2;
/// Alternating single-step rounds giving the baseline the same total number
/// of gradient steps as a full memory-loop run.
const BASELINE_ROUNDS: usize = 30 * (DEFAULT_GENERATOR_STEPS + DEFAULT_CLASSIFIER_STEPS) / 2;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn report(&mut self, n: usize, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("acceptance {n} [{tag}] {detail}");
        if !pass {
            self.failures.push(format!("criterion {n}: {detail}"));
        }
    }
}

fn median_f64(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
    v[v.len() / 2]
}

fn median_usize(values: &[usize]) -> usize {
    let mut v = values.to_vec();
    v.sort_unstable();
    v[v.len() / 2]
}

// ---------------------------------------------------------------------------
// Criterion 1: LP correctness against closed forms and support enumeration.

fn criterion_1(gate: &mut Gate) {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut ok = true;

    let pennies = PayoffMatrix::from_rows(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
    let rps =
        PayoffMatrix::from_rows(vec![vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]])
            .unwrap();
    for (game, uniform) in [(&pennies, 0.5), (&rps, 1.0 / 3.0)] {
        let s = solve_zero_sum(game).unwrap();
        ok &= s.value.abs() <= LP_CLOSED_FORM_TOL;
        for p in s.row_strategy.probs().iter().chain(s.col_strategy.probs()) {
            ok &= (p - uniform).abs() <= LP_CLOSED_FORM_TOL;
        }
    }

    let mut checked = 0;
    for g in 0..LP_GAMES as u64 {
        let rows = 2 + (g % 5) as usize;
        let cols = 2 + ((g / 5) % 5) as usize;
        let u = random_matrix(rows, cols, 40_000 + g);
        let lp = solve_zero_sum(&u).unwrap();
        let (_, _, v_oracle) =
            solve_by_support_enumeration(&u, 1e-9).expect("oracle finds an equilibrium");
        let dv = (lp.value - v_oracle).abs();
        let eps = epsilon_of_profile(&u, &lp.profile()).unwrap();
        worst = worst.max(dv).max(eps);
        ok &= dv <= LP_ORACLE_TOL && eps <= LP_ORACLE_TOL;
        checked += 1;
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= checked == LP_GAMES && secs < LP_BUDGET_SECS;
    gate.report(
        1,
        ok,
        format!("closed forms at {LP_CLOSED_FORM_TOL:.0e}; {checked} random games vs enumeration, worst gap {worst:.2e} (tol {LP_ORACLE_TOL:.0e}); {secs:.1}s < {LP_BUDGET_SECS}s"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: gradient fidelity against central finite differences.

fn max_rel_err(got: &[f64], want: &[f64]) -> f64 {
    got.iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs() / w.abs().max(1e-7))
        .fold(0.0, f64::max)
}

fn smooth_arch(sizes: Vec<usize>, out: Activation) -> Architecture {
    let mut acts = vec![Activation::Tanh; sizes.len() - 2];
    acts.push(out);
    Architecture::new(sizes, acts).unwrap()
}

fn criterion_2(gate: &mut Gate) {
    let t0 = Instant::now();
    let h = 1e-5;
    let mut worst = 0.0f64;

    // Plain network parameter gradients, scalarized output.
    let shapes = [
        (vec![2, 5, 1], Activation::Sigmoid),
        (vec![3, 4, 4, 2], Activation::Linear),
        (vec![4, 6, 3], Activation::Tanh),
        (vec![1, 8, 1], Activation::Sigmoid),
        (vec![5, 4, 2], Activation::Linear),
    ];
    for k in 0..GRAD_INSTANCES as u64 {
        let (sizes, head) = &shapes[(k % shapes.len() as u64) as usize];
        let arch = smooth_arch(sizes.clone(), *head);
        let net = MlpNet::init_random(&arch, 9_000 + k);
        let input: Vec<f64> = (0..arch.input_dim())
            .map(|i| 0.4 * ((i as f64 + 1.3) * (k as f64 + 0.7)).sin())
            .collect();
        let coeffs: Vec<f64> = (0..arch.output_dim()).map(|j| 1.0 + 0.5 * j as f64).collect();
        let objective = |params: &[f64]| -> f64 {
            let probe = MlpNet::new(arch.clone(), params.to_vec()).unwrap();
            probe
                .forward(&input)
                .unwrap()
                .iter()
                .zip(&coeffs)
                .map(|(o, c)| o * c)
                .sum()
        };
        let (param_grad, _) = net.backward(&input, &coeffs).unwrap();
        let fd = central_diff(&objective, net.params(), h);
        worst = worst.max(max_rel_err(&param_grad, &fd));
    }

    // Full chained objective: latents -> generator -> classifier mixture -> phi.
    let gen_arch = smooth_arch(vec![2, 5, 2], Activation::Linear);
    let clf_arch = smooth_arch(vec![2, 4, 1], Activation::Sigmoid);
    let phi = MeasuringFn::log(1e-7).unwrap();
    for k in 0..GRAD_INSTANCES as u64 {
        let gen = MlpNet::init_random(&gen_arch, 10_000 + k);
        let c1 = MlpNet::init_random(&clf_arch, 11_000 + k);
        let c2 = MlpNet::init_random(&clf_arch, 12_000 + k);
        let w = 0.3 + 0.4 * ((k % 7) as f64 / 7.0);
        let mix =
            MixtureStrategy::new(vec![c1, c2], MixedStrategy::new(vec![w, 1.0 - w]).unwrap())
                .unwrap();
        let latents: Vec<f64> = (0..8).map(|i| ((i as f64 + k as f64) * 0.37).sin()).collect();
        let objective = |params: &[f64]| -> f64 {
            let probe = MlpNet::new(gen_arch.clone(), params.to_vec()).unwrap();
            generator_mixture_objective(&probe, &mix, &phi, &latents).unwrap()
        };
        let grad = generator_mixture_gradient(&gen, &mix, &phi, &latents).unwrap();
        let fd = central_diff(&objective, gen.params(), h);
        worst = worst.max(max_rel_err(&grad, &fd));
    }

    let secs = t0.elapsed().as_secs_f64();
    let ok = worst < GRAD_REL_TOL && secs < GRAD_BUDGET_SECS;
    gate.report(
        2,
        ok,
        format!("{GRAD_INSTANCES} network + {GRAD_INSTANCES} chained instances, max rel err {worst:.2e} (tol {GRAD_REL_TOL:.0e}); {secs:.1}s < {GRAD_BUDGET_SECS}s"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: double-oracle equivalence with exact best responses.

fn criterion_3(gate: &mut Gate) {
    let t0 = Instant::now();
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut max_iters = 0;
    for g in 0..DO_GAMES as u64 {
        let u = random_matrix(12, 12, 60_000 + g);
        let full = solve_zero_sum(&u).unwrap();
        let outcome = gangs_core::pnm_on_matrix(&u, (g % 12) as usize).unwrap();
        let dv = (outcome.solution.value - full.value).abs();
        worst = worst.max(dv);
        max_iters = max_iters.max(outcome.iterations);
        ok &= dv <= DO_VALUE_TOL && outcome.iterations <= DO_MAX_ITERS;
    }

    // Strictly dominant row: the oracle loop must stop after visiting at
    // most the start row and the dominant row.
    let mut max_rows = 0;
    for g in 0..5u64 {
        let base = random_matrix(12, 12, 70_000 + g);
        let mut rows: Vec<Vec<f64>> = (0..12)
            .map(|i| base.entries()[i * 12..(i + 1) * 12].to_vec())
            .collect();
        let dominant = 7;
        for j in 0..12 {
            let best_other = (0..12)
                .filter(|&i| i != dominant)
                .map(|i| rows[i][j])
                .fold(f64::NEG_INFINITY, f64::max);
            rows[dominant][j] = best_other + 0.5;
        }
        let u = PayoffMatrix::from_rows(rows).unwrap();
        let outcome = gangs_core::pnm_on_matrix(&u, 0).unwrap();
        max_rows = max_rows.max(outcome.rows_visited.len());
        ok &= outcome.rows_visited.len() <= 2;
    }

    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < DO_BUDGET_SECS;
    gate.report(
        3,
        ok,
        format!("{DO_GAMES} games, worst value gap {worst:.2e} (tol {DO_VALUE_TOL:.0e}), max {max_iters} iters (cap {DO_MAX_ITERS}); dominant-row games visit <= {max_rows} rows; {secs:.1}s < {DO_BUDGET_SECS}s"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: exact zero-sum payoffs and bitwise determinism.

fn criterion_4(gate: &mut Gate) {
    let task = Arc::new(make_task("grid9", 0).unwrap());
    let spec = GangSpec::standard(task, 2, &[4], &[4], MeasuringFn::default()).unwrap();
    let mut ok = true;

    for k in 0..ZS_PAIRS as u64 {
        let g1 = MlpNet::init_random(spec.gen_arch(), 100 + k);
        let g2 = MlpNet::init_random(spec.gen_arch(), 200 + k);
        let c1 = MlpNet::init_random(spec.clf_arch(), 300 + k);
        let w = 0.1 + 0.8 * ((k % 9) as f64 / 9.0);
        let g = MixtureStrategy::new(vec![g1, g2], MixedStrategy::new(vec![w, 1.0 - w]).unwrap())
            .unwrap();
        let c = MixtureStrategy::pure(c1);
        let uc = payoff_uc(&g, &c, &spec, 64, 500 + k).unwrap();
        let ug = payoff_ug(&g, &c, &spec, 64, 500 + k).unwrap();
        ok &= ug == -uc;
    }

    // Bitwise reproducibility of the seeded pipelines: payoff estimates,
    // best-response training, and a short memory loop.
    let uc_a = payoff_uc(
        &MixtureStrategy::pure(MlpNet::init_random(spec.gen_arch(), 1)),
        &MixtureStrategy::pure(MlpNet::init_random(spec.clf_arch(), 2)),
        &spec,
        256,
        42,
    )
    .unwrap();
    let uc_b = payoff_uc(
        &MixtureStrategy::pure(MlpNet::init_random(spec.gen_arch(), 1)),
        &MixtureStrategy::pure(MlpNet::init_random(spec.clf_arch(), 2)),
        &spec,
        256,
        42,
    )
    .unwrap();
    ok &= uc_a.to_bits() == uc_b.to_bits();

    let clf_mix = MixtureStrategy::pure(MlpNet::init_random(spec.clf_arch(), 3));
    let mut rbbr = default_rbbr_generator(77);
    rbbr.steps = 25;
    rbbr.batch_size = 32;
    let net_a = rbbr_generator(&clf_mix, &spec, &rbbr).unwrap();
    let net_b = rbbr_generator(&clf_mix, &spec, &rbbr).unwrap();
    ok &= net_a
        .params()
        .iter()
        .zip(net_b.params())
        .all(|(a, b)| a.to_bits() == b.to_bits());

    let mut cfg = default_pnm_config(9);
    cfg.mode = PnmMode::FixedIterations(2);
    cfg.rbbr_g.steps = 5;
    cfg.rbbr_c.steps = 5;
    cfg.rbbr_g.batch_size = 32;
    cfg.rbbr_c.batch_size = 32;
    cfg.eval_samples = 200;
    let run_a = pnm::run(&spec, &cfg).unwrap();
    let run_b = pnm::run(&spec, &cfg).unwrap();
    ok &= run_a.history().len() == run_b.history().len();
    for (a, b) in run_a.history().iter().zip(run_b.history()) {
        ok &= a.value.to_bits() == b.value.to_bits() && a.u_brs.to_bits() == b.u_brs.to_bits();
    }
    ok &= run_a
        .matrix()
        .entries()
        .iter()
        .zip(run_b.matrix().entries())
        .all(|(a, b)| a.to_bits() == b.to_bits());

    gate.report(
        4,
        ok,
        format!("u_G == -u_C exactly on {ZS_PAIRS} pairs; payoff, training, and memory-loop reruns bitwise identical"),
    );
}

// ---------------------------------------------------------------------------
// Shared heavy runs for criteria 5-8.

struct PnmRun {
    covered: usize,
    band: f64,
    expl: f64,
    /// Accepted-iteration count at which coverage first hit all modes.
    first_full_accepted: Option<usize>,
    secs: f64,
}

struct BaselineRun {
    covered: usize,
    band: f64,
    expl: f64,
}

/// Attackers of the reference shape and budget, identical for every defender.
fn fixed_attack(task: &Arc<GaussianMixtureTask>) -> AttackConfig {
    let atk_spec = default_spec(task.clone()).unwrap();
    AttackConfig::matching(&atk_spec, default_rbbr_generator(0))
}

fn full_pnm_run(task_name: &str, master: u64, uniform: bool) -> PnmRun {
    let task = Arc::new(make_task(task_name, master).unwrap());
    let spec = default_spec(task.clone()).unwrap();
    let mut cfg = default_pnm_config(master);
    cfg.rbbr_c.uniform_fake = uniform;
    let mode_count = task.mode_count();
    let t0 = Instant::now();
    let mut first_full = None;
    let state = pnm::run_with(&spec, &cfg, |s| {
        if s.iteration() == 0 || first_full.is_some() {
            return Ok(());
        }
        let pts = sample_mixture(
            &s.generator_mixture(),
            &spec,
            EVAL_SAMPLES,
            seed::derive(master, "acc-cov-iter", s.iteration() as u64),
        )?;
        let (cov, _) = mode_coverage(&task, &pts, COVERAGE_RADIUS_MULT, COVERAGE_MIN_FRACTION)?;
        if cov == mode_count {
            first_full = Some(s.history().iter().filter(|r| r.accepted).count());
        }
        Ok(())
    })
    .unwrap();
    let secs = t0.elapsed().as_secs_f64();

    let g_mix = state.generator_mixture();
    let c_mix = state.classifier_mixture();
    let pts = sample_mixture(&g_mix, &spec, EVAL_SAMPLES, seed::derive(master, "acc-cov", 0)).unwrap();
    let (covered, _) =
        mode_coverage(&task, &pts, COVERAGE_RADIUS_MULT, COVERAGE_MIN_FRACTION).unwrap();
    let (_, band) =
        indifference_stat(&c_mix, &task, EVAL_SAMPLES, seed::derive(master, "acc-ind", 0)).unwrap();
    let (expl, _, _) = exploitability(
        &g_mix,
        &c_mix,
        &spec,
        &fixed_attack(&task),
        seed::derive(master, "acc-atk", 0),
    )
    .unwrap();
    PnmRun {
        covered,
        band,
        expl,
        first_full_accepted: first_full,
        secs,
    }
}

fn baseline_run(task_name: &str, master: u64) -> BaselineRun {
    let task = Arc::new(make_task(task_name, master).unwrap());
    let spec = baseline_spec(task.clone()).unwrap();
    let mut g_cfg = default_rbbr_generator(0);
    g_cfg.steps = 1;
    let c_cfg = g_cfg.clone();
    let (gen, clf) = train_gan(&spec, &g_cfg, &c_cfg, BASELINE_ROUNDS, master).unwrap();
    let g_mix = MixtureStrategy::pure(gen);
    let c_mix = MixtureStrategy::pure(clf);
    let pts = sample_mixture(&g_mix, &spec, EVAL_SAMPLES, seed::derive(master, "acc-cov", 0)).unwrap();
    let (covered, _) =
        mode_coverage(&task, &pts, COVERAGE_RADIUS_MULT, COVERAGE_MIN_FRACTION).unwrap();
    let (_, band) =
        indifference_stat(&c_mix, &task, EVAL_SAMPLES, seed::derive(master, "acc-ind", 0)).unwrap();
    let (expl, _, _) = exploitability(
        &g_mix,
        &c_mix,
        &spec,
        &fixed_attack(&task),
        seed::derive(master, "acc-atk", 0),
    )
    .unwrap();
    BaselineRun {
        covered,
        band,
        expl,
    }
}

fn coarse_config(master: u64) -> gangs_core::PnmConfig {
    let mut cfg = default_pnm_config(master);
    cfg.rbbr_g.steps = COARSE_STEPS;
    cfg.rbbr_c.steps = COARSE_STEPS;
    cfg
}

// ---------------------------------------------------------------------------

fn criterion_5(gate: &mut Gate, pnm_runs: &[PnmRun], gan_runs: &[BaselineRun]) {
    let pnm_cov: Vec<usize> = pnm_runs.iter().map(|r| r.covered).collect();
    let gan_cov: Vec<usize> = gan_runs.iter().map(|r| r.covered).collect();
    let worst_secs = pnm_runs.iter().map(|r| r.secs).fold(0.0, f64::max);
    let ok = median_usize(&pnm_cov) == 9
        && median_usize(&gan_cov) <= BASELINE_COVERAGE_MAX
        && worst_secs < PER_SEED_BUDGET_SECS;
    gate.report(
        5,
        ok,
        format!(
            "grid9 coverage: memory loop {pnm_cov:?} (median {}), single-pair baseline {gan_cov:?} (median {}, cap {BASELINE_COVERAGE_MAX}); slowest seed {worst_secs:.0}s < {PER_SEED_BUDGET_SECS:.0}s",
            median_usize(&pnm_cov),
            median_usize(&gan_cov)
        ),
    );
}

fn criterion_6(gate: &mut Gate, pnm_runs: &[PnmRun], gan_runs: &[BaselineRun]) {
    let pnm_band: Vec<f64> = pnm_runs.iter().map(|r| r.band).collect();
    let gan_band: Vec<f64> = gan_runs.iter().map(|r| r.band).collect();
    let ok = median_f64(&pnm_band) >= BAND_PNM_MIN && median_f64(&gan_band) <= BAND_BASELINE_MAX;
    gate.report(
        6,
        ok,
        format!(
            "fraction of real data with classifier response in [0.4,0.6]: memory loop {:?} (median {:.3} >= {BAND_PNM_MIN}), baseline {:?} (median {:.3} <= {BAND_BASELINE_MAX})",
            pnm_band.iter().map(|b| (b * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            median_f64(&pnm_band),
            gan_band.iter().map(|b| (b * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            median_f64(&gan_band)
        ),
    );
}

fn criterion_7(
    gate: &mut Gate,
    grid_pnm: &[PnmRun],
    grid_gan: &[BaselineRun],
    rand_pnm: &[PnmRun],
    rand_gan: &[BaselineRun],
) {
    let med = |v: &[f64]| median_f64(v);
    let gp: Vec<f64> = grid_pnm.iter().map(|r| r.expl).collect();
    let gg: Vec<f64> = grid_gan.iter().map(|r| r.expl).collect();
    let rp: Vec<f64> = rand_pnm.iter().map(|r| r.expl).collect();
    let rg: Vec<f64> = rand_gan.iter().map(|r| r.expl).collect();
    let ok = med(&gp) < med(&gg) && med(&rp) < med(&rg);
    gate.report(
        7,
        ok,
        format!(
            "median exploitability, memory loop vs baseline: grid9 {:.3} < {:.3}, random9 {:.3} < {:.3}",
            med(&gp),
            med(&gg),
            med(&rp),
            med(&rg)
        ),
    );
}

fn criterion_8(gate: &mut Gate, grid_off: &[PnmRun], grid_on: &[PnmRun]) {
    // Deterministic stop at coarse budgets: the loop halts on its own and a
    // fresh-seed certificate stays within tolerance in >= 2 of 3 seeds.
    let mut certified = 0;
    let mut det_detail = Vec::new();
    for &master in &MASTER_SEEDS {
        let task = Arc::new(make_task("grid9", master).unwrap());
        let spec = default_spec(task).unwrap();
        let mut cfg = coarse_config(master);
        cfg.mode = PnmMode::DeterministicStop {
            max_iterations: COARSE_CAP,
        };
        let state = pnm::run(&spec, &cfg).unwrap();
        let (u_fresh, ok) =
            pnm::rb_ne_certificate(&state, &spec, &cfg, seed::derive(master, "acc-cert", 0))
                .unwrap();
        certified += usize::from(ok);
        det_detail.push(format!(
            "seed {master}: {} iters, u_brs_fresh {u_fresh:+.3} ({})",
            state.iteration(),
            if ok { "certified" } else { "rejected" }
        ));
    }

    // Coarse fixed-iteration runs: acceptance thins out as the memory
    // saturates.
    let mut first_fracs = Vec::new();
    let mut last_fracs = Vec::new();
    for &master in &MASTER_SEEDS {
        let task = Arc::new(make_task("grid9", master).unwrap());
        let spec = default_spec(task).unwrap();
        let cfg = coarse_config(master);
        let state = pnm::run(&spec, &cfg).unwrap();
        let history: &[IterationRecord] = state.history();
        let third = history.len() / 3;
        let frac = |slice: &[IterationRecord]| {
            slice.iter().filter(|r| r.accepted).count() as f64 / slice.len() as f64
        };
        first_fracs.push(frac(&history[..third]));
        last_fracs.push(frac(&history[history.len() - third..]));
    }

    // Uniform-fake classifiers speed up coverage, counted in accepted
    // iterations until every mode is hit.
    let to_count = |r: &PnmRun| r.first_full_accepted.unwrap_or(usize::MAX);
    let on: Vec<usize> = grid_on.iter().map(to_count).collect();
    let off: Vec<usize> = grid_off.iter().map(to_count).collect();

    let det_ok = certified >= CERT_SEEDS_NEEDED;
    let trend_ok = median_f64(&last_fracs) < median_f64(&first_fracs);
    let uniform_ok = median_usize(&on) < median_usize(&off);
    let show = |v: &[usize]| -> Vec<String> {
        v.iter()
            .map(|&c| if c == usize::MAX { "never".to_string() } else { c.to_string() })
            .collect()
    };
    gate.report(
        8,
        det_ok && trend_ok && uniform_ok,
        format!(
            "coarse self-stop certified {certified}/3 [{}]; accepted fraction first third {:.2} -> final third {:.2}; first full coverage at accepted iteration: uniform on {:?} vs off {:?}",
            det_detail.join("; "),
            median_f64(&first_fracs),
            median_f64(&last_fracs),
            show(&on),
            show(&off)
        ),
    );
}

// ---------------------------------------------------------------------------

#[test]
fn acceptance() {
    let mut gate = Gate { failures: vec![] };
    criterion_1(&mut gate);
    criterion_2(&mut gate);
    criterion_3(&mut gate);
    criterion_4(&mut gate);

    let grid_pnm: Vec<PnmRun> = MASTER_SEEDS
        .iter()
        .map(|&s| full_pnm_run("grid9", s, false))
        .collect();
    let grid_gan: Vec<BaselineRun> = MASTER_SEEDS
        .iter()
        .map(|&s| baseline_run("grid9", s))
        .collect();
    let rand_pnm: Vec<PnmRun> = MASTER_SEEDS
        .iter()
        .map(|&s| full_pnm_run("random9", s, false))
        .collect();
    let rand_gan: Vec<BaselineRun> = MASTER_SEEDS
        .iter()
        .map(|&s| baseline_run("random9", s))
        .collect();
    let grid_on: Vec<PnmRun> = MASTER_SEEDS
        .iter()
        .map(|&s| full_pnm_run("grid9", s, true))
        .collect();

    criterion_5(&mut gate, &grid_pnm, &grid_gan);
    criterion_6(&mut gate, &grid_pnm, &grid_gan);
    criterion_7(&mut gate, &grid_pnm, &grid_gan, &rand_pnm, &rand_gan);
    criterion_8(&mut gate, &grid_pnm, &grid_on);

    assert!(
        gate.failures.is_empty(),
        "failed criteria:\n{}",
        gate.failures.join("\n")
    );
}
