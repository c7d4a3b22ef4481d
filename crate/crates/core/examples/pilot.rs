//! Hyperparameter pilot: times the heavy training paths and reports the
//! outcome statistics the acceptance thresholds are stated over.
//!
//! Usage:
//!   pilot pnm    <task> <g_steps> <c_steps> <iters> <seed> <uniform 0|1>
//!   pilot cert   <task> <steps> <max_iters> <seed> [uniform 0|1]
//!   pilot gan    <task> <rounds> <seed>
//!   pilot attack <task> <g_steps> <c_steps> <iters> <seed> <uniform 0|1>

use std::sync::Arc;
use std::time::Instant;

use gangs_core::defaults::{
    baseline_spec, default_pnm_config, default_spec, DEFAULT_BATCH_SIZE, DEFAULT_LEARNING_RATE,
};
use gangs_core::gang::{sample_mixture, train_gan, MixtureStrategy, RbbrConfig};
use gangs_core::pnm::{pnm_init, pnm_iterate, rb_ne_certificate, PnmMode, PnmState};
use gangs_core::seed;
use gangs_core::tasks::{make_task, mode_coverage};
use gangs_core::{exploitability, indifference_stat, AttackConfig, GangSpec};

fn report_mixtures(
    tag: &str,
    g_mix: &MixtureStrategy,
    c_mix: &MixtureStrategy,
    spec: &GangSpec,
    task: &gangs_core::GaussianMixtureTask,
) {
    let pts = sample_mixture(g_mix, spec, 10_000, seed::derive(9_999, "pilot-cov", 0)).unwrap();
    let (covered, fractions) = mode_coverage(task, &pts, 3.0, 0.01).unwrap();
    let (mean, frac) =
        indifference_stat(c_mix, task, 10_000, seed::derive(9_999, "pilot-ind", 0)).unwrap();
    println!(
        "{tag}: covered={covered}/{} fractions={:?}",
        task.mode_count(),
        fractions.iter().map(|f| (f * 1000.0).round() / 1000.0).collect::<Vec<_>>()
    );
    println!("{tag}: clf mean={mean:.4} frac_in_band={frac:.3}");
    println!(
        "{tag}: support g={} c={} params={}",
        g_mix.len(),
        c_mix.len(),
        g_mix.support_param_total() + c_mix.support_param_total()
    );
}

fn run_pnm(
    task_name: &str,
    g_steps: usize,
    c_steps: usize,
    iters: usize,
    master: u64,
    uniform: bool,
) -> PnmState {
    let task = Arc::new(make_task(task_name, master).unwrap());
    let spec = default_spec(task.clone()).unwrap();
    let mut cfg = default_pnm_config(master);
    cfg.mode = PnmMode::FixedIterations(iters);
    cfg.rbbr_g.steps = g_steps;
    cfg.rbbr_c.steps = c_steps;
    cfg.rbbr_c.uniform_fake = uniform;
    let t0 = Instant::now();
    let mut state = pnm_init(&spec, &cfg).unwrap();
    println!("init: {:.2}s value={:+.4}", t0.elapsed().as_secs_f64(), state.ne().value);
    let mut first_full = None;
    let mut accepted_so_far = 0usize;
    while !state.terminated() {
        pnm_iterate(&mut state, &spec, &cfg).unwrap();
        let r = state.history().last().unwrap();
        accepted_so_far += r.accepted as usize;
        let mut cov = 0;
        if first_full.is_none() {
            let pts =
                sample_mixture(&state.generator_mixture(), &spec, 10_000, seed::derive(7, "ct", 0))
                    .unwrap();
            cov = mode_coverage(&task, &pts, 3.0, 0.01).unwrap().0;
            if cov == task.mode_count() {
                first_full = Some(accepted_so_far);
            }
        }
        println!(
            "iter {:2}: u_brs_g={:+.4} u_brs_c={:+.4} u_brs={:+.4} acc={} value={:+.4} cov={} {:.1}s (g={},c={})",
            r.iteration, r.u_brs_g, r.u_brs_c, r.u_brs, r.accepted as u8, r.value, cov, r.wall_secs,
            state.g_strats().len(), state.c_strats().len()
        );
    }
    println!("pnm total: {:.1}s", t0.elapsed().as_secs_f64());
    let accepted: Vec<u8> = state.history().iter().map(|r| r.accepted as u8).collect();
    println!("accepted pattern: {accepted:?}");
    println!("first full coverage at accepted-iteration: {first_full:?}");
    let g_mix = state.generator_mixture();
    let c_mix = state.classifier_mixture();
    report_mixtures("pnm", &g_mix, &c_mix, &spec, &task);
    state
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(String::as_str).unwrap_or("pnm");
    let task_name = args.get(2).map(String::as_str).unwrap_or("grid9");
    match mode {
        "pnm" => {
            let g_steps: usize = args[3].parse().unwrap();
            let c_steps: usize = args[4].parse().unwrap();
            let iters: usize = args[5].parse().unwrap();
            let master: u64 = args[6].parse().unwrap();
            let uniform: bool = args.get(7).map(String::as_str) != Some("0");
            run_pnm(task_name, g_steps, c_steps, iters, master, uniform);
        }
        "cert" => {
            let steps: usize = args[3].parse().unwrap();
            let max_iters: usize = args[4].parse().unwrap();
            let master: u64 = args[5].parse().unwrap();
            let task = Arc::new(make_task(task_name, master).unwrap());
            let spec = default_spec(task.clone()).unwrap();
            let mut cfg = default_pnm_config(master);
            cfg.mode = PnmMode::DeterministicStop { max_iterations: max_iters };
            cfg.rbbr_g.steps = steps;
            cfg.rbbr_c.steps = steps;
            cfg.rbbr_c.uniform_fake = args.get(6).map(String::as_str) == Some("1");
            let t0 = Instant::now();
            let mut state = pnm_init(&spec, &cfg).unwrap();
            while !state.terminated() {
                pnm_iterate(&mut state, &spec, &cfg).unwrap();
                let r = state.history().last().unwrap();
                println!(
                    "iter {:2}: u_brs={:+.4} acc={} {:.1}s",
                    r.iteration, r.u_brs, r.accepted as u8, r.wall_secs
                );
            }
            println!(
                "terminated after {} iters, {:.1}s total",
                state.iteration(),
                t0.elapsed().as_secs_f64()
            );
            for k in 0..3 {
                let (u_fresh, ok) =
                    rb_ne_certificate(&state, &spec, &cfg, seed::derive(master, "pilot-cert", k))
                        .unwrap();
                println!("certificate[{k}]: u_brs_fresh={u_fresh:+.5} certified={ok}");
            }
        }
        "gan" => {
            let rounds: usize = args[3].parse().unwrap();
            let master: u64 = args[4].parse().unwrap();
            let task = Arc::new(make_task(task_name, master).unwrap());
            let spec = baseline_spec(task.clone()).unwrap();
            let g_cfg = RbbrConfig::new(1, DEFAULT_BATCH_SIZE, DEFAULT_LEARNING_RATE, 0);
            let c_cfg = g_cfg.clone();
            let t0 = Instant::now();
            let (gen, clf) = train_gan(&spec, &g_cfg, &c_cfg, rounds, master).unwrap();
            println!("gan {rounds} rounds: {:.1}s", t0.elapsed().as_secs_f64());
            let g_mix = MixtureStrategy::pure(gen);
            let c_mix = MixtureStrategy::pure(clf);
            report_mixtures("gan", &g_mix, &c_mix, &spec, &task);
            // Same attacker shape and budget as the memory-loop attack runs,
            // so exploitability numbers are comparable across defenders.
            let atk_spec = default_spec(task.clone()).unwrap();
            let mut rbbr = gangs_core::defaults::default_rbbr_generator(0);
            rbbr.steps = 3000;
            let atk = AttackConfig::matching(&atk_spec, rbbr);
            let t0 = Instant::now();
            let (expl, g_term, c_term) = exploitability(
                &g_mix,
                &c_mix,
                &spec,
                &atk,
                seed::derive(master, "pilot-atk", 0),
            )
            .unwrap();
            println!(
                "attack: expl={expl:+.4} g_term={g_term:+.4} c_term={c_term:+.4} in {:.1}s",
                t0.elapsed().as_secs_f64()
            );
        }
        "attack" => {
            let g_steps: usize = args[3].parse().unwrap();
            let c_steps: usize = args[4].parse().unwrap();
            let iters: usize = args[5].parse().unwrap();
            let master: u64 = args[6].parse().unwrap();
            let uniform: bool = args.get(7).map(String::as_str) != Some("0");
            let state = run_pnm(task_name, g_steps, c_steps, iters, master, uniform);
            let task = Arc::new(make_task(task_name, master).unwrap());
            let spec = default_spec(task.clone()).unwrap();
            let mut rbbr = gangs_core::defaults::default_rbbr_generator(0);
            rbbr.steps = g_steps;
            let atk = AttackConfig::matching(&spec, rbbr);
            let t0 = Instant::now();
            let (expl, g_term, c_term) = exploitability(
                &state.generator_mixture(),
                &state.classifier_mixture(),
                &spec,
                &atk,
                seed::derive(master, "pilot-atk", 0),
            )
            .unwrap();
            println!(
                "attack: expl={expl:+.4} g_term={g_term:+.4} c_term={c_term:+.4} in {:.1}s",
                t0.elapsed().as_secs_f64()
            );
        }
        "capture" => {
            // Replays a run until the LP fails, then reconstructs the exact
            // augmented matrix that broke the solver and writes it to disk.
            let g_steps: usize = args[3].parse().unwrap();
            let c_steps: usize = args[4].parse().unwrap();
            let iters: usize = args[5].parse().unwrap();
            let master: u64 = args[6].parse().unwrap();
            let task = Arc::new(make_task(task_name, master).unwrap());
            let spec = default_spec(task.clone()).unwrap();
            let mut cfg = default_pnm_config(master);
            cfg.mode = PnmMode::FixedIterations(iters);
            cfg.rbbr_g.steps = g_steps;
            cfg.rbbr_c.steps = c_steps;
            cfg.rbbr_c.uniform_fake = false;
            let mut state = pnm_init(&spec, &cfg).unwrap();
            loop {
                let snapshot = state.clone();
                match gangs_core::pnm::pnm_iterate(&mut state, &spec, &cfg) {
                    Ok(()) => {
                        if state.terminated() {
                            println!("run finished without LP failure");
                            return;
                        }
                    }
                    Err(e) => {
                        println!("iterate failed at iteration {}: {e}", snapshot.iteration() + 1);
                        let i = (snapshot.iteration() + 1) as u64;
                        let g_cfg = cfg
                            .rbbr_g
                            .with_seed(seed::derive(cfg.master_seed, "rbbr-g", i));
                        let c_cfg = cfg
                            .rbbr_c
                            .with_seed(seed::derive(cfg.master_seed, "rbbr-c", i));
                        let g_new =
                            gangs_core::rbbr_generator(&snapshot.classifier_mixture(), &spec, &g_cfg)
                                .unwrap();
                        let c_new =
                            gangs_core::rbbr_classifier(&snapshot.generator_mixture(), &spec, &c_cfg)
                                .unwrap();
                        let ms = seed::derive(cfg.master_seed, "matrix", 0);
                        let entry = |g: &gangs_core::MlpNet, c: &gangs_core::MlpNet| {
                            let gm = MixtureStrategy::pure(g.clone());
                            let cm = MixtureStrategy::pure(c.clone());
                            -gangs_core::payoff_uc(&gm, &cm, &spec, cfg.eval_samples, ms).unwrap()
                        };
                        let mut new_row = Vec::new();
                        for c in snapshot.c_strats() {
                            new_row.push(entry(&g_new, c));
                        }
                        new_row.push(entry(&g_new, &c_new));
                        let mut new_col = Vec::new();
                        for g in snapshot.g_strats() {
                            new_col.push(entry(g, &c_new));
                        }
                        let augmented =
                            snapshot.matrix().augmented(&new_row, &new_col).unwrap();
                        match gangs_core::solve_zero_sum(&augmented) {
                            Ok(_) => println!("reconstructed matrix solved fine - mismatch!"),
                            Err(e2) => println!("reconstructed matrix reproduces failure: {e2}"),
                        }
                        std::fs::write("/tmp/lp_failure.csv", augmented.to_csv()).unwrap();
                        println!("wrote /tmp/lp_failure.csv ({}x{})", augmented.rows(), augmented.cols());
                        return;
                    }
                }
            }
        }
        other => panic!("unknown pilot mode {other}"),
    }
}
