//! Subcommand implementations: run, solve-matrix, exploit, plot.

use std::fs;
use std::path::Path;
use std::time::Instant;

use gangs_core::{
    checkpoint, classifier_response_surface, exploitability, indifference_stat, mode_coverage,
    pnm, sample_mixture, sample_real, seed, solve_zero_sum, svg, GridSpec, PayoffMatrix,
};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

/// Files every run directory contains, recorded in its manifest.
const LAYOUT_VERSION: u32 = 1;
const LAYOUT_ENTRIES: [&str; 7] = [
    "config.toml",
    "history.csv",
    "surface.csv",
    "scatter.csv",
    "figure.svg",
    "report.txt",
    "checkpoint",
];

fn manifest() -> String {
    let mut out = format!("layout_version,{LAYOUT_VERSION}\n");
    for entry in LAYOUT_ENTRIES {
        out.push_str("entry,");
        out.push_str(entry);
        out.push('\n');
    }
    out
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn cmd_run(config_path: &Path, slow_g: bool) -> Result<()> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    if slow_g {
        cfg.rbbr_generator.learning_rate = gangs_core::defaults::SLOW_G_LEARNING_RATE;
    }
    cfg.resolve()?;

    let task = cfg.build_task()?;
    let spec = cfg.build_spec(task.clone())?;
    let pnm_cfg = cfg.build_pnm()?;
    let out = cfg.output_dir.clone();
    fs::create_dir_all(&out)?;
    fs::write(out.join("config.toml"), cfg.echo()?)?;

    let ckpt = out.join("checkpoint");
    let every = cfg.output.checkpoint_every;
    let t0 = Instant::now();
    let mut seen = 0;
    let state = pnm::run_with(&spec, &pnm_cfg, |s| {
        if s.history().len() > seen {
            seen = s.history().len();
            let r = s.history().last().expect("nonempty history");
            println!(
                "iter {:3}: value={:+.5} u_brs={:+.5} accepted={} ({:.1}s)",
                r.iteration, r.value, r.u_brs, r.accepted, r.wall_secs
            );
        }
        if every > 0 && s.iteration() % every == 0 {
            checkpoint::write_checkpoint(&ckpt, s)?;
        }
        Ok(())
    })?;
    checkpoint::write_checkpoint(&ckpt, &state)?;
    fs::copy(ckpt.join("history.csv"), out.join("history.csv"))?;

    let master = cfg.master_seed;
    let g_mix = state.generator_mixture();
    let c_mix = state.classifier_mixture();

    let grid = GridSpec::from_task(&task, cfg.output.surface_nx, cfg.output.surface_ny)?;
    let surface = classifier_response_surface(&c_mix, &grid)?;
    fs::write(
        out.join("surface.csv"),
        gangs_core::eval::surface_to_csv(&grid, &surface)?,
    )?;
    let n_scatter = cfg.output.scatter_samples;
    let real = sample_real(&task, n_scatter, seed::derive(master, "scatter-real", 0));
    let fake = sample_mixture(&g_mix, &spec, n_scatter, seed::derive(master, "scatter-fake", 0))?;
    fs::write(
        out.join("scatter.csv"),
        gangs_core::eval::scatter_to_csv(&real, &fake)?,
    )?;
    let title = format!("{} classifier response", task.name());
    fs::write(
        out.join("figure.svg"),
        svg::render_figure(&grid, &surface, &real, &fake, &title)?,
    )?;

    let coverage_draw = sample_mixture(
        &g_mix,
        &spec,
        cfg.output.coverage_samples,
        seed::derive(master, "coverage", 0),
    )?;
    let (covered, fractions) = mode_coverage(
        &task,
        &coverage_draw,
        cfg.output.radius_mult,
        cfg.output.min_fraction,
    )?;
    let (ind_mean, ind_band) = indifference_stat(
        &c_mix,
        &task,
        cfg.output.indifference_samples,
        seed::derive(master, "indiff", 0),
    )?;
    let atk = cfg.build_attack(&spec)?;
    let (expl, g_term, c_term) =
        exploitability(&g_mix, &c_mix, &spec, &atk, seed::derive(master, "exploit", 0))?;
    let (params_g, params_c) = atk.param_counts();
    let (u_fresh, certified) =
        pnm::rb_ne_certificate(&state, &spec, &pnm_cfg, seed::derive(master, "cert", 0))?;

    let support = |probs: &[f64]| probs.iter().filter(|&&w| w > 1e-12).count();
    let mut report = String::new();
    report.push_str(&format!("task={}\n", task.name()));
    report.push_str(&format!("value={}\n", state.ne().value));
    report.push_str(&format!("iterations={}\n", state.iteration()));
    report.push_str(&format!("terminated={}\n", state.terminated()));
    report.push_str(&format!("strategies_g={}\n", state.g_strats().len()));
    report.push_str(&format!("strategies_c={}\n", state.c_strats().len()));
    report.push_str(&format!(
        "support_g={}\n",
        support(state.ne().row_strategy.probs())
    ));
    report.push_str(&format!(
        "support_c={}\n",
        support(state.ne().col_strategy.probs())
    ));
    report.push_str(&format!("covered_modes={covered}\n"));
    report.push_str(&format!("mode_count={}\n", task.mode_count()));
    report.push_str(&format!("mode_fractions={}\n", join(&fractions)));
    report.push_str(&format!("indifference_mean={ind_mean}\n"));
    report.push_str(&format!("indifference_frac_in_band={ind_band}\n"));
    report.push_str(&format!("expl={expl}\n"));
    report.push_str(&format!("g_term={g_term}\n"));
    report.push_str(&format!("c_term={c_term}\n"));
    report.push_str(&format!("attacker_params_g={params_g}\n"));
    report.push_str(&format!("attacker_params_c={params_c}\n"));
    report.push_str(&format!("certificate_u_brs_fresh={u_fresh}\n"));
    report.push_str(&format!("certified={certified}\n"));
    fs::write(out.join("report.txt"), &report)?;
    fs::write(out.join("MANIFEST"), manifest())?;

    println!(
        "done in {:.1}s: value={:+.5} coverage={covered}/{} band={ind_band:.3} expl={expl:+.4} certified={certified}",
        t0.elapsed().as_secs_f64(),
        state.ne().value,
        task.mode_count()
    );
    println!("results in {}", out.display());
    Ok(())
}

pub fn cmd_solve_matrix(csv_path: &Path) -> Result<()> {
    let text = fs::read_to_string(csv_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", csv_path.display())))?;
    let matrix = PayoffMatrix::from_csv(&text)?;
    let solution = solve_zero_sum(&matrix)?;
    println!("value={}", solution.value);
    println!("row_strategy={}", join(solution.row_strategy.probs()));
    println!("col_strategy={}", join(solution.col_strategy.probs()));
    Ok(())
}

pub fn cmd_exploit(
    dir: &Path,
    restarts: Option<usize>,
    steps: Option<usize>,
    seed_flag: Option<u64>,
) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&dir.join("config.toml"))?;
    cfg.resolve()?;
    let state = checkpoint::read_checkpoint(&dir.join("checkpoint"))?;
    let task = cfg.build_task()?;
    let spec = cfg.build_spec(task)?;
    let mut atk = cfg.build_attack(&spec)?;
    if let Some(r) = restarts {
        atk.n_restarts = r;
    }
    if let Some(s) = steps {
        atk.rbbr.steps = s;
    }
    let base = seed_flag.unwrap_or_else(|| seed::derive(cfg.master_seed, "exploit", 0));
    let (expl, g_term, c_term) = exploitability(
        &state.generator_mixture(),
        &state.classifier_mixture(),
        &spec,
        &atk,
        base,
    )?;
    let (params_g, params_c) = atk.param_counts();
    println!("expl={expl}");
    println!("g_term={g_term}");
    println!("c_term={c_term}");
    println!("attacker_params_g={params_g}");
    println!("attacker_params_c={params_c}");
    Ok(())
}

fn parse_surface(text: &str) -> Result<(GridSpec, Vec<f64>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next() != Some("x,y,value") {
        return Err(CliError::Config(
            "surface.csv must start with header x,y,value".to_string(),
        ));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut values = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::Config(format!("bad surface row '{line}'")));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| CliError::Config(format!("bad number '{s}' in surface.csv")))
        };
        xs.push(parse(fields[0])?);
        ys.push(parse(fields[1])?);
        values.push(parse(fields[2])?);
    }
    let nx = ys.iter().take_while(|&&y| y == ys[0]).count();
    if nx < 2 || values.len() % nx != 0 {
        return Err(CliError::Config(
            "surface.csv rows do not form a grid".to_string(),
        ));
    }
    let ny = values.len() / nx;
    if ny < 2 {
        return Err(CliError::Config(
            "surface.csv rows do not form a grid".to_string(),
        ));
    }
    let grid = GridSpec::new(xs[0], xs[nx - 1], ys[0], *ys.last().expect("nonempty"), nx, ny)?;
    Ok((grid, values))
}

fn parse_scatter(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next() != Some("x,y,label") {
        return Err(CliError::Config(
            "scatter.csv must start with header x,y,label".to_string(),
        ));
    }
    let mut real = Vec::new();
    let mut fake = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::Config(format!("bad scatter row '{line}'")));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| CliError::Config(format!("bad number '{s}' in scatter.csv")))
        };
        let (x, y) = (parse(fields[0])?, parse(fields[1])?);
        match fields[2] {
            "real" => real.extend([x, y]),
            "fake" => fake.extend([x, y]),
            other => {
                return Err(CliError::Config(format!(
                    "bad scatter label '{other}', expected real or fake"
                )))
            }
        }
    }
    Ok((real, fake))
}

pub fn cmd_plot(dir: &Path) -> Result<()> {
    let surface_text = fs::read_to_string(dir.join("surface.csv"))
        .map_err(|e| CliError::Config(format!("cannot read surface.csv: {e}")))?;
    let scatter_text = fs::read_to_string(dir.join("scatter.csv"))
        .map_err(|e| CliError::Config(format!("cannot read scatter.csv: {e}")))?;
    let (grid, values) = parse_surface(&surface_text)?;
    let (real, fake) = parse_scatter(&scatter_text)?;
    let title = match ExperimentConfig::load(&dir.join("config.toml")) {
        Ok(cfg) => match cfg.task.name {
            Some(name) => format!("{name} classifier response"),
            None => "classifier response".to_string(),
        },
        Err(_) => "classifier response".to_string(),
    };
    let figure = svg::render_figure(&grid, &values, &real, &fake, &title)?;
    fs::write(dir.join("figure.svg"), figure)?;
    println!("rendered {}", dir.join("figure.svg").display());
    Ok(())
}
