use std::fs::{self, File};
use std::io::BufWriter;
use std::ops::ControlFlow;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use swarm_inspect::artifacts;
use swarm_inspect::engine::batch::run_batch_partial;
use swarm_inspect::engine::{run_simulation, ParameterSet, SimConfig};
use swarm_inspect::optimizer::{Campaign, PsoConfig, SearchSpace, SimulatorObjective, Topology};

use crate::config::{load_params, BatchSettings, ConfigFile, Resolved, Subcommand};
use crate::manifest::{FailedRun, RunManifest};
use crate::{BatchArgs, CommonArgs, Failure, PsoArgs, ReplayArgs, SimArgs};

pub const CHECKPOINT_FILE: &str = "checkpoint.json";

fn resolve_common(common: &CommonArgs, subcommand: Subcommand) -> Result<(Resolved, ConfigFile), Failure> {
    let file = match &common.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let mut params = file.params.apply(ParameterSet::empirical())?;
    if let Some(spec) = &common.params {
        params = load_params(spec)?;
    }
    params.tau = common.tau.unwrap_or(params.tau);
    params.s = common.s.unwrap_or(params.s);
    params.d = common.d.unwrap_or(params.d);
    params.h = common.h.unwrap_or(params.h);
    params.p_c = common.pc.unwrap_or(params.p_c);
    params.feedback = common.feedback.unwrap_or(params.feedback);

    let mut sim = file.sim_config()?;
    sim.fill = common.fill.unwrap_or(sim.fill);
    sim.seed = common.seed.unwrap_or(sim.seed);
    sim.t_max_steps = common.t_max_steps.unwrap_or(sim.t_max_steps);

    Ok((Resolved { subcommand, params, sim, batch: None, pso: None }, file))
}

fn create_out(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(())
}

fn create_file(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn sim(args: SimArgs) -> Result<(), Failure> {
    let (mut resolved, _) = resolve_common(&args.common, Subcommand::Sim)?;
    resolved.sim.log_events = !args.no_events;
    run_sim(resolved, &args.common.out)
}

fn run_sim(resolved: Resolved, out: &Path) -> Result<(), Failure> {
    resolved.validate()?;
    create_out(out)?;
    let started = Instant::now();
    let trace = run_simulation(&resolved.params, &resolved.sim)?;
    artifacts::write_trace_jsonl(&trace, create_file(out, "trace.jsonl")?)?;
    artifacts::write_summary_csv(&trace, create_file(out, "summary.csv")?)?;
    let mut manifest = RunManifest::new(resolved);
    manifest.artifacts = vec!["trace.jsonl".into(), "summary.csv".into()];
    manifest.duration_s = started.elapsed().as_secs_f64();
    manifest.write(out)
}

pub fn batch(args: BatchArgs) -> Result<(), Failure> {
    let (mut resolved, file) = resolve_common(&args.common, Subcommand::Batch)?;
    let mut settings: BatchSettings = file.batch;
    settings.runs = args.runs.unwrap_or(settings.runs);
    if let Some(fills) = args.fills {
        settings.fills = fills;
    }
    resolved.batch = Some(settings);
    run_batch_cmd(resolved, &args.common.out)
}

fn run_batch_cmd(resolved: Resolved, out: &Path) -> Result<(), Failure> {
    resolved.validate()?;
    create_out(out)?;
    let started = Instant::now();
    let settings = resolved.batch.clone().expect("batch settings resolved");
    let (result, errors) =
        run_batch_partial(&resolved.params, &resolved.sim, &settings.fills, settings.runs, resolved.sim.seed);

    let mut written = Vec::new();
    for fill in &result.fills {
        let name = artifacts::fill_file_name("distribution", fill.fill);
        artifacts::write_distribution_csv(fill, create_file(out, &name)?)?;
        written.push(name);
        let name = artifacts::fill_file_name("curves", fill.fill);
        artifacts::write_curves_csv(fill, create_file(out, &name)?)?;
        written.push(name);
    }
    artifacts::write_medians_csv(&result.fills, create_file(out, "medians.csv")?)?;
    written.push("medians.csv".into());

    let mut manifest = RunManifest::new(resolved);
    manifest.artifacts = written;
    manifest.failed_runs =
        errors.iter().map(|e| FailedRun { fill: e.fill, run: e.run, error: e.source.to_string() }).collect();
    manifest.duration_s = started.elapsed().as_secs_f64();
    manifest.write(out)?;
    for f in &result.fills {
        println!("fill {}: median fitness {:.3} over {} runs", f.fill, f.median_fit, f.runs.len());
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(anyhow::anyhow!(
            "{} of {} runs failed; see manifest.json (first: {})",
            errors.len(),
            settings.runs * settings.fills.len(),
            errors[0]
        )))
    }
}

fn parse_topology(text: &str) -> Result<Topology, Failure> {
    if text == "global" {
        return Ok(Topology::Global);
    }
    text.strip_prefix("ring:")
        .and_then(|k| k.parse().ok())
        .map(|k| Topology::Ring { k })
        .ok_or_else(|| Failure::Usage(format!("--topology must be `global` or `ring:K`, got `{text}`")))
}

/// On-disk campaign state together with the simulation settings it scores.
#[derive(Serialize, Deserialize)]
struct PsoCheckpoint {
    params: ParameterSet,
    sim: SimConfig,
    campaign: serde_json::Value,
}

fn write_checkpoint(out: &Path, resolved: &Resolved, campaign: &Campaign) -> Result<(), Failure> {
    let cp = PsoCheckpoint {
        params: resolved.params,
        sim: resolved.sim.clone(),
        campaign: serde_json::from_str(&campaign.to_checkpoint())?,
    };
    let tmp = out.join(format!("{CHECKPOINT_FILE}.tmp"));
    fs::write(&tmp, serde_json::to_string(&cp)?)?;
    fs::rename(&tmp, out.join(CHECKPOINT_FILE))?;
    Ok(())
}

pub fn pso(args: PsoArgs) -> Result<(), Failure> {
    let out = args.common.out.clone();
    if let Some(path) = &args.resume {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read checkpoint {}: {e}", path.display())))?;
        let cp: PsoCheckpoint =
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("checkpoint {}: {e}", path.display())))?;
        let campaign = Campaign::from_checkpoint(&cp.campaign.to_string()).map_err(|e| Failure::Usage(e.to_string()))?;
        let resolved = Resolved {
            subcommand: Subcommand::Pso,
            params: cp.params,
            sim: cp.sim,
            batch: None,
            pso: Some(campaign.config.clone()),
        };
        return run_pso(resolved, campaign, &out, args.stop_after);
    }

    let (mut resolved, file) = resolve_common(&args.common, Subcommand::Pso)?;
    let mut cfg: PsoConfig = file.pso_config()?;
    cfg.n_particles = args.particles.unwrap_or(cfg.n_particles);
    cfg.n_iterations = args.iters.unwrap_or(cfg.n_iterations);
    cfg.n_noise_evals = args.noise_evals.unwrap_or(cfg.n_noise_evals);
    cfg.gamma = args.gamma.unwrap_or(cfg.gamma);
    if let Some(t) = &args.topology {
        cfg.topology = parse_topology(t)?;
    }
    cfg.reevaluate_best |= args.reevaluate;
    cfg.seed = resolved.sim.seed;
    resolved.pso = Some(cfg);
    start_pso(resolved, &out, args.stop_after)
}

fn start_pso(resolved: Resolved, out: &Path, stop_after: Option<usize>) -> Result<(), Failure> {
    resolved.validate()?;
    let cfg = resolved.pso.clone().expect("pso settings resolved");
    let empirical: Vec<f64> = ParameterSet::empirical().tunables().iter().map(|&v| f64::from(v)).collect();
    let campaign =
        Campaign::new(cfg, SearchSpace::tunables(), Some(empirical)).map_err(|e| Failure::Usage(e.to_string()))?;
    run_pso(resolved, campaign, out, stop_after)
}

fn run_pso(resolved: Resolved, mut campaign: Campaign, out: &Path, stop_after: Option<usize>) -> Result<(), Failure> {
    resolved.validate()?;
    create_out(out)?;
    let started = Instant::now();
    let cfg = campaign.config.clone();
    let objective = SimulatorObjective::new(resolved.params, resolved.sim.clone(), &cfg);

    let mut io_error = None;
    campaign.run(&objective, |c| {
        if let Err(e) = write_checkpoint(out, &resolved, c) {
            io_error = Some(e);
            return ControlFlow::Break(());
        }
        let r = c.history.last().expect("at least one iteration");
        eprintln!("iteration {}: global best {:.3} at {:?}", r.iteration, r.global_best, r.global_best_position);
        if stop_after.is_some() && c.completed == stop_after {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .map_err(|e| Failure::Runtime(e.into()))?;
    if let Some(e) = io_error {
        return Err(e);
    }

    let result = campaign.result();
    artifacts::write_history_csv(&result.history, create_file(out, "history.csv")?)?;
    let best = result.best_position.iter().map(|&v| v as u32).collect::<Vec<_>>();
    let best_params = resolved.params.with_tunables([best[0], best[1], best[2], best[3]]);
    fs::write(out.join("best_params.toml"), toml::to_string(&best_params)?)?;

    let mut manifest = RunManifest::new(resolved);
    manifest.artifacts = vec!["history.csv".into(), "best_params.toml".into(), CHECKPOINT_FILE.into()];
    if !campaign.is_finished() {
        manifest.stopped_after = campaign.completed;
    }
    manifest.duration_s = started.elapsed().as_secs_f64();
    manifest.write(out)?;
    println!("best fitness {:.3}: {best_params}", result.best_fitness);
    Ok(())
}

pub fn replay(args: ReplayArgs) -> Result<(), Failure> {
    let manifest = RunManifest::load(&args.manifest)?;
    let resolved = manifest.config;
    match resolved.subcommand {
        Subcommand::Sim => run_sim(resolved, &args.out),
        Subcommand::Batch => run_batch_cmd(resolved, &args.out),
        Subcommand::Pso => start_pso(resolved, &args.out, manifest.stopped_after),
    }
}
