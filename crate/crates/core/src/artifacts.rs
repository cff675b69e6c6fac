//! Plain-text output formats: JSONL event traces and CSV tables.
//!
//! Every writer is a pure function of its input, so repeating a run
//! reproduces the files byte for byte.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::json;

use crate::engine::{evaluate_fitness, FillResult, SimTrace};
use crate::optimizer::IterationRecord;

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// One JSON object per line: a `meta` header, then samples and events in
/// step order (observations, deliveries, decisions, then the snapshot for
/// the same step), then a `final` record.
pub fn write_trace_jsonl(trace: &SimTrace, mut out: impl Write) -> io::Result<()> {
    let line = |out: &mut dyn Write, v: serde_json::Value| -> io::Result<()> {
        serde_json::to_writer(&mut *out, &v)?;
        out.write_all(b"\n")
    };
    line(
        &mut out,
        json!({
            "type": "meta",
            "n_robots": trace.n_robots,
            "t_max_steps": trace.t_max_steps,
            "dt": trace.dt,
            "seed": trace.seed,
            "nominal_fill": trace.nominal_fill,
            "actual_fill": trace.actual_fill,
            "ground_truth": trace.ground_truth,
            "initial_poses": trace.initial_poses,
        }),
    )?;

    let mut records: Vec<(u64, u8, serde_json::Value)> = Vec::with_capacity(
        trace.samples.len() + trace.decisions.len() + trace.observations.len() + trace.deliveries.len(),
    );
    for o in &trace.observations {
        records.push((o.step, 0, json!({"type": "observation", "step": o.step, "robot": o.robot, "color": o.color})));
    }
    for d in &trace.deliveries {
        records.push((
            d.step,
            1,
            json!({"type": "delivery", "step": d.step, "sender": d.sender, "recipient": d.recipient, "color": d.color, "kind": d.kind}),
        ));
    }
    for d in &trace.decisions {
        records.push((
            d.step,
            2,
            json!({"type": "decision", "step": d.step, "robot": d.robot, "decision": d.decision, "correct": d.correct}),
        ));
    }
    for s in &trace.samples {
        records.push((s.step, 3, json!({"type": "sample", "step": s.step, "coverage": s.coverage, "robots": s.robots})));
    }
    // Stable: within a step and kind, records keep their generation order.
    records.sort_by_key(|&(step, kind, _)| (step, kind));
    for (_, _, v) in records {
        line(&mut out, v)?;
    }

    let fitness = evaluate_fitness(trace);
    line(
        &mut out,
        json!({
            "type": "final",
            "decisions": trace.final_decisions,
            "beliefs": trace.final_beliefs,
            "per_robot_fitness": fitness.per_robot,
            "fit": fitness.fit,
            "time_to_consensus": trace.time_to_consensus(),
        }),
    )?;
    out.flush()
}

#[derive(Serialize)]
struct SummaryRow {
    robot: usize,
    final_decision: &'static str,
    correct: bool,
    decision_events: usize,
    fitness_s: f64,
    alpha: f64,
    beta: f64,
    ground_truth: &'static str,
    actual_fill: f64,
    run_fit: f64,
    time_to_consensus_s: Option<f64>,
}

fn decision_label(d: crate::inference::Decision) -> &'static str {
    use crate::inference::Decision::*;
    match d {
        Undecided => "undecided",
        Black => "black",
        White => "white",
    }
}

/// Per-robot outcome table of a single run; run-level columns repeat on
/// every row.
pub fn write_summary_csv(trace: &SimTrace, out: impl Write) -> io::Result<()> {
    let fitness = evaluate_fitness(trace);
    let ttc = trace.time_to_consensus();
    let truth = decision_label(trace.ground_truth.into());
    let mut w = csv::Writer::from_writer(out);
    for robot in 0..trace.n_robots {
        let belief = trace.final_beliefs[robot];
        w.serialize(SummaryRow {
            robot,
            final_decision: decision_label(trace.final_decisions[robot]),
            correct: fitness.final_correct[robot],
            decision_events: fitness.event_counts[robot],
            fitness_s: fitness.per_robot[robot],
            alpha: belief.alpha,
            beta: belief.beta,
            ground_truth: truth,
            actual_fill: trace.actual_fill,
            run_fit: fitness.fit,
            time_to_consensus_s: ttc,
        })
        .map_err(csv_err)?;
    }
    w.flush()
}

/// One row per run: seed, realized fill, fitness and per-robot scores.
pub fn write_distribution_csv(result: &FillResult, out: impl Write) -> io::Result<()> {
    let n_robots = result.runs.first().map_or(0, |r| r.per_robot.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["run", "seed", "fill", "actual_fill", "fit", "all_correct", "time_to_consensus_s"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..n_robots).map(|i| format!("robot{i}_s")));
    w.write_record(&header).map_err(csv_err)?;
    for r in &result.runs {
        let mut row = vec![
            r.run.to_string(),
            r.seed.to_string(),
            r.fill.to_string(),
            r.actual_fill.to_string(),
            r.fit.to_string(),
            r.final_correct.iter().all(|&c| c).to_string(),
            r.time_to_consensus.map(|t| t.to_string()).unwrap_or_default(),
        ];
        row.extend(r.per_robot.iter().map(f64::to_string));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()
}

/// Run-averaged belief, correctness and coverage over time.
pub fn write_curves_csv(result: &FillResult, out: impl Write) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in &result.curves {
        w.serialize(p).map_err(csv_err)?;
    }
    w.flush()
}

#[derive(Serialize)]
struct MedianRow {
    fill: f64,
    runs: usize,
    median_fit: f64,
    mean_fit: Option<f64>,
    sd_fit: Option<f64>,
    all_correct_runs: usize,
}

pub fn write_medians_csv(fills: &[FillResult], out: impl Write) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for f in fills {
        let fits = f.fits();
        w.serialize(MedianRow {
            fill: f.fill,
            runs: f.runs.len(),
            median_fit: f.median_fit,
            mean_fit: crate::stats::mean(&fits),
            sd_fit: crate::stats::sample_sd(&fits),
            all_correct_runs: f.runs.iter().filter(|r| r.final_correct.iter().all(|&c| c)).count(),
        })
        .map_err(csv_err)?;
    }
    w.flush()
}

/// Name of a per-fill file, e.g. `distribution_f0.52.csv`.
pub fn fill_file_name(prefix: &str, fill: f64) -> String {
    format!("{prefix}_f{fill}.csv")
}

/// Long-format campaign history: one row per particle per iteration, with
/// the swarm-level columns repeated.
pub fn write_history_csv(history: &[IterationRecord], out: impl Write) -> io::Result<()> {
    let dim = history.first().and_then(|h| h.particles.first()).map_or(0, |p| p.position.len());
    let names: Vec<String> = if dim == 4 {
        ["tau", "s", "d", "h"].iter().map(|s| s.to_string()).collect()
    } else {
        (0..dim).map(|j| format!("x{j}")).collect()
    };
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = vec!["iteration".into(), "particle".into()];
    header.extend(names);
    header.extend(
        ["fitness", "personal_best", "global_best", "swarm_average", "mean_personal_best"].iter().map(|s| s.to_string()),
    );
    w.write_record(&header).map_err(csv_err)?;
    for it in history {
        for p in &it.particles {
            let mut row = vec![it.iteration.to_string(), p.particle.to_string()];
            row.extend(p.position.iter().map(f64::to_string));
            row.extend([p.fitness, p.personal_best, it.global_best, it.swarm_average, it.mean_personal_best].map(|v| v.to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_simulation, ParameterSet, SimConfig};

    fn short_trace() -> SimTrace {
        let cfg = SimConfig { t_max_steps: 3_000, seed: 4, log_events: true, ..SimConfig::default() };
        run_simulation(&ParameterSet::empirical(), &cfg).unwrap()
    }

    #[test]
    fn trace_lines_are_step_ordered() {
        let mut buf = Vec::new();
        write_trace_jsonl(&short_trace(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines[0]["type"], "meta");
        assert_eq!(lines.last().unwrap()["type"], "final");
        let steps: Vec<u64> = lines[1..lines.len() - 1].iter().map(|v| v["step"].as_u64().unwrap()).collect();
        assert!(steps.windows(2).all(|w| w[0] <= w[1]));
        assert!(lines.iter().any(|v| v["type"] == "observation"));
        assert!(lines.iter().any(|v| v["type"] == "delivery"));
    }

    #[test]
    fn summary_has_one_row_per_robot() {
        let mut buf = Vec::new();
        write_summary_csv(&short_trace(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("robot,final_decision,correct"));
    }

    #[test]
    fn fill_names() {
        assert_eq!(fill_file_name("distribution", 0.52), "distribution_f0.52.csv");
        assert_eq!(fill_file_name("curves", 1.0), "curves_f1.csv");
    }
}
