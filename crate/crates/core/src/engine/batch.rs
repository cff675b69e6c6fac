//! Many independent randomized runs per fill ratio, evaluated in parallel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{evaluate_fitness, run_simulation, ParameterSet, SimConfig, SimError, SimTrace};
use crate::inference::Decision;
use crate::seed::{self, Purpose};
use crate::stats;

#[derive(Debug, Error)]
#[error("run {run} at fill {fill}: {source}")]
pub struct BatchError {
    pub fill: f64,
    pub run: usize,
    #[source]
    pub source: SimError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run: usize,
    pub fill: f64,
    pub seed: u64,
    pub actual_fill: f64,
    pub fit: f64,
    pub per_robot: Vec<f64>,
    pub event_counts: Vec<usize>,
    pub final_correct: Vec<bool>,
    pub time_to_consensus: Option<f64>,
}

/// One point of the run-averaged belief and coverage curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub step: u64,
    pub time_s: f64,
    /// Mean posterior fill estimate over all robots with a defined posterior.
    pub mean_belief: Option<f64>,
    /// Fraction of robots currently holding the correct decision.
    pub correct_fraction: f64,
    pub mean_coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FillResult {
    pub fill: f64,
    pub runs: Vec<RunSummary>,
    pub median_fit: f64,
    pub curves: Vec<CurvePoint>,
}

impl FillResult {
    pub fn fits(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.fit).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    pub fills: Vec<FillResult>,
}

/// Seed of run `run` in a batch; identical across fills and parameter sets
/// so comparisons see the same stream of patterns and initial poses.
pub fn run_seed(base_seed: u64, run: usize) -> u64 {
    seed::derive(base_seed, &[Purpose::BatchRun as u64, run as u64])
}

struct CurveAccumulator {
    belief_sum: f64,
    belief_count: usize,
    correct: usize,
    robots: usize,
    coverage_sum: f64,
    runs: usize,
}

struct RunOutput {
    summary: RunSummary,
    trace_curve: Vec<(u64, f64, usize, usize, usize, f64)>,
}

fn summarize(run: usize, fill: f64, seed: u64, trace: &SimTrace) -> RunOutput {
    let record = evaluate_fitness(trace);
    let truth = Decision::from(trace.ground_truth);
    let trace_curve = trace
        .samples
        .iter()
        .map(|s| {
            let mut sum = 0.0;
            let mut count = 0;
            let mut correct = 0;
            for r in &s.robots {
                let total = r.alpha + r.beta;
                if total > 0.0 {
                    sum += r.alpha / total;
                    count += 1;
                }
                correct += usize::from(r.decision == truth);
            }
            (s.step, sum, count, correct, s.robots.len(), s.coverage)
        })
        .collect();
    RunOutput {
        summary: RunSummary {
            run,
            fill,
            seed,
            actual_fill: trace.actual_fill,
            fit: record.fit,
            per_robot: record.per_robot,
            event_counts: record.event_counts,
            final_correct: record.final_correct,
            time_to_consensus: trace.time_to_consensus(),
        },
        trace_curve,
    }
}

/// Runs every `(fill, run)` pair, returning completed fills plus any failures.
/// Successful runs of a fill with failures are still reported.
pub fn run_batch_partial(
    params: &ParameterSet,
    template: &SimConfig,
    fills: &[f64],
    n_runs: usize,
    base_seed: u64,
) -> (BatchResult, Vec<BatchError>) {
    let jobs: Vec<(usize, usize)> = (0..fills.len()).flat_map(|f| (0..n_runs).map(move |r| (f, r))).collect();
    let outputs: Vec<Result<RunOutput, BatchError>> = jobs
        .par_iter()
        .map(|&(fi, run)| {
            let fill = fills[fi];
            let seed = run_seed(base_seed, run);
            let config = SimConfig { fill, seed, log_events: false, ..template.clone() };
            run_simulation(params, &config)
                .map(|trace| summarize(run, fill, seed, &trace))
                .map_err(|source| BatchError { fill, run, source })
        })
        .collect();

    let mut errors = Vec::new();
    let mut per_fill: Vec<Vec<RunOutput>> = fills.iter().map(|_| Vec::new()).collect();
    for (&(fi, _), out) in jobs.iter().zip(outputs) {
        match out {
            Ok(o) => per_fill[fi].push(o),
            Err(e) => errors.push(e),
        }
    }

    let dt = template.motion.dt;
    let fills = fills
        .iter()
        .zip(per_fill)
        .map(|(&fill, outs)| {
            let mut acc: Vec<(u64, CurveAccumulator)> = Vec::new();
            for o in &outs {
                for (i, &(step, sum, count, correct, robots, coverage)) in o.trace_curve.iter().enumerate() {
                    if acc.len() <= i {
                        acc.push((
                            step,
                            CurveAccumulator { belief_sum: 0.0, belief_count: 0, correct: 0, robots: 0, coverage_sum: 0.0, runs: 0 },
                        ));
                    }
                    let a = &mut acc[i].1;
                    a.belief_sum += sum;
                    a.belief_count += count;
                    a.correct += correct;
                    a.robots += robots;
                    a.coverage_sum += coverage;
                    a.runs += 1;
                }
            }
            let curves = acc
                .into_iter()
                .map(|(step, a)| CurvePoint {
                    step,
                    time_s: step as f64 * dt,
                    mean_belief: (a.belief_count > 0).then(|| a.belief_sum / a.belief_count as f64),
                    correct_fraction: a.correct as f64 / a.robots.max(1) as f64,
                    mean_coverage: a.coverage_sum / a.runs.max(1) as f64,
                })
                .collect();
            let runs: Vec<RunSummary> = outs.into_iter().map(|o| o.summary).collect();
            let fits: Vec<f64> = runs.iter().map(|r| r.fit).collect();
            FillResult { fill, median_fit: stats::median(&fits).unwrap_or(f64::NAN), runs, curves }
        })
        .collect();
    (BatchResult { fills }, errors)
}

/// Strict form of [`run_batch_partial`]: the first failure (in fill, then
/// run order) is returned as the error.
pub fn run_batch(
    params: &ParameterSet,
    template: &SimConfig,
    fills: &[f64],
    n_runs: usize,
    base_seed: u64,
) -> Result<BatchResult, BatchError> {
    if n_runs == 0 {
        return Err(BatchError {
            fill: fills.first().copied().unwrap_or(f64::NAN),
            run: 0,
            source: SimError::Config("a batch needs at least one run".into()),
        });
    }
    let (result, mut errors) = run_batch_partial(params, template, fills, n_runs, base_seed);
    if errors.is_empty() {
        Ok(result)
    } else {
        Err(errors.remove(0))
    }
}
