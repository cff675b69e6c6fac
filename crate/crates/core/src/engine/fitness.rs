//! Per-run fitness: rewards early correct decisions and punishes wrong ones.

use serde::{Deserialize, Serialize};

use super::SimTrace;
use crate::inference::Decision;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessRecord {
    /// Per-robot score in seconds, in `(0, t_max]`.
    pub per_robot: Vec<f64>,
    /// Per-robot number of decision changes.
    pub event_counts: Vec<usize>,
    pub final_correct: Vec<bool>,
    /// Sum of the per-robot scores; lower is better.
    pub fit: f64,
}

/// Scores a finished run.
///
/// For each robot every decision change contributes its time in seconds if
/// it was correct and the full horizon otherwise; the sum is divided by the
/// robot's own number of changes. A robot whose final decision is wrong or
/// still undecided scores the full horizon.
pub fn evaluate_fitness(trace: &SimTrace) -> FitnessRecord {
    let t_max = trace.t_max_seconds();
    let n = trace.n_robots;
    let mut sums = vec![0.0; n];
    let mut counts = vec![0usize; n];
    for ev in &trace.decisions {
        counts[ev.robot] += 1;
        sums[ev.robot] += if ev.correct { trace.step_seconds(ev.step) } else { t_max };
    }
    let truth = Decision::from(trace.ground_truth);
    let final_correct: Vec<bool> = trace.final_decisions.iter().map(|&d| d == truth).collect();
    let per_robot: Vec<f64> = (0..n)
        .map(|i| if !final_correct[i] || counts[i] == 0 { t_max } else { sums[i] / counts[i] as f64 })
        .collect();
    FitnessRecord { fit: per_robot.iter().sum(), per_robot, event_counts: counts, final_correct }
}
