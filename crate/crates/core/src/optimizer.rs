//! Noise-resistant particle swarm optimization.
//!
//! Each candidate is scored by several independent noisy evaluations,
//! aggregated as `mean + gamma * sd` so that fast *and* consistent parameter
//! sets win. Positions evolve continuously and are rounded only when a
//! candidate is evaluated.

use std::ops::ControlFlow;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::params::TUNABLE_BOUNDS;
use crate::engine::{evaluate_fitness, run_simulation, ParameterSet, SimConfig, SimError};
use crate::seed::{self, Purpose};
use crate::stats;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub integer: Vec<bool>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, integer: Vec<bool>) -> Self {
        assert!(lower.len() == upper.len() && lower.len() == integer.len());
        assert!(lower.iter().zip(&upper).all(|(l, u)| l <= u));
        Self { lower, upper, integer }
    }

    /// The `(tau, s, d, h)` box, all integer.
    pub fn tunables() -> Self {
        Self::new(
            TUNABLE_BOUNDS.iter().map(|b| f64::from(b.lo)).collect(),
            TUNABLE_BOUNDS.iter().map(|b| f64::from(b.hi)).collect(),
            vec![true; TUNABLE_BOUNDS.len()],
        )
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.lower).zip(&self.upper).all(|((v, l), u)| (l..=u).contains(&v))
    }

    /// Rounds integer dimensions half-up; other dimensions pass through.
    pub fn round(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.integer).map(|(&v, &int)| if int { (v + 0.5).floor() } else { v }).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| (u - l) * (u - l)).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Topology {
    #[default]
    Global,
    /// Each particle sees `k` neighbors on either side of a ring.
    Ring { k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    pub n_particles: usize,
    pub n_iterations: usize,
    pub n_noise_evals: usize,
    pub w: f64,
    pub w_p: f64,
    pub w_n: f64,
    pub gamma: f64,
    pub topology: Topology,
    pub seed: u64,
    /// Re-evaluate each incumbent personal best once per iteration.
    pub reevaluate_best: bool,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            n_particles: 15,
            n_iterations: 75,
            n_noise_evals: 10,
            w: 0.729,
            w_p: 1.49,
            w_n: 1.49,
            gamma: 1.1,
            topology: Topology::Global,
            seed: 0,
            reevaluate_best: false,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.n_particles == 0 {
            return Err(CampaignError::Config("n_particles must be at least 1".into()));
        }
        if self.n_noise_evals < 2 {
            return Err(CampaignError::Config("n_noise_evals must be at least 2 for a standard deviation".into()));
        }
        if !(self.gamma >= 0.0) {
            return Err(CampaignError::Config(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        if let Topology::Ring { k } = self.topology {
            if k == 0 {
                return Err(CampaignError::Config("ring topology needs k >= 1".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub id: usize,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    /// Recorded personal best; never increases.
    pub best_fitness: f64,
    /// Running estimate used for comparisons when incumbents are re-evaluated.
    pub best_estimate: f64,
    pub best_samples: u32,
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("invalid optimizer config: {0}")]
    Config(String),
    #[error("iteration {iteration}, particle {particle}: {message}")]
    Evaluation { iteration: usize, particle: usize, message: String },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

/// Which evaluation of a particle is being requested; seeds derive from it,
/// never from scheduling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalContext {
    pub iteration: usize,
    pub particle: usize,
    /// True when re-scoring a particle's incumbent personal best.
    pub reevaluation: bool,
}

pub trait Objective: Sync {
    type Error: std::fmt::Display + Send;

    fn evaluate(&self, position: &[f64], ctx: EvalContext) -> Result<f64, Self::Error>;
}

/// `mean + gamma * sd` with the sample standard deviation.
pub fn aggregate_fitness(fits: &[f64], gamma: f64) -> f64 {
    let mu = stats::mean(fits).unwrap_or(f64::NAN);
    let sigma = stats::sample_sd(fits).unwrap_or(0.0);
    mu + gamma * sigma
}

#[derive(Debug, Error)]
#[error("noise evaluation {eval} of {params}: {source}")]
pub struct EvalError {
    pub eval: usize,
    pub params: ParameterSet,
    #[source]
    pub source: SimError,
}

/// Scores a `(tau, s, d, h)` position by running the swarm simulation
/// `n_noise_evals` times on freshly seeded patterns and poses.
#[derive(Debug, Clone)]
pub struct SimulatorObjective {
    /// Supplies `p_c`, priors and feedback mode; the tunables are replaced.
    pub base: ParameterSet,
    /// Supplies the fill ratio and everything else except the seed.
    pub sim: SimConfig,
    pub n_noise_evals: usize,
    pub gamma: f64,
    pub seed: u64,
}

impl SimulatorObjective {
    pub fn new(base: ParameterSet, sim: SimConfig, pso: &PsoConfig) -> Self {
        Self { base, sim, n_noise_evals: pso.n_noise_evals, gamma: pso.gamma, seed: pso.seed }
    }

    pub fn eval_seed(&self, ctx: EvalContext, eval: usize) -> u64 {
        seed::derive(
            self.seed,
            &[Purpose::NoiseEval as u64, ctx.iteration as u64, ctx.particle as u64, u64::from(ctx.reevaluation), eval as u64],
        )
    }

    pub fn params_at(&self, position: &[f64]) -> ParameterSet {
        let space = SearchSpace::tunables();
        let rounded = space.round(position);
        assert!(space.contains(&rounded), "evaluated position {rounded:?} left the search box");
        let t: Vec<u32> = rounded.iter().map(|&v| v as u32).collect();
        self.base.with_tunables([t[0], t[1], t[2], t[3]])
    }

    /// Per-evaluation fitness values, in evaluation-index order.
    pub fn noise_evaluations(&self, position: &[f64], ctx: EvalContext) -> Result<Vec<f64>, EvalError> {
        let params = self.params_at(position);
        (0..self.n_noise_evals)
            .into_par_iter()
            .map(|eval| {
                let config = SimConfig { seed: self.eval_seed(ctx, eval), log_events: false, ..self.sim.clone() };
                run_simulation(&params, &config)
                    .map(|trace| evaluate_fitness(&trace).fit)
                    .map_err(|source| EvalError { eval, params, source })
            })
            .collect()
    }
}

impl Objective for SimulatorObjective {
    type Error = EvalError;

    fn evaluate(&self, position: &[f64], ctx: EvalContext) -> Result<f64, EvalError> {
        Ok(aggregate_fitness(&self.noise_evaluations(position, ctx)?, self.gamma))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleRecord {
    pub particle: usize,
    /// Position as evaluated (rounded in integer dimensions).
    pub position: Vec<f64>,
    pub fitness: f64,
    pub personal_best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 0 is the evaluation of the initial swarm.
    pub iteration: usize,
    pub particles: Vec<ParticleRecord>,
    pub swarm_average: f64,
    pub mean_personal_best: f64,
    pub global_best: f64,
    pub global_best_position: Vec<f64>,
}

/// Complete optimizer state; serializes to a resume-exact checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub version: u32,
    pub config: PsoConfig,
    pub space: SearchSpace,
    /// Iterations completed after initialization; `None` before the initial evaluation.
    pub completed: Option<usize>,
    pub particles: Vec<Particle>,
    pub history: Vec<IterationRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub history: Vec<IterationRecord>,
}

impl Campaign {
    /// Places particles uniformly in the box, except particle 0 which starts
    /// at `seeded` when given. All velocities start at zero.
    pub fn new(config: PsoConfig, space: SearchSpace, seeded: Option<Vec<f64>>) -> Result<Self, CampaignError> {
        config.validate()?;
        let mut rng = seed::stream(config.seed, Purpose::SwarmInit, &[]);
        let dim = space.dim();
        let particles = (0..config.n_particles)
            .map(|id| {
                let uniform: Vec<f64> = (0..dim).map(|j| rng.random_range(space.lower[j]..=space.upper[j])).collect();
                let position = match (&seeded, id) {
                    (Some(s), 0) => s.clone(),
                    _ => uniform,
                };
                Particle {
                    id,
                    velocity: vec![0.0; dim],
                    best_position: position.clone(),
                    position,
                    best_fitness: f64::INFINITY,
                    best_estimate: f64::INFINITY,
                    best_samples: 0,
                }
            })
            .collect::<Vec<_>>();
        if let Some(s) = &seeded {
            if s.len() != dim || !space.contains(s) {
                return Err(CampaignError::Config(format!("seeded position {s:?} is outside the search box")));
            }
        }
        Ok(Self { version: CHECKPOINT_VERSION, config, space, completed: None, particles, history: Vec::new() })
    }

    pub fn is_finished(&self) -> bool {
        self.completed.is_some_and(|c| c >= self.config.n_iterations)
    }

    fn global_best_index(&self) -> usize {
        best_of(&self.particles, 0..self.particles.len())
    }

    /// Particle holding the lowest recorded personal best.
    fn recorded_best_index(&self) -> usize {
        (0..self.particles.len())
            .min_by(|&a, &b| self.particles[a].best_fitness.total_cmp(&self.particles[b].best_fitness).then(a.cmp(&b)))
            .expect("non-empty swarm")
    }

    /// Index of the best personal best visible to particle `i`.
    pub fn neighborhood_best(&self, i: usize) -> usize {
        let n = self.particles.len();
        match self.config.topology {
            Topology::Global => self.global_best_index(),
            Topology::Ring { k } => {
                let k = k.min(n / 2);
                best_of(&self.particles, (0..=2 * k).map(|o| (i + n - k + o) % n))
            }
        }
    }

    fn evaluate_all<O: Objective>(&self, objective: &O, iteration: usize) -> Result<Vec<f64>, CampaignError> {
        self.particles
            .par_iter()
            .map(|p| {
                let x = self.space.round(&p.position);
                objective
                    .evaluate(&x, EvalContext { iteration, particle: p.id, reevaluation: false })
                    .map_err(|e| CampaignError::Evaluation { iteration, particle: p.id, message: e.to_string() })
            })
            .collect()
    }

    fn reevaluate_bests<O: Objective>(&self, objective: &O, iteration: usize) -> Result<Vec<f64>, CampaignError> {
        self.particles
            .par_iter()
            .map(|p| {
                let x = self.space.round(&p.best_position);
                objective
                    .evaluate(&x, EvalContext { iteration, particle: p.id, reevaluation: true })
                    .map_err(|e| CampaignError::Evaluation { iteration, particle: p.id, message: e.to_string() })
            })
            .collect()
    }

    fn absorb(&mut self, iteration: usize, fitness: Vec<f64>, reevaluated: Option<Vec<f64>>) {
        if let Some(re) = reevaluated {
            for (p, f) in self.particles.iter_mut().zip(re) {
                let n = f64::from(p.best_samples);
                p.best_estimate = (p.best_estimate * n + f) / (n + 1.0);
                p.best_samples += 1;
            }
        }
        for (p, &f) in self.particles.iter_mut().zip(&fitness) {
            if f < p.best_estimate {
                p.best_position = p.position.clone();
                p.best_estimate = f;
                p.best_samples = 1;
                p.best_fitness = p.best_fitness.min(f);
            }
        }
        let records: Vec<ParticleRecord> = self
            .particles
            .iter()
            .zip(&fitness)
            .map(|(p, &f)| ParticleRecord {
                particle: p.id,
                position: self.space.round(&p.position),
                fitness: f,
                personal_best: p.best_fitness,
            })
            .collect();
        let g = self.recorded_best_index();
        self.history.push(IterationRecord {
            iteration,
            swarm_average: stats::mean(&fitness).unwrap_or(f64::NAN),
            mean_personal_best: stats::mean(&self.particles.iter().map(|p| p.best_fitness).collect::<Vec<_>>())
                .unwrap_or(f64::NAN),
            global_best: self.particles[g].best_fitness,
            global_best_position: self.space.round(&self.particles[g].best_position),
            particles: records,
        });
        self.completed = Some(iteration);
    }

    /// Velocity and position update for the whole swarm.
    pub fn pso_step(&mut self, rng: &mut impl Rng) {
        let nbest: Vec<Vec<f64>> = (0..self.particles.len())
            .map(|i| self.particles[self.neighborhood_best(i)].best_position.clone())
            .collect();
        let cfg = &self.config;
        for (p, social) in self.particles.iter_mut().zip(&nbest) {
            for j in 0..p.position.len() {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let x = p.position[j];
                let v = cfg.w * p.velocity[j] + cfg.w_p * r1 * (p.best_position[j] - x) + cfg.w_n * r2 * (social[j] - x);
                let (lo, hi) = (self.space.lower[j], self.space.upper[j]);
                let next = x + v;
                if next < lo {
                    p.position[j] = lo;
                    p.velocity[j] = 0.0;
                } else if next > hi {
                    p.position[j] = hi;
                    p.velocity[j] = 0.0;
                } else {
                    p.position[j] = next;
                    p.velocity[j] = v;
                }
            }
        }
    }

    /// Runs the next unit of work: the initial evaluation, or one
    /// step-then-evaluate iteration.
    pub fn advance<O: Objective>(&mut self, objective: &O) -> Result<(), CampaignError> {
        match self.completed {
            None => {
                let fitness = self.evaluate_all(objective, 0)?;
                self.absorb(0, fitness, None);
            }
            Some(done) => {
                let iteration = done + 1;
                let mut rng = seed::stream(self.config.seed, Purpose::SwarmStep, &[iteration as u64]);
                self.pso_step(&mut rng);
                let re = if self.config.reevaluate_best { Some(self.reevaluate_bests(objective, iteration)?) } else { None };
                let fitness = self.evaluate_all(objective, iteration)?;
                self.absorb(iteration, fitness, re);
            }
        }
        Ok(())
    }

    /// Advances until finished or until `observer` breaks. The observer sees
    /// the campaign after every unit of work, e.g. to write a checkpoint.
    pub fn run<O: Objective>(
        &mut self,
        objective: &O,
        mut observer: impl FnMut(&Campaign) -> ControlFlow<()>,
    ) -> Result<(), CampaignError> {
        while !self.is_finished() {
            self.advance(objective)?;
            if observer(self).is_break() {
                break;
            }
        }
        Ok(())
    }

    pub fn result(&self) -> CampaignResult {
        let g = self.recorded_best_index();
        CampaignResult {
            best_position: self.space.round(&self.particles[g].best_position),
            best_fitness: self.particles[g].best_fitness,
            history: self.history.clone(),
        }
    }

    pub fn to_checkpoint(&self) -> String {
        serde_json::to_string(self).expect("campaign state serializes")
    }

    pub fn from_checkpoint(text: &str) -> Result<Self, CampaignError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CampaignError::Checkpoint(e.to_string()))?;
        let version = value.get("version").and_then(serde_json::Value::as_u64);
        if version != Some(u64::from(CHECKPOINT_VERSION)) {
            return Err(CampaignError::Checkpoint(format!(
                "unsupported checkpoint version {version:?}, expected {CHECKPOINT_VERSION}"
            )));
        }
        let campaign: Campaign = serde_json::from_value(value).map_err(|e| CampaignError::Checkpoint(e.to_string()))?;
        campaign.config.validate()?;
        Ok(campaign)
    }
}

fn best_of(particles: &[Particle], candidates: impl Iterator<Item = usize>) -> usize {
    candidates
        .min_by(|&a, &b| particles[a].best_estimate.total_cmp(&particles[b].best_estimate).then(a.cmp(&b)))
        .expect("non-empty swarm")
}

/// Full tuning campaign over `(tau, s, d, h)`, with particle 0 seeded at the
/// empirical parameter set.
pub fn run_campaign(config: &PsoConfig, base: ParameterSet, sim: SimConfig) -> Result<CampaignResult, CampaignError> {
    let objective = SimulatorObjective::new(base, sim, config);
    let empirical: Vec<f64> = ParameterSet::empirical().tunables().iter().map(|&v| f64::from(v)).collect();
    let mut campaign = Campaign::new(config.clone(), SearchSpace::tunables(), Some(empirical))?;
    campaign.run(&objective, |_| ControlFlow::Continue(()))?;
    Ok(campaign.result())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    struct Sphere {
        center: Vec<f64>,
    }

    impl Objective for Sphere {
        type Error = Infallible;

        fn evaluate(&self, x: &[f64], _: EvalContext) -> Result<f64, Infallible> {
            Ok(x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum())
        }
    }

    fn continuous_box(half: f64, dim: usize) -> SearchSpace {
        SearchSpace::new(vec![-half; dim], vec![half; dim], vec![false; dim])
    }

    fn single(position: Vec<f64>, velocity: Vec<f64>, best: Vec<f64>, cfg: PsoConfig, space: SearchSpace) -> Campaign {
        Campaign {
            version: CHECKPOINT_VERSION,
            config: cfg,
            space,
            completed: Some(0),
            particles: vec![Particle {
                id: 0,
                best_position: best,
                position,
                velocity,
                best_fitness: 1.0,
                best_estimate: 1.0,
                best_samples: 1,
            }],
            history: vec![],
        }
    }

    #[test]
    fn pure_inertia() {
        let cfg = PsoConfig { w: 1.0, w_p: 0.0, w_n: 0.0, ..PsoConfig::default() };
        let mut c = single(vec![1.0, 2.0], vec![0.5, -0.25], vec![0.0, 0.0], cfg, continuous_box(10.0, 2));
        c.pso_step(&mut seed::stream(1, Purpose::SwarmStep, &[]));
        assert_eq!(c.particles[0].velocity, vec![0.5, -0.25]);
        assert_eq!(c.particles[0].position, vec![1.5, 1.75]);
    }

    #[test]
    fn attraction_vanishes_at_the_bests() {
        let cfg = PsoConfig { w: 0.729, ..PsoConfig::default() };
        let mut c = single(vec![1.0, 2.0], vec![1.0, -2.0], vec![1.0, 2.0], cfg, continuous_box(10.0, 2));
        c.pso_step(&mut seed::stream(1, Purpose::SwarmStep, &[]));
        assert_eq!(c.particles[0].velocity, vec![0.729, -1.458]);
    }

    #[test]
    fn clamped_at_upper_bound() {
        let cfg = PsoConfig { w: 1.0, w_p: 0.0, w_n: 0.0, ..PsoConfig::default() };
        let mut c = single(vec![10.0, 0.0], vec![3.0, 1.0], vec![0.0, 0.0], cfg, continuous_box(10.0, 2));
        c.pso_step(&mut seed::stream(1, Purpose::SwarmStep, &[]));
        assert_eq!(c.particles[0].position, vec![10.0, 1.0]);
        assert_eq!(c.particles[0].velocity, vec![0.0, 1.0]);
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(aggregate_fitness(&[250.0; 10], 1.1), 250.0);
        let agg = aggregate_fitness(&[100.0, 300.0], 1.1);
        assert!((agg - 355.563_491_861_040_4).abs() < 1e-9, "{agg}");
        assert_eq!(aggregate_fitness(&[100.0, 300.0], 0.0), 200.0);
    }

    #[test]
    fn sphere_converges() {
        let cfg = PsoConfig { seed: 3, ..PsoConfig::default() };
        let mut c = Campaign::new(cfg, continuous_box(10.0, 4), None).unwrap();
        c.run(&Sphere { center: vec![0.0; 4] }, |_| ControlFlow::Continue(())).unwrap();
        let r = c.result();
        let dist = r.best_position.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(dist < 1e-2, "distance {dist}");
        assert_eq!(r.history.len(), 76);
    }

    #[test]
    fn zero_iterations_reports_initial_best() {
        let cfg = PsoConfig { n_iterations: 0, seed: 9, ..PsoConfig::default() };
        let sphere = Sphere { center: vec![0.0; 4] };
        let mut c = Campaign::new(cfg, continuous_box(10.0, 4), None).unwrap();
        let initial: Vec<f64> = c.particles.iter().map(|p| sphere.evaluate(&p.position, EvalContext { iteration: 0, particle: 0, reevaluation: false }).unwrap()).collect();
        c.run(&sphere, |_| ControlFlow::Continue(())).unwrap();
        let r = c.result();
        assert_eq!(r.history.len(), 1);
        assert_eq!(r.best_fitness, initial.iter().copied().fold(f64::INFINITY, f64::min));
    }

    #[test]
    fn invariants_hold_over_a_campaign() {
        for topology in [Topology::Global, Topology::Ring { k: 1 }] {
            for reevaluate_best in [false, true] {
                let cfg = PsoConfig { n_iterations: 30, seed: 5, topology, reevaluate_best, ..PsoConfig::default() };
                let space = SearchSpace::tunables();
                let mut c = Campaign::new(cfg, space.clone(), Some(vec![282.0, 564.0, 50.0, 0.0])).unwrap();
                let noisy = NoisySphere;
                c.run(&noisy, |_| ControlFlow::Continue(())).unwrap();
                let r = c.result();
                for w in r.history.windows(2) {
                    for (a, b) in w[0].particles.iter().zip(&w[1].particles) {
                        assert!(b.personal_best <= a.personal_best);
                    }
                    assert!(w[1].global_best <= w[0].global_best);
                }
                for it in &r.history {
                    for p in &it.particles {
                        assert!(space.contains(&p.position));
                        assert!(it.global_best <= p.personal_best);
                        if !reevaluate_best {
                            assert!(p.personal_best <= p.fitness);
                        }
                    }
                }
                assert!(r.best_fitness <= r.history[0].particles[0].fitness);
            }
        }
    }

    /// Deterministic pseudo-noise keyed by the evaluation context.
    struct NoisySphere;

    impl Objective for NoisySphere {
        type Error = Infallible;

        fn evaluate(&self, x: &[f64], ctx: EvalContext) -> Result<f64, Infallible> {
            let mut rng = seed::stream(ctx.iteration as u64, Purpose::NoiseEval, &[ctx.particle as u64, u64::from(ctx.reevaluation)]);
            let lo = SearchSpace::tunables().lower;
            let base: f64 = x.iter().zip(&lo).map(|(a, l)| ((a - l) / 100.0).powi(2)).sum();
            Ok(base + rng.random_range(0.0..50.0))
        }
    }

    #[test]
    fn resume_matches_uninterrupted() {
        let cfg = PsoConfig { n_iterations: 12, seed: 21, ..PsoConfig::default() };
        let mut full = Campaign::new(cfg.clone(), SearchSpace::tunables(), Some(vec![282.0, 564.0, 50.0, 0.0])).unwrap();
        full.run(&NoisySphere, |_| ControlFlow::Continue(())).unwrap();

        let mut part = Campaign::new(cfg, SearchSpace::tunables(), Some(vec![282.0, 564.0, 50.0, 0.0])).unwrap();
        part.run(&NoisySphere, |c| if c.completed == Some(5) { ControlFlow::Break(()) } else { ControlFlow::Continue(()) })
            .unwrap();
        let text = part.to_checkpoint();
        let mut resumed = Campaign::from_checkpoint(&text).unwrap();
        resumed.run(&NoisySphere, |_| ControlFlow::Continue(())).unwrap();
        assert_eq!(resumed, full);
    }

    #[test]
    fn checkpoint_version_is_checked() {
        let c = Campaign::new(PsoConfig::default(), SearchSpace::tunables(), None).unwrap();
        let text = c.to_checkpoint().replace("\"version\":1", "\"version\":99");
        assert!(matches!(Campaign::from_checkpoint(&text), Err(CampaignError::Checkpoint(_))));
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = PsoConfig { n_noise_evals: 1, ..PsoConfig::default() };
        assert!(Campaign::new(bad, SearchSpace::tunables(), None).is_err());
        let bad = PsoConfig { gamma: -1.0, ..PsoConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn half_up_rounding() {
        let s = SearchSpace::tunables();
        assert_eq!(s.round(&[56.5, 177.49, 28.5, 16.5]), vec![57.0, 177.0, 29.0, 17.0]);
    }

    #[test]
    fn ring_neighborhood() {
        let cfg = PsoConfig { n_particles: 5, topology: Topology::Ring { k: 1 }, ..PsoConfig::default() };
        let mut c = Campaign::new(cfg, continuous_box(1.0, 1), None).unwrap();
        for (p, f) in c.particles.iter_mut().zip([5.0, 4.0, 3.0, 2.0, 1.0]) {
            p.best_estimate = f;
        }
        assert_eq!(c.neighborhood_best(0), 4);
        assert_eq!(c.neighborhood_best(1), 2);
        assert_eq!(c.neighborhood_best(2), 3);
    }
}
