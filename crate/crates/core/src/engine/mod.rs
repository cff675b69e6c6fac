//! The stepped swarm simulation, fitness evaluation and randomized batches.
//!
//! Each step runs in four phases so that robots update simultaneously with
//! respect to messages:
//!
//! 1. motion for every robot, in id order;
//! 2. sampling and emission for robots whose sampling pause just ended;
//! 3. delivery of every emitted message to all other robots;
//! 4. belief integration of received colors and decision updates.

pub mod batch;
pub mod fitness;
pub mod params;

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{generate_pattern, ArenaPattern, Color, PatternError, TILE_COUNT};
use crate::comms::{compose_broadcast, Bus, Message, MessageKind};
use crate::inference::{update_decision, Belief, Decision, DecisionState};
use crate::kinematics::{
    begin_avoidance, constrain_move, sense_distances_oriented, step_motion, FsmState, MotionConfig, MotionState, Pose,
    SENSOR_COUNT,
};
use crate::seed::{self, Purpose, StreamRng};

pub use batch::{run_batch, BatchError, BatchResult, CurvePoint, FillResult, RunSummary};
pub use fitness::{evaluate_fitness, FitnessRecord};
pub use params::{ParamError, ParameterSet};

/// When a robot broadcasts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BroadcastCadence {
    /// Once per sampling event.
    #[default]
    PerSample,
    /// Every simulation step, repeating the latest payload.
    PerStep,
}

/// Decision rule while a robot has integrated colors of only one kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OneSided {
    /// Use the limiting posterior, which puts all mass on the seen color.
    #[default]
    Limit,
    /// Skip decisions until both colors have been integrated.
    Wait,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n_robots: usize,
    /// Horizon in steps; 450,000 steps of 8 ms is one hour.
    pub t_max_steps: u64,
    pub fill: f64,
    pub seed: u64,
    /// Steps a robot stands still for each sample.
    pub pause_steps: u32,
    /// Whether colors received over the radio advance the hysteresis counter.
    pub count_received: bool,
    pub cadence: BroadcastCadence,
    pub one_sided: OneSided,
    /// Belief/coverage snapshot interval, steps.
    pub sample_every: u64,
    /// Keep per-observation and per-delivery records in the trace.
    pub log_events: bool,
    /// Geometry and random-walk shape. `d_trigger_mm` and `s_max` are
    /// overwritten from the parameter set at run time.
    pub motion: MotionConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_robots: 4,
            t_max_steps: 450_000,
            fill: 0.52,
            seed: 0,
            pause_steps: 5,
            count_received: true,
            cadence: BroadcastCadence::PerSample,
            one_sided: OneSided::Limit,
            sample_every: 125,
            log_events: false,
            motion: MotionConfig::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        validate_config(self)
    }

    pub fn t_max_seconds(&self) -> f64 {
        self.t_max_steps as f64 * self.motion.dt
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("fill ratio 0.5 has no majority color")]
    HalfFill,
    #[error("realized pattern has {white} of {TILE_COUNT} white tiles: no majority color")]
    AmbiguousGroundTruth { white: usize },
    #[error("could not place {n_robots} non-overlapping robots of radius {radius} m")]
    Placement { n_robots: usize, radius: f64 },
    #[error("invalid simulation config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotSnapshot {
    pub alpha: f64,
    pub beta: f64,
    pub decision: Decision,
    pub pose: Pose,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub step: u64,
    /// Fraction of tiles visited by any robot so far.
    pub coverage: f64,
    pub robots: Vec<RobotSnapshot>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionEvent {
    pub robot: usize,
    pub step: u64,
    pub decision: Decision,
    pub correct: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationEvent {
    pub robot: usize,
    pub step: u64,
    pub color: Color,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delivery {
    pub step: u64,
    pub sender: usize,
    pub recipient: usize,
    pub color: Color,
    pub kind: MessageKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub n_robots: usize,
    pub t_max_steps: u64,
    pub dt: f64,
    pub seed: u64,
    pub nominal_fill: f64,
    pub actual_fill: f64,
    pub ground_truth: Color,
    pub samples: Vec<Sample>,
    pub decisions: Vec<DecisionEvent>,
    pub observations: Vec<ObservationEvent>,
    pub deliveries: Vec<Delivery>,
    pub final_decisions: Vec<Decision>,
    pub final_beliefs: Vec<Belief>,
    pub initial_poses: Vec<Pose>,
}

impl SimTrace {
    pub fn t_max_seconds(&self) -> f64 {
        self.t_max_steps as f64 * self.dt
    }

    pub fn step_seconds(&self, step: u64) -> f64 {
        step as f64 * self.dt
    }

    /// Earliest time from which every robot holds the correct decision
    /// through to the end of the run.
    pub fn time_to_consensus(&self) -> Option<f64> {
        let mut current = vec![Decision::Undecided; self.n_robots];
        let truth = Decision::from(self.ground_truth);
        let mut since = None;
        for ev in &self.decisions {
            current[ev.robot] = ev.decision;
            if current.iter().all(|&d| d == truth) {
                since.get_or_insert(ev.step);
            } else {
                since = None;
            }
        }
        since.map(|s| self.step_seconds(s))
    }
}

struct Robot {
    pose: Pose,
    motion: MotionState,
    belief: Belief,
    decision: DecisionState,
    /// Moving steps left until the next sampling pause.
    countdown: u32,
    last_color: Option<Color>,
    /// `(heading, sin, cos)` of the last sensed heading.
    trig: (f64, f64, f64),
    rng: StreamRng,
}

/// Uniform non-overlapping placement with uniform headings.
pub fn place_robots(n_robots: usize, radius: f64, seed: u64) -> Result<Vec<Pose>, SimError> {
    const ATTEMPTS: usize = 10_000;
    let mut rng = seed::stream(seed, Purpose::Placement, &[]);
    let mut poses: Vec<Pose> = Vec::with_capacity(n_robots);
    for _ in 0..n_robots {
        let placed = (0..ATTEMPTS).find_map(|_| {
            let x = rng.random_range(radius..=1.0 - radius);
            let y = rng.random_range(radius..=1.0 - radius);
            let heading = rng.random_range(-PI..PI);
            let clear = poses.iter().all(|p| p.distance_to(x, y) >= 2.0 * radius);
            clear.then(|| Pose::new(x, y, heading))
        });
        poses.push(placed.ok_or(SimError::Placement { n_robots, radius })?);
    }
    Ok(poses)
}

fn validate_config(config: &SimConfig) -> Result<(), SimError> {
    if !(0.0..=1.0).contains(&config.fill) {
        return Err(PatternError::FillOutOfRange(config.fill).into());
    }
    if config.n_robots == 0 {
        return Err(SimError::Config("n_robots must be at least 1".into()));
    }
    if config.t_max_steps == 0 {
        return Err(SimError::Config("t_max_steps must be positive".into()));
    }
    if config.sample_every == 0 {
        return Err(SimError::Config("sample_every must be positive".into()));
    }
    if config.fill == 0.5 {
        return Err(SimError::HalfFill);
    }
    Ok(())
}

/// Runs one full simulation to the horizon. Deterministic in `(params, config)`.
pub fn run_simulation(params: &ParameterSet, config: &SimConfig) -> Result<SimTrace, SimError> {
    params.validate()?;
    validate_config(config)?;
    let pattern = generate_pattern(config.fill, config.seed)?;
    run_on_pattern(params, config, &pattern)
}

/// As [`run_simulation`] but on a caller-supplied pattern.
pub fn run_on_pattern(params: &ParameterSet, config: &SimConfig, pattern: &ArenaPattern) -> Result<SimTrace, SimError> {
    params.validate()?;
    validate_config(config)?;
    let ground_truth = pattern
        .majority()
        .ok_or(SimError::AmbiguousGroundTruth { white: pattern.white_count() })?;

    let motion_cfg = MotionConfig { d_trigger_mm: f64::from(params.d), s_max: params.s, ..config.motion.clone() };
    let radius = motion_cfg.body_radius;
    let consts = params.decision_constants();
    let n = config.n_robots;

    let initial_poses = place_robots(n, radius, config.seed)?;
    let mut robots: Vec<Robot> = initial_poses
        .iter()
        .enumerate()
        .map(|(id, &pose)| {
            let mut rng = seed::stream(config.seed, Purpose::Motion, &[id as u64]);
            Robot {
                pose,
                motion: MotionState::start(&motion_cfg, &mut rng),
                belief: Belief::new(params.alpha0, params.beta0),
                decision: DecisionState::default(),
                countdown: params.tau,
                last_color: None,
                trig: (f64::NAN, 0.0, 0.0),
                rng,
            }
        })
        .collect();

    let mut visited = [false; TILE_COUNT];
    let mut visited_count = 0usize;
    let mut visit = |pose: &Pose, visited: &mut [bool; TILE_COUNT]| {
        let tile = pattern.tile_index(pose.x, pose.y);
        if !visited[tile] {
            visited[tile] = true;
            visited_count += 1;
        }
        visited_count
    };
    let mut coverage_count = 0;
    for r in &robots {
        coverage_count = visit(&r.pose, &mut visited);
    }

    let mut trace = SimTrace {
        n_robots: n,
        t_max_steps: config.t_max_steps,
        dt: motion_cfg.dt,
        seed: config.seed,
        nominal_fill: config.fill,
        actual_fill: pattern.actual_fill(),
        ground_truth,
        samples: Vec::with_capacity((config.t_max_steps / config.sample_every) as usize + 2),
        decisions: Vec::new(),
        observations: Vec::new(),
        deliveries: Vec::new(),
        final_decisions: Vec::new(),
        final_beliefs: Vec::new(),
        initial_poses: initial_poses.clone(),
    };
    let snapshot = |robots: &[Robot], step: u64, covered: usize| Sample {
        step,
        coverage: covered as f64 / TILE_COUNT as f64,
        robots: robots
            .iter()
            .map(|r| RobotSnapshot {
                alpha: r.belief.alpha,
                beta: r.belief.beta,
                decision: r.decision.decision(),
                pose: r.pose,
            })
            .collect(),
    };
    trace.samples.push(snapshot(&robots, 0, coverage_count));

    let mut bus = Bus::new(n);
    let mut positions: Vec<(f64, f64)> = robots.iter().map(|r| (r.pose.x, r.pose.y)).collect();
    let mut others: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut sampling = vec![false; n];
    let mut changed = vec![false; n];
    let clear = [motion_cfg.sensor_range; SENSOR_COUNT];

    for step in 1..=config.t_max_steps {
        // Phase 1: motion.
        for (id, robot) in robots.iter_mut().enumerate() {
            sampling[id] = false;
            if robot.motion.is_paused() {
                let (state, _) = step_motion(robot.motion, robot.pose, &motion_cfg, &clear, &mut robot.rng);
                robot.motion = state;
                sampling[id] = !state.is_paused();
                continue;
            }
            others.clear();
            others.extend(positions.iter().enumerate().filter(|&(j, _)| j != id).map(|(_, &p)| p));
            if robot.trig.0 != robot.pose.heading {
                let (sn, cs) = robot.pose.heading.sin_cos();
                robot.trig = (robot.pose.heading, sn, cs);
            }
            let sensed = sense_distances_oriented(&robot.pose, (robot.trig.1, robot.trig.2), &others, &motion_cfg);
            let (mut state, wanted) = step_motion(robot.motion, robot.pose, &motion_cfg, &sensed, &mut robot.rng);
            let (pose, blocked) = constrain_move(&robot.pose, wanted, &others, radius);
            if blocked && state.fsm_state != FsmState::Avoiding {
                begin_avoidance(&mut state, &pose, &motion_cfg, &sensed, &mut robot.rng);
            }
            robot.pose = pose;
            robot.motion = state;
            positions[id] = (pose.x, pose.y);
            coverage_count = visit(&pose, &mut visited);

            robot.countdown = robot.countdown.saturating_sub(1);
            if robot.countdown == 0 {
                robot.countdown = params.tau;
                if config.pause_steps == 0 {
                    sampling[id] = true;
                } else {
                    robot.motion.pause(config.pause_steps);
                }
            }
        }

        // Phase 2: sampling and emission.
        for (id, robot) in robots.iter_mut().enumerate() {
            changed[id] = false;
            if sampling[id] {
                let color = pattern.color_at(robot.pose.x, robot.pose.y);
                robot.belief = robot.belief.update(color);
                robot.decision.o_total += 1;
                robot.last_color = Some(color);
                changed[id] = true;
                if config.log_events {
                    trace.observations.push(ObservationEvent { robot: id, step, color });
                }
            }
            let emits = match config.cadence {
                BroadcastCadence::PerSample => sampling[id],
                BroadcastCadence::PerStep => robot.last_color.is_some(),
            };
            if emits {
                let last = robot.last_color.expect("a robot emits only after sampling");
                let payload = compose_broadcast(robot.decision.decision(), last, params.feedback);
                bus.emit(Message { sender: id, color: payload.color, kind: payload.kind, t_emit: step });
            }
        }

        // Phase 3: delivery.
        let log = config.log_events;
        let deliveries = &mut trace.deliveries;
        bus.deliver(|recipient, msg| {
            if log {
                deliveries.push(Delivery { step, sender: msg.sender, recipient, color: msg.color, kind: msg.kind });
            }
        });

        // Phase 4: integration and decisions.
        for (id, robot) in robots.iter_mut().enumerate() {
            for msg in bus.drain(id) {
                robot.belief = robot.belief.update(msg.color);
                if config.count_received {
                    robot.decision.o_total += 1;
                }
                changed[id] = true;
            }
            if !changed[id] {
                continue;
            }
            let p = match config.one_sided {
                OneSided::Wait => robot.belief.cdf_at(consts.theta),
                OneSided::Limit => robot.belief.cdf_or_limit_at(consts.theta),
            };
            if let Ok(p) = p {
                let before = robot.decision.decision();
                robot.decision = update_decision(robot.decision, p, &consts);
                let after = robot.decision.decision();
                if after != before {
                    trace.decisions.push(DecisionEvent {
                        robot: id,
                        step,
                        decision: after,
                        correct: after == Decision::from(ground_truth),
                    });
                }
            }
        }

        if step % config.sample_every == 0 || step == config.t_max_steps {
            trace.samples.push(snapshot(&robots, step, coverage_count));
        }
    }

    trace.final_decisions = robots.iter().map(|r| r.decision.decision()).collect();
    trace.final_beliefs = robots.iter().map(|r| r.belief).collect();
    Ok(trace)
}
