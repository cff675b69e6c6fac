//! Velocity-level robot motion: random walk, eight-ray distance sensing,
//! collision avoidance and arena containment.
//!
//! Robots are discs that translate at constant speed or rotate in place;
//! there is no mass, friction or skidding.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::LazyLock;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::arena::ARENA_SIDE_M;

pub const SENSOR_COUNT: usize = 8;
pub const DT_S: f64 = 0.008;
pub const SPEED_M_S: f64 = 0.0277;

/// Sensor headings relative to the robot heading, counter-clockwise positive.
pub const SENSOR_ANGLES: [f64; SENSOR_COUNT] = [
    15.0 * PI / 180.0,
    -15.0 * PI / 180.0,
    45.0 * PI / 180.0,
    -45.0 * PI / 180.0,
    75.0 * PI / 180.0,
    -75.0 * PI / 180.0,
    105.0 * PI / 180.0,
    -105.0 * PI / 180.0,
];

/// Indices into [`SENSOR_ANGLES`] of the two rays closest to straight ahead.
const FRONT_SENSORS: [usize; 2] = [0, 1];

pub type Readings = [f64; SENSOR_COUNT];

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI { w - 2.0 * PI } else { w }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Radians in `[-pi, pi)`.
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading: wrap_angle(heading) }
    }

    pub fn body_in_bounds(&self, body_radius: f64) -> bool {
        let lo = body_radius;
        let hi = ARENA_SIDE_M - body_radius;
        (lo..=hi).contains(&self.x) && (lo..=hi).contains(&self.y)
    }

    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        (self.x - x).hypot(self.y - y)
    }
}

/// How the length of a straight random-walk leg is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForwardLeg {
    /// Gaussian with mean `s/2` and standard deviation `s/4`, clamped to `[1, s]`.
    Centered,
    /// Magnitude of a zero-mean Gaussian with standard deviation `s/2`, clamped to `[1, s]`.
    HalfNormal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionConfig {
    pub speed: f64,
    pub dt: f64,
    pub body_radius: f64,
    pub sensor_range: f64,
    /// Collision-avoidance trigger distance in millimeters.
    pub d_trigger_mm: f64,
    /// Upper bound on a forward leg, in steps.
    pub s_max: u32,
    /// In-place rotation rate, rad/s.
    pub turn_rate: f64,
    pub forward_leg: ForwardLeg,
    /// Standard deviation of the random-walk turn angle before clamping to `±pi/2`.
    pub turn_sigma: f64,
}

impl Default for MotionConfig {
    fn default() -> Self {
        Self {
            speed: SPEED_M_S,
            dt: DT_S,
            body_radius: 0.025,
            sensor_range: 0.15,
            d_trigger_mm: 50.0,
            s_max: 564,
            turn_rate: PI,
            forward_leg: ForwardLeg::Centered,
            turn_sigma: FRAC_PI_4,
        }
    }
}

impl MotionConfig {
    pub fn sensor_angles(&self) -> &'static [f64; SENSOR_COUNT] {
        &SENSOR_ANGLES
    }

    pub fn d_trigger_m(&self) -> f64 {
        self.d_trigger_mm / 1000.0
    }

    fn turn_step(&self) -> f64 {
        self.turn_rate * self.dt
    }

    fn turn_steps_for(&self, angle: f64) -> u32 {
        (angle.abs() / self.turn_step()).ceil() as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FsmState {
    Forward,
    Turning,
    PausedSampling,
    Avoiding,
}

/// Motion state saved while a robot pauses to sample.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Suspended {
    fsm_state: FsmState,
    steps_remaining: u32,
    turn_target: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionState {
    pub fsm_state: FsmState,
    /// Steps left in the current forward leg, turn or pause.
    pub steps_remaining: u32,
    /// Absolute heading the current turn ends at.
    pub turn_target: f64,
    /// Set after an avoidance turn while side sensors are still obstructed;
    /// only the two front rays can re-trigger avoidance until all eight clear.
    pub escaping: bool,
    suspended: Option<Suspended>,
    /// `(sin, cos)` of the heading during the current forward leg.
    leg_trig: Option<(f64, f64)>,
}

impl MotionState {
    pub fn forward(steps: u32) -> Self {
        Self {
            fsm_state: FsmState::Forward,
            steps_remaining: steps,
            turn_target: 0.0,
            escaping: false,
            suspended: None,
            leg_trig: None,
        }
    }

    pub fn start(config: &MotionConfig, rng: &mut impl Rng) -> Self {
        Self::forward(draw_forward_steps(config.s_max, config.forward_leg, rng))
    }

    pub fn is_paused(&self) -> bool {
        self.fsm_state == FsmState::PausedSampling
    }

    /// Holds the robot still for `steps` steps, then resumes the interrupted state.
    pub fn pause(&mut self, steps: u32) {
        if steps == 0 || self.is_paused() {
            return;
        }
        self.suspended = Some(Suspended {
            fsm_state: self.fsm_state,
            steps_remaining: self.steps_remaining,
            turn_target: self.turn_target,
        });
        self.fsm_state = FsmState::PausedSampling;
        self.steps_remaining = steps;
    }

    fn resume(&mut self) {
        if let Some(s) = self.suspended.take() {
            self.fsm_state = s.fsm_state;
            self.steps_remaining = s.steps_remaining;
            self.turn_target = s.turn_target;
        }
    }

    fn begin_turn(&mut self, state: FsmState, heading: f64, angle: f64, config: &MotionConfig) {
        self.leg_trig = None;
        self.fsm_state = state;
        self.turn_target = wrap_angle(heading + angle);
        self.steps_remaining = config.turn_steps_for(angle);
    }
}

/// Leg length in steps, always within `[1, s_max]`.
pub fn draw_forward_steps(s_max: u32, shape: ForwardLeg, rng: &mut impl Rng) -> u32 {
    let s_max = s_max.max(1);
    if s_max == 1 {
        return 1;
    }
    let s = f64::from(s_max);
    let draw = match shape {
        ForwardLeg::Centered => Normal::new(s / 2.0, s / 4.0).expect("positive sigma").sample(rng),
        ForwardLeg::HalfNormal => Normal::new(0.0, s / 2.0).expect("positive sigma").sample(rng).abs(),
    };
    (draw.round().clamp(1.0, s)) as u32
}

/// Signed random-walk turn angle, `|angle| <= pi/2`.
pub fn draw_turn_angle(sigma: f64, rng: &mut impl Rng) -> f64 {
    let a: f64 = Normal::new(0.0, sigma).expect("positive sigma").sample(rng);
    a.clamp(-FRAC_PI_2, FRAC_PI_2)
}

/// `(sin, cos)` of each mounting angle.
static SENSOR_DIRS: LazyLock<[(f64, f64); SENSOR_COUNT]> = LazyLock::new(|| SENSOR_ANGLES.map(f64::sin_cos));

/// Distance along each sensor ray, measured from the body surface, to the
/// nearest wall or other robot, capped at `sensor_range`.
///
/// `others` are centers of the other robots; all bodies share `body_radius`.
pub fn sense_distances(pose: &Pose, others: &[(f64, f64)], config: &MotionConfig) -> Readings {
    sense_distances_oriented(pose, pose.heading.sin_cos(), others, config)
}

/// [`sense_distances`] with the heading's `(sin, cos)` supplied by the caller.
pub fn sense_distances_oriented(
    pose: &Pose,
    heading_sin_cos: (f64, f64),
    others: &[(f64, f64)],
    config: &MotionConfig,
) -> Readings {
    let r = config.body_radius;
    let range = config.sensor_range;
    let mut out = [range; SENSOR_COUNT];

    let reach = r + range;
    // A wall farther than `reach` from the center is out of range of every ray.
    let (west, south) = (pose.x < reach, pose.y < reach);
    let (east, north) = (pose.x > ARENA_SIDE_M - reach, pose.y > ARENA_SIDE_M - reach);
    let near_wall = west || south || east || north;
    let mut near = [(0.0, 0.0); 8];
    let mut n_near = 0;
    for &(ox, oy) in others {
        if dist2(pose, ox, oy) < (reach + r) * (reach + r) {
            if n_near == near.len() {
                break;
            }
            near[n_near] = (ox, oy);
            n_near += 1;
        }
    }
    let near = if n_near == near.len() { others } else { &near[..n_near] };
    if !near_wall && near.is_empty() {
        return out;
    }

    let (sh, ch) = heading_sin_cos;
    for (reading, &(sr, cr)) in out.iter_mut().zip(SENSOR_DIRS.iter()) {
        let dx = ch * cr - sh * sr;
        let dy = sh * cr + ch * sr;
        let ox = pose.x + r * dx;
        let oy = pose.y + r * dy;
        let mut best = range;
        if (west && dx < 0.0) || (east && dx > 0.0) || (south && dy < 0.0) || (north && dy > 0.0) {
            best = best.min(ray_to_walls(ox, oy, dx, dy));
        }
        for &(cx, cy) in near {
            if let Some(t) = ray_to_disc(ox, oy, dx, dy, cx, cy, r) {
                best = best.min(t);
            }
        }
        *reading = best;
    }
    out
}

fn dist2(pose: &Pose, x: f64, y: f64) -> f64 {
    (pose.x - x) * (pose.x - x) + (pose.y - y) * (pose.y - y)
}

fn ray_to_walls(ox: f64, oy: f64, dx: f64, dy: f64) -> f64 {
    let axis = |o: f64, d: f64| {
        if d > 1e-12 {
            (ARENA_SIDE_M - o) / d
        } else if d < -1e-12 {
            -o / d
        } else {
            f64::INFINITY
        }
    };
    axis(ox, dx).min(axis(oy, dy)).max(0.0)
}

/// Smallest `t >= 0` with `|o + t*d - c| = radius`, for a unit direction `d`.
fn ray_to_disc(ox: f64, oy: f64, dx: f64, dy: f64, cx: f64, cy: f64, radius: f64) -> Option<f64> {
    let (px, py) = (ox - cx, oy - cy);
    let b = px * dx + py * dy;
    let c = px * px + py * py - radius * radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    if b >= 0.0 {
        return None;
    }
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    Some(-b - disc.sqrt())
}

fn obstructed(readings: &Readings, threshold: f64, only_front: bool) -> bool {
    if only_front {
        FRONT_SENSORS.iter().any(|&i| readings[i] < threshold)
    } else {
        readings.iter().any(|&d| d < threshold)
    }
}

/// Starts an in-place avoidance turn away from the nearest obstruction.
pub fn begin_avoidance(state: &mut MotionState, pose: &Pose, config: &MotionConfig, sensed: &Readings, rng: &mut impl Rng) {
    let (nearest, &min) = sensed
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("eight readings");
    let away = if min >= config.sensor_range {
        if rng.random_bool(0.5) { 1.0 } else { -1.0 }
    } else if SENSOR_ANGLES[nearest] > 0.0 {
        -1.0
    } else {
        1.0
    };
    let magnitude = rng.random_range(FRAC_PI_4..=FRAC_PI_2);
    state.escaping = false;
    state.begin_turn(FsmState::Avoiding, pose.heading, away * magnitude, config);
}

/// Rotates toward `turn_target` by at most one step; true when the turn is done.
fn rotate(state: &mut MotionState, pose: &mut Pose, config: &MotionConfig) -> bool {
    let diff = wrap_angle(state.turn_target - pose.heading);
    let step = config.turn_step();
    if diff.abs() <= step || state.steps_remaining <= 1 {
        pose.heading = state.turn_target;
        state.steps_remaining = 0;
        true
    } else {
        pose.heading = wrap_angle(pose.heading + step.copysign(diff));
        state.steps_remaining -= 1;
        false
    }
}

/// Advances one time step. Returns the new state and the *intended* pose;
/// the caller applies [`constrain_move`] for walls and other robots.
pub fn step_motion(
    state: MotionState,
    pose: Pose,
    config: &MotionConfig,
    sensed: &Readings,
    rng: &mut impl Rng,
) -> (MotionState, Pose) {
    let mut state = state;
    let mut pose = pose;

    if state.is_paused() {
        state.steps_remaining = state.steps_remaining.saturating_sub(1);
        if state.steps_remaining == 0 {
            state.resume();
        }
        return (state, pose);
    }

    let threshold = config.d_trigger_m();
    if state.escaping && !obstructed(sensed, threshold, false) {
        state.escaping = false;
    }
    if state.fsm_state != FsmState::Avoiding && obstructed(sensed, threshold, state.escaping) {
        begin_avoidance(&mut state, &pose, config, sensed, rng);
    }

    match state.fsm_state {
        FsmState::Forward => {
            if state.steps_remaining == 0 {
                let angle = draw_turn_angle(config.turn_sigma, rng);
                state.begin_turn(FsmState::Turning, pose.heading, angle, config);
                if rotate(&mut state, &mut pose, config) {
                    state = MotionState { escaping: state.escaping, ..MotionState::start(config, rng) };
                }
            } else {
                let (s, c) = *state.leg_trig.get_or_insert_with(|| pose.heading.sin_cos());
                let stride = config.speed * config.dt;
                pose.x += stride * c;
                pose.y += stride * s;
                state.steps_remaining -= 1;
            }
        }
        FsmState::Turning => {
            if rotate(&mut state, &mut pose, config) {
                state = MotionState { escaping: state.escaping, ..MotionState::start(config, rng) };
            }
        }
        FsmState::Avoiding => {
            if rotate(&mut state, &mut pose, config) {
                state = MotionState::start(config, rng);
                state.escaping = true;
            }
        }
        FsmState::PausedSampling => unreachable!("handled above"),
    }
    (state, pose)
}

/// Truncates a proposed move so the body stays inside the arena and off
/// other robots. Returns the admissible pose and whether the move was cut.
pub fn constrain_move(from: &Pose, to: Pose, others: &[(f64, f64)], body_radius: f64) -> (Pose, bool) {
    let lo = body_radius;
    let hi = ARENA_SIDE_M - body_radius;
    let mut pose = to;
    let mut blocked = false;
    if !(lo..=hi).contains(&pose.x) || !(lo..=hi).contains(&pose.y) {
        pose.x = pose.x.clamp(lo, hi);
        pose.y = pose.y.clamp(lo, hi);
        blocked = true;
    }
    let min_gap = 2.0 * body_radius;
    let moved = pose.x != from.x || pose.y != from.y;
    if moved && others.iter().any(|&(ox, oy)| dist2(&pose, ox, oy) < min_gap * min_gap) {
        pose.x = from.x;
        pose.y = from.y;
        blocked = true;
    }
    (pose, blocked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{stream, Purpose};
    use proptest::prelude::*;

    fn rng() -> crate::seed::StreamRng {
        stream(42, Purpose::Motion, &[0])
    }

    /// Brute-force marching along the ray; independent of the analytic solver.
    fn march(ox: f64, oy: f64, dx: f64, dy: f64, cx: f64, cy: f64, r: f64) -> f64 {
        let mut t = 0.0;
        while t < 1.0 {
            if (ox + t * dx - cx).hypot(oy + t * dy - cy) <= r {
                return t;
            }
            t += 1e-7;
        }
        f64::INFINITY
    }

    #[test]
    fn centered_robot_sees_range_cap() {
        let cfg = MotionConfig::default();
        let pose = Pose::new(0.5, 0.5, 0.0);
        let readings = sense_distances(&pose, &[], &cfg);
        // 0.5 m to the wall minus the body radius exceeds the 0.15 m range.
        assert!(readings.iter().all(|&d| d == (0.5f64 - 0.025).min(0.15)));
    }

    #[test]
    fn wall_distance_with_long_range() {
        let cfg = MotionConfig { sensor_range: 2.0, ..MotionConfig::default() };
        let pose = Pose::new(0.5, 0.5, 0.0);
        let readings = sense_distances(&pose, &[], &cfg);
        // 15 degree ray from the body surface to the wall x = 1.
        let ox = 0.5 + 0.025 * (15f64.to_radians()).cos();
        let expected = (1.0 - ox) / 15f64.to_radians().cos();
        assert!((readings[0] - expected).abs() < 1e-12);
        assert!((readings[1] - expected).abs() < 1e-12);
    }

    #[test]
    fn robot_ten_mm_ahead() {
        let cfg = MotionConfig::default();
        let r = cfg.body_radius;
        let pose = Pose::new(0.4, 0.5, 0.0);
        let other = (0.4 + 2.0 * r + 0.010, 0.5);
        let readings = sense_distances(&pose, &[other], &cfg);
        let a = SENSOR_ANGLES[0];
        let (dy, dx) = a.sin_cos();
        let oracle = march(0.4 + r * dx, 0.5 + r * dy, dx, dy, other.0, other.1, r);
        assert!((readings[0] - oracle).abs() < 1e-6, "{} vs {}", readings[0], oracle);
        assert!((readings[1] - oracle).abs() < 1e-6);
        // The nearest front rays are 15 degrees off-axis, so they travel a
        // little more than the 10 mm surface gap.
        assert!(readings[0] > 0.010 && readings[0] < 0.015, "{}", readings[0]);
    }

    #[test]
    fn forward_step_advances_by_speed_dt() {
        let cfg = MotionConfig::default();
        let clear = [cfg.sensor_range; SENSOR_COUNT];
        let pose = Pose::new(0.5, 0.5, 0.0);
        let (state, next) = step_motion(MotionState::forward(3), pose, &cfg, &clear, &mut rng());
        assert!((next.x - 0.5 - 2.216e-4).abs() < 1e-15);
        assert_eq!(next.y, 0.5);
        assert_eq!(state.fsm_state, FsmState::Forward);
        assert_eq!(state.steps_remaining, 2);
    }

    #[test]
    fn close_reading_forces_avoidance() {
        let cfg = MotionConfig::default();
        let pose = Pose::new(0.5, 0.5, 0.0);
        let mut sensed = [cfg.sensor_range; SENSOR_COUNT];
        sensed[5] = 0.049;
        for start in [MotionState::forward(10), {
            let mut s = MotionState::forward(0);
            s.begin_turn(FsmState::Turning, 0.0, 1.0, &cfg);
            s
        }] {
            let (state, next) = step_motion(start, pose, &cfg, &sensed, &mut rng());
            assert_eq!(state.fsm_state, FsmState::Avoiding);
            // Nearest obstruction is on the right (-75 degrees): turn left.
            assert!(next.heading > 0.0);
            assert_eq!((next.x, next.y), (0.5, 0.5));
        }
    }

    #[test]
    fn pause_holds_pose_and_resumes() {
        let cfg = MotionConfig::default();
        let clear = [cfg.sensor_range; SENSOR_COUNT];
        let pose = Pose::new(0.3, 0.3, 1.0);
        let mut state = MotionState::forward(7);
        state.pause(5);
        let mut r = rng();
        for _ in 0..5 {
            let (s, p) = step_motion(state, pose, &cfg, &clear, &mut r);
            assert_eq!(p, pose);
            state = s;
        }
        assert_eq!(state.fsm_state, FsmState::Forward);
        assert_eq!(state.steps_remaining, 7);
    }

    #[test]
    fn leg_ends_in_turn_then_new_leg() {
        let cfg = MotionConfig::default();
        let clear = [cfg.sensor_range; SENSOR_COUNT];
        let mut r = rng();
        let (state, _) = step_motion(MotionState::forward(1), Pose::new(0.5, 0.5, 0.0), &cfg, &clear, &mut r);
        assert_eq!(state.steps_remaining, 0);
        let (state, pose) = step_motion(state, Pose::new(0.5, 0.5, 0.0), &cfg, &clear, &mut r);
        assert!(matches!(state.fsm_state, FsmState::Turning | FsmState::Forward));
        assert!(pose.heading.abs() <= cfg.turn_rate * cfg.dt + 1e-12);
    }

    #[test]
    fn forward_steps_bounds_and_mean() {
        let mut r = rng();
        assert!((0..100).all(|_| draw_forward_steps(1, ForwardLeg::Centered, &mut r) == 1));
        let draws: Vec<u32> = (0..10_000).map(|_| draw_forward_steps(564, ForwardLeg::Centered, &mut r)).collect();
        assert!(draws.iter().all(|&d| (1..=564).contains(&d)));
        let mean = draws.iter().map(|&d| f64::from(d)).sum::<f64>() / draws.len() as f64;
        assert!((mean - 282.0).abs() < 28.2, "mean {mean}");
        let half: Vec<u32> = (0..10_000).map(|_| draw_forward_steps(564, ForwardLeg::HalfNormal, &mut r)).collect();
        assert!(half.iter().all(|&d| (1..=564).contains(&d)));
    }

    #[test]
    fn turn_angles_bounded_and_symmetric() {
        let mut r = rng();
        let draws: Vec<f64> = (0..10_000).map(|_| draw_turn_angle(FRAC_PI_4, &mut r)).collect();
        assert!(draws.iter().all(|a| a.abs() <= FRAC_PI_2));
        let positive = draws.iter().filter(|&&a| a > 0.0).count() as f64 / draws.len() as f64;
        assert!((0.47..=0.53).contains(&positive), "{positive}");
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let sd = (draws.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!(mean.abs() < 3.0 * sd / n.sqrt());
    }

    #[test]
    fn wall_truncation() {
        let from = Pose::new(0.9749, 0.5, 0.0);
        let (p, blocked) = constrain_move(&from, Pose::new(0.9752, 0.5, 0.0), &[], 0.025);
        assert!(blocked);
        assert_eq!(p.x, 0.975);
        let (p, blocked) = constrain_move(&from, Pose::new(0.975, 0.5, 0.0), &[(0.975 + 0.0499, 0.5)], 0.025);
        assert!(blocked);
        assert_eq!(p.x, from.x);
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), -PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + FRAC_PI_2).abs() < 1e-12);
        assert_eq!(wrap_angle(0.25), 0.25);
    }

    proptest! {
        #[test]
        fn walk_stays_in_bounds(seed in any::<u64>(), x in 0.03f64..0.97, y in 0.03f64..0.97, h in -3.1f64..3.1, d in 5.0f64..145.0) {
            let cfg = MotionConfig { d_trigger_mm: d, s_max: 2000, ..MotionConfig::default() };
            let mut r = stream(seed, Purpose::Motion, &[0]);
            let mut pose = Pose::new(x.clamp(0.025, 0.975), y.clamp(0.025, 0.975), h);
            let mut state = MotionState::start(&cfg, &mut r);
            for _ in 0..3000 {
                let sensed = sense_distances(&pose, &[], &cfg);
                let was_avoiding = state.fsm_state == FsmState::Avoiding;
                let triggered = obstructed(&sensed, cfg.d_trigger_m(), state.escaping);
                let (s, want) = step_motion(state, pose, &cfg, &sensed, &mut r);
                if triggered && !was_avoiding {
                    prop_assert_eq!(s.fsm_state, FsmState::Avoiding);
                }
                let (p, blocked) = constrain_move(&pose, want, &[], cfg.body_radius);
                state = s;
                if blocked && state.fsm_state != FsmState::Avoiding {
                    begin_avoidance(&mut state, &p, &cfg, &sensed, &mut r);
                }
                pose = p;
                prop_assert!(pose.body_in_bounds(cfg.body_radius));
                prop_assert!((-PI..PI).contains(&pose.heading));
            }
        }
    }
}
