//! Tunable algorithm parameters, their search bounds and the named presets.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::comms::FeedbackMode;
use crate::inference::DecisionConstants;

/// Steps needed to cross one 6.25 cm tile at 2.77 cm/s with 8 ms steps.
pub const TILE_CROSSING_STEPS: u32 = 282;
/// Steps needed to cross the 1 m arena.
pub const ARENA_CROSSING_STEPS: u32 = 4515;
/// Factor by which the tau and s ranges are widened around the crossing times.
pub const BOUNDARY_MULTIPLIER: u32 = 5;

/// Inclusive integer bounds on one tunable dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bound {
    pub name: &'static str,
    pub lo: u32,
    pub hi: u32,
}

impl Bound {
    pub fn contains(&self, v: u32) -> bool {
        (self.lo..=self.hi).contains(&v)
    }
}

// 282 / 5 = 56.4, truncated to 56 for an integer lower bound.
pub const TAU_BOUND: Bound = Bound {
    name: "tau",
    lo: TILE_CROSSING_STEPS / BOUNDARY_MULTIPLIER,
    hi: TILE_CROSSING_STEPS * BOUNDARY_MULTIPLIER,
};
pub const S_BOUND: Bound = Bound {
    name: "s",
    lo: TILE_CROSSING_STEPS / BOUNDARY_MULTIPLIER,
    hi: ARENA_CROSSING_STEPS * BOUNDARY_MULTIPLIER,
};
pub const D_BOUND: Bound = Bound { name: "d", lo: 5, hi: 145 };
pub const H_BOUND: Bound = Bound { name: "h", lo: 0, hi: 128 };

/// The four optimized dimensions, in `(tau, s, d, h)` order.
pub const TUNABLE_BOUNDS: [Bound; 4] = [TAU_BOUND, S_BOUND, D_BOUND, H_BOUND];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} = {value} is outside [{lo}, {hi}]: {side} bound is {limit}")]
    OutOfBounds { name: &'static str, value: f64, lo: f64, hi: f64, side: &'static str, limit: f64 },
    #[error("unknown parameter preset `{0}` (expected empirical, optimized_uminus or optimized_uplus)")]
    UnknownPreset(String),
}

impl ParamError {
    fn out_of_bounds(name: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        let (side, limit) = if value > hi { ("upper", hi) } else { ("lower", lo) };
        ParamError::OutOfBounds { name, value, lo, hi, side, limit }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSet {
    #[serde(default)]
    pub alpha0: f64,
    #[serde(default)]
    pub beta0: f64,
    /// Observation interval, steps.
    pub tau: u32,
    /// Upper bound on a random-walk forward leg, steps.
    pub s: u32,
    /// Collision-avoidance trigger distance, millimeters.
    pub d: u32,
    /// Hysteresis, integrated observations.
    pub h: u32,
    #[serde(default = "default_p_c")]
    pub p_c: f64,
    #[serde(default)]
    pub feedback: FeedbackMode,
}

fn default_p_c() -> f64 {
    0.95
}

impl ParameterSet {
    /// Hand-chosen baseline: one tile per sample, two tiles per leg,
    /// one body length of clearance, no hysteresis.
    pub fn empirical() -> Self {
        Self {
            alpha0: 0.0,
            beta0: 0.0,
            tau: TILE_CROSSING_STEPS,
            s: 2 * TILE_CROSSING_STEPS,
            d: 50,
            h: 0,
            p_c: default_p_c(),
            feedback: FeedbackMode::Off,
        }
    }

    pub fn optimized_uminus() -> Self {
        Self { tau: 56, s: 178, d: 29, h: 17, ..Self::empirical() }
    }

    pub fn optimized_uplus() -> Self {
        Self { tau: 57, s: 912, d: 51, h: 10, feedback: FeedbackMode::On, ..Self::empirical() }
    }

    pub fn preset(name: &str) -> Result<Self, ParamError> {
        match name {
            "empirical" => Ok(Self::empirical()),
            "optimized_uminus" => Ok(Self::optimized_uminus()),
            "optimized_uplus" => Ok(Self::optimized_uplus()),
            other => Err(ParamError::UnknownPreset(other.to_string())),
        }
    }

    pub const PRESET_NAMES: [&'static str; 3] = ["empirical", "optimized_uminus", "optimized_uplus"];

    pub fn with_tunables(self, [tau, s, d, h]: [u32; 4]) -> Self {
        Self { tau, s, d, h, ..self }
    }

    pub fn tunables(&self) -> [u32; 4] {
        [self.tau, self.s, self.d, self.h]
    }

    pub fn decision_constants(&self) -> DecisionConstants {
        DecisionConstants { theta: 0.5, p_c: self.p_c, h: self.h }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        for (bound, value) in TUNABLE_BOUNDS.iter().zip(self.tunables()) {
            if !bound.contains(value) {
                return Err(ParamError::out_of_bounds(bound.name, f64::from(value), f64::from(bound.lo), f64::from(bound.hi)));
            }
        }
        for (name, value) in [("alpha0", self.alpha0), ("beta0", self.beta0)] {
            if value != 0.0 {
                return Err(ParamError::out_of_bounds(name, value, 0.0, 0.0));
            }
        }
        if !(self.p_c > 0.5 && self.p_c < 1.0) {
            return Err(ParamError::out_of_bounds("p_c", self.p_c, 0.5, 1.0));
        }
        Ok(())
    }
}

impl fmt::Display for ParameterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tau={} s={} d={} h={} p_c={} feedback={}",
            self.tau, self.s, self.d, self.h, self.p_c, self.feedback
        )
    }
}
