//! Simulation of a small robot swarm that inspects a tiled black-and-white
//! surface and collectively decides whether it is mostly white or mostly
//! black, plus a noise-resistant particle swarm optimizer that tunes the
//! swarm's behavioral parameters.

pub mod arena;
pub mod artifacts;
pub mod comms;
pub mod engine;
pub mod inference;
pub mod kinematics;
pub mod optimizer;
pub mod seed;
pub mod stats;
