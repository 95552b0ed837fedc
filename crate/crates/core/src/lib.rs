//! Twisty-puzzle reinforcement-learning toolkit.
//!
//! The crate is organized bottom-up:
//!
//! * [`cube`] — exact cube representation (2x2x2 and 3x3x3) as paired
//!   face-color / sticker-location arrays, with the full transformation
//!   algebra: face twists, whole-cube rotations, color symmetries and
//!   normalization.
//! * [`board`] — flattenings of a cube state into small integer board
//!   vectors (raw sticker colors, or corner/edge location coding) plus
//!   adjacency-constrained random-walk n-tuple generation.
//! * [`net`] — n-tuple lookup-table value function with TD(0) updates,
//!   temporal-coherence learning rates and symmetry-averaged values.
//! * [`agent_io`] — bit-exact binary serialization of trained agents.
//! * [`trainer`] — scramble-and-solve episode training (full-episode TD
//!   and a one-step bootstrapped variant) with learning-curve evaluation.
//! * [`mcts`] — PUCT tree-search wrapper used at evaluation time.
//! * [`oracle`] — breadth-first exact distance table for the 2x2x2 cube
//!   and optimality auditing of trained agents.
//! * [`rng`] — a single run seed fanned out into named, reproducible
//!   sub-streams.

pub mod agent_io;
pub mod board;
pub mod cube;
pub mod mcts;
pub mod net;
pub mod oracle;
pub mod rng;
pub mod trainer;

pub use cube::{Action, CubeError, CubeState, CubeVariant, Face, Metric};
