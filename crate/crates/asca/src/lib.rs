//! Angular swarm collision avoidance.
//!
//! A deterministic library and CLI simulator for holonomic multi-agent
//! navigation in 2D and 3D. Each agent independently intersects one
//! half-circle heading constraint per nearby body, then moves toward its
//! goal inside the resulting feasible range — or along its lower boundary,
//! or not at all. The crate bundles the fixed-timestep simulation loop,
//! the standard swap benchmarks, safety and convergence metrics, and
//! reproducible file outputs.

pub mod angle;
pub mod cli;
pub mod error;
pub mod files;
pub mod metrics;
pub mod planner;
pub mod scenario;
pub mod sim;
pub mod vec;

pub use error::{Error, Result};
