//! Adaptive wisdom-of-crowds simulation.
//!
//! A group of agents estimates a sequence of quantities in `[0, 1]`. Each
//! agent gets a private signal whose noise and bias depend on its quality
//! level, forms a belief by two rounds of weighted averaging over the
//! peers it attends to, and then moves its attention shares away from
//! poorly performing peers and toward well performing ones. Shocks
//! reshuffle who holds good information.

pub mod environment;
pub mod error;
pub mod harness;
pub mod learning;
pub mod metrics;
pub mod network;
pub mod rewiring;
pub mod rng;
pub mod stats;
pub mod trace;

pub use error::{Error, Result};
pub use harness::{run, sweep, Condition, RunConfig};
pub use trace::{RoundRecord, RunTrace};
