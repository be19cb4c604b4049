pub mod error;
pub mod evolver;
pub mod heuristics;
pub mod instance;
pub mod isa;
pub mod metrics;
pub mod report;
pub mod rng;
pub mod simulator;
pub mod tuner;

pub use error::{Error, Result};
