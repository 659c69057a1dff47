//! Monte Carlo checks of the concentration, capacity and separation bounds,
//! order sensitivity of the binding families, and scoring-time scaling.
//! Every experiment is reproducible from its config and seed and renders to
//! a typed [`Table`].

mod capacity;
mod order;
mod scaling;
mod separation;
mod table;
mod tail;

pub use capacity::{run_capacity_experiment, success_rate, CapacityConfig, CapacityExperiment, MAX_DIM};
pub use order::{run_order_sensitivity, OrderConfig, OrderRow, OrderSensitivity};
pub use scaling::{
    linear_fit, run_scaling_benchmark, synthetic_candidates, time_scoring, ScalingConfig, ScalingPoint, ScalingRun, MIN_RESOLVABLE_SECS,
};
pub use separation::{run_separation_check, SeparationConfig, SeparationExperiment};
pub use table::{Cell, Kind, Table};
pub use tail::{run_tail_experiment, TailConfig, TailExperiment, TailPoint, MIN_TRIALS};

use thiserror::Error;

use crate::retriever::RetrieveError;
use crate::vsa::VsaError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("experiment needs at least one trial")]
    ZeroTrials,
    #[error("no dimension up to {max_dim} met the success criterion")]
    NoConvergence { max_dim: usize },
    #[error("timings of {seconds:e} s are below timer resolution; enlarge the grid")]
    TimerResolution { seconds: f64 },
    #[error("table schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Vsa(#[from] VsaError),
    #[error(transparent)]
    Retrieve(#[from] RetrieveError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
