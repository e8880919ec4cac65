//! Independent checks on the analytic distortion: exhaustive grid search and
//! Monte Carlo simulation.

mod grid;
mod sim;

use serde::{Deserialize, Serialize};

pub use grid::{grid_search_allocation, GridReport, GRID_LIMIT};
pub use sim::{simulate_binary, simulate_gaussian, SimReport, MIN_SAMPLES};

/// Analytic distortion alongside whichever oracles were run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub analytic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<SimReport>,
}
