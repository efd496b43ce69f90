//! Exact stochastic simulation, ensemble moment estimation and a truncated
//! forward-equation integrator used as a small-system oracle.

mod ensemble;
mod forward;
mod ssa;

use thiserror::Error;

pub use ensemble::{estimate_moments, log_slope, slope_halves, EnsembleStats, MomentRow, StatusCounts};
pub use forward::{
    integrate_forward_equations, integrate_forward_grid, ForwardStatus, TruncatedDistribution, MASS_BALANCE_TOL,
};
pub use ssa::{simulate, Trajectory, TrajectoryStatus, DEFAULT_EVENT_CAP};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("reaction {reaction} has negative propensity {value} at state {state:?}")]
    NegativePropensity {
        state: Vec<i64>,
        reaction: usize,
        value: f64,
    },
    #[error("reaction {reaction} fired at {state:?} leaves the nonnegative orthant")]
    LeavesOrthant { state: Vec<i64>, reaction: usize },
    #[error("state has {got} coordinates, network has {expected} species")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("initial state {0:?} lies outside the truncation box")]
    InitialOutsideBox(Vec<i64>),
    #[error("integrator exceeded {0} steps")]
    StepLimit(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
