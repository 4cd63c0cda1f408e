//! Asymptotic analysis, forward simulation and source recovery for a
//! singularly perturbed reaction-diffusion-advection equation
//!
//! ```text
//! mu (u_xx + u_yy) - u_t = -u (k u_x + u_y) + f(x, y),   x periodic, |y| < a
//! ```
//!
//! with Dirichlet traces at `y = -a` and `y = a`.

// Negated comparisons are how NaN inputs get rejected.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::len_without_is_empty
)]

pub mod asymptotics;
pub mod error;
pub mod expr;
pub mod forward;
pub mod grid;
pub mod inverse;
pub mod linalg;
pub mod problem;
pub mod quadrature;

pub use error::{AerError, Result};
pub use expr::{Expr, ExprError, ScalarFn};
pub use forward::{forward_solve, ForwardRun, SolverConfig};
pub use grid::{rel_l2_error, Field2D, Grid2D, GridError, PartialField, RegionMask};
pub use inverse::{
    run_aer_pipeline, AerConfig, AerMetrics, AerOutcome, Observation, Pipeline,
    ReconstructionResult, SmoothingResult,
};
pub use problem::{ProblemSpec, Side};
