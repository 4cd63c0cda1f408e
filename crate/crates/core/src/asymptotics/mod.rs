//! Zeroth-order asymptotic solution with an interior transition layer and
//! the first-order outer correction.

pub mod assumptions;
pub mod front;
pub mod layer;
pub mod outer;
pub mod table;

pub use assumptions::{check_assumption1, check_assumption2, AssumptionReport};
pub use front::{solve_front, solve_front_with, FrontCurve, FrontOptions};
pub use layer::{
    assemble_u0, assemble_u0_with, eval_q0, half_jump, layer_width, q0_profile, threshold_xi,
    transition_width,
};
pub use outer::{
    eval_phi, eval_u1, first_order_coefficients, initial_condition, phi_radicand, OuterPair,
};
pub use table::OuterTable;
