//! Transition-layer profile, layer width and the zeroth-order solution.

use super::front::FrontCurve;
use super::outer::{eval_phi, OuterPair};
use crate::error::{AerError, Result};
use crate::grid::{Field2D, Grid2D};
use crate::problem::{ProblemSpec, Side};

/// Half-jump `P_minus = (phi_plus - phi_minus) / 2` at a front point.
pub fn half_jump(spec: &ProblemSpec, x: f64, h0: f64) -> Result<f64> {
    Ok(0.5 * (eval_phi(spec, Side::Plus, x, h0)? - eval_phi(spec, Side::Minus, x, h0)?))
}

/// Logistic layer corrector
///
/// ```text
/// Q0 = 2 P / (exp(-xi P (1 - k h0x) / sqrt(1 + h0x^2)) + 1)
/// ```
///
/// with `P = p_minus` below the front and `P = -p_minus` above it.
#[inline]
pub fn q0_profile(side: Side, xi: f64, p_minus: f64, k: f64, h0x: f64) -> f64 {
    let p = match side {
        Side::Minus => p_minus,
        Side::Plus => -p_minus,
    };
    let rate = p * (1.0 - k * h0x) / (1.0 + h0x * h0x).sqrt();
    2.0 * p / ((-xi * rate).exp() + 1.0)
}

/// `Q0` with the outer values taken at `(x, h0)`.
pub fn eval_q0(spec: &ProblemSpec, side: Side, xi: f64, x: f64, h0: f64, h0x: f64) -> Result<f64> {
    check_slope(spec.k, h0x)?;
    Ok(q0_profile(side, xi, half_jump(spec, x, h0)?, spec.k, h0x))
}

fn check_slope(k: f64, h0x: f64) -> Result<()> {
    if !(1.0 - k * h0x > 0.0) {
        return Err(AerError::assumption(
            3,
            format!("slope bound: 1 - k h0x = {} <= 0", 1.0 - k * h0x),
        ));
    }
    Ok(())
}

/// Stretched coordinates `(xi_minus, xi_plus)` where `|Q0| = mu^2`.
pub fn threshold_xi(mu: f64, k: f64, p_minus: f64, h0x: f64) -> Result<(f64, f64)> {
    check_slope(k, h0x)?;
    let arg = 2.0 * p_minus / (mu * mu) - 1.0;
    if !(arg > 0.0) {
        return Err(AerError::numerical(format!(
            "layer jump below threshold: 2P/mu^2 - 1 = {arg} <= 0"
        )));
    }
    let xi = arg.ln() * (1.0 + h0x * h0x).sqrt() / (p_minus * (1.0 - k * h0x));
    Ok((-xi, xi))
}

/// Physical layer width `mu (xi_plus - xi_minus) cos(alpha)`, i.e.
/// `2 mu ln(2P/mu^2 - 1) / (P (1 - k h0x))`.
pub fn layer_width(mu: f64, k: f64, p_minus: f64, h0x: f64) -> Result<f64> {
    let (lo, hi) = threshold_xi(mu, k, p_minus, h0x)?;
    Ok(mu * (hi - lo) / (1.0 + h0x * h0x).sqrt())
}

/// Layer width at a front point of `spec`.
pub fn transition_width(spec: &ProblemSpec, x: f64, h0: f64, h0x: f64) -> Result<f64> {
    layer_width(spec.mu, spec.k, half_jump(spec, x, h0)?, h0x)
}

/// Zeroth-order solution `U0` on `grid` at time `t`.
pub fn assemble_u0(
    spec: &ProblemSpec,
    front: &FrontCurve,
    grid: &Grid2D,
    t: f64,
) -> Result<Field2D> {
    let outer = OuterPair::on_grid(spec, grid)?;
    assemble_u0_with(spec, front, &outer, t)
}

/// [`assemble_u0`] reusing outer functions already sampled on the grid.
pub fn assemble_u0_with(
    spec: &ProblemSpec,
    front: &FrontCurve,
    outer: &OuterPair,
    t: f64,
) -> Result<Field2D> {
    let grid = *outer.phi_minus.grid();
    let (h, hx) = front.on_grid(t, &grid)?;
    let mut u = Field2D::zeros(grid).with_time(t);
    for i in 0..grid.n {
        let x = grid.x(i);
        let p = half_jump(spec, x, h[i])?;
        check_slope(spec.k, hx[i])?;
        let stretch = (1.0 + hx[i] * hx[i]).sqrt() / spec.mu;
        for j in 0..=grid.m {
            let y = grid.y(j);
            let xi = (y - h[i]) * stretch;
            let v = if y <= h[i] {
                outer.phi_minus.get(i, j) + q0_profile(Side::Minus, xi, p, spec.k, hx[i])
            } else {
                outer.phi_plus.get(i, j) + q0_profile(Side::Plus, xi, p, spec.k, hx[i])
            };
            u.set(i, j, v);
        }
    }
    u.sync_seam();
    Ok(u)
}
