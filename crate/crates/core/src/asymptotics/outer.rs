//! Outer functions of the reduced problem and the first-order correction.
//!
//! Along the characteristic `y(s) = y + (s - x) / k` the reduced equation
//! `k phi_x + phi_y = f / phi` integrates to
//!
//! ```text
//! phi(x, y)^2 = trace(s_b)^2 - (2 / k) * int_x^{s_b} f(s, y(s)) ds
//! ```
//!
//! where `s_b` is where the characteristic meets the boundary row of that
//! side: `x - k (a + y)` below, `x + k (a - y)` above.

use crate::error::{AerError, Result};
use crate::grid::{Field2D, Grid2D};
use crate::problem::{ProblemSpec, Side};
use crate::quadrature::integrate;
use rayon::prelude::*;

/// Absolute tolerance of the characteristic line integral.
pub const PHI_TOL: f64 = 1e-10;
/// Tighter tolerance used when phi feeds finite differences.
const PHI_TOL_FD: f64 = 1e-13;
/// Quadrature tolerance of the first-order correction.
pub const U1_TOL: f64 = 1e-8;
/// Finite-difference step for derivatives of phi, relative to the period.
pub const FD_STEP_REL: f64 = 1e-4;

/// x coordinate where the characteristic through `(x, y)` meets the
/// boundary row of `side`.
#[inline]
pub fn boundary_foot(spec: &ProblemSpec, side: Side, x: f64, y: f64) -> f64 {
    match side {
        Side::Minus => x - spec.k * (spec.a + y),
        Side::Plus => x + spec.k * (spec.a - y),
    }
}

/// `phi^2` at `(x, y)` computed to absolute tolerance `tol`.
pub fn phi_radicand(spec: &ProblemSpec, side: Side, x: f64, y: f64, tol: f64) -> f64 {
    let k = spec.k;
    let foot = boundary_foot(spec, side, x, y);
    let shift = (k * y - x) / k;
    let f = &spec.f;
    let (line, _) = integrate(|s| f.eval(s, s / k + shift), x, foot, tol);
    let trace = spec.trace(side, foot);
    trace * trace - 2.0 / k * line
}

fn signed_root(spec: &ProblemSpec, side: Side, x: f64, y: f64, tol: f64) -> Result<f64> {
    let r = phi_radicand(spec, side, x, y, tol);
    if !(r > 0.0) {
        return Err(AerError::assumption(
            2,
            format!(
                "radicand of phi_{} is {r:e} at (x, y) = ({x}, {y})",
                side.label()
            ),
        ));
    }
    Ok(match side {
        Side::Minus => -r.sqrt(),
        Side::Plus => r.sqrt(),
    })
}

/// Outer function `phi_minus` (negative) or `phi_plus` (positive).
pub fn eval_phi(spec: &ProblemSpec, side: Side, x: f64, y: f64) -> Result<f64> {
    signed_root(spec, side, x, y, PHI_TOL)
}

/// Both outer functions sampled on a grid, with optional first-order terms.
#[derive(Debug, Clone)]
pub struct OuterPair {
    pub phi_minus: Field2D,
    pub phi_plus: Field2D,
    pub u1_minus: Option<Field2D>,
    pub u1_plus: Option<Field2D>,
}

impl OuterPair {
    pub fn on_grid(spec: &ProblemSpec, grid: &Grid2D) -> Result<Self> {
        Ok(Self {
            phi_minus: sample(grid, |x, y| eval_phi(spec, Side::Minus, x, y))?,
            phi_plus: sample(grid, |x, y| eval_phi(spec, Side::Plus, x, y))?,
            u1_minus: None,
            u1_plus: None,
        })
    }

    pub fn with_first_order(mut self, spec: &ProblemSpec) -> Result<Self> {
        let grid = *self.phi_minus.grid();
        self.u1_minus = Some(sample(&grid, |x, y| eval_u1(spec, Side::Minus, x, y))?);
        self.u1_plus = Some(sample(&grid, |x, y| eval_u1(spec, Side::Plus, x, y))?);
        Ok(self)
    }

    pub fn phi(&self, side: Side) -> &Field2D {
        match side {
            Side::Minus => &self.phi_minus,
            Side::Plus => &self.phi_plus,
        }
    }
}

/// Evaluates `f` at every node in parallel. Column `n` reuses column 0.
pub(crate) fn sample(grid: &Grid2D, f: impl Fn(f64, f64) -> Result<f64> + Sync) -> Result<Field2D> {
    let rows: Vec<Vec<f64>> = (0..=grid.m)
        .into_par_iter()
        .map(|j| {
            let y = grid.y(j);
            let mut row = (0..grid.n)
                .map(|i| f(grid.x(i), y))
                .collect::<Result<Vec<_>>>()?;
            row.push(row[0]);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(Field2D::new(*grid, rows.concat())?)
}

/// Coefficients `P = (k phi_x + phi_y) / phi` and
/// `W = -(phi_xx + phi_yy) / phi` of the first-order outer equation, by
/// central differences of phi.
pub fn first_order_coefficients(
    spec: &ProblemSpec,
    side: Side,
    x: f64,
    y: f64,
) -> Result<(f64, f64)> {
    let h = FD_STEP_REL * spec.period();
    let phi = |x, y| signed_root(spec, side, x, y, PHI_TOL_FD);
    let c = phi(x, y)?;
    let (xp, xm) = (phi(x + h, y)?, phi(x - h, y)?);
    let (yp, ym) = (phi(x, y + h)?, phi(x, y - h)?);
    let phi_x = (xp - xm) / (2.0 * h);
    let phi_y = (yp - ym) / (2.0 * h);
    let lap = (xp + xm + yp + ym - 4.0 * c) / (h * h);
    Ok(((spec.k * phi_x + phi_y) / c, -lap / c))
}

/// First-order outer correction `u1` on `side`:
///
/// ```text
/// u1(x, y) = int_{s_b}^{x} exp(-int_z^x P(s) / k ds) W(z) / k dz
/// ```
///
/// with `P`, `W` evaluated along the characteristic through `(x, y)`. It
/// vanishes on the boundary row of its side.
pub fn eval_u1(spec: &ProblemSpec, side: Side, x: f64, y: f64) -> Result<f64> {
    let k = spec.k;
    let foot = boundary_foot(spec, side, x, y);
    if foot == x {
        return Ok(0.0);
    }
    let y_of = |s: f64| y + (s - x) / k;
    let mut failure: Option<AerError> = None;
    let mut coeffs = |s: f64| match first_order_coefficients(spec, side, s, y_of(s)) {
        Ok(pw) => pw,
        Err(e) => {
            failure.get_or_insert(e);
            (0.0, 0.0)
        }
    };
    let inner_tol = 0.1 * U1_TOL / (x - foot).abs().max(1.0);
    let (value, _) = {
        let coeffs = &mut coeffs;
        let mut integrand = |z: f64| {
            let (_, w) = coeffs(z);
            let (decay, _) = integrate(|s| coeffs(s).0 / k, z, x, inner_tol);
            (-decay).exp() * w / k
        };
        integrate(&mut integrand, foot, x, U1_TOL)
    };
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Tanh initial profile centred on `y = h0_star`.
pub fn initial_condition(spec: &ProblemSpec, grid: &Grid2D) -> Result<Field2D> {
    let mut failure = None;
    let field = Field2D::from_fn(*grid, |x, y| {
        let lo = spec.u_minus_a.eval(x, 0.0);
        let hi = spec.u_plus_a.eval(x, 0.0);
        let v = 0.5 * (hi - lo) * (x + (y - spec.h0_star) / spec.mu).tanh() + 0.5 * (hi + lo);
        if !v.is_finite() {
            failure.get_or_insert((x, y));
        }
        v
    });
    if let Some((x, y)) = failure {
        return Err(AerError::numerical(format!(
            "initial condition not finite at ({x}, {y})"
        )));
    }
    let mut field = field?.with_time(0.0);
    field.sync_seam();
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ScalarFn;
    use std::f64::consts::PI;

    fn flat(lo: f64, hi: f64) -> ProblemSpec {
        ProblemSpec {
            u_minus_a: ScalarFn::constant(lo),
            u_plus_a: ScalarFn::constant(hi),
            f: ScalarFn::constant(0.0),
            ..ProblemSpec::example1()
        }
    }

    #[test]
    fn zero_source_gives_trace_values() {
        let s = flat(-4.0, 2.0);
        for &(x, y) in &[(0.0, 0.0), (1.3, -1.9), (-2.0, 2.0)] {
            assert_eq!(eval_phi(&s, Side::Minus, x, y).unwrap(), -4.0);
            assert_eq!(eval_phi(&s, Side::Plus, x, y).unwrap(), 2.0);
        }
    }

    #[test]
    fn example1_closed_form_at_origin() {
        let s = ProblemSpec::example1();
        let inner = (0.0_f64).sin() - (-6.0 * PI / 4.0).sin() + 3.0 * 0.0_f64.sin()
            - 3.0 * (-2.0 * PI / 4.0).sin()
            + 12.0 * PI;
        let exact = -(2.0 / (3.0 * PI).sqrt()) * inner.sqrt();
        let got = eval_phi(&s, Side::Minus, 0.0, 0.0).unwrap();
        assert!((got - exact).abs() < 1e-10, "{got} vs {exact}");
    }

    #[test]
    fn large_constant_source_violates() {
        let mut s = flat(-4.0, 2.0);
        s.f = ScalarFn::constant(100.0);
        let err = eval_phi(&s, Side::Plus, 0.0, -1.0).unwrap_err();
        assert!(err.is_assumption());
        assert!(err.to_string().contains("Assumption 2"));
    }

    #[test]
    fn u1_vanishes_for_flat_data_and_on_boundary_rows() {
        let s = flat(-4.0, 2.0);
        assert!(eval_u1(&s, Side::Minus, 0.3, 0.5).unwrap().abs() < 1e-10);
        let e1 = ProblemSpec::example1();
        assert_eq!(eval_u1(&e1, Side::Minus, 0.7, -2.0).unwrap(), 0.0);
        assert_eq!(eval_u1(&e1, Side::Plus, 0.7, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn initial_condition_matches_tanh_profile() {
        let s = ProblemSpec::example1();
        let g = s.grid(50, 50).unwrap();
        let u = initial_condition(&s, &g).unwrap();
        assert_eq!(u.get(25, 25), -1.0);
        assert!((u.get(10, 50) - 2.0).abs() < 1e-12);
        let s2 = ProblemSpec::example2();
        let g2 = s2.grid(50, 50).unwrap();
        assert_eq!(initial_condition(&s2, &g2).unwrap().get(25, 25), -2.0);
    }

    #[test]
    fn grid_sampling_is_seam_consistent() {
        let s = ProblemSpec::example2();
        let g = s.grid(10, 6).unwrap();
        let pair = OuterPair::on_grid(&s, &g).unwrap();
        for j in 0..=g.m {
            assert_eq!(pair.phi_minus.get(0, j), pair.phi_minus.get(10, j));
            assert!(pair.phi_minus.get(3, j) < 0.0 && pair.phi_plus.get(3, j) > 0.0);
        }
    }
}
