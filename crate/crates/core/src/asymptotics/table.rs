//! Tabulated outer functions with tensor cubic interpolation.

use super::outer::{phi_radicand, PHI_TOL};
use crate::error::{AerError, Result};
use crate::problem::{ProblemSpec, Side};
use rayon::prelude::*;

/// `phi_minus` and `phi_plus` on a uniform lattice covering one period in x
/// (plus two guard columns on each side) and `[-a, a]` in y. Queries are
/// reduced into `[x0, x1)` first, so the table never interpolates across
/// the seam even when the outer functions are not periodic.
#[derive(Debug, Clone)]
pub struct OuterTable {
    x0: f64,
    period: f64,
    a: f64,
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    minus: Vec<f64>,
    plus: Vec<f64>,
}

impl OuterTable {
    /// Evaluates both outer functions at every lattice node. Fails if any
    /// radicand is non-positive.
    pub fn build(spec: &ProblemSpec, nx: usize, ny: usize) -> Result<Self> {
        if nx < 4 || ny < 3 {
            return Err(AerError::invalid(format!(
                "table needs nx >= 4, ny >= 3, got {nx} x {ny}"
            )));
        }
        let period = spec.period();
        let (hx, hy) = (period / nx as f64, 2.0 * spec.a / ny as f64);
        let cols = nx + 1 + 2 * GUARD;
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..=ny)
            .into_par_iter()
            .map(|q| {
                let y = -spec.a + q as f64 * hy;
                let mut lo = Vec::with_capacity(cols);
                let mut hi = Vec::with_capacity(cols);
                for p in 0..cols {
                    let x = spec.x0 + (p as f64 - GUARD as f64) * hx;
                    for (side, out) in [(Side::Minus, &mut lo), (Side::Plus, &mut hi)] {
                        let r = phi_radicand(spec, side, x, y, PHI_TOL);
                        if !(r > 0.0) {
                            return Err(AerError::assumption(
                                2,
                                format!(
                                    "radicand of phi_{} is {r:e} at (x, y) = ({x}, {y})",
                                    side.label()
                                ),
                            ));
                        }
                        out.push(match side {
                            Side::Minus => -r.sqrt(),
                            Side::Plus => r.sqrt(),
                        });
                    }
                }
                Ok((lo, hi))
            })
            .collect::<Result<_>>()?;
        let (minus, plus): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        Ok(Self {
            x0: spec.x0,
            period,
            a: spec.a,
            nx,
            ny,
            hx,
            hy,
            minus: minus.concat(),
            plus: plus.concat(),
        })
    }

    /// Lattice sized for a working grid: four times as fine, at least 400
    /// cells per direction.
    pub fn for_grid(spec: &ProblemSpec, n: usize, m: usize) -> Result<Self> {
        Self::build(spec, (4 * n).max(400), (4 * m).max(400))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Interpolated `(phi_minus, phi_plus)` at `(x, y)`, `y` clamped to `[-a, a]`.
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        let u = (x - self.x0).rem_euclid(self.period) / self.hx;
        let pf = u.floor().min(self.nx as f64 - 1.0);
        let tx = u - pf;
        let p = pf as usize + GUARD;
        let v = ((y + self.a) / self.hy).clamp(0.0, self.ny as f64);
        let q = (v.floor() as usize).clamp(1, self.ny - 2);
        let ty = v - q as f64;
        let wx = cubic_weights(tx);
        let wy = cubic_weights(ty);
        let stride = self.nx + 1 + 2 * GUARD;
        let (mut lo, mut hi) = (0.0, 0.0);
        for (r, &w_y) in wy.iter().enumerate() {
            let base = (q + r - 1) * stride + p - 1;
            for (c, &w_x) in wx.iter().enumerate() {
                let w = w_x * w_y;
                lo += w * self.minus[base + c];
                hi += w * self.plus[base + c];
            }
        }
        (lo, hi)
    }

    pub fn period(&self) -> f64 {
        self.period
    }
}

const GUARD: usize = 2;

/// Lagrange weights for nodes at -1, 0, 1, 2 evaluated at `t`.
#[inline]
fn cubic_weights(t: f64) -> [f64; 4] {
    let (tm, t1, t2) = (t + 1.0, t - 1.0, t - 2.0);
    [
        -t * t1 * t2 / 6.0,
        tm * t1 * t2 / 2.0,
        -tm * t * t2 / 2.0,
        tm * t * t1 / 6.0,
    ]
}
