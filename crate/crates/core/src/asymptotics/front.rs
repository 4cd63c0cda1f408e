//! Zeroth-order front motion.
//!
//! ```text
//! h_t (1 + h_x^2) = (k h_x - 1) (phi_plus(x, h) + phi_minus(x, h)) / 2
//! ```
//!
//! Method of lines on the periodic x nodes: central `h_x`, Lax-Friedrichs
//! viscosity `c d1 / 2` with local speed `c = |k (phi_plus + phi_minus)| / 2`,
//! Heun's method in time.

use super::table::OuterTable;
use crate::error::{AerError, Result};
use crate::grid::Grid2D;
use crate::problem::ProblemSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct FrontOptions {
    /// Courant factor for the time step.
    pub cfl: f64,
    /// Lower bound on the number of time steps up to the final time.
    pub min_steps: usize,
    /// Integration end; defaults to the problem's final time.
    pub t_end: Option<f64>,
    /// Times that must be hit exactly (the observation time is always added).
    pub stop_times: Vec<f64>,
}

impl Default for FrontOptions {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            min_steps: 50,
            t_end: None,
            stop_times: Vec::new(),
        }
    }
}

/// `h0` on the x nodes of a grid at a sequence of times.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontCurve {
    pub x0: f64,
    pub period: f64,
    /// Unique x nodes `x0 + i d1`, `i < n`.
    pub xs: Vec<f64>,
    pub times: Vec<f64>,
    pub h: Vec<Vec<f64>>,
    pub hx: Vec<Vec<f64>>,
}

impl FrontCurve {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Front and slope on the stored x nodes at time `t` (linear in time
    /// between stored samples).
    pub fn at(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let (first, last) = (self.times[0], *self.times.last().unwrap());
        let slack = 1e-12 * last.abs().max(1.0);
        if t < first - slack || t > last + slack {
            return Err(AerError::invalid(format!(
                "time {t} outside front coverage [{first}, {last}]"
            )));
        }
        let t = t.clamp(first, last);
        let k = self.times.partition_point(|&s| s < t);
        if k < self.times.len() && (self.times[k] - t).abs() <= slack {
            return Ok((self.h[k].clone(), self.hx[k].clone()));
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        let lerp = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(a, b)| a + w * (b - a)).collect();
        Ok((
            lerp(&self.h[k - 1], &self.h[k]),
            lerp(&self.hx[k - 1], &self.hx[k]),
        ))
    }

    /// Front and slope at arbitrary `x` by periodic cubic interpolation.
    pub fn sample(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        let (h, hx) = self.at(t)?;
        Ok((
            periodic_cubic(&h, self.x0, self.period, x),
            periodic_cubic(&hx, self.x0, self.period, x),
        ))
    }

    /// Front and slope at every column of `grid` (including the seam column).
    pub fn on_grid(&self, t: f64, grid: &Grid2D) -> Result<(Vec<f64>, Vec<f64>)> {
        let (h, hx) = self.at(t)?;
        if grid.n == self.xs.len() && (grid.x0 - self.x0).abs() < 1e-14 {
            let mut h = h;
            let mut hx = hx;
            h.push(h[0]);
            hx.push(hx[0]);
            return Ok((h, hx));
        }
        let xs = grid.xs();
        Ok((
            xs.iter()
                .map(|&x| periodic_cubic(&h, self.x0, self.period, x))
                .collect(),
            xs.iter()
                .map(|&x| periodic_cubic(&hx, self.x0, self.period, x))
                .collect(),
        ))
    }
}

fn periodic_cubic(values: &[f64], x0: f64, period: f64, x: f64) -> f64 {
    let n = values.len();
    let h = period / n as f64;
    let u = (x - x0).rem_euclid(period) / h;
    let p = (u.floor() as usize).min(n - 1);
    let t = u - p as f64;
    let at = |off: isize| values[(p as isize + off).rem_euclid(n as isize) as usize];
    let (tm, t1, t2) = (t + 1.0, t - 1.0, t - 2.0);
    -t * t1 * t2 / 6.0 * at(-1) + tm * t1 * t2 / 2.0 * at(0) - tm * t * t2 / 2.0 * at(1)
        + tm * t * t1 / 6.0 * at(2)
}

fn periodic_slope(h: &[f64], d1: f64, out: &mut [f64]) {
    let n = h.len();
    for i in 0..n {
        out[i] = (h[(i + 1) % n] - h[(i + n - 1) % n]) / (2.0 * d1);
    }
}

struct FrontRhs<'a> {
    table: &'a OuterTable,
    xs: &'a [f64],
    k: f64,
    d1: f64,
    a: f64,
}

impl FrontRhs<'_> {
    /// Writes `dh/dt` into `out`; returns the largest local speed.
    fn eval(&self, h: &[f64], t: f64, out: &mut [f64]) -> Result<f64> {
        let n = h.len();
        let mut speed: f64 = 0.0;
        for i in 0..n {
            if !(h[i] > -self.a && h[i] < self.a) {
                return Err(AerError::assumption(
                    3,
                    format!(
                        "front left domain at t = {t} (h = {} at x = {})",
                        h[i], self.xs[i]
                    ),
                ));
            }
            let (lo, hi) = self.table.eval(self.xs[i], h[i]);
            let (l, r) = (h[(i + n - 1) % n], h[(i + 1) % n]);
            let hx = (r - l) / (2.0 * self.d1);
            let sum = lo + hi;
            let c = 0.5 * self.k * sum.abs();
            speed = speed.max(c);
            let visc = 0.5 * c * self.d1 * (r - 2.0 * h[i] + l) / (self.d1 * self.d1);
            out[i] = 0.5 * (self.k * hx - 1.0) * sum / (1.0 + hx * hx) + visc;
        }
        Ok(speed)
    }
}

/// Integrates the front from `h0_star` on the x nodes of `grid`.
pub fn solve_front(spec: &ProblemSpec, grid: &Grid2D, opts: &FrontOptions) -> Result<FrontCurve> {
    let table = OuterTable::for_grid(spec, grid.n, grid.m)?;
    solve_front_with(spec, grid, opts, &table)
}

pub fn solve_front_with(
    spec: &ProblemSpec,
    grid: &Grid2D,
    opts: &FrontOptions,
    table: &OuterTable,
) -> Result<FrontCurve> {
    let t_end = opts.t_end.unwrap_or(spec.t_end);
    if !(t_end > 0.0) || !(opts.cfl > 0.0 && opts.cfl <= 1.0) {
        return Err(AerError::invalid(format!(
            "front options out of range: cfl {}, t_end {t_end}",
            opts.cfl
        )));
    }
    let n = grid.n;
    let d1 = grid.d1();
    let xs: Vec<f64> = (0..n).map(|i| grid.x(i)).collect();
    let rhs = FrontRhs {
        table,
        xs: &xs,
        k: spec.k,
        d1,
        a: spec.a,
    };
    let mut stops: Vec<f64> = opts
        .stop_times
        .iter()
        .copied()
        .chain([spec.t0, t_end])
        .filter(|&t| t > 0.0 && t <= t_end)
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();

    let mut h = vec![spec.h0_star; n];
    let mut hx = vec![0.0; n];
    let mut curve = FrontCurve {
        x0: grid.x0,
        period: grid.period(),
        xs: xs.clone(),
        times: vec![0.0],
        h: vec![h.clone()],
        hx: vec![hx.clone()],
    };
    let (mut k1, mut k2, mut stage) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let dt_cap = t_end / opts.min_steps.max(1) as f64;
    let mut t = 0.0;
    let mut next_stop = 0;
    while next_stop < stops.len() {
        let target = stops[next_stop];
        let speed = rhs.eval(&h, t, &mut k1)?;
        let mut dt = (opts.cfl * d1 / speed.max(1e-12)).min(dt_cap);
        let landing = t + dt >= target - 1e-12 * target.max(1.0);
        if landing {
            dt = target - t;
        }
        if !(dt > 1e-14 * t_end) {
            return Err(AerError::numerical(format!(
                "front time step underflow at t = {t}"
            )));
        }
        for i in 0..n {
            stage[i] = h[i] + dt * k1[i];
        }
        rhs.eval(&stage, t + dt, &mut k2)?;
        for i in 0..n {
            h[i] += 0.5 * dt * (k1[i] + k2[i]);
        }
        t = if landing { target } else { t + dt };
        if landing {
            next_stop += 1;
        }
        periodic_slope(&h, d1, &mut hx);
        if let Some((i, v)) = h.iter().enumerate().find(|(_, v)| !(v.abs() < spec.a)) {
            return Err(AerError::assumption(
                3,
                format!("front left domain at t = {t} (h = {v} at x = {})", xs[i]),
            ));
        }
        let max_slope = hx.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(max_slope < 1.0 / spec.k) {
            return Err(AerError::assumption(
                3,
                format!(
                    "slope bound: max h_x = {max_slope} >= 1/k = {} at t = {t}",
                    1.0 / spec.k
                ),
            ));
        }
        curve.times.push(t);
        curve.h.push(h.clone());
        curve.hx.push(hx.clone());
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ScalarFn;

    fn flat(lo: f64, hi: f64, k: f64) -> ProblemSpec {
        ProblemSpec {
            k,
            u_minus_a: ScalarFn::constant(lo),
            u_plus_a: ScalarFn::constant(hi),
            f: ScalarFn::constant(0.0),
            ..ProblemSpec::example1()
        }
    }

    #[test]
    fn symmetric_traces_keep_front_still() {
        let s = ProblemSpec {
            h0_star: 0.3,
            ..flat(-3.0, 3.0, 2.0)
        };
        let g = s.grid(40, 40).unwrap();
        let c = solve_front(&s, &g, &FrontOptions::default()).unwrap();
        for h in &c.h {
            assert!(h.iter().all(|v| (v - 0.3).abs() < 1e-12));
        }
    }

    #[test]
    fn unit_speed_front_tracks_closed_form() {
        for k in [0.5, 1.0, 2.0] {
            let s = ProblemSpec {
                h0_star: -0.5,
                ..flat(-4.0, 2.0, k)
            };
            let g = s.grid(32, 32).unwrap();
            let c = solve_front(&s, &g, &FrontOptions::default()).unwrap();
            for (t, h) in c.times.iter().zip(&c.h) {
                assert!(h.iter().all(|v| (v - (-0.5 + t)).abs() < 1e-4));
            }
            assert_eq!(*c.times.last().unwrap(), 1.0);
        }
    }

    #[test]
    fn exit_is_reported() {
        let s = ProblemSpec {
            h0_star: 1.5,
            t_end: 1.0,
            t0: 0.2,
            ..flat(-4.0, 2.0, 1.0)
        };
        let g = s.grid(16, 16).unwrap();
        let err = solve_front(&s, &g, &FrontOptions::default()).unwrap_err();
        assert!(err.to_string().contains("front left domain"), "{err}");
    }

    #[test]
    fn example1_front_stays_inside_and_lands_on_t0() {
        let s = ProblemSpec::example1();
        let g = s.grid(50, 50).unwrap();
        let c = solve_front(&s, &g, &FrontOptions::default()).unwrap();
        assert!(c.times.contains(&0.7));
        for (h, hx) in c.h.iter().zip(&c.hx) {
            assert!(h.iter().all(|v| v.abs() < 2.0));
            assert!(hx.iter().all(|&v| v < 0.5));
        }
        let (h, _) = c.on_grid(0.7, &g).unwrap();
        assert_eq!(h.len(), 51);
        assert_eq!(h[0], h[50]);
    }

    #[test]
    fn interpolation_in_time_and_space() {
        let s = ProblemSpec {
            h0_star: -0.5,
            ..flat(-4.0, 2.0, 1.0)
        };
        let g = s.grid(16, 16).unwrap();
        let c = solve_front(&s, &g, &FrontOptions::default()).unwrap();
        let (h, hx) = c.sample(0.333, 0.123).unwrap();
        assert!((h - (-0.5 + 0.333)).abs() < 1e-4 && hx.abs() < 1e-10);
        assert!(c.at(1.5).is_err());
    }
}
