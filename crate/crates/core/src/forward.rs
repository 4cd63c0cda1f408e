//! Finite-volume reference solver for the full equation
//!
//! ```text
//! u_t = mu (u_xx + u_yy) + (k/2) (u^2)_x + (1/2) (u^2)_y - f
//! ```
//!
//! Node-centred cells, Rusanov fluxes for the quadratic terms with local
//! speeds `k |u|` and `|u|`, three-point diffusion, Heun's method in time.
//! x is periodic; the rows `y = -a` and `y = a` hold the boundary traces.

use crate::asymptotics::initial_condition;
use crate::error::{AerError, Result};
use crate::grid::{Field2D, Grid2D};
use crate::problem::{ProblemSpec, Side};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: Grid2D,
    /// Courant safety factor in `(0, 1]`.
    pub cfl: f64,
    pub t_end: f64,
    /// Sorted output times in `[0, t_end]`.
    pub snapshot_times: Vec<f64>,
}

impl SolverConfig {
    pub fn new(grid: Grid2D, t_end: f64, snapshot_times: Vec<f64>) -> Self {
        Self {
            grid,
            cfl: 0.4,
            t_end,
            snapshot_times,
        }
    }

    pub fn validate(&self, spec: &ProblemSpec) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(AerError::invalid(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.t_end >= 0.0) || self.t_end > spec.t_end * (1.0 + 1e-12) {
            return Err(AerError::invalid(format!(
                "t_end = {} must lie in [0, T = {}]",
                self.t_end, spec.t_end
            )));
        }
        if self.snapshot_times.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(AerError::invalid("snapshot times must be sorted"));
        }
        if let Some(&t) = self
            .snapshot_times
            .iter()
            .find(|&&t| !(t >= 0.0 && t <= self.t_end))
        {
            return Err(AerError::invalid(format!(
                "snapshot time {t} outside [0, {}]",
                self.t_end
            )));
        }
        let g = &self.grid;
        if (g.x0 - spec.x0).abs() > 1e-12
            || (g.x1 - spec.x1).abs() > 1e-12
            || (g.a - spec.a).abs() > 1e-12
        {
            return Err(AerError::invalid(
                "solver grid does not cover the problem domain",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ForwardRun {
    /// One field per requested snapshot time, in order.
    pub snapshots: Vec<Field2D>,
    pub dt_history: Vec<f64>,
}

impl ForwardRun {
    pub fn steps(&self) -> usize {
        self.dt_history.len()
    }
}

/// Stable step `cfl / (2 mu (1/d1^2 + 1/d2^2) + k umax / d1 + umax / d2)`,
/// never larger than `cfl` times each individual diffusive and advective
/// limit.
pub fn stable_dt(mu: f64, k: f64, grid: &Grid2D, umax: f64, cfl: f64) -> f64 {
    let (d1, d2) = (grid.d1(), grid.d2());
    cfl / (2.0 * mu * (1.0 / (d1 * d1) + 1.0 / (d2 * d2)) + k * umax / d1 + umax / d2)
}

struct Operator<'a> {
    grid: Grid2D,
    mu: f64,
    k: f64,
    source: &'a [f64],
}

impl Operator<'_> {
    /// Time derivative on interior rows; boundary rows get zero.
    fn rhs(&self, u: &[f64], out: &mut [f64]) {
        let g = &self.grid;
        let (n, m, nx) = (g.n, g.m, g.nx());
        let (d1, d2) = (g.d1(), g.d2());
        let (inv_d1, inv_d2) = (1.0 / d1, 1.0 / d2);
        let (inv_d1sq, inv_d2sq) = (1.0 / (d1 * d1), 1.0 / (d2 * d2));
        let k = self.k;
        let flux_x = |l: f64, r: f64| {
            let s = k * l.abs().max(r.abs());
            -0.25 * k * (l * l + r * r) - 0.5 * s * (r - l)
        };
        let flux_y = |b: f64, t: f64| {
            let s = b.abs().max(t.abs());
            -0.25 * (b * b + t * t) - 0.5 * s * (t - b)
        };
        out[..nx].fill(0.0);
        out[m * nx..].fill(0.0);
        for j in 1..m {
            let row = &u[j * nx..j * nx + nx];
            let below = &u[(j - 1) * nx..(j - 1) * nx + nx];
            let above = &u[(j + 1) * nx..(j + 1) * nx + nx];
            for i in 0..n {
                let c = row[i];
                let l = row[(i + n - 1) % n];
                let r = row[(i + 1) % n];
                let (b, t) = (below[i], above[i]);
                let div_x = (flux_x(c, r) - flux_x(l, c)) * inv_d1;
                let div_y = (flux_y(c, t) - flux_y(b, c)) * inv_d2;
                let lap = (l - 2.0 * c + r) * inv_d1sq + (b - 2.0 * c + t) * inv_d2sq;
                out[j * nx + i] = self.mu * lap - div_x - div_y - self.source[j * nx + i];
            }
            out[j * nx + n] = out[j * nx];
        }
    }
}

/// Integrates from the tanh initial profile up to `t_end` and returns
/// fields at the requested times. Steps are clipped to land exactly on
/// snapshot times.
pub fn forward_solve(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<ForwardRun> {
    cfg.validate(spec)?;
    let grid = cfg.grid;
    let init = initial_condition(spec, &grid)?;
    forward_solve_from(spec, cfg, init)
}

/// [`forward_solve`] from an arbitrary initial field.
pub fn forward_solve_from(
    spec: &ProblemSpec,
    cfg: &SolverConfig,
    init: Field2D,
) -> Result<ForwardRun> {
    cfg.validate(spec)?;
    let grid = cfg.grid;
    if *init.grid() != grid {
        return Err(AerError::invalid("initial field is not on the solver grid"));
    }
    let nx = grid.nx();
    let source = spec.source_field(&grid)?;
    let op = Operator {
        grid,
        mu: spec.mu,
        k: spec.k,
        source: source.values(),
    };
    let bottom: Vec<f64> = (0..nx)
        .map(|i| spec.trace(Side::Minus, grid.x(i)))
        .collect();
    let top: Vec<f64> = (0..nx).map(|i| spec.trace(Side::Plus, grid.x(i))).collect();
    let m = grid.m;
    let enforce = |u: &mut [f64]| {
        u[..nx].copy_from_slice(&bottom);
        u[m * nx..].copy_from_slice(&top);
        for j in 0..=m {
            u[j * nx + grid.n] = u[j * nx];
        }
    };

    let mut u = init.into_values();
    enforce(&mut u);
    let mut k1 = vec![0.0; u.len()];
    let mut k2 = vec![0.0; u.len()];
    let mut stage = vec![0.0; u.len()];
    let mut snapshots = Vec::with_capacity(cfg.snapshot_times.len());
    let mut dt_history = Vec::new();
    let mut t = 0.0;
    let snap =
        |u: &[f64], t: f64| -> Result<Field2D> { Ok(Field2D::new(grid, u.to_vec())?.with_time(t)) };

    let targets = cfg
        .snapshot_times
        .iter()
        .map(|&t| (t, true))
        .chain([(cfg.t_end, false)]);
    for (target, keep) in targets {
        while t < target {
            let umax = u.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            let mut dt = stable_dt(spec.mu, spec.k, &grid, umax, cfg.cfl);
            let landing = t + dt >= target - 1e-12 * target.max(1.0);
            if landing {
                dt = target - t;
            }
            if !(dt > 1e-14 * cfg.t_end.max(1e-300)) && !landing {
                return Err(AerError::numerical(format!("dt underflow at t = {t}")));
            }
            op.rhs(&u, &mut k1);
            for (s, (&v, &d)) in stage.iter_mut().zip(u.iter().zip(&k1)) {
                *s = v + dt * d;
            }
            enforce(&mut stage);
            op.rhs(&stage, &mut k2);
            for ((v, &a), &b) in u.iter_mut().zip(&k1).zip(&k2) {
                *v += 0.5 * dt * (a + b);
            }
            enforce(&mut u);
            t = if landing { target } else { t + dt };
            dt_history.push(dt);
            if u.iter().any(|v| !v.is_finite()) {
                return Err(AerError::numerical(format!("solver blow-up at t = {t}")));
            }
        }
        if keep {
            snapshots.push(snap(&u, target)?);
        }
    }
    Ok(ForwardRun {
        snapshots,
        dt_history,
    })
}
