//! End-to-end recovery: forward snapshot, noise, layer band, regional
//! smoothing, source fit and error metrics.

use super::band::{layer_band, LayerBand, MaskMode};
use super::noise::{NoiseKind, NoiseSource, PRNG_NAME};
use super::reconstruct::{
    grid_gradients, pre_approximate_from_fields, pre_approximate_source, reconstruct_source,
    ReconstructOptions, ReconstructionResult, EPS_FLOOR,
};
use super::region::Region;
use super::smoothing::{smooth_values, RegionFit, SmoothingOptions};
use crate::asymptotics::{assemble_u0, solve_front, FrontCurve, FrontOptions};
use crate::error::{AerError, Result};
use crate::forward::{forward_solve, SolverConfig};
use crate::grid::{rel_l2_error, Field2D, Grid2D, PartialField, RegionMask};
use crate::problem::{ProblemSpec, Side};
use rayon::prelude::*;

/// Run-time knobs of one recovery.
#[derive(Debug, Clone, PartialEq)]
pub struct AerConfig {
    pub delta: f64,
    pub seed: u64,
    pub noise: NoiseKind,
    pub mask_mode: MaskMode,
    /// Use noisy measured gradients and skip smoothing.
    pub gradient_measured: bool,
    pub smoothing: SmoothingOptions,
    pub reconstruct: ReconstructOptions,
}

impl Default for AerConfig {
    fn default() -> Self {
        Self {
            delta: 0.01,
            seed: 0,
            noise: NoiseKind::Uniform,
            mask_mode: MaskMode::Global,
            gradient_measured: false,
            smoothing: SmoothingOptions::default(),
            reconstruct: ReconstructOptions::default(),
        }
    }
}

/// Noisy samples at the observation time.
#[derive(Debug, Clone)]
pub struct Observation {
    pub grid: Grid2D,
    pub t0: f64,
    pub u_delta: Field2D,
    pub delta: f64,
    pub seed: u64,
    pub noise: NoiseKind,
    pub mask: RegionMask,
    /// Per-column retained bounds `(lower_top, upper_bottom)`.
    pub bounds: (Vec<usize>, Vec<usize>),
    /// Measured `(u_x, u_y)`, if any.
    pub gradients: Option<(Field2D, Field2D)>,
}

impl Observation {
    pub fn retains(&self, i: usize, j: usize) -> bool {
        let i = i % self.grid.n;
        j <= self.bounds.0[i] || j >= self.bounds.1[i]
    }

    pub fn region(&self, side: Side) -> Result<Region> {
        match side {
            Side::Minus => Region::lower(self.grid, &self.bounds.0),
            Side::Plus => Region::upper(self.grid, &self.bounds.1),
        }
    }
}

/// Both regional fits.
#[derive(Debug, Clone)]
pub struct SmoothingResult {
    pub lower: RegionFit,
    pub upper: RegionFit,
}

impl SmoothingResult {
    pub fn eps_minus(&self) -> f64 {
        self.lower.eps
    }

    pub fn eps_plus(&self) -> f64 {
        self.upper.eps
    }

    pub fn achieved_misfits(&self) -> (f64, f64) {
        (self.lower.misfit, self.upper.misfit)
    }

    /// Smoothed values of both regions on the full grid.
    pub fn u_eps(&self) -> PartialField {
        let mut out = self.lower.region.scatter(&self.lower.values);
        for ((i, j), &v) in self.upper.region.nodes().zip(&self.upper.values) {
            out.set(i, j, v);
        }
        out.sync_seam();
        out
    }
}

/// Smooths one side of the band of `obs`.
pub fn smooth_region(obs: &Observation, side: Side, opts: &SmoothingOptions) -> Result<RegionFit> {
    let region = obs.region(side)?;
    let data = region.gather(&obs.u_delta);
    smooth_values(&region, &data, obs.delta, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    Smoothed,
    Measured,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Smoothed => "smoothed",
            Branch::Measured => "measured_gradients",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AerMetrics {
    pub rel_err_u0: f64,
    pub rel_err_f: f64,
    pub eps_minus: Option<f64>,
    pub eps_plus: Option<f64>,
    pub eps_f: f64,
    pub misfit_minus: Option<f64>,
    pub misfit_plus: Option<f64>,
    pub m_minus: usize,
    pub m_plus: usize,
    pub delta: f64,
    pub seed: u64,
    pub prng: &'static str,
    pub branch: Branch,
}

#[derive(Debug, Clone)]
pub struct AerOutcome {
    pub observation: Observation,
    pub smoothing: Option<SmoothingResult>,
    /// Product `u (k u_x + u_y)` on retained nodes.
    pub g: PartialField,
    pub reconstruction: ReconstructionResult,
    pub metrics: AerMetrics,
}

/// Noise-independent state shared by every recovery of one problem.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub spec: ProblemSpec,
    pub forward_grid: Grid2D,
    pub grid: Grid2D,
    /// Forward solution at the observation time on the forward grid.
    pub snapshot_fine: Field2D,
    /// Forward solution restricted to the observation grid.
    pub u_true: Field2D,
    /// Gradients of the forward solution, restricted.
    pub gradients_true: (Field2D, Field2D),
    pub front: FrontCurve,
    pub band: LayerBand,
    pub f_exact: Field2D,
    pub u0: Field2D,
    /// `||U0 - u|| / ||u||` on the forward grid.
    pub rel_err_u0: f64,
}

/// Samples a fine field at the nodes of a coarser grid that divides it.
pub fn restrict(fine: &Field2D, coarse: &Grid2D) -> Result<Field2D> {
    let f = fine.grid();
    let same_domain = (f.x0 - coarse.x0).abs() < 1e-12
        && (f.x1 - coarse.x1).abs() < 1e-12
        && (f.a - coarse.a).abs() < 1e-12;
    if !same_domain || f.n % coarse.n != 0 || f.m % coarse.m != 0 {
        return Err(AerError::invalid(format!(
            "forward grid {}x{} is not a refinement of the observation grid {}x{}",
            f.n, f.m, coarse.n, coarse.m
        )));
    }
    let (rx, ry) = (f.n / coarse.n, f.m / coarse.m);
    let mut values = Vec::with_capacity(coarse.len());
    for j in 0..=coarse.m {
        for i in 0..=coarse.n {
            values.push(fine.get(i * rx, j * ry));
        }
    }
    let out = Field2D::new(*coarse, values)?;
    Ok(match fine.time {
        Some(t) => out.with_time(t),
        None => out,
    })
}

impl Pipeline {
    /// Runs the forward solver up to the observation time on `solver.grid`
    /// (its `t_end` and snapshot list are replaced) and prepares the
    /// `obs_n x obs_m` observation grid.
    pub fn prepare(
        spec: &ProblemSpec,
        solver: &SolverConfig,
        obs_n: usize,
        obs_m: usize,
    ) -> Result<Self> {
        spec.validate().map_err(|e| e.in_stage("problem"))?;
        let t0 = spec.t0;
        let grid = spec.grid(obs_n, obs_m).map_err(|e| e.in_stage("problem"))?;
        let forward_grid = solver.grid;
        let cfg = SolverConfig {
            t_end: t0,
            snapshot_times: vec![t0],
            ..solver.clone()
        };
        let snapshot_fine = forward_solve(spec, &cfg)
            .map_err(|e| e.in_stage("forward"))?
            .snapshots
            .pop()
            .ok_or_else(|| {
                AerError::numerical("forward solver returned no snapshot").in_stage("forward")
            })?;
        let u_true = restrict(&snapshot_fine, &grid).map_err(|e| e.in_stage("observation"))?;
        let (ux, uy) = grid_gradients(&snapshot_fine);
        let gradients_true = (
            restrict(&ux, &grid).map_err(|e| e.in_stage("observation"))?,
            restrict(&uy, &grid).map_err(|e| e.in_stage("observation"))?,
        );
        let front_opts = FrontOptions {
            t_end: Some(t0),
            ..FrontOptions::default()
        };
        let front =
            solve_front(spec, &forward_grid, &front_opts).map_err(|e| e.in_stage("front"))?;
        let band = layer_band(&front, spec, t0, &grid).map_err(|e| e.in_stage("layer band"))?;
        let u0 =
            assemble_u0(spec, &front, &forward_grid, t0).map_err(|e| e.in_stage("asymptotics"))?;
        let rel_err_u0 = rel_l2_error(&u0, &snapshot_fine)?;
        let f_exact = spec.source_field(&grid)?;
        Ok(Self {
            spec: spec.clone(),
            forward_grid,
            grid,
            snapshot_fine,
            u_true,
            gradients_true,
            front,
            band,
            f_exact,
            u0,
            rel_err_u0,
        })
    }

    /// Draws the noisy observation. Gradient noise, when measured, continues
    /// the same stream after the values.
    pub fn observe(&self, cfg: &AerConfig) -> Result<Observation> {
        if !(cfg.delta >= 0.0) || !cfg.delta.is_finite() {
            return Err(AerError::invalid(format!(
                "noise level must be >= 0, got {}",
                cfg.delta
            )));
        }
        let mut source = NoiseSource::new(cfg.delta, cfg.seed, cfg.noise);
        let u_delta = source.apply(&self.u_true);
        let gradients = cfg.gradient_measured.then(|| {
            (
                source.apply(&self.gradients_true.0),
                source.apply(&self.gradients_true.1),
            )
        });
        Ok(Observation {
            grid: self.grid,
            t0: self.spec.t0,
            u_delta,
            delta: cfg.delta,
            seed: cfg.seed,
            noise: cfg.noise,
            mask: self.band.global,
            bounds: self.band.bounds(cfg.mask_mode),
            gradients,
        })
    }

    pub fn run(&self, cfg: &AerConfig) -> Result<AerOutcome> {
        let obs = self.observe(cfg).map_err(|e| e.in_stage("noise"))?;
        let k = self.spec.k;
        let (smoothing, g, branch) = match &obs.gradients {
            Some((ux, uy)) => {
                let g =
                    pre_approximate_from_fields(k, &obs.u_delta, ux, uy, |i, j| obs.retains(i, j))?;
                (None, g, Branch::Measured)
            }
            None => {
                let (lower, upper) = rayon::join(
                    || {
                        smooth_region(&obs, Side::Minus, &cfg.smoothing)
                            .map_err(|e| e.in_stage("smoothing (lower)"))
                    },
                    || {
                        smooth_region(&obs, Side::Plus, &cfg.smoothing)
                            .map_err(|e| e.in_stage("smoothing (upper)"))
                    },
                );
                let result = SmoothingResult {
                    lower: lower?,
                    upper: upper?,
                };
                let g = pre_approximate_source(k, &[&result.lower, &result.upper])?;
                (Some(result), g, Branch::Smoothed)
            }
        };
        let eps_f = (cfg.delta * cfg.delta).max(EPS_FLOOR);
        let reconstruction = reconstruct_source(&g, eps_f, Some(&self.f_exact), &cfg.reconstruct)
            .map_err(|e| e.in_stage("reconstruction"))?;
        let metrics = AerMetrics {
            rel_err_u0: self.rel_err_u0,
            rel_err_f: reconstruction.rel_error.unwrap_or(f64::NAN),
            eps_minus: smoothing.as_ref().map(|s| s.eps_minus()),
            eps_plus: smoothing.as_ref().map(|s| s.eps_plus()),
            eps_f,
            misfit_minus: smoothing.as_ref().map(|s| s.lower.misfit),
            misfit_plus: smoothing.as_ref().map(|s| s.upper.misfit),
            m_minus: obs.mask.j_lo,
            m_plus: obs.mask.j_hi,
            delta: cfg.delta,
            seed: cfg.seed,
            prng: PRNG_NAME,
            branch,
        };
        Ok(AerOutcome {
            observation: obs,
            smoothing,
            g,
            reconstruction,
            metrics,
        })
    }

    /// Runs every configuration concurrently; results keep the input order.
    pub fn run_many(&self, cfgs: &[AerConfig]) -> Vec<Result<AerOutcome>> {
        cfgs.par_iter().map(|c| self.run(c)).collect()
    }
}

/// [`Pipeline::prepare`] followed by one [`Pipeline::run`].
pub fn run_aer_pipeline(
    spec: &ProblemSpec,
    solver: &SolverConfig,
    obs_n: usize,
    obs_m: usize,
    cfg: &AerConfig,
) -> Result<AerOutcome> {
    Pipeline::prepare(spec, solver, obs_n, obs_m)?.run(cfg)
}

/// Median of finite values; `None` when there are none.
pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}
