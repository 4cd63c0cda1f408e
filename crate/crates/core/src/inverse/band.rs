//! Rows excluded around the transition layer.

use crate::asymptotics::{transition_width, FrontCurve};
use crate::error::{AerError, Result};
use crate::grid::{Grid2D, RegionMask};
use crate::problem::ProblemSpec;

/// Layer band on a grid: a global row pair plus per-column bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerBand {
    pub global: RegionMask,
    /// Per unique column: largest retained row below the layer.
    pub lower_top: Vec<usize>,
    /// Per unique column: smallest retained row above the layer.
    pub upper_bottom: Vec<usize>,
    /// Front, slope and layer width per unique column.
    pub h: Vec<f64>,
    pub hx: Vec<f64>,
    pub width: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskMode {
    /// One row pair for all columns.
    #[default]
    Global,
    /// Each column excludes only its own band.
    PerColumn,
}

impl MaskMode {
    pub fn name(self) -> &'static str {
        match self {
            MaskMode::Global => "global",
            MaskMode::PerColumn => "per_column",
        }
    }
}

impl LayerBand {
    /// Row bounds `(lower_top, upper_bottom)` per unique column under `mode`.
    pub fn bounds(&self, mode: MaskMode) -> (Vec<usize>, Vec<usize>) {
        match mode {
            MaskMode::Global => {
                let n = self.lower_top.len();
                (vec![self.global.j_lo; n], vec![self.global.j_hi; n])
            }
            MaskMode::PerColumn => (self.lower_top.clone(), self.upper_bottom.clone()),
        }
    }
}

/// Largest `j` with `y_j <= y` (None below the grid).
fn row_at_or_below(grid: &Grid2D, y: f64) -> Option<usize> {
    let s = (y + grid.a) / grid.d2();
    if s < -1e-9 {
        return None;
    }
    Some(((s + 1e-9).floor() as usize).min(grid.m))
}

/// Smallest `j` with `y_j >= y` (None above the grid).
fn row_at_or_above(grid: &Grid2D, y: f64) -> Option<usize> {
    let s = (y + grid.a) / grid.d2();
    if s > grid.m as f64 + 1e-9 {
        return None;
    }
    Some(((s - 1e-9).ceil().max(0.0)) as usize)
}

/// Excludes `(h0 - dh/2, h0 + dh/2)` at time `t0`: `j_lo` is the largest row
/// with `y <= min_x(h0 - dh/2)` and `j_hi` the smallest with
/// `y >= max_x(h0 + dh/2)`.
pub fn layer_band(
    front: &FrontCurve,
    spec: &ProblemSpec,
    t0: f64,
    grid: &Grid2D,
) -> Result<LayerBand> {
    let (h, hx) = front.on_grid(t0, grid)?;
    let n = grid.n;
    let too_wide = || AerError::numerical("layer too wide for this grid");
    let mut width = Vec::with_capacity(n);
    let mut lower_top = Vec::with_capacity(n);
    let mut upper_bottom = Vec::with_capacity(n);
    let (mut lo_min, mut hi_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let w = transition_width(spec, grid.x(i), h[i], hx[i])?;
        let (lo, hi) = (h[i] - 0.5 * w, h[i] + 0.5 * w);
        lo_min = lo_min.min(lo);
        hi_max = hi_max.max(hi);
        lower_top.push(row_at_or_below(grid, lo).ok_or_else(too_wide)?);
        upper_bottom.push(row_at_or_above(grid, hi).ok_or_else(too_wide)?);
        width.push(w);
    }
    let j_lo = row_at_or_below(grid, lo_min).ok_or_else(too_wide)?;
    let j_hi = row_at_or_above(grid, hi_max).ok_or_else(too_wide)?;
    if j_lo >= j_hi {
        return Err(AerError::numerical(format!(
            "empty layer band: j_lo = {j_lo}, j_hi = {j_hi}"
        )));
    }
    let global = RegionMask::new(j_lo, j_hi, grid.m)?;
    Ok(LayerBand {
        global,
        lower_top,
        upper_bottom,
        h: h[..n].to_vec(),
        hx: hx[..n].to_vec(),
        width,
    })
}
