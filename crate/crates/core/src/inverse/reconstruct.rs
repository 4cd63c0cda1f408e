//! Source recovery from the reduced relation `f = u (k u_x + u_y)`.
//!
//! The product `g` is formed on retained nodes only; the fit
//!
//! ```text
//! min_f  sum_retained (f - g)^2 + eps (||f||^2 + ||f_x||^2 + ||f_y||^2)
//! ```
//!
//! runs over every unique node, so band values come from the H1 coupling.

use super::smoothing::RegionFit;
use crate::error::{AerError, Result};
use crate::grid::{rel_l2_error, Field2D, Grid2D, PartialField};
use crate::linalg::{pcg, Csr};

/// Weight used when the noise level is zero.
pub const EPS_FLOOR: f64 = 1e-12;

#[inline]
pub fn source_product(k: f64, u: f64, ux: f64, uy: f64) -> f64 {
    u * (k * ux + uy)
}

/// `g = u (k u_x + u_y)` on the fitted regions, NaN elsewhere.
pub fn pre_approximate_source(k: f64, fits: &[&RegionFit]) -> Result<PartialField> {
    let grid = match fits.first() {
        Some(f) => *f.region.grid(),
        None => return Err(AerError::invalid("no fitted regions")),
    };
    let mut g = PartialField::empty(grid);
    for fit in fits {
        if *fit.region.grid() != grid {
            return Err(AerError::invalid("fitted regions live on different grids"));
        }
        for (idx, (i, j)) in fit.region.nodes().enumerate() {
            g.set(
                i,
                j,
                source_product(k, fit.values[idx], fit.ux[idx], fit.uy[idx]),
            );
        }
    }
    g.sync_seam();
    Ok(g)
}

/// Product from full-grid fields on the nodes for which `retain(i, j)` holds.
pub fn pre_approximate_from_fields(
    k: f64,
    u: &Field2D,
    ux: &Field2D,
    uy: &Field2D,
    retain: impl Fn(usize, usize) -> bool,
) -> Result<PartialField> {
    let grid = *u.grid();
    if *ux.grid() != grid || *uy.grid() != grid {
        return Err(AerError::invalid(
            "gradient fields are not on the data grid",
        ));
    }
    let mut g = PartialField::empty(grid);
    for j in 0..=grid.m {
        for i in 0..grid.n {
            if retain(i, j) {
                g.set(
                    i,
                    j,
                    source_product(k, u.get(i, j), ux.get(i, j), uy.get(i, j)),
                );
            }
        }
    }
    g.sync_seam();
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructOptions {
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            cg_tol: 1e-10,
            cg_max_iter: 50_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub f_delta: Field2D,
    pub eps: f64,
    /// Relative trapezoidal L2 error against the exact source, when given.
    pub rel_error: Option<f64>,
    /// `sum_retained (f - g)^2`.
    pub residual: f64,
    pub retained: usize,
    pub cg_iterations: usize,
}

/// Unknown index of unique node `(i, j)`.
#[inline]
fn unknown(grid: &Grid2D, i: usize, j: usize) -> usize {
    j * grid.n + i % grid.n
}

/// Periodic central `Dx` and `Dy` (one-sided at `j = 0, m`) on unique nodes.
fn first_difference_operators(grid: &Grid2D) -> (Csr, Csr) {
    let (n, m) = (grid.n, grid.m);
    let size = n * (m + 1);
    let cx = 0.5 / grid.d1();
    let cy = 0.5 / grid.d2();
    let mut tx = Vec::with_capacity(2 * size);
    let mut ty = Vec::with_capacity(3 * size);
    for j in 0..=m {
        for i in 0..n {
            let r = unknown(grid, i, j);
            tx.push((r, unknown(grid, i + 1, j), cx));
            tx.push((r, unknown(grid, i + n - 1, j), -cx));
            let stencil: [(usize, f64); 3] = if j == 0 {
                [(0, -3.0), (1, 4.0), (2, -1.0)]
            } else if j == m {
                [(m, 3.0), (m - 1, -4.0), (m - 2, 1.0)]
            } else {
                [(j + 1, 1.0), (j - 1, -1.0), (j, 0.0)]
            };
            ty.extend(
                stencil
                    .iter()
                    .map(|&(jj, c)| (r, unknown(grid, i, jj), c * cy)),
            );
        }
    }
    (
        Csr::from_triplets(size, size, tx),
        Csr::from_triplets(size, size, ty),
    )
}

/// Fits `f` to the finite entries of `g` with weight `eps`.
pub fn reconstruct_source(
    g: &PartialField,
    eps: f64,
    exact: Option<&Field2D>,
    opts: &ReconstructOptions,
) -> Result<ReconstructionResult> {
    let grid = *g.grid();
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(AerError::invalid(format!(
            "regularization weight must be positive, got {eps}"
        )));
    }
    let (n, m) = (grid.n, grid.m);
    let size = n * (m + 1);
    let mut data = vec![0.0; size];
    let mut mask = vec![0.0; size];
    for j in 0..=m {
        for i in 0..n {
            if let Some(v) = g.get(i, j) {
                data[unknown(&grid, i, j)] = v;
                mask[unknown(&grid, i, j)] = 1.0;
            }
        }
    }
    let retained = mask.iter().filter(|&&w| w > 0.0).count();
    if retained == 0 {
        return Err(AerError::invalid("empty retained set"));
    }

    let weights: Vec<f64> = (0..size)
        .map(|r| grid.weight(r % n, r / n) * if r % n == 0 { 2.0 } else { 1.0 })
        .collect();
    let (dx, dy) = first_difference_operators(&grid);
    let penalty = Csr::diagonal(&weights)
        .add_scaled(1.0, &dx.gram(&weights))
        .add_scaled(1.0, &dy.gram(&weights));
    let system = Csr::diagonal(&mask).add_scaled(eps, &penalty);

    // Symmetric Jacobi scaling so the stopping test sees band rows, whose
    // entries are only O(eps), on the same footing as data rows.
    let scale: Vec<f64> = system.diag().iter().map(|d| 1.0 / d.sqrt()).collect();
    let scaled = system.scaled_sym(&scale);
    let rhs: Vec<f64> = data
        .iter()
        .zip(&mask)
        .zip(&scale)
        .map(|((d, w), s)| d * w * s)
        .collect();
    let mut z = vec![0.0; size];
    let report = pcg(
        |v, o| scaled.matvec(v, o),
        &rhs,
        &mut z,
        None,
        opts.cg_tol,
        opts.cg_max_iter,
    );
    if !report.converged {
        return Err(AerError::numerical(format!(
            "reconstruction CG did not converge: relative residual {:e} after {} iterations",
            report.rel_residual, report.iterations
        )));
    }
    let mut values = vec![0.0; grid.len()];
    for j in 0..=m {
        for i in 0..=n {
            let r = unknown(&grid, i, j);
            values[grid.idx(i, j)] = z[r] * scale[r];
        }
    }
    let f_delta = Field2D::new(grid, values)?;
    let residual = (0..size)
        .filter(|&r| mask[r] > 0.0)
        .map(|r| (z[r] * scale[r] - data[r]).powi(2))
        .sum();
    let rel_error = exact.map(|e| rel_l2_error(&f_delta, e)).transpose()?;
    Ok(ReconstructionResult {
        f_delta,
        eps,
        rel_error,
        residual,
        retained,
        cg_iterations: report.iterations,
    })
}

/// Derivatives used for the measured-gradient branch and for noise-free
/// checks: periodic central in x, one-sided in y at the boundary rows.
pub fn grid_gradients(u: &Field2D) -> (Field2D, Field2D) {
    (u.diff_x(), u.diff_y())
}
