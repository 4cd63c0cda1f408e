//! Uniform tensor grids, scalar fields and finite-difference operators.
//!
//! A [`Grid2D`] covers `[x0, x1] x [-a, a]` with `n` subdivisions in x and
//! `m` in y. The x direction is periodic with period `x1 - x0`: column `n`
//! holds the same physical points as column `0`. Fields store all
//! `(n + 1) * (m + 1)` nodes row by row (`j` outer, `i` inner); periodic
//! operators read columns `0..n` and copy column `0` into column `n`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field has {got} samples, grid needs {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("non-finite sample at node ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("zero-norm reference")]
    ZeroNormReference,
    #[error("invalid region mask: {0}")]
    InvalidMask(String),
}

/// Uniform node grid, periodic in x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x0: f64,
    pub x1: f64,
    /// Half-width of the y interval `[-a, a]`.
    pub a: f64,
    pub n: usize,
    pub m: usize,
}

impl Grid2D {
    pub fn new(x0: f64, x1: f64, a: f64, n: usize, m: usize) -> Result<Self, GridError> {
        if n < 2 || m < 2 {
            return Err(GridError::InvalidGrid(format!(
                "need n >= 2 and m >= 2, got n = {n}, m = {m}"
            )));
        }
        if !(x1 > x0) || !x0.is_finite() || !x1.is_finite() {
            return Err(GridError::InvalidGrid(format!(
                "need x1 > x0, got [{x0}, {x1}]"
            )));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(GridError::InvalidGrid(format!("need a > 0, got {a}")));
        }
        Ok(Self { x0, x1, a, n, m })
    }

    pub fn period(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn d1(&self) -> f64 {
        (self.x1 - self.x0) / self.n as f64
    }

    pub fn d2(&self) -> f64 {
        2.0 * self.a / self.m as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.d1()
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.a + j as f64 * self.d2()
    }

    pub fn nx(&self) -> usize {
        self.n + 1
    }

    pub fn ny(&self) -> usize {
        self.m + 1
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..=self.m).map(|j| self.y(j)).collect()
    }

    /// Trapezoidal quadrature weight of node `(i, j)` over the full rectangle.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let wx = if i == 0 || i == self.n { 0.5 } else { 1.0 };
        let wy = if j == 0 || j == self.m { 0.5 } else { 1.0 };
        wx * wy * self.d1() * self.d2()
    }

    /// Same geometry with `factor` times as many subdivisions per direction.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n: self.n * factor,
            m: self.m * factor,
            ..*self
        }
    }
}

/// Scalar samples bound to a [`Grid2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    grid: Grid2D,
    values: Vec<f64>,
    pub time: Option<f64>,
}

impl Field2D {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite {
                i: k % grid.nx(),
                j: k / grid.nx(),
            });
        }
        Ok(Self {
            grid,
            values,
            time: None,
        })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            time: None,
        }
    }

    /// Samples `f(x, y)` at every node. Non-finite samples are rejected.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self, GridError> {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..=grid.m {
            let y = grid.y(j);
            for i in 0..=grid.n {
                values.push(f(grid.x(i), y));
            }
        }
        Self::new(grid, values)
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.idx(i, j);
        self.values[k] = v;
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let nx = self.grid.nx();
        &self.values[j * nx..(j + 1) * nx]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Elementwise map, keeping grid and timestamp.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field2D {
        Field2D {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            time: self.time,
        }
    }

    pub fn zip_map(
        &self,
        other: &Field2D,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Field2D, GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        Ok(Field2D {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            time: self.time,
        })
    }

    /// Copies column 0 into column n.
    pub fn sync_seam(&mut self) {
        let n = self.grid.n;
        for j in 0..=self.grid.m {
            let v = self.get(0, j);
            self.set(n, j, v);
        }
    }

    /// Central difference in x with periodic wrap.
    pub fn diff_x(&self) -> Field2D {
        let g = self.grid;
        let (n, inv) = (g.n, 1.0 / (2.0 * g.d1()));
        self.periodic_x_stencil(|row, i| (row[(i + 1) % n] - row[(i + n - 1) % n]) * inv)
    }

    /// Three-point second difference in x with periodic wrap.
    pub fn diff2_x(&self) -> Field2D {
        let g = self.grid;
        let (n, inv) = (g.n, 1.0 / (g.d1() * g.d1()));
        self.periodic_x_stencil(|row, i| {
            (row[(i + 1) % n] - 2.0 * row[i] + row[(i + n - 1) % n]) * inv
        })
    }

    /// Central difference in y, second-order one-sided at `j = 0` and `j = m`.
    pub fn diff_y(&self) -> Field2D {
        let g = self.grid;
        let mut out = Field2D::zeros(g);
        out.time = self.time;
        let mut column = vec![0.0; g.ny()];
        let mut deriv = vec![0.0; g.ny()];
        for i in 0..=g.n {
            for (j, c) in column.iter_mut().enumerate() {
                *c = self.get(i, j);
            }
            first_derivative_1d(&column, g.d2(), &mut deriv);
            for (j, &d) in deriv.iter().enumerate() {
                out.set(i, j, d);
            }
        }
        out
    }

    /// Three-point second difference in y, four-point one-sided at the
    /// boundary rows (exact on cubics).
    pub fn diff2_y(&self) -> Field2D {
        let g = self.grid;
        let mut out = Field2D::zeros(g);
        out.time = self.time;
        let mut column = vec![0.0; g.ny()];
        let mut deriv = vec![0.0; g.ny()];
        for i in 0..=g.n {
            for (j, c) in column.iter_mut().enumerate() {
                *c = self.get(i, j);
            }
            second_derivative_1d(&column, g.d2(), &mut deriv);
            for (j, &d) in deriv.iter().enumerate() {
                out.set(i, j, d);
            }
        }
        out
    }

    fn periodic_x_stencil(&self, op: impl Fn(&[f64], usize) -> f64) -> Field2D {
        let g = self.grid;
        let mut out = Field2D::zeros(g);
        out.time = self.time;
        for j in 0..=g.m {
            let row = self.row(j);
            for i in 0..g.n {
                out.set(i, j, op(row, i));
            }
        }
        out.sync_seam();
        out
    }

    /// Trapezoidal discrete L2 norm over the full rectangle.
    pub fn l2_norm(&self) -> f64 {
        let g = &self.grid;
        let mut acc = 0.0;
        for j in 0..=g.m {
            for i in 0..=g.n {
                let v = self.get(i, j);
                acc += g.weight(i, j) * v * v;
            }
        }
        acc.sqrt()
    }
}

/// `||approx - exact|| / ||exact||` in the trapezoidal L2 norm.
pub fn rel_l2_error(approx: &Field2D, exact: &Field2D) -> Result<f64, GridError> {
    let diff = approx.zip_map(exact, |a, e| a - e)?;
    let denom = exact.l2_norm();
    if denom == 0.0 {
        return Err(GridError::ZeroNormReference);
    }
    Ok(diff.l2_norm() / denom)
}

/// Node values where NaN marks a node without data (excluded rows,
/// regions). Present values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl PartialField {
    /// All nodes absent.
    pub fn empty(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![f64::NAN; grid.len()],
        }
    }

    /// Rejects infinities; NaN entries are absent nodes.
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| v.is_infinite()) {
            return Err(GridError::NonFinite {
                i: k % grid.nx(),
                j: k / grid.nx(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.values[self.grid.idx(i, j)];
        (!v.is_nan()).then_some(v)
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.idx(i, j);
        self.values[k] = v;
    }

    /// Present unique nodes (seam column excluded).
    pub fn count(&self) -> usize {
        (0..=self.grid.m)
            .map(|j| {
                (0..self.grid.n)
                    .filter(|&i| self.get(i, j).is_some())
                    .count()
            })
            .sum()
    }

    pub fn sync_seam(&mut self) {
        let n = self.grid.n;
        for j in 0..=self.grid.m {
            let v = self.values[self.grid.idx(0, j)];
            self.set(n, j, v);
        }
    }

    /// Full field when every node is present.
    pub fn to_field(&self) -> Result<Field2D, GridError> {
        Field2D::new(self.grid, self.values.clone())
    }
}

impl From<Field2D> for PartialField {
    fn from(f: Field2D) -> Self {
        Self {
            grid: f.grid,
            values: f.values,
        }
    }
}

/// Rows excluded around the transition layer: rows `0..=j_lo` and
/// `j_hi..=m` are retained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionMask {
    pub j_lo: usize,
    pub j_hi: usize,
}

impl RegionMask {
    pub fn new(j_lo: usize, j_hi: usize, m: usize) -> Result<Self, GridError> {
        if j_lo >= j_hi || j_hi > m {
            return Err(GridError::InvalidMask(format!(
                "need 0 <= j_lo < j_hi <= m, got j_lo = {j_lo}, j_hi = {j_hi}, m = {m}"
            )));
        }
        Ok(Self { j_lo, j_hi })
    }

    pub fn retains(&self, j: usize) -> bool {
        j <= self.j_lo || j >= self.j_hi
    }
}

/// Second-order first derivative of uniformly spaced samples; one-sided
/// three-point stencils at both ends. `values.len()` must be at least 3.
pub(crate) fn first_derivative_1d(values: &[f64], h: f64, out: &mut [f64]) {
    let len = values.len();
    debug_assert!(len >= 3 && out.len() == len);
    let inv = 1.0 / (2.0 * h);
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) * inv;
    for j in 1..len - 1 {
        out[j] = (values[j + 1] - values[j - 1]) * inv;
    }
    out[len - 1] = (3.0 * values[len - 1] - 4.0 * values[len - 2] + values[len - 3]) * inv;
}

/// Second derivative of uniformly spaced samples. The end points use the
/// four-point one-sided stencil when at least four samples exist, and fall
/// back to the lone three-point stencil otherwise.
pub(crate) fn second_derivative_1d(values: &[f64], h: f64, out: &mut [f64]) {
    let len = values.len();
    debug_assert!(len >= 3 && out.len() == len);
    let inv = 1.0 / (h * h);
    for j in 1..len - 1 {
        out[j] = (values[j - 1] - 2.0 * values[j] + values[j + 1]) * inv;
    }
    if len >= 4 {
        out[0] = (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) * inv;
        let l = len - 1;
        out[l] =
            (2.0 * values[l] - 5.0 * values[l - 1] + 4.0 * values[l - 2] - values[l - 3]) * inv;
    } else {
        out[0] = out[1];
        out[len - 1] = out[1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize, m: usize) -> Grid2D {
        Grid2D::new(-2.0, 2.0, 1.0, n, m).unwrap()
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid2D::new(0.0, 1.0, 1.0, 1, 4).is_err());
        assert!(Grid2D::new(1.0, 1.0, 1.0, 4, 4).is_err());
        assert!(Grid2D::new(0.0, 1.0, 0.0, 4, 4).is_err());
    }

    #[test]
    fn spacing_scales_with_length() {
        let g = Grid2D::new(-2.0, 2.0, 2.0, 50, 50).unwrap();
        assert!((g.d1() - 0.08).abs() < 1e-15);
        assert!((g.d2() - 0.08).abs() < 1e-15);
        assert_eq!(g.y(31), -2.0 + 31.0 * 0.08);
    }

    #[test]
    fn derivatives_of_constant_vanish() {
        let f = Field2D::from_fn(grid(16, 12), |_, _| 3.5).unwrap();
        for d in [f.diff_x(), f.diff_y(), f.diff2_x(), f.diff2_y()] {
            assert_eq!(d.max_abs(), 0.0);
        }
    }

    #[test]
    fn diff_x_of_sine_is_second_order() {
        let err = |n: usize| {
            let g = grid(n, 4);
            let k = 2.0 * PI / g.period();
            let f = Field2D::from_fn(g, |x, _| (k * x).sin()).unwrap();
            let exact = Field2D::from_fn(g, |x, _| k * (k * x).cos()).unwrap();
            f.diff_x().zip_map(&exact, |a, b| a - b).unwrap().max_abs()
        };
        let e64 = err(64);
        assert!(e64 < 0.01, "e64 = {e64}");
        let ratio = err(32) / e64;
        assert!((ratio - 4.0).abs() < 0.1, "ratio = {ratio}");
    }

    #[test]
    fn diff_x_wraps_non_periodic_data() {
        let g = grid(8, 3);
        let f = Field2D::from_fn(g, |x, _| x).unwrap();
        let d = f.diff_x();
        // Interior slope is 1, the seam sees the jump from x1 back to x0.
        assert!((d.get(3, 1) - 1.0).abs() < 1e-12);
        assert!(d.get(0, 1) < -1.0);
        assert_eq!(d.get(0, 1), d.get(8, 1));
    }

    #[test]
    fn diff_y_exact_on_linear_and_close_on_quadratic() {
        let g = grid(4, 50);
        let lin = Field2D::from_fn(g, |_, y| 2.0 + y).unwrap().diff_y();
        assert!(lin.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let quad = Field2D::from_fn(g, |_, y| y * y).unwrap().diff_y();
        for j in 0..=g.m {
            assert!((quad.get(1, j) - 2.0 * g.y(j)).abs() < 1e-10);
        }
    }

    #[test]
    fn second_differences() {
        let g = grid(32, 20);
        let affine = Field2D::from_fn(g, |_, y| 1.0 + 0.5 * y).unwrap();
        assert!(affine.diff2_x().max_abs() < 1e-12);
        assert!(affine.diff2_y().max_abs() < 1e-10);

        let sq = Field2D::from_fn(g, |_, y| y * y).unwrap().diff2_y();
        assert!(sq.values().iter().all(|&v| (v - 2.0).abs() < 1e-9));

        let k = 2.0 * PI / g.period();
        let c = Field2D::from_fn(g, |x, _| (k * x).cos()).unwrap().diff2_x();
        for i in 0..=g.n {
            let exact = -k * k * (k * g.x(i)).cos();
            assert!((c.get(i, 3) - exact).abs() < 0.02);
        }
    }

    #[test]
    fn rel_error_basics() {
        let g = grid(10, 10);
        let e = Field2D::from_fn(g, |x, y| 1.0 + x * y).unwrap();
        assert_eq!(rel_l2_error(&e, &e).unwrap(), 0.0);
        let scaled = e.map(|v| 1.1 * v);
        assert!((rel_l2_error(&scaled, &e).unwrap() - 0.1).abs() < 1e-12);
        let z = Field2D::zeros(g);
        assert_eq!(rel_l2_error(&e, &z), Err(GridError::ZeroNormReference));
    }

    #[test]
    fn trapezoid_norm_integrates_constant() {
        let g = Grid2D::new(-2.0, 2.0, 2.0, 7, 9).unwrap();
        let one = Field2D::from_fn(g, |_, _| 1.0).unwrap();
        assert!((one.l2_norm() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mask_validation() {
        assert!(RegionMask::new(3, 3, 10).is_err());
        assert!(RegionMask::new(3, 11, 10).is_err());
        let mask = RegionMask::new(3, 6, 10).unwrap();
        assert!(mask.retains(3) && !mask.retains(4) && mask.retains(6));
    }

    #[test]
    fn non_finite_rejected() {
        let g = grid(4, 4);
        let err = Field2D::from_fn(g, |x, _| if x > 0.5 { f64::NAN } else { 0.0 }).unwrap_err();
        assert!(matches!(err, GridError::NonFinite { .. }));
    }
}
