//! Node sets on one side of the layer band and their difference operators.

use crate::error::{AerError, Result};
use crate::grid::{first_derivative_1d, Field2D, Grid2D, PartialField};
use crate::linalg::Csr;
use crate::problem::Side;

/// Nodes `(i, j)`, `i < n`, with `j` in an inclusive per-column row range.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    grid: Grid2D,
    side: Side,
    ranges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
}

impl Region {
    /// Lower region: rows `0..=tops[i]` in column `i`.
    pub fn lower(grid: Grid2D, tops: &[usize]) -> Result<Self> {
        Self::build(grid, Side::Minus, tops.iter().map(|&t| (0, t)).collect())
    }

    /// Upper region: rows `bottoms[i]..=m` in column `i`.
    pub fn upper(grid: Grid2D, bottoms: &[usize]) -> Result<Self> {
        Self::build(
            grid,
            Side::Plus,
            bottoms.iter().map(|&b| (b, grid.m)).collect(),
        )
    }

    fn build(grid: Grid2D, side: Side, ranges: Vec<(usize, usize)>) -> Result<Self> {
        if ranges.len() != grid.n {
            return Err(AerError::invalid(format!(
                "need {} column ranges, got {}",
                grid.n,
                ranges.len()
            )));
        }
        let mut offsets = Vec::with_capacity(grid.n + 1);
        offsets.push(0);
        for (i, &(lo, hi)) in ranges.iter().enumerate() {
            if hi > grid.m || hi < lo + 2 {
                return Err(AerError::invalid(format!(
                    "{} region needs at least 3 rows, column {i} has rows {lo}..={hi}",
                    match side {
                        Side::Minus => "lower",
                        Side::Plus => "upper",
                    }
                )));
            }
            offsets.push(offsets[i] + hi - lo + 1);
        }
        Ok(Self {
            grid,
            side,
            ranges,
            offsets,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self, i: usize) -> (usize, usize) {
        self.ranges[i]
    }

    /// Rows covered by at least one column.
    pub fn row_span(&self) -> (usize, usize) {
        let lo = self.ranges.iter().map(|r| r.0).min().unwrap();
        let hi = self.ranges.iter().map(|r| r.1).max().unwrap();
        (lo, hi)
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let (lo, hi) = self.ranges[i % self.grid.n];
        j >= lo && j <= hi
    }

    /// Unknown index of node `(i, j)`; `i` is taken modulo `n`.
    pub fn index(&self, i: usize, j: usize) -> Option<usize> {
        let i = i % self.grid.n;
        let (lo, hi) = self.ranges[i];
        (j >= lo && j <= hi).then(|| self.offsets[i] + j - lo)
    }

    /// Nodes in unknown order (column by column).
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ranges
            .iter()
            .enumerate()
            .flat_map(|(i, &(lo, hi))| (lo..=hi).map(move |j| (i, j)))
    }

    pub fn gather(&self, field: &Field2D) -> Vec<f64> {
        self.nodes().map(|(i, j)| field.get(i, j)).collect()
    }

    /// Full-grid copy, absent outside the region.
    pub fn scatter(&self, values: &[f64]) -> PartialField {
        let mut out = PartialField::empty(self.grid);
        for ((i, j), &v) in self.nodes().zip(values) {
            out.set(i, j, v);
        }
        out.sync_seam();
        out
    }

    /// Quadrature weight `d1 d2`, halved on a column's end rows.
    fn weight(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = self.ranges[i];
        let wy = if j == lo || j == hi { 0.5 } else { 1.0 };
        wy * self.grid.d1() * self.grid.d2()
    }

    /// Penalty matrix `Dxx^T W Dxx + Dyy^T W Dyy`. `Dxx` is the periodic
    /// three-point stencil, kept where both x-neighbours are in the region;
    /// `Dyy` is three-point inside each column with four-point one-sided
    /// stencils on its end rows (three-point when the column has 3 rows).
    pub fn curvature_penalty(&self) -> Csr {
        let g = &self.grid;
        let n = g.n;
        let (ihx, ihy) = (1.0 / (g.d1() * g.d1()), 1.0 / (g.d2() * g.d2()));
        let mut rows = Vec::new();
        let mut weights = Vec::new();
        let mut row = 0;
        let mut push = |entries: &[(usize, f64)], w: f64, rows: &mut Vec<(usize, usize, f64)>| {
            rows.extend(entries.iter().map(|&(c, v)| (row, c, v)));
            weights.push(w);
            row += 1;
        };
        for (i, j) in self.nodes().collect::<Vec<_>>() {
            let c = self.index(i, j).unwrap();
            let w = self.weight(i, j);
            if let (Some(l), Some(r)) = (self.index(i + n - 1, j), self.index(i + 1, j)) {
                push(&[(l, ihx), (c, -2.0 * ihx), (r, ihx)], w, &mut rows);
            }
            let (lo, hi) = self.ranges[i];
            let at = |jj: usize| self.index(i, jj).unwrap();
            let entries: Vec<(usize, f64)> = if j > lo && j < hi {
                vec![(at(j - 1), ihy), (c, -2.0 * ihy), (at(j + 1), ihy)]
            } else if hi - lo + 1 >= 4 {
                let s: [usize; 4] = if j == lo {
                    [j, j + 1, j + 2, j + 3]
                } else {
                    [j, j - 1, j - 2, j - 3]
                };
                vec![
                    (at(s[0]), 2.0 * ihy),
                    (at(s[1]), -5.0 * ihy),
                    (at(s[2]), 4.0 * ihy),
                    (at(s[3]), -ihy),
                ]
            } else {
                vec![(at(lo), ihy), (at(lo + 1), -2.0 * ihy), (at(lo + 2), ihy)]
            };
            push(&entries, w, &mut rows);
        }
        let d = Csr::from_triplets(weights.len(), self.len(), rows);
        d.gram(&weights)
    }

    /// First derivatives of region values. x: periodic central where both
    /// neighbours exist, otherwise a one-sided stencil inside the row.
    /// y: second-order with one-sided stencils at each column's end rows.
    pub fn gradients(&self, values: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let g = &self.grid;
        let n = g.n;
        let (d1, d2) = (g.d1(), g.d2());
        let v = |i: usize, j: usize| self.index(i, j).map(|k| values[k]);
        let mut ux = vec![0.0; self.len()];
        let mut uy = vec![0.0; self.len()];
        for (i, j) in self.nodes() {
            let k = self.index(i, j).unwrap();
            let c = values[k];
            ux[k] = match (v(i + n - 1, j), v(i + 1, j)) {
                (Some(l), Some(r)) => (r - l) / (2.0 * d1),
                (None, Some(r)) => match v(i + 2, j) {
                    Some(rr) => (-3.0 * c + 4.0 * r - rr) / (2.0 * d1),
                    None => (r - c) / d1,
                },
                (Some(l), None) => match v(i + 2 * n - 2, j) {
                    Some(ll) => (3.0 * c - 4.0 * l + ll) / (2.0 * d1),
                    None => (c - l) / d1,
                },
                (None, None) => 0.0,
            };
        }
        for i in 0..n {
            let (lo, hi) = self.ranges[i];
            let start = self.offsets[i];
            let len = hi - lo + 1;
            first_derivative_1d(&values[start..start + len], d2, &mut uy[start..start + len]);
        }
        (ux, uy)
    }
}
