//! Compressed sparse row matrices and preconditioned conjugate gradients.

/// Sparse matrix in CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(
                r < rows && c < cols,
                "triplet ({r}, {c}) outside {rows}x{cols}"
            );
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            vals.push(v);
            last = Some((r, c));
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            vals: d.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// `out = A x`.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.matvec(x, &mut out);
        out
    }

    pub fn diag(&self) -> Vec<f64> {
        let n = self.rows.min(self.cols);
        let mut d = vec![0.0; n];
        for (r, slot) in d.iter_mut().enumerate() {
            *slot = self.row(r).filter(|&(c, _)| c == r).map(|(_, v)| v).sum();
        }
        d
    }

    pub fn transpose(&self) -> Self {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.rows {
            triplets.extend(self.row(r).map(|(c, v)| (c, r, v)));
        }
        Self::from_triplets(self.cols, self.rows, triplets)
    }

    /// `A^T diag(w) A`, with `w` indexed by the rows of `A`.
    pub fn gram(&self, w: &[f64]) -> Self {
        assert_eq!(w.len(), self.rows);
        let mut triplets = Vec::new();
        for r in 0..self.rows {
            let entries: Vec<(usize, f64)> = self.row(r).collect();
            for &(ci, vi) in &entries {
                for &(cj, vj) in &entries {
                    triplets.push((ci, cj, w[r] * vi * vj));
                }
            }
        }
        Self::from_triplets(self.cols, self.cols, triplets)
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Csr) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.rows {
            triplets.extend(self.row(r).map(|(c, v)| (r, c, v)));
            triplets.extend(other.row(r).map(|(c, v)| (r, c, s * v)));
        }
        Self::from_triplets(self.rows, self.cols, triplets)
    }

    /// `diag(s) A diag(s)`.
    pub fn scaled_sym(&self, s: &[f64]) -> Self {
        assert_eq!((s.len(), s.len()), (self.rows, self.cols));
        let mut out = self.clone();
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.vals[k] *= s[r] * s[self.col_idx[k]];
            }
        }
        out
    }

    /// `x^T A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    pub rel_residual: f64,
    pub converged: bool,
    /// `x^T A x / 2 - b^T x` after each iteration, starting from the initial guess.
    pub objective: Vec<f64>,
}

/// Preconditioned conjugate gradients for a symmetric positive definite
/// operator. `x` holds the initial guess on entry and the solution on exit.
/// `precond` is the diagonal of a Jacobi preconditioner, if any.
pub fn pcg(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    precond: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> CgReport {
    let n = b.len();
    let objective_of = |x: &[f64], r: &[f64]| {
        -0.5 * x
            .iter()
            .zip(b)
            .zip(r)
            .map(|((x, b), r)| x * (b + r))
            .sum::<f64>()
    };
    let b_norm = dot(b, b).sqrt();
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut objective = vec![objective_of(x, &r)];
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return CgReport {
            iterations: 0,
            rel_residual: 0.0,
            converged: true,
            objective: vec![0.0],
        };
    }
    let precondition = |r: &[f64], z: &mut [f64]| match precond {
        Some(d) => z
            .iter_mut()
            .zip(r)
            .zip(d)
            .for_each(|((z, r), d)| *z = r / d),
        None => z.copy_from_slice(r),
    };
    let mut z = vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut rel = dot(&r, &r).sqrt() / b_norm;
    let mut it = 0;
    while rel > tol && it < max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        precondition(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
        it += 1;
        rel = dot(&r, &r).sqrt() / b_norm;
        objective.push(objective_of(x, &r));
    }
    CgReport {
        iterations: it,
        rel_residual: rel,
        converged: rel <= tol,
        objective,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize, shift: f64) -> Csr {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + shift));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        Csr::from_triplets(n, n, t)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = Csr::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 0, 2.0), (0, 0, 3.0)]);
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![4.0, 2.0]);
        assert_eq!(a.diag(), vec![4.0, 0.0]);
        assert_eq!(a.transpose().mul_vec(&[1.0, 1.0]), vec![6.0, 0.0]);
    }

    #[test]
    fn gram_matches_dense() {
        let d = Csr::from_triplets(
            3,
            2,
            vec![(0, 0, 1.0), (0, 1, -1.0), (1, 1, 2.0), (2, 0, 3.0)],
        );
        let w = [1.0, 0.5, 2.0];
        let g = d.gram(&w);
        // Dense A^T W A = [[1 + 18, -1], [-1, 1 + 2]].
        assert_eq!(g.mul_vec(&[1.0, 0.0]), vec![19.0, -1.0]);
        assert_eq!(g.mul_vec(&[0.0, 1.0]), vec![-1.0, 3.0]);
    }

    #[test]
    fn cg_solves_and_decreases_objective() {
        let a = laplacian_1d(60, 0.01);
        let exact: Vec<f64> = (0..60).map(|i| (i as f64 * 0.1).sin()).collect();
        let b = a.mul_vec(&exact);
        let mut x = vec![0.0; 60];
        let diag = a.diag();
        let rep = pcg(|v, o| a.matvec(v, o), &b, &mut x, Some(&diag), 1e-12, 500);
        assert!(rep.converged);
        let err = x
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "err = {err}");
        for w in rep.objective.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = laplacian_1d(5, 0.0);
        let mut x = vec![1.0; 5];
        let rep = pcg(|v, o| a.matvec(v, o), &[0.0; 5], &mut x, None, 1e-10, 10);
        assert!(rep.converged);
        assert_eq!(x, vec![0.0; 5]);
    }
}
