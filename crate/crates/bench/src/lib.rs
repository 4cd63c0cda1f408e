//! Fixtures shared by the criterion benchmarks.

use aer_core::inverse::{add_noise, NoiseKind, Region};
use aer_core::{forward_solve, Field2D, PartialField, ProblemSpec, SolverConfig};

/// Example 1 snapshot at `t0` on an `n x n` grid.
pub fn example1_snapshot(n: usize) -> (ProblemSpec, Field2D) {
    let spec = ProblemSpec::example1();
    let grid = spec.grid(n, n).expect("valid grid");
    let run = forward_solve(&spec, &SolverConfig::new(grid, spec.t0, vec![spec.t0]))
        .expect("forward solve");
    (
        spec,
        run.snapshots.into_iter().next().expect("one snapshot"),
    )
}

/// Lower region below `top` with noisy data gathered from `u`.
pub fn noisy_lower_region(u: &Field2D, top: usize, delta: f64) -> (Region, Vec<f64>) {
    let region = Region::lower(*u.grid(), &vec![top; u.grid().n]).expect("valid region");
    let noisy = add_noise(u, delta, 1, NoiseKind::Uniform);
    let data = region.gather(&noisy);
    (region, data)
}

/// `u` with rows `lo..=hi` removed.
pub fn with_band(u: &Field2D, lo: usize, hi: usize) -> PartialField {
    let mut p = PartialField::from(u.clone());
    for j in lo..=hi {
        for i in 0..=u.grid().n {
            p.set(i, j, f64::NAN);
        }
    }
    p
}
