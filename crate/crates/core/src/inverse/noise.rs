//! Seeded multiplicative noise.
//!
//! Draws come from ChaCha20 (`rand_chacha::ChaCha20Rng::seed_from_u64`),
//! one per unique node in row-major order: `j = 0..=m` outer, `i = 0..n`
//! inner. The seam column `n` copies column 0.

use crate::grid::Field2D;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub const PRNG_NAME: &str = "ChaCha20";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    /// `u (1 + delta (2 r - 1))`, `r` uniform on `[0, 1)`.
    #[default]
    Uniform,
    /// `u (1 + delta z)`, `z` standard normal.
    Gaussian,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Uniform => "uniform",
            NoiseKind::Gaussian => "gaussian",
        }
    }
}

/// Stream of multiplicative noise factors.
pub struct NoiseSource {
    rng: ChaCha20Rng,
    delta: f64,
    kind: NoiseKind,
}

impl NoiseSource {
    pub fn new(delta: f64, seed: u64, kind: NoiseKind) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
            delta,
            kind,
        }
    }

    #[inline]
    pub fn factor(&mut self) -> f64 {
        match self.kind {
            NoiseKind::Uniform => {
                let r: f64 = self.rng.random();
                1.0 + self.delta * (2.0 * r - 1.0)
            }
            NoiseKind::Gaussian => {
                let z: f64 = self.rng.sample(StandardNormal);
                1.0 + self.delta * z
            }
        }
    }

    /// Perturbs every unique node of `u`. With `delta = 0` the output equals
    /// the input exactly.
    pub fn apply(&mut self, u: &Field2D) -> Field2D {
        let g = *u.grid();
        let mut out = u.clone();
        for j in 0..=g.m {
            for i in 0..g.n {
                let f = self.factor();
                out.set(i, j, f * u.get(i, j));
            }
        }
        out.sync_seam();
        out
    }
}

/// Noisy copy of `u` with a fresh stream seeded by `seed`.
pub fn add_noise(u: &Field2D, delta: f64, seed: u64, kind: NoiseKind) -> Field2D {
    NoiseSource::new(delta, seed, kind).apply(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;

    fn field() -> Field2D {
        let g = Grid2D::new(-1.0, 1.0, 1.0, 20, 10).unwrap();
        let mut u =
            Field2D::from_fn(g, |x, y| 2.0 + (std::f64::consts::PI * x).sin() - 3.0 * y).unwrap();
        u.sync_seam();
        u
    }

    #[test]
    fn zero_delta_is_identity() {
        let u = field();
        assert_eq!(add_noise(&u, 0.0, 7, NoiseKind::Uniform), u);
    }

    #[test]
    fn multiplicative_bound_and_determinism() {
        let u = field();
        let a = add_noise(&u, 0.05, 11, NoiseKind::Uniform);
        let b = add_noise(&u, 0.05, 11, NoiseKind::Uniform);
        assert_eq!(a, b);
        assert_ne!(a, add_noise(&u, 0.05, 12, NoiseKind::Uniform));
        for (n, e) in a.values().iter().zip(u.values()) {
            assert!((n - e).abs() <= 0.05 * e.abs());
        }
        let g = a.grid();
        for j in 0..=g.m {
            assert_eq!(a.get(0, j), a.get(g.n, j));
        }
    }

    #[test]
    fn uniform_mean_matches_theory() {
        let delta = 0.01;
        let mut src = NoiseSource::new(delta, 2024, NoiseKind::Uniform);
        let draws = 1_000_000;
        let mean = (0..draws).map(|_| src.factor() - 1.0).sum::<f64>() / draws as f64;
        let bound = 3.0 * delta / (3.0 * draws as f64).sqrt();
        assert!(mean.abs() <= bound, "mean {mean:e} bound {bound:e}");
    }

    #[test]
    fn gaussian_variance() {
        let mut src = NoiseSource::new(0.1, 5, NoiseKind::Gaussian);
        let n = 200_000;
        let var = (0..n).map(|_| (src.factor() - 1.0).powi(2)).sum::<f64>() / n as f64;
        assert!((var - 0.01).abs() < 2e-4, "var {var}");
    }
}
