//! Penalized least-squares smoothing of one region with the regularization
//! weight chosen by the discrepancy principle.
//!
//! Minimizes `(1/N) sum (v - u)^2 + eps (||Dxx v||^2 + ||Dyy v||^2)` over the
//! region's `N` nodes, i.e. solves `(I + eps N R) v = u`.

use super::region::Region;
use crate::error::{AerError, Result};
use crate::linalg::{pcg, Csr};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsRule {
    /// Mean-square misfit equal to `delta^4`.
    Discrepancy,
    /// Fixed weight.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingOptions {
    pub rule: EpsRule,
    /// Accepted relative deviation of the misfit from its target.
    pub rel_tol: f64,
    /// Search bracket in `log10(eps)`.
    pub log10_bracket: (f64, f64),
    pub max_bisections: usize,
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl Default for SmoothingOptions {
    fn default() -> Self {
        Self {
            rule: EpsRule::Discrepancy,
            rel_tol: 0.05,
            log10_bracket: (-14.0, 2.0),
            max_bisections: 60,
            cg_tol: 1e-10,
            cg_max_iter: 20_000,
        }
    }
}

/// Smoothed values on one region.
#[derive(Debug, Clone)]
pub struct RegionFit {
    pub region: Region,
    pub values: Vec<f64>,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
    pub eps: f64,
    /// Achieved mean-square misfit.
    pub misfit: f64,
    /// Target mean-square misfit (`delta^4`), if the discrepancy rule was used.
    pub target: Option<f64>,
    pub bisections: usize,
    /// Quadratic objective after each CG iteration of the final solve.
    pub cg_objective: Vec<f64>,
}

struct Smoother<'a> {
    data: &'a [f64],
    penalty: Csr,
    penalty_diag: Vec<f64>,
    opts: &'a SmoothingOptions,
    guess: Vec<f64>,
}

impl Smoother<'_> {
    fn n(&self) -> f64 {
        self.data.len() as f64
    }

    /// Solves at weight `eps`; returns misfit and the CG objective history.
    fn solve(&mut self, eps: f64) -> Result<(f64, Vec<f64>)> {
        let scale = eps * self.n();
        let penalty = &self.penalty;
        let apply = |v: &[f64], out: &mut [f64]| {
            penalty.matvec(v, out);
            for (o, &x) in out.iter_mut().zip(v) {
                *o = x + scale * *o;
            }
        };
        let diag: Vec<f64> = self.penalty_diag.iter().map(|d| 1.0 + scale * d).collect();
        let report = pcg(
            apply,
            self.data,
            &mut self.guess,
            Some(&diag),
            self.opts.cg_tol,
            self.opts.cg_max_iter,
        );
        if !report.converged {
            return Err(AerError::numerical(format!(
                "smoothing CG did not converge at eps = {eps:e}: relative residual {:e} after {} iterations",
                report.rel_residual, report.iterations
            )));
        }
        Ok((self.misfit(), report.objective))
    }

    fn misfit(&self) -> f64 {
        self.guess
            .iter()
            .zip(self.data)
            .map(|(v, u)| (v - u) * (v - u))
            .sum::<f64>()
            / self.n()
    }
}

/// Fits the region data `data` (in [`Region`] node order) for noise level
/// `delta`.
pub fn smooth_values(
    region: &Region,
    data: &[f64],
    delta: f64,
    opts: &SmoothingOptions,
) -> Result<RegionFit> {
    if data.len() != region.len() {
        return Err(AerError::invalid("data length does not match region"));
    }
    let penalty = region.curvature_penalty();
    let penalty_diag = penalty.diag();
    let mut s = Smoother {
        data,
        penalty,
        penalty_diag,
        opts,
        guess: data.to_vec(),
    };
    let (lo, hi) = opts.log10_bracket;

    let (eps, misfit, objective, target, bisections) = match opts.rule {
        EpsRule::Fixed(eps) => {
            let (misfit, obj) = s.solve(eps)?;
            (eps, misfit, obj, None, 0)
        }
        EpsRule::Discrepancy if delta == 0.0 => {
            let eps = 10f64.powf(lo);
            let (misfit, obj) = s.solve(eps)?;
            (eps, misfit, obj, Some(0.0), 0)
        }
        EpsRule::Discrepancy => {
            let target = delta.powi(4);
            let accept = |m: f64| (m / target - 1.0).abs() <= opts.rel_tol;
            let (m_lo, obj_lo) = s.solve(10f64.powf(lo))?;
            if accept(m_lo) {
                (10f64.powf(lo), m_lo, obj_lo, Some(target), 0)
            } else if m_lo > target {
                return Err(unreachable_target(region, target, (lo, m_lo), None));
            } else {
                // The upper end is only solved when bisection fails: it is the
                // worst-conditioned system in the bracket.
                let (mut a, mut b) = (lo, hi);
                let mut found = None;
                let mut last = (lo, m_lo);
                for it in 1..=opts.max_bisections {
                    let c = 0.5 * (a + b);
                    let (m, obj) = s.solve(10f64.powf(c))?;
                    last = (c, m);
                    if accept(m) {
                        found = Some((10f64.powf(c), m, obj, Some(target), it));
                        break;
                    }
                    if m < target {
                        a = c;
                    } else {
                        b = c;
                    }
                }
                match found {
                    Some(f) => f,
                    None => {
                        let (m_hi, obj_hi) = s.solve(10f64.powf(hi))?;
                        if accept(m_hi) {
                            (
                                10f64.powf(hi),
                                m_hi,
                                obj_hi,
                                Some(target),
                                opts.max_bisections,
                            )
                        } else if m_hi < target {
                            return Err(unreachable_target(
                                region,
                                target,
                                (lo, m_lo),
                                Some((hi, m_hi)),
                            ));
                        } else {
                            return Err(AerError::numerical(format!(
                                "discrepancy search for the {} region stopped after {} bisections: \
                                 log10(eps) in [{a}, {b}], last misfit {:e} at log10(eps) = {}, target {target:e}",
                                region.side().label(),
                                opts.max_bisections,
                                last.1,
                                last.0
                            )));
                        }
                    }
                }
            }
        }
    };
    let values = s.guess;
    let (ux, uy) = region.gradients(&values);
    Ok(RegionFit {
        region: region.clone(),
        values,
        ux,
        uy,
        eps,
        misfit,
        target,
        bisections,
        cg_objective: objective,
    })
}

fn unreachable_target(
    region: &Region,
    target: f64,
    lo: (f64, f64),
    hi: Option<(f64, f64)>,
) -> AerError {
    let hi_text = match hi {
        Some((h, m)) => format!(", misfit {m:e} at log10(eps) = {h}"),
        None => String::new(),
    };
    AerError::numerical(format!(
        "discrepancy level {target:e} unreachable for the {} region: misfit {:e} at log10(eps) = {}{hi_text}",
        region.side().label(),
        lo.1,
        lo.0
    ))
}
