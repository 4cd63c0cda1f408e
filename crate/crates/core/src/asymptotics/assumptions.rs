//! Runtime checks of the solvability conditions on the traces and source.

use super::outer::{phi_radicand, PHI_TOL};
use crate::problem::{ProblemSpec, Side};
use crate::quadrature::integrate;

const TRACE_SAMPLES: usize = 1024;
const RADICAND_SAMPLES: usize = 64;
const AREA_TOL: f64 = 1e-8;

/// Outcome of an assumption check. Violations are data, not errors.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub number: u8,
    pub passed: bool,
    /// Smallest slack over all sampled conditions; negative or zero when violated.
    pub worst_margin: f64,
    pub violations: Vec<String>,
    /// Named auxiliary quantities (for reports).
    pub diagnostics: Vec<(String, f64)>,
}

impl AssumptionReport {
    fn new(number: u8) -> Self {
        Self {
            number,
            passed: true,
            worst_margin: f64::INFINITY,
            violations: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn margin(&mut self, value: f64) {
        self.worst_margin = self.worst_margin.min(value);
    }

    fn violate(&mut self, msg: String) {
        self.passed = false;
        if !self.violations.contains(&msg) {
            self.violations.push(msg);
        }
    }
}

/// Sign and gap conditions on the boundary traces, sampled on 1024 points
/// of one period. The gap must exceed `2 mu^2` strictly.
pub fn check_assumption1(spec: &ProblemSpec) -> AssumptionReport {
    let mut rep = AssumptionReport::new(1);
    let gap_floor = 2.0 * spec.mu * spec.mu;
    let mut min_gap = f64::INFINITY;
    for s in 0..TRACE_SAMPLES {
        let x = spec.x0 + spec.period() * s as f64 / TRACE_SAMPLES as f64;
        let lo = spec.trace(Side::Minus, x);
        let hi = spec.trace(Side::Plus, x);
        if !(lo < 0.0) {
            rep.violate("u^{-a} not negative".to_string());
        }
        if !(hi > 0.0) {
            rep.violate("u^{a} not positive".to_string());
        }
        let gap = hi - lo - gap_floor;
        min_gap = min_gap.min(gap);
        if !(gap > 0.0) {
            rep.violate(format!("u^a - u^-a <= 2 mu^2 at x = {x}"));
        }
        rep.margin(-lo);
        rep.margin(hi);
        rep.margin(gap);
    }
    rep.diagnostics.push(("gap_margin".to_string(), min_gap));
    rep
}

/// Positivity of both outer radicands on a 64 x 64 sample lattice decides
/// pass or fail. The two area integrals of the positive and negative parts
/// of `f`, compared with the squared traces, are reported as diagnostics.
pub fn check_assumption2(spec: &ProblemSpec) -> AssumptionReport {
    let mut rep = AssumptionReport::new(2);
    for q in 0..RADICAND_SAMPLES {
        let y = -spec.a + 2.0 * spec.a * q as f64 / (RADICAND_SAMPLES - 1) as f64;
        for p in 0..RADICAND_SAMPLES {
            let x = spec.x0 + spec.period() * p as f64 / RADICAND_SAMPLES as f64;
            for side in [Side::Minus, Side::Plus] {
                let r = phi_radicand(spec, side, x, y, PHI_TOL);
                rep.margin(r);
                if !(r > 0.0) {
                    rep.violate(format!(
                        "radicand of phi_{} is {r:e} at (x, y) = ({x}, {y})",
                        side.label()
                    ));
                }
            }
        }
    }

    let neg = area_integral(spec, |v| v.min(0.0));
    let pos = area_integral(spec, |v| v.max(0.0));
    let min_sq = |side| {
        (0..TRACE_SAMPLES)
            .map(|s| {
                let u = spec.trace(
                    side,
                    spec.x0 + spec.period() * s as f64 / TRACE_SAMPLES as f64,
                );
                u * u
            })
            .fold(f64::INFINITY, f64::min)
    };
    let (lo_sq, hi_sq) = (min_sq(Side::Minus), min_sq(Side::Plus));
    rep.diagnostics.extend([
        ("min_radicand".to_string(), rep.worst_margin),
        ("neg_part_integral".to_string(), -2.0 / spec.k * neg),
        ("pos_part_integral".to_string(), 2.0 / spec.k * pos),
        ("min_sq_trace_minus".to_string(), lo_sq),
        ("min_sq_trace_plus".to_string(), hi_sq),
        ("area_margin_minus".to_string(), lo_sq + 2.0 / spec.k * neg),
        ("area_margin_plus".to_string(), hi_sq - 2.0 / spec.k * pos),
    ]);
    rep
}

/// `int int g(f(x, y))` over one period times `[-a, a]` by nested adaptive
/// quadrature.
fn area_integral(spec: &ProblemSpec, g: impl Fn(f64) -> f64) -> f64 {
    let inner_tol = AREA_TOL / (4.0 * spec.period());
    let (v, _) = integrate(
        |x| integrate(|y| g(spec.f.eval(x, y)), -spec.a, spec.a, inner_tol).0,
        spec.x0,
        spec.x1,
        AREA_TOL,
    );
    v
}
