//! Model inputs and the two built-in example configurations.

use crate::error::{AerError, Result};
use crate::expr::{ScalarFn, Var};
use crate::grid::Grid2D;

/// Physical and model inputs of the boundary-value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    /// Small diffusion parameter.
    pub mu: f64,
    /// Advection anisotropy in x.
    pub k: f64,
    pub x0: f64,
    pub x1: f64,
    /// The y domain is `[-a, a]`.
    pub a: f64,
    /// Final time.
    pub t_end: f64,
    /// Trace at `y = -a`, a function of x only.
    pub u_minus_a: ScalarFn,
    /// Trace at `y = a`, a function of x only.
    pub u_plus_a: ScalarFn,
    /// Source term `f(x, y)`.
    pub f: ScalarFn,
    /// Initial front position.
    pub h0_star: f64,
    /// Observation time.
    pub t0: f64,
}

/// Which outer branch: below (`Minus`) or above (`Plus`) the front.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        }
    }
}

const PERIODICITY_SAMPLES: usize = 64;

impl ProblemSpec {
    pub fn period(&self) -> f64 {
        self.x1 - self.x0
    }

    /// Checks cross-field constraints. Returns warnings for inputs that are
    /// legal but outside the small-parameter regime.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |msg: String| Err(AerError::invalid(msg));
        for (name, v) in [
            ("mu", self.mu),
            ("k", self.k),
            ("x0", self.x0),
            ("x1", self.x1),
            ("a", self.a),
            ("t_end", self.t_end),
            ("h0_star", self.h0_star),
            ("t0", self.t0),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if self.mu <= 0.0 {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if self.k <= 0.0 {
            return bad(format!("k must be positive, got {}", self.k));
        }
        if self.x1 <= self.x0 {
            return bad(format!("need x1 > x0, got [{}, {}]", self.x0, self.x1));
        }
        if self.a <= 0.0 {
            return bad(format!("a must be positive, got {}", self.a));
        }
        if self.t_end <= 0.0 {
            return bad(format!("T must be positive, got {}", self.t_end));
        }
        if !(self.h0_star > -self.a && self.h0_star < self.a) {
            return bad(format!("h0_star = {} must lie in (-a, a)", self.h0_star));
        }
        if !(self.t0 > 0.0 && self.t0 <= self.t_end) {
            return bad(format!(
                "t0 = {} must lie in (0, T = {}]",
                self.t0, self.t_end
            ));
        }
        for (name, trace) in [("u_minus_a", &self.u_minus_a), ("u_plus_a", &self.u_plus_a)] {
            if trace.ast().uses(Var::Y) {
                return bad(format!("{name} must not depend on y"));
            }
            self.check_periodic(name, trace)?;
        }
        let mut warnings = Vec::new();
        if self.mu > 0.5 {
            warnings.push(format!(
                "mu = {} is not small; asymptotics may be inaccurate",
                self.mu
            ));
        }
        Ok(warnings)
    }

    fn check_periodic(&self, name: &str, trace: &ScalarFn) -> Result<()> {
        let l = self.period();
        for s in 0..PERIODICITY_SAMPLES {
            let x = self.x0 + l * s as f64 / PERIODICITY_SAMPLES as f64;
            let u0 = trace.eval_checked(x, 0.0)?;
            let u1 = trace.eval_checked(x + l, 0.0)?;
            if (u1 - u0).abs() > 1e-9 * (1.0 + u0.abs()) {
                return Err(AerError::invalid(format!(
                    "{name} is not periodic with period {l}: {u0} at x = {x}, {u1} at x + L"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn trace(&self, side: Side, x: f64) -> f64 {
        match side {
            Side::Minus => self.u_minus_a.eval(x, 0.0),
            Side::Plus => self.u_plus_a.eval(x, 0.0),
        }
    }

    /// Grid over the problem domain.
    pub fn grid(&self, n: usize, m: usize) -> Result<Grid2D> {
        Ok(Grid2D::new(self.x0, self.x1, self.a, n, m)?)
    }

    /// Source sampled on a grid.
    pub fn source_field(&self, grid: &Grid2D) -> Result<crate::grid::Field2D> {
        let mut failure = None;
        let field = crate::grid::Field2D::from_fn(*grid, |x, y| match self.f.eval_checked(x, y) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        });
        match failure {
            Some(e) => Err(e.into()),
            None => Ok(field?),
        }
    }

    /// Source `cos(pi x / 4) cos(pi y / 4)` on `[-2, 2]^2`, `k = 2`.
    pub fn example1() -> Self {
        Self {
            mu: 0.08,
            k: 2.0,
            x0: -2.0,
            x1: 2.0,
            a: 2.0,
            t_end: 1.0,
            u_minus_a: ScalarFn::constant(-4.0),
            u_plus_a: ScalarFn::constant(2.0),
            f: ScalarFn::parse("cos(pi*x/4)*cos(pi*y/4)").expect("valid literal"),
            h0_star: 0.0,
            t0: 0.7,
        }
    }

    /// Source `y - 2 cos(4 pi x)` on `[-1, 1]^2`, `k = 1`.
    pub fn example2() -> Self {
        Self {
            mu: 0.08,
            k: 1.0,
            x0: -1.0,
            x1: 1.0,
            a: 1.0,
            t_end: 0.3,
            u_minus_a: ScalarFn::constant(-8.0),
            u_plus_a: ScalarFn::constant(4.0),
            f: ScalarFn::parse("y-2*cos(4*pi*x)").expect("valid literal"),
            h0_star: 0.0,
            t0: 0.2,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "example1" => Some(Self::example1()),
            "example2" => Some(Self::example2()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for spec in [ProblemSpec::example1(), ProblemSpec::example2()] {
            assert!(spec.validate().unwrap().is_empty());
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut s = ProblemSpec::example1();
        s.h0_star = 2.0;
        assert!(s.validate().is_err());

        let mut s = ProblemSpec::example1();
        s.u_plus_a = ScalarFn::parse("2 + x").unwrap();
        assert!(s
            .validate()
            .unwrap_err()
            .to_string()
            .contains("not periodic"));

        let mut s = ProblemSpec::example1();
        s.u_plus_a = ScalarFn::parse("2 + y").unwrap();
        assert!(s.validate().is_err());

        let mut s = ProblemSpec::example1();
        s.t0 = 1.5;
        assert!(s.validate().is_err());
    }

    #[test]
    fn periodic_trace_accepted_and_large_mu_warns() {
        let mut s = ProblemSpec::example1();
        s.u_plus_a = ScalarFn::parse("2 + 0.5*sin(pi*x/2)").unwrap();
        s.mu = 0.7;
        assert_eq!(s.validate().unwrap().len(), 1);
    }
}
