#![allow(dead_code)]

use aer_core::{ProblemSpec, Side};
use std::f64::consts::PI;

/// Printed closed forms of the outer functions of the two built-in examples.
pub fn phi_example1(side: Side, x: f64, y: f64) -> f64 {
    let s = |v: f64| (PI * v / 4.0).sin();
    let c = 2.0 / (3.0 * PI).sqrt();
    match side {
        Side::Minus => {
            -c * (s(x + y) - s(x - 2.0 * y - 6.0) + 3.0 * s(x - y) - 3.0 * s(x - 2.0 * y - 2.0)
                + 12.0 * PI)
                .sqrt()
        }
        Side::Plus => {
            c * (s(x + y) - 3.0 * s(x - 2.0 * y + 2.0) + 3.0 * s(x - y) - s(x - 2.0 * y + 6.0)
                + 3.0 * PI)
                .sqrt()
        }
    }
}

pub fn phi_example2(side: Side, x: f64, y: f64) -> f64 {
    let s = |v: f64| (4.0 * PI * v).sin();
    match side {
        Side::Minus => -((s(x - y - 1.0) - s(x) + PI * y * y + 63.0 * PI).sqrt() / PI.sqrt()),
        Side::Plus => (s(x - y + 1.0) - s(x) + PI * y * y + 15.0 * PI).sqrt() / PI.sqrt(),
    }
}

/// First-order outer correction by RK4 on the transport equation
/// `k du1/ds = W - P u1` along `y(s) = y + (s - x) / k`, starting from
/// `u1 = 0` on the boundary row. `P` and `W` come from fourth-order finite
/// differences of `phi`.
pub fn u1_by_characteristic(
    spec: &ProblemSpec,
    phi: impl Fn(f64, f64) -> f64,
    side: Side,
    x: f64,
    y: f64,
    steps: usize,
) -> f64 {
    let k = spec.k;
    let foot = match side {
        Side::Minus => x - k * (spec.a + y),
        Side::Plus => x + k * (spec.a - y),
    };
    let h = 1e-3;
    let d1 = |g: &dyn Fn(f64) -> f64, v: f64| {
        (g(v - 2.0 * h) - 8.0 * g(v - h) + 8.0 * g(v + h) - g(v + 2.0 * h)) / (12.0 * h)
    };
    let d2 = |g: &dyn Fn(f64) -> f64, v: f64| {
        (-g(v - 2.0 * h) + 16.0 * g(v - h) - 30.0 * g(v) + 16.0 * g(v + h) - g(v + 2.0 * h))
            / (12.0 * h * h)
    };
    let coeffs = |s: f64| {
        let ys = y + (s - x) / k;
        let p = phi(s, ys);
        let px = d1(&|v| phi(v, ys), s);
        let py = d1(&|v| phi(s, v), ys);
        let lap = d2(&|v| phi(v, ys), s) + d2(&|v| phi(s, v), ys);
        ((k * px + py) / p, -lap / p)
    };
    let rhs = |s: f64, u: f64| {
        let (p, w) = coeffs(s);
        (w - p * u) / k
    };
    let ds = (x - foot) / steps as f64;
    let mut u = 0.0;
    let mut s = foot;
    for _ in 0..steps {
        let k1 = rhs(s, u);
        let k2 = rhs(s + 0.5 * ds, u + 0.5 * ds * k1);
        let k3 = rhs(s + 0.5 * ds, u + 0.5 * ds * k2);
        let k4 = rhs(s + ds, u + ds * k3);
        u += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s += ds;
    }
    u
}
