//! Acceptance criteria 1 to 10. Each test prints one `PASS` or `FAIL` line
//! (outside the libtest capture) and then asserts.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use aer_cli::{CsvMatrix, RawConfig, RunConfig};
use aer_core::asymptotics::{
    eval_phi, eval_u1, q0_profile, solve_front, transition_width, FrontOptions,
};
use aer_core::inverse::{
    add_noise, median, smooth_values, AerConfig, NoiseKind, Pipeline, Region, SmoothingOptions,
};
use aer_core::{forward_solve, Field2D, Grid2D, ProblemSpec, ScalarFn, Side, SolverConfig};
use common::{phi_example1, phi_example2, u1_by_characteristic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

fn report(n: u32, title: &str, pass: bool, detail: String) {
    let line = format!(
        "criterion {n:>2}: {} {title}: {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(pass, "criterion {n} ({title}) failed: {detail}");
}

fn preset(name: &str) -> RunConfig {
    RawConfig::default().resolve(Some(name), None).unwrap()
}

/// Preset pipeline: forward solve on the forward grid, observation on the
/// 51 x 51 node grid.
fn pipeline(cfg: &RunConfig) -> Pipeline {
    let spec = cfg.spec().unwrap();
    let grid = spec.grid(cfg.forward.n, cfg.forward.m).unwrap();
    let solver = SolverConfig {
        cfl: cfg.forward.cfl,
        ..SolverConfig::new(grid, spec.t0, vec![spec.t0])
    };
    Pipeline::prepare(&spec, &solver, cfg.inverse.n, cfg.inverse.m).unwrap()
}

fn example1() -> &'static (Pipeline, f64) {
    static P: OnceLock<(Pipeline, f64)> = OnceLock::new();
    P.get_or_init(|| {
        let start = Instant::now();
        let p = pipeline(&preset("example1"));
        (p, start.elapsed().as_secs_f64())
    })
}

fn median_rel_err_f(p: &Pipeline, cfg: &RunConfig, delta: f64) -> f64 {
    let base = AerConfig {
        delta,
        ..cfg.aer().unwrap()
    };
    let cfgs: Vec<AerConfig> = (0..5)
        .map(|seed| AerConfig {
            seed,
            ..base.clone()
        })
        .collect();
    let errs: Vec<f64> = p
        .run_many(&cfgs)
        .into_iter()
        .map(|r| r.unwrap().metrics.rel_err_f)
        .collect();
    median(&errs).unwrap()
}

fn max_phi_error(spec: &ProblemSpec, closed: fn(Side, f64, f64) -> f64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let x = rng.random_range(spec.x0..spec.x1);
        let y = rng.random_range(-spec.a..=spec.a);
        for side in [Side::Minus, Side::Plus] {
            worst = worst.max((eval_phi(spec, side, x, y).unwrap() - closed(side, x, y)).abs());
        }
    }
    worst
}

#[test]
fn criterion_01_phi_closed_forms() {
    let start = Instant::now();
    let e1 = max_phi_error(&ProblemSpec::example1(), phi_example1, 101);
    let e2 = max_phi_error(&ProblemSpec::example2(), phi_example2, 202);
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "phi vs closed forms at 1e4 points",
        e1 <= 1e-7 && e2 <= 1e-7 && secs < 10.0,
        format!("max err example1 {e1:.2e}, example2 {e2:.2e} (<= 1e-7), {secs:.2} s (< 10 s)"),
    );
}

#[test]
fn criterion_02_example1_forward_vs_u0() {
    let (p, secs) = example1();
    let e = p.rel_err_u0;
    report(
        2,
        "example1 rel_l2(U0, u) at t0 = 0.7 on 101x101",
        (0.015..=0.08).contains(&e) && *secs < 120.0,
        format!("{e:.4} (band [0.015, 0.08], target 0.0339), {secs:.1} s (< 120 s)"),
    );
}

#[test]
fn criterion_03_example2_forward_vs_u0() {
    let start = Instant::now();
    let cfg = preset("example2");
    let spec = cfg.spec().unwrap();
    let grid = spec.grid(cfg.forward.n, cfg.forward.m).unwrap();
    let snap = forward_solve(&spec, &SolverConfig::new(grid, spec.t0, vec![spec.t0]))
        .unwrap()
        .snapshots
        .remove(0);
    let front = solve_front(
        &spec,
        &grid,
        &FrontOptions {
            t_end: Some(spec.t0),
            ..FrontOptions::default()
        },
    )
    .unwrap();
    let u0 = aer_core::asymptotics::assemble_u0(&spec, &front, &grid, spec.t0).unwrap();
    let e = aer_core::rel_l2_error(&u0, &snap).unwrap();
    let secs = start.elapsed().as_secs_f64();
    report(
        3,
        "example2 rel_l2(U0, u) at t0 = 0.2",
        (0.02..=0.09).contains(&e) && secs < 60.0,
        format!("{e:.4} (band [0.02, 0.09], target 0.0408), {secs:.1} s (< 60 s)"),
    );
}

#[test]
fn criterion_04_example1_inversion() {
    let (p, _) = example1();
    let m = median_rel_err_f(p, &preset("example1"), 0.01);
    report(
        4,
        "example1 median rel_err_f over 5 seeds at delta = 1%",
        (0.04..=0.15).contains(&m),
        format!("{m:.4} (band [0.04, 0.15], target 0.0814)"),
    );
}

#[test]
fn criterion_05_example2_inversion() {
    let cfg = preset("example2");
    let p = pipeline(&cfg);
    let m = median_rel_err_f(&p, &cfg, 0.01);
    report(
        5,
        "example2 median rel_err_f over 5 seeds at delta = 1%",
        (0.20..=0.55).contains(&m),
        format!("{m:.4} (band [0.20, 0.55], target 0.3768)"),
    );
}

#[test]
fn criterion_06_mask_indices() {
    let (p1, _) = example1();
    let p2 = pipeline(&preset("example2"));
    let (b1, b2) = (p1.band.global, p2.band.global);
    let ok1 = (29..=33).contains(&b1.j_lo) && (37..=41).contains(&b1.j_hi);
    let ok2 = (26..=30).contains(&b2.j_lo) && (32..=36).contains(&b2.j_hi);
    report(
        6,
        "layer band indices",
        ok1 && ok2,
        format!(
            "example1 ({}, {}) in [29,33]x[37,41] {}, example2 ({}, {}) in [26,30]x[32,36] {}",
            b1.j_lo,
            b1.j_hi,
            if ok1 { "ok" } else { "out" },
            b2.j_lo,
            b2.j_hi,
            if ok2 { "ok" } else { "out" }
        ),
    );
}

#[test]
fn criterion_07_delta_rate() {
    let start = Instant::now();
    let (p, prepare_secs) = example1();
    let cfg = preset("example1");
    let deltas = [0.04, 0.02, 0.01, 0.005];
    let pts: Vec<(f64, f64)> = deltas
        .iter()
        .map(|&d| (d, median_rel_err_f(p, &cfg, d)))
        .collect();
    let slope = aer_cli::loglog_slope(&pts).unwrap();
    let secs = start.elapsed().as_secs_f64() + prepare_secs;
    let medians: Vec<String> = pts
        .iter()
        .map(|(d, m)| format!("{}%: {m:.3}", d * 100.0))
        .collect();
    report(
        7,
        "log-log slope of median rel_err_f vs delta",
        (0.3..=0.8).contains(&slope) && secs < 900.0,
        format!(
            "slope {slope:.3} (band [0.3, 0.8]); medians {}; {secs:.1} s",
            medians.join(", ")
        ),
    );
}

#[test]
fn criterion_08_width_scaling() {
    let base = ProblemSpec::example1();
    let mut ratios = Vec::new();
    for mu in [0.16, 0.08, 0.04, 0.02] {
        let spec = ProblemSpec { mu, ..base.clone() };
        let grid = spec.grid(100, 100).unwrap();
        let front = solve_front(
            &spec,
            &grid,
            &FrontOptions {
                t_end: Some(spec.t0),
                ..FrontOptions::default()
            },
        )
        .unwrap();
        let (h, hx) = front.sample(spec.t0, 0.0).unwrap();
        let w = transition_width(&spec, 0.0, h, hx).unwrap();
        ratios.push(w / (mu * mu.ln().abs()));
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let text: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    report(
        8,
        "delta_h / (mu |ln mu|) across mu = 0.16..0.02",
        hi / lo <= 2.0,
        format!(
            "ratios [{}], max/min {:.3} (<= 2)",
            text.join(", "),
            hi / lo
        ),
    );
}

fn smooth(grid: Grid2D) -> Field2D {
    let pi = std::f64::consts::PI;
    let mut f = Field2D::from_fn(grid, |x, y| {
        4.0 + 0.3 * (pi * x).sin() + 0.4 * y + 0.2 * y * y
    })
    .unwrap();
    f.sync_seam();
    f
}

#[test]
fn criterion_09_property_suites() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    // Q0 matching identity and exponential tail.
    let (mut id_err, mut tail_ok) = (0.0f64, true);
    for _ in 0..2000 {
        let (lo, hi) = (rng.random_range(-10.0..-0.1), rng.random_range(0.1..10.0));
        let k: f64 = rng.random_range(0.1..3.0);
        let h0x = rng.random_range(-0.9..0.9) / k;
        let p = 0.5 * (hi - lo);
        let half = 0.5 * (lo + hi);
        id_err =
            id_err.max((lo + q0_profile(Side::Minus, 0.0, p, k, h0x) - half).abs() / p.max(1.0));
        id_err =
            id_err.max((hi + q0_profile(Side::Plus, 0.0, p, k, h0x) - half).abs() / p.max(1.0));
        let xi = rng.random_range(1.0..60.0);
        let rate = p * (1.0 - k * h0x) / (1.0 + h0x * h0x).sqrt();
        let bound = 2.0 * p * (-xi * rate).exp() * (1.0 + 1e-12);
        tail_ok &= q0_profile(Side::Minus, -xi, p, k, h0x).abs() <= bound;
        tail_ok &= q0_profile(Side::Plus, xi, p, k, h0x).abs() <= bound;
    }
    if id_err > 1e-12 {
        failures.push(format!("Q0 identity {id_err:e}"));
    }
    if !tail_ok {
        failures.push("Q0 tail bound".to_string());
    }

    // Front ODE closed form.
    let spec = ProblemSpec {
        f: ScalarFn::constant(0.0),
        u_minus_a: ScalarFn::constant(-4.0),
        u_plus_a: ScalarFn::constant(2.0),
        h0_star: -1.0,
        t_end: 1.5,
        ..ProblemSpec::example1()
    };
    let front = solve_front(&spec, &spec.grid(40, 40).unwrap(), &FrontOptions::default()).unwrap();
    let front_err = front
        .times
        .iter()
        .zip(&front.h)
        .flat_map(|(t, h)| h.iter().map(move |v| (v - (-1.0 + t)).abs()))
        .fold(0.0, f64::max);
    if front_err > 1e-4 {
        failures.push(format!("front closed form {front_err:e}"));
    }

    // Constant state is a fixed point of the forward solver.
    let flat = ProblemSpec {
        u_minus_a: ScalarFn::constant(1.5),
        u_plus_a: ScalarFn::constant(1.5),
        f: ScalarFn::constant(0.0),
        ..ProblemSpec::example2()
    };
    let run = forward_solve(
        &flat,
        &SolverConfig::new(flat.grid(16, 12).unwrap(), 0.1, vec![0.1]),
    )
    .unwrap();
    if !run.snapshots[0].values().iter().all(|&v| v == 1.5) {
        failures.push("constant state moved".to_string());
    }

    // Discrepancy postcondition.
    let grid = Grid2D::new(-1.0, 1.0, 1.0, 24, 30).unwrap();
    let u = smooth(grid);
    let region = Region::upper(grid, &vec![18; grid.n]).unwrap();
    let mut worst_ratio = 1.0f64;
    for (seed, delta) in [(1u64, 0.005), (2, 0.01), (3, 0.02)] {
        let noisy = add_noise(&u, delta, seed, NoiseKind::Uniform);
        let fit = smooth_values(
            &region,
            &region.gather(&noisy),
            delta,
            &SmoothingOptions::default(),
        )
        .unwrap();
        let r = fit.misfit / delta.powi(4);
        if (r - 1.0).abs() > (worst_ratio - 1.0).abs() {
            worst_ratio = r;
        }
    }
    if !(0.95..=1.05).contains(&worst_ratio) {
        failures.push(format!("discrepancy ratio {worst_ratio}"));
    }

    // Noise determinism.
    for kind in [NoiseKind::Uniform, NoiseKind::Gaussian] {
        let (a, b) = (add_noise(&u, 0.03, 77, kind), add_noise(&u, 0.03, 77, kind));
        if !a
            .values()
            .iter()
            .zip(b.values())
            .all(|(p, q)| p.to_bits() == q.to_bits())
        {
            failures.push(format!("{} noise not reproducible", kind.name()));
        }
    }

    // CSV round trip.
    let noisy = add_noise(&u, 0.03, 5, NoiseKind::Gaussian);
    let mut buf = Vec::new();
    CsvMatrix::from_field("u", &noisy).write(&mut buf).unwrap();
    let back = CsvMatrix::read(buf.as_slice())
        .unwrap()
        .to_partial(&grid)
        .unwrap();
    if !back
        .values()
        .iter()
        .zip(noisy.values())
        .all(|(p, q)| p.to_bits() == q.to_bits())
    {
        failures.push("CSV round trip not bit-exact".to_string());
    }

    report(
        9,
        "property suites",
        failures.is_empty(),
        if failures.is_empty() {
            format!("Q0 identity {id_err:.1e}, front {front_err:.1e}, misfit ratio {worst_ratio:.4}, noise and CSV bit-exact")
        } else {
            failures.join("; ")
        },
    );
}

#[test]
fn criterion_10_u1_oracle() {
    let spec = ProblemSpec::example1();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = rng.random_range(spec.x0..spec.x1);
        let y = rng.random_range(-spec.a..=spec.a);
        let side = if rng.random::<bool>() {
            Side::Minus
        } else {
            Side::Plus
        };
        let oracle = u1_by_characteristic(&spec, |x, y| phi_example1(side, x, y), side, x, y, 400);
        worst = worst.max((eval_u1(&spec, side, x, y).unwrap() - oracle).abs());
    }
    let zero = ProblemSpec {
        f: ScalarFn::constant(0.0),
        ..ProblemSpec::example1()
    };
    let mut zero_max: f64 = 0.0;
    for _ in 0..100 {
        let (x, y) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        for side in [Side::Minus, Side::Plus] {
            zero_max = zero_max.max(eval_u1(&zero, side, x, y).unwrap().abs());
        }
    }
    report(
        10,
        "u1 vs characteristic oracle",
        worst <= 1e-5 && zero_max <= 1e-10,
        format!("max err {worst:.2e} (<= 1e-5), f = 0 max |u1| {zero_max:.1e} (<= 1e-10)"),
    );
}
