use aer_core::asymptotics::{solve_front, FrontOptions};
use aer_core::forward::{forward_solve, SolverConfig};
use aer_core::inverse::{median, AerConfig, Pipeline};
use aer_core::{Field2D, ProblemSpec, ScalarFn};

fn example1_at(n: usize) -> Field2D {
    let spec = ProblemSpec::example1();
    let grid = spec.grid(n, n).unwrap();
    forward_solve(&spec, &SolverConfig::new(grid, spec.t0, vec![spec.t0]))
        .unwrap()
        .snapshots
        .remove(0)
}

/// Max difference between a field and a finer one on the common nodes.
fn gap(coarse: &Field2D, fine: &Field2D) -> f64 {
    let (gc, gf) = (coarse.grid(), fine.grid());
    let r = gf.n / gc.n;
    let mut acc = 0.0;
    for j in 0..=gc.m {
        for i in 0..=gc.n {
            acc += gc.weight(i, j) * (coarse.get(i, j) - fine.get(r * i, r * j)).powi(2);
        }
    }
    acc.sqrt()
}

#[test]
fn forward_self_convergence() {
    let (u50, u100, u200) = (example1_at(50), example1_at(100), example1_at(200));
    let (e1, e2) = (gap(&u50, &u100), gap(&u100, &u200));
    assert!(e1 / e2 >= 1.8, "gaps {e1} {e2}, ratio {}", e1 / e2);
}

#[test]
fn front_moves_at_unit_speed_without_source() {
    let spec = ProblemSpec {
        f: ScalarFn::constant(0.0),
        u_minus_a: ScalarFn::constant(-4.0),
        u_plus_a: ScalarFn::constant(2.0),
        h0_star: -1.0,
        t_end: 1.5,
        ..ProblemSpec::example1()
    };
    let grid = spec.grid(40, 40).unwrap();
    let front = solve_front(&spec, &grid, &FrontOptions::default()).unwrap();
    for (t, h) in front.times.iter().zip(&front.h) {
        for v in h {
            assert!((v - (spec.h0_star + t)).abs() <= 1e-4, "t = {t}: {v}");
        }
    }
}

#[test]
fn error_grows_with_noise_level() {
    let spec = ProblemSpec::example1();
    let fine = spec.grid(100, 100).unwrap();
    let p = Pipeline::prepare(&spec, &SolverConfig::new(fine, spec.t0, vec![]), 50, 50).unwrap();
    let med = |delta: f64| {
        let cfgs: Vec<_> = (0..5)
            .map(|seed| AerConfig {
                delta,
                seed,
                ..AerConfig::default()
            })
            .collect();
        let errs: Vec<f64> = p
            .run_many(&cfgs)
            .into_iter()
            .map(|r| r.unwrap().metrics.rel_err_f)
            .collect();
        median(&errs).unwrap()
    };
    let (hi, mid, lo) = (med(0.04), med(0.01), med(0.0025));
    assert!(hi > mid && mid > lo, "{hi} {mid} {lo}");
}

#[test]
fn noise_free_recovery_on_resolved_data() {
    // The forward layer must be resolved well below the observation spacing
    // for the rows next to the band to be free of layer tails.
    let spec = ProblemSpec::example1();
    let fine = spec.grid(400, 400).unwrap();
    let p = Pipeline::prepare(&spec, &SolverConfig::new(fine, spec.t0, vec![]), 50, 50).unwrap();
    for measured in [false, true] {
        let out = p
            .run(&AerConfig {
                delta: 0.0,
                gradient_measured: measured,
                ..AerConfig::default()
            })
            .unwrap();
        assert!(
            out.metrics.rel_err_f <= 0.2,
            "measured = {measured}: {}",
            out.metrics.rel_err_f
        );
    }
}
