//! The `forward`, `asymptote` and `invert` subcommands.

use crate::config::RunConfig;
use crate::csvio::{fmt_num, CsvMatrix};
use crate::error::CliError;
use crate::output::OutDir;
use aer_core::asymptotics::{
    assemble_u0_with, check_assumption1, check_assumption2, solve_front, transition_width,
    AssumptionReport, FrontOptions, OuterPair,
};
use aer_core::inverse::{Pipeline, PRNG_NAME};
use aer_core::{forward_solve, AerMetrics, ProblemSpec, SolverConfig};
use serde_json::{json, Value};
use std::path::Path;
use std::time::Instant;

pub fn solver_config(cfg: &RunConfig, spec: &ProblemSpec) -> Result<SolverConfig, CliError> {
    let grid = spec.grid(cfg.forward.n, cfg.forward.m)?;
    Ok(SolverConfig {
        cfl: cfg.forward.cfl,
        ..SolverConfig::new(grid, cfg.forward.t_end, cfg.forward.snapshot_times.clone())
    })
}

fn snapshot_name(t: f64) -> String {
    format!("u_t{t:.6}.csv")
}

/// Writes one CSV per snapshot time and `forward.json`.
pub fn cmd_forward(cfg: &RunConfig, out: &Path) -> Result<Value, CliError> {
    let spec = cfg.spec()?;
    let solver = solver_config(cfg, &spec)?;
    let mut dir = OutDir::create(out)?;
    let start = Instant::now();
    let run = forward_solve(&spec, &solver)?;
    let wall = start.elapsed().as_secs_f64();
    let mut files = Vec::new();
    for (t, snap) in cfg.forward.snapshot_times.iter().zip(&run.snapshots) {
        let name = snapshot_name(*t);
        dir.matrix(&name, &CsvMatrix::from_field("u", snap))?;
        files.push(json!({ "time": t, "file": name }));
    }
    let summary = json!({
        "config": cfg,
        "seed": cfg.inverse.seed,
        "steps": run.steps(),
        "dt_history": run.dt_history,
        "wall_time_s": wall,
        "snapshots": files,
    });
    dir.json("forward.json", &summary)?;
    Ok(summary)
}

fn report_json(rep: &AssumptionReport) -> Value {
    json!({
        "assumption": rep.number,
        "passed": rep.passed,
        "worst_margin": rep.worst_margin,
        "violations": rep.violations,
        "diagnostics": rep.diagnostics.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
    })
}

/// Checks the trace and source assumptions, then writes the outer
/// functions, the front, the layer width and `U0` at the observation time.
/// A failed check writes the report and returns exit status 2.
pub fn cmd_asymptote(cfg: &RunConfig, out: &Path) -> Result<Value, CliError> {
    let spec = cfg.spec()?;
    let grid = spec.grid(cfg.forward.n, cfg.forward.m)?;
    let mut dir = OutDir::create(out)?;
    let reports = [check_assumption1(&spec), check_assumption2(&spec)];
    let passed = reports.iter().all(|r| r.passed);
    let report = json!({
        "config": cfg,
        "seed": cfg.inverse.seed,
        "passed": passed,
        "checks": reports.iter().map(report_json).collect::<Vec<_>>(),
    });
    dir.json("assumptions.json", &report)?;
    if !passed {
        let failed: Vec<String> = reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| {
                let first = r
                    .violations
                    .first()
                    .map(String::as_str)
                    .unwrap_or("no detail");
                match r.violations.len() {
                    0 | 1 => format!("Assumption {} violated: {first}", r.number),
                    n => format!(
                        "Assumption {} violated: {first} (and {} more; worst margin {:e})",
                        r.number,
                        n - 1,
                        r.worst_margin
                    ),
                }
            })
            .collect();
        return Err(CliError::AssumptionReport(failed.join("\n")));
    }

    let mut outer = OuterPair::on_grid(&spec, &grid)?;
    if cfg.asymptote.first_order {
        outer = outer.with_first_order(&spec)?;
    }
    dir.matrix(
        "phi_minus.csv",
        &CsvMatrix::from_field("phi_minus", &outer.phi_minus),
    )?;
    dir.matrix(
        "phi_plus.csv",
        &CsvMatrix::from_field("phi_plus", &outer.phi_plus),
    )?;
    if let (Some(lo), Some(hi)) = (&outer.u1_minus, &outer.u1_plus) {
        dir.matrix("u1_minus.csv", &CsvMatrix::from_field("u1_minus", lo))?;
        dir.matrix("u1_plus.csv", &CsvMatrix::from_field("u1_plus", hi))?;
    }

    let opts = FrontOptions {
        stop_times: cfg.forward.snapshot_times.clone(),
        ..FrontOptions::default()
    };
    let front = solve_front(&spec, &grid, &opts)?;
    let mut rows = Vec::with_capacity(front.len() * front.xs.len());
    for (s, &t) in front.times.iter().enumerate() {
        for (i, &x) in front.xs.iter().enumerate() {
            rows.push(vec![
                fmt_num(t),
                fmt_num(x),
                fmt_num(front.h[s][i]),
                fmt_num(front.hx[s][i]),
            ]);
        }
    }
    dir.table("front.csv", &["time", "x", "h", "hx"], &rows)?;

    let t0 = spec.t0;
    let (h, hx) = front.at(t0)?;
    let mut width_rows = Vec::with_capacity(h.len());
    for (i, &x) in front.xs.iter().enumerate() {
        let w = transition_width(&spec, x, h[i], hx[i])?;
        width_rows.push(vec![fmt_num(x), fmt_num(h[i]), fmt_num(hx[i]), fmt_num(w)]);
    }
    dir.table("width.csv", &["x", "h", "hx", "delta_h"], &width_rows)?;

    let u0 = assemble_u0_with(&spec, &front, &outer, t0)?;
    dir.matrix("u0.csv", &CsvMatrix::from_field("u0", &u0))?;

    let (h_mid, hx_mid) = front.sample(t0, 0.5 * (spec.x0 + spec.x1))?;
    let summary = json!({
        "config": cfg,
        "seed": cfg.inverse.seed,
        "passed": true,
        "front_range": [h.iter().copied().fold(f64::INFINITY, f64::min), h.iter().copied().fold(f64::NEG_INFINITY, f64::max)],
        "t0": t0,
        "delta_h_mid": transition_width(&spec, 0.5 * (spec.x0 + spec.x1), h_mid, hx_mid)?,
        "front_times": front.len(),
    });
    dir.json("asymptote.json", &summary)?;
    Ok(summary)
}

pub fn metrics_json(m: &AerMetrics) -> Value {
    json!({
        "rel_err_u0": m.rel_err_u0,
        "rel_err_f": m.rel_err_f,
        "eps_minus": m.eps_minus,
        "eps_plus": m.eps_plus,
        "eps_f": m.eps_f,
        "misfit_minus": m.misfit_minus,
        "misfit_plus": m.misfit_plus,
        "m_minus": m.m_minus,
        "m_plus": m.m_plus,
        "delta": m.delta,
        "seed": m.seed,
        "prng": m.prng,
        "branch": m.branch.name(),
    })
}

/// Runs the full pipeline once and writes `u_delta`, `u_eps`, `g`,
/// `f_delta`, `f_exact` and `metrics.json`.
pub fn cmd_invert(cfg: &RunConfig, out: &Path) -> Result<Value, CliError> {
    let spec = cfg.spec()?;
    let aer = cfg.aer()?;
    let solver = solver_config(cfg, &spec)?;
    let mut dir = OutDir::create(out)?;
    let pipeline = Pipeline::prepare(&spec, &solver, cfg.inverse.n, cfg.inverse.m)?;
    let outcome = pipeline.run(&aer)?;
    dir.matrix(
        "u_delta.csv",
        &CsvMatrix::from_field("u_delta", &outcome.observation.u_delta),
    )?;
    if let Some(s) = &outcome.smoothing {
        dir.matrix("u_eps.csv", &CsvMatrix::from_partial("u_eps", &s.u_eps()))?;
    }
    dir.matrix("g.csv", &CsvMatrix::from_partial("g", &outcome.g))?;
    dir.matrix(
        "f_delta.csv",
        &CsvMatrix::from_field("f_delta", &outcome.reconstruction.f_delta),
    )?;
    dir.matrix(
        "f_exact.csv",
        &CsvMatrix::from_field("f_exact", &pipeline.f_exact),
    )?;
    let mut metrics = metrics_json(&outcome.metrics);
    metrics["config"] = json!(cfg);
    metrics["prng"] = json!(PRNG_NAME);
    dir.json("metrics.json", &metrics)?;
    Ok(metrics)
}
