//! Parameter sweeps.
//!
//! Each non-empty list in `[study]` (`delta`, `mu`, `grid`) is an axis swept
//! with every other parameter at its resolved value; every point runs all
//! `seeds`. With no axis given the resolved configuration is run once per
//! seed. Grid values are observation sizes `n = m`; the forward grid keeps
//! its refinement ratio.

use crate::commands::{metrics_json, solver_config};
use crate::config::RunConfig;
use crate::csvio::fmt_num;
use crate::error::CliError;
use crate::output::OutDir;
use aer_core::asymptotics::transition_width;
use aer_core::inverse::{median, Pipeline};
use aer_core::{AerConfig, AerError, AerOutcome};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::Path;

pub const WORKERS_ENV: &str = "AER_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Delta,
    Mu,
    Grid,
    Seed,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Delta => "delta",
            Axis::Mu => "mu",
            Axis::Grid => "grid",
            Axis::Seed => "seed",
        }
    }
}

/// One run of a sweep.
#[derive(Debug, Clone)]
pub struct StudyRow {
    pub axis: Axis,
    pub value: f64,
    pub delta: f64,
    pub mu: f64,
    pub n: usize,
    pub seed: u64,
    pub result: Result<Value, String>,
}

impl StudyRow {
    pub fn rel_err_f(&self) -> Option<f64> {
        self.result
            .as_ref()
            .ok()
            .and_then(|m| m["rel_err_f"].as_f64())
    }
}

/// Least-squares slope of `ln y` against `ln x` over points with both
/// coordinates positive and finite; `None` with fewer than two such points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Resolves the worker cap: the environment variable wins over the config;
/// zero means the rayon default.
pub fn worker_count(cfg: &RunConfig) -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Config(crate::config::ConfigError::Invalid(format!(
                "{WORKERS_ENV} must be a non-negative integer, got '{v}'"
            )))
        }),
        Err(_) => Ok(cfg.study.workers),
    }
}

/// Rows of one sweep point and its width ratio (mu axis only).
type PointResult = (Vec<StudyRow>, Option<f64>);

struct Point {
    axis: Axis,
    value: f64,
    cfg: RunConfig,
}

fn points(cfg: &RunConfig) -> Vec<Point> {
    let mut out = Vec::new();
    for &d in &cfg.study.delta {
        let mut c = cfg.clone();
        c.inverse.delta = d;
        out.push(Point {
            axis: Axis::Delta,
            value: d,
            cfg: c,
        });
    }
    for &mu in &cfg.study.mu {
        let mut c = cfg.clone();
        c.problem.mu = mu;
        out.push(Point {
            axis: Axis::Mu,
            value: mu,
            cfg: c,
        });
    }
    for &n in &cfg.study.grid {
        let mut c = cfg.clone();
        let (rx, ry) = (
            cfg.forward.n / cfg.inverse.n.max(1),
            cfg.forward.m / cfg.inverse.m.max(1),
        );
        c.inverse.n = n;
        c.inverse.m = n;
        c.forward.n = n * rx.max(1);
        c.forward.m = n * ry.max(1);
        out.push(Point {
            axis: Axis::Grid,
            value: n as f64,
            cfg: c,
        });
    }
    if out.is_empty() {
        out.push(Point {
            axis: Axis::Seed,
            value: f64::NAN,
            cfg: cfg.clone(),
        });
    }
    out
}

/// A point's prepared pipeline is shared by all of its seeds.
fn run_point(p: &Point, seeds: &[u64]) -> PointResult {
    let row = |seed, result| StudyRow {
        axis: p.axis,
        value: p.value,
        delta: p.cfg.inverse.delta,
        mu: p.cfg.problem.mu,
        n: p.cfg.inverse.n,
        seed,
        result,
    };
    let prepared = (|| -> Result<(Pipeline, AerConfig), CliError> {
        let spec = p.cfg.spec()?;
        let solver = solver_config(&p.cfg, &spec)?;
        Ok((
            Pipeline::prepare(&spec, &solver, p.cfg.inverse.n, p.cfg.inverse.m)?,
            p.cfg.aer()?,
        ))
    })();
    let (pipeline, aer) = match prepared {
        Ok(x) => x,
        Err(e) => {
            return (
                seeds.iter().map(|&s| row(s, Err(e.to_string()))).collect(),
                None,
            )
        }
    };
    let width_ratio = (p.axis == Axis::Mu)
        .then(|| width_ratio(&pipeline))
        .flatten();
    let cfgs: Vec<AerConfig> = seeds
        .iter()
        .map(|&seed| AerConfig {
            seed,
            ..aer.clone()
        })
        .collect();
    let results: Vec<Result<AerOutcome, AerError>> = pipeline.run_many(&cfgs);
    let rows = seeds
        .iter()
        .zip(results)
        .map(|(&s, r)| {
            row(
                s,
                r.map(|o| metrics_json(&o.metrics))
                    .map_err(|e| e.to_string()),
            )
        })
        .collect();
    (rows, width_ratio)
}

/// `Delta h / (mu |ln mu|)` at the mid-period front point at `t0`.
fn width_ratio(p: &Pipeline) -> Option<f64> {
    let spec = &p.spec;
    let x = 0.5 * (spec.x0 + spec.x1);
    let (h, hx) = p.front.sample(spec.t0, x).ok()?;
    let w = transition_width(spec, x, h, hx).ok()?;
    Some(w / (spec.mu * spec.mu.ln().abs()))
}

pub const ROW_HEADER: [&str; 16] = [
    "axis",
    "value",
    "delta",
    "mu",
    "n",
    "seed",
    "status",
    "rel_err_f",
    "rel_err_u0",
    "eps_minus",
    "eps_plus",
    "eps_f",
    "m_minus",
    "m_plus",
    "branch",
    "error",
];

fn row_cells(r: &StudyRow) -> Vec<String> {
    let num = |m: &Value, key: &str| m[key].as_f64().map(fmt_num).unwrap_or_default();
    let int = |m: &Value, key: &str| m[key].as_u64().map(|v| v.to_string()).unwrap_or_default();
    let mut cells = vec![
        r.axis.name().to_string(),
        fmt_num(r.value),
        fmt_num(r.delta),
        fmt_num(r.mu),
        r.n.to_string(),
        r.seed.to_string(),
    ];
    match &r.result {
        Ok(m) => cells.extend([
            "ok".to_string(),
            num(m, "rel_err_f"),
            num(m, "rel_err_u0"),
            num(m, "eps_minus"),
            num(m, "eps_plus"),
            num(m, "eps_f"),
            int(m, "m_minus"),
            int(m, "m_plus"),
            m["branch"].as_str().unwrap_or_default().to_string(),
            String::new(),
        ]),
        Err(e) => {
            cells.push("error".to_string());
            cells.extend(std::iter::repeat(String::new()).take(8));
            cells.push(e.clone());
        }
    }
    cells
}

/// Runs the sweep and writes `study_runs.csv`, `study.json` and one
/// metrics file per run under `runs/`.
pub fn cmd_study(cfg: &RunConfig, out: &Path) -> Result<Value, CliError> {
    cfg.spec()?;
    let workers = worker_count(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| {
            CliError::Config(crate::config::ConfigError::Invalid(format!(
                "worker pool: {e}"
            )))
        })?;
    let pts = points(cfg);
    let seeds = cfg.study.seeds.clone();
    let results: Vec<PointResult> =
        pool.install(|| pts.par_iter().map(|p| run_point(p, &seeds)).collect());

    let mut dir = OutDir::create(out)?;
    std::fs::create_dir_all(dir.path("runs")).map_err(|source| CliError::File {
        path: dir.path("runs"),
        source,
    })?;
    let rows: Vec<&StudyRow> = results.iter().flat_map(|(r, _)| r).collect();
    for (idx, r) in rows.iter().enumerate() {
        let body = match &r.result {
            Ok(m) => json!({ "status": "ok", "metrics": m }),
            Err(e) => json!({ "status": "error", "error": e }),
        };
        let name = format!("runs/{idx:04}_{}_seed{}.json", r.axis.name(), r.seed);
        dir.json(
            &name,
            &json!({ "run": body, "axis": r.axis.name(), "value": r.value, "seed": r.seed }),
        )?;
    }
    let cells: Vec<Vec<String>> = rows.iter().map(|r| row_cells(r)).collect();
    dir.table("study_runs.csv", &ROW_HEADER, &cells)?;

    let mut axes = Vec::new();
    for axis in [Axis::Delta, Axis::Mu, Axis::Grid, Axis::Seed] {
        let group: Vec<(&Point, &PointResult)> = pts
            .iter()
            .zip(&results)
            .filter(|(p, _)| p.axis == axis)
            .collect();
        if group.is_empty() {
            continue;
        }
        let summary: Vec<Value> = group
            .iter()
            .map(|(p, (rows, ratio))| {
                let errs: Vec<f64> = rows.iter().filter_map(StudyRow::rel_err_f).collect();
                json!({
                    "value": p.value,
                    "median_rel_err_f": median(&errs),
                    "runs": rows.len(),
                    "failures": rows.iter().filter(|r| r.result.is_err()).count(),
                    "width_ratio": ratio,
                })
            })
            .collect();
        let fit: Vec<(f64, f64)> = group
            .iter()
            .filter_map(|(p, (rows, _))| {
                let errs: Vec<f64> = rows.iter().filter_map(StudyRow::rel_err_f).collect();
                let x = match axis {
                    Axis::Grid => (p.cfg.problem.x1 - p.cfg.problem.x0) / p.value,
                    _ => p.value,
                };
                median(&errs).map(|m| (x, m))
            })
            .collect();
        let slope = if axis == Axis::Seed {
            None
        } else {
            loglog_slope(&fit)
        };
        let mut entry = json!({ "axis": axis.name(), "points": summary, "slope": slope });
        if axis == Axis::Grid {
            entry["slope_abscissa"] = json!("mesh spacing");
        }
        if axis == Axis::Mu {
            let ratios: Vec<f64> = group.iter().filter_map(|(_, (_, r))| *r).collect();
            let (lo, hi) = ratios
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| {
                    (a.min(r), b.max(r))
                });
            entry["width_ratio_spread"] = if ratios.is_empty() {
                Value::Null
            } else {
                json!(hi / lo)
            };
        }
        axes.push(entry);
    }
    let summary = json!({
        "config": cfg,
        "seeds": seeds,
        "workers": workers,
        "runs": rows.len(),
        "axes": axes,
    });
    dir.json("study.json", &summary)?;
    Ok(summary)
}
