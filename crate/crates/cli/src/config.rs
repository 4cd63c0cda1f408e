//! Run configuration: a TOML document with `[problem]`, `[forward]`,
//! `[asymptote]`, `[inverse]` and `[study]` tables.
//!
//! Every key is optional. Missing problem keys come from the preset named by
//! `problem.preset` (or `--preset`), defaulting to `example1`. Expressions
//! are strings in the `aer_core::expr` grammar.

use aer_core::inverse::{AerConfig, EpsRule, MaskMode, NoiseKind, SmoothingOptions};
use aer_core::{ProblemSpec, ScalarFn};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Syntax { path: String, message: String },
    #[error("unknown preset '{0}' (expected example1 or example2)")]
    UnknownPreset(String),
    #[error("{field}: {source}")]
    Expression {
        field: &'static str,
        source: aer_core::ExprError,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub problem: RawProblem,
    #[serde(default)]
    pub forward: RawForward,
    #[serde(default)]
    pub asymptote: RawAsymptote,
    #[serde(default)]
    pub inverse: RawInverse,
    #[serde(default)]
    pub study: RawStudy,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProblem {
    pub preset: Option<String>,
    pub mu: Option<f64>,
    pub k: Option<f64>,
    pub x0: Option<f64>,
    pub x1: Option<f64>,
    pub a: Option<f64>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub u_minus_a: Option<String>,
    pub u_plus_a: Option<String>,
    pub f: Option<String>,
    pub h0_star: Option<f64>,
    pub t0: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawForward {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
    pub snapshot_times: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAsymptote {
    pub first_order: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInverse {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub noise: Option<String>,
    pub mask: Option<String>,
    pub gradient_measured: Option<bool>,
    /// `"discrepancy"` or a fixed weight.
    pub smoothing_eps: Option<EpsSetting>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum EpsSetting {
    Rule(String),
    Fixed(f64),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawStudy {
    pub delta: Option<Vec<f64>>,
    pub mu: Option<Vec<f64>>,
    pub grid: Option<Vec<usize>>,
    pub seeds: Option<Vec<u64>>,
    pub workers: Option<usize>,
}

/// Problem block with expressions kept as text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemConfig {
    pub preset: String,
    pub mu: f64,
    pub k: f64,
    pub x0: f64,
    pub x1: f64,
    pub a: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub u_minus_a: String,
    pub u_plus_a: String,
    pub f: String,
    pub h0_star: f64,
    pub t0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardConfig {
    pub n: usize,
    pub m: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoteConfig {
    pub first_order: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseConfig {
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    pub seed: u64,
    pub noise: String,
    pub mask: String,
    pub gradient_measured: bool,
    pub smoothing_eps: EpsSetting,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    pub delta: Vec<f64>,
    pub mu: Vec<f64>,
    pub grid: Vec<usize>,
    pub seeds: Vec<u64>,
    pub workers: usize,
}

/// Fully resolved configuration, embedded verbatim in every JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub forward: ForwardConfig,
    pub asymptote: AsymptoteConfig,
    pub inverse: InverseConfig,
    pub study: StudyConfig,
}

/// Preset-specific defaults beyond the problem block.
fn preset_grid(name: &str) -> (usize, usize) {
    match name {
        "example1" | "example2" => (50, 50),
        _ => (50, 50),
    }
}

fn problem_text(spec: &ProblemSpec, preset: &str) -> ProblemConfig {
    ProblemConfig {
        preset: preset.to_string(),
        mu: spec.mu,
        k: spec.k,
        x0: spec.x0,
        x1: spec.x1,
        a: spec.a,
        t_end: spec.t_end,
        u_minus_a: spec.u_minus_a.source().to_string(),
        u_plus_a: spec.u_plus_a.source().to_string(),
        f: spec.f.source().to_string(),
        h0_star: spec.h0_star,
        t0: spec.t0,
    }
}

impl RawConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax {
            path: origin.to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Fills defaults. `preset` and `seed` override the file when given.
    pub fn resolve(
        self,
        preset: Option<&str>,
        seed: Option<u64>,
    ) -> Result<RunConfig, ConfigError> {
        let name = preset
            .map(str::to_string)
            .or(self.problem.preset.clone())
            .unwrap_or_else(|| "example1".into());
        let base =
            ProblemSpec::preset(&name).ok_or_else(|| ConfigError::UnknownPreset(name.clone()))?;
        let base_text = problem_text(&base, &name);
        let p = self.problem;
        let problem = ProblemConfig {
            preset: name.clone(),
            mu: p.mu.unwrap_or(base_text.mu),
            k: p.k.unwrap_or(base_text.k),
            x0: p.x0.unwrap_or(base_text.x0),
            x1: p.x1.unwrap_or(base_text.x1),
            a: p.a.unwrap_or(base_text.a),
            t_end: p.t_end.unwrap_or(base_text.t_end),
            u_minus_a: p.u_minus_a.unwrap_or(base_text.u_minus_a),
            u_plus_a: p.u_plus_a.unwrap_or(base_text.u_plus_a),
            f: p.f.unwrap_or(base_text.f),
            h0_star: p.h0_star.unwrap_or(base_text.h0_star),
            t0: p.t0.unwrap_or(base_text.t0),
        };
        let (obs_n, obs_m) = preset_grid(&name);
        let fw = self.forward;
        let snapshot_times = fw.snapshot_times.unwrap_or_else(|| vec![problem.t0]);
        let t_end = fw
            .t_end
            .unwrap_or_else(|| snapshot_times.iter().copied().fold(problem.t0, f64::max));
        let forward = ForwardConfig {
            n: fw.n.unwrap_or(2 * obs_n),
            m: fw.m.unwrap_or(2 * obs_m),
            cfl: fw.cfl.unwrap_or(0.4),
            t_end,
            snapshot_times,
        };
        let inv = self.inverse;
        let inverse = InverseConfig {
            n: inv.n.unwrap_or(obs_n),
            m: inv.m.unwrap_or(obs_m),
            delta: inv.delta.unwrap_or(0.01),
            seed: seed.or(inv.seed).unwrap_or(0),
            noise: inv
                .noise
                .unwrap_or_else(|| NoiseKind::Uniform.name().into()),
            mask: inv.mask.unwrap_or_else(|| MaskMode::Global.name().into()),
            gradient_measured: inv.gradient_measured.unwrap_or(false),
            smoothing_eps: inv
                .smoothing_eps
                .unwrap_or(EpsSetting::Rule("discrepancy".into())),
        };
        let st = self.study;
        let study = StudyConfig {
            delta: st.delta.unwrap_or_default(),
            mu: st.mu.unwrap_or_default(),
            grid: st.grid.unwrap_or_default(),
            seeds: st.seeds.unwrap_or_else(|| vec![inverse.seed]),
            workers: st.workers.unwrap_or(0),
        };
        let cfg = RunConfig {
            problem,
            forward,
            asymptote: AsymptoteConfig {
                first_order: self.asymptote.first_order.unwrap_or(false),
            },
            inverse,
            study,
        };
        cfg.spec()?;
        cfg.aer()?;
        Ok(cfg)
    }
}

fn expression(field: &'static str, text: &str) -> Result<ScalarFn, ConfigError> {
    ScalarFn::parse(text).map_err(|source| ConfigError::Expression { field, source })
}

impl RunConfig {
    pub fn spec(&self) -> Result<ProblemSpec, ConfigError> {
        let p = &self.problem;
        let spec = ProblemSpec {
            mu: p.mu,
            k: p.k,
            x0: p.x0,
            x1: p.x1,
            a: p.a,
            t_end: p.t_end,
            u_minus_a: expression("problem.u_minus_a", &p.u_minus_a)?,
            u_plus_a: expression("problem.u_plus_a", &p.u_plus_a)?,
            f: expression("problem.f", &p.f)?,
            h0_star: p.h0_star,
            t0: p.t0,
        };
        spec.validate()
            .map_err(|e| ConfigError::Invalid(format!("problem: {e}")))?;
        Ok(spec)
    }

    pub fn aer(&self) -> Result<AerConfig, ConfigError> {
        let inv = &self.inverse;
        let noise = match inv.noise.as_str() {
            "uniform" => NoiseKind::Uniform,
            "gaussian" => NoiseKind::Gaussian,
            other => {
                return Err(ConfigError::Invalid(format!(
                    "inverse.noise: unknown kind '{other}'"
                )))
            }
        };
        let mask_mode = match inv.mask.as_str() {
            "global" => MaskMode::Global,
            "per_column" => MaskMode::PerColumn,
            other => {
                return Err(ConfigError::Invalid(format!(
                    "inverse.mask: unknown mode '{other}'"
                )))
            }
        };
        let rule = match &inv.smoothing_eps {
            EpsSetting::Rule(r) if r == "discrepancy" => EpsRule::Discrepancy,
            EpsSetting::Rule(r) => {
                return Err(ConfigError::Invalid(format!(
                    "inverse.smoothing_eps: expected \"discrepancy\" or a number, got '{r}'"
                )))
            }
            EpsSetting::Fixed(e) if *e > 0.0 && e.is_finite() => EpsRule::Fixed(*e),
            EpsSetting::Fixed(e) => {
                return Err(ConfigError::Invalid(format!(
                    "inverse.smoothing_eps must be positive, got {e}"
                )))
            }
        };
        if !(inv.delta >= 0.0 && inv.delta.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "inverse.delta must be >= 0, got {}",
                inv.delta
            )));
        }
        Ok(AerConfig {
            delta: inv.delta,
            seed: inv.seed,
            noise,
            mask_mode,
            gradient_measured: inv.gradient_measured,
            smoothing: SmoothingOptions {
                rule,
                ..SmoothingOptions::default()
            },
            ..AerConfig::default()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_example1() {
        let cfg = RawConfig::parse("", "<test>")
            .unwrap()
            .resolve(None, None)
            .unwrap();
        let (spec, ex1) = (cfg.spec().unwrap(), ProblemSpec::example1());
        assert_eq!(
            (spec.mu, spec.k, spec.a, spec.t0),
            (ex1.mu, ex1.k, ex1.a, ex1.t0)
        );
        assert_eq!(spec.u_minus_a.eval(0.3, 0.0), -4.0);
        assert_eq!(spec.f.eval(0.3, -0.2), ex1.f.eval(0.3, -0.2));
        assert_eq!((cfg.forward.n, cfg.inverse.n), (100, 50));
        assert_eq!(cfg.forward.snapshot_times, vec![0.7]);
    }

    #[test]
    fn overrides_and_preset_flag() {
        let text = "[problem]\npreset = \"example1\"\nmu = 0.04\n[inverse]\nseed = 3\n";
        let cfg = RawConfig::parse(text, "<test>")
            .unwrap()
            .resolve(Some("example2"), Some(9))
            .unwrap();
        assert_eq!(cfg.problem.preset, "example2");
        assert_eq!(cfg.problem.mu, 0.04);
        assert_eq!(cfg.problem.k, 1.0);
        assert_eq!(cfg.inverse.seed, 9);
    }

    #[test]
    fn bad_expression_reports_offset() {
        let text = "[problem]\nf = \"cos(x\"\n";
        let err = RawConfig::parse(text, "<test>")
            .unwrap()
            .resolve(None, None)
            .unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("problem.f") && msg.contains("offset 3"),
            "{msg}"
        );
    }

    #[test]
    fn unknown_keys_and_values_rejected() {
        assert!(RawConfig::parse("[problem]\nnu = 1\n", "<test>").is_err());
        let raw = RawConfig::parse("[inverse]\nnoise = \"pink\"\n", "<test>").unwrap();
        assert!(raw.resolve(None, None).is_err());
        let raw = RawConfig::parse("[inverse]\nsmoothing_eps = 1e-3\n", "<test>").unwrap();
        let cfg = raw.resolve(None, None).unwrap();
        assert_eq!(cfg.aer().unwrap().smoothing.rule, EpsRule::Fixed(1e-3));
    }
}
