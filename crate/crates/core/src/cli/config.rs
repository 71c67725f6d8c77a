//! Run configuration: `key = value` text with `[section]` headers, plus
//! command-line overrides.
//!
//! ```text
//! [problem]
//! name = pendulum
//! g = 9.8
//! [trajectory]
//! kind = separatrix
//! [interval]
//! alpha = 0
//! beta = 2
//! [phi]
//! lambda = 1
//! n = 3
//! ```
//!
//! Keys may also appear before any section under their flat names
//! (`problem`, `alpha`, `phi_file`, ...). `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::lagrangian::{self, LagrangianModel, ModelParams};
use crate::pendulum::{self, PendulumParams};
use crate::quadrature::{Interval, QuadratureSpec};
use crate::sampled::SampledCurve;
use crate::second_variation::{run_check, CheckReport, Trajectory};
use crate::testfn::TestFunction;

/// Every accepted flat key.
pub const KEYS: &[&str] = &[
    "problem",
    "m",
    "ell",
    "g",
    "k",
    "theta0",
    "terms",
    "trajectory",
    "traj_file",
    "y0",
    "slope",
    "theta_dot0",
    "steps",
    "alpha",
    "beta",
    "lambda",
    "n",
    "phi_file",
    "allow_large_n",
    "rule",
    "panels",
    "tol",
    "max_panels",
    "format",
    "out",
];

fn canonical(section: Option<&str>, key: &str) -> Option<&'static str> {
    let flat = match (section, key) {
        (Some("problem"), "name") => "problem",
        (Some("trajectory"), "kind") => "trajectory",
        (Some("trajectory"), "file") => "traj_file",
        (Some("phi"), "file") => "phi_file",
        (Some("output"), "path") => "out",
        (Some("problem"), k @ ("m" | "ell" | "g" | "k" | "theta0" | "terms")) => k,
        (Some("trajectory"), k @ ("y0" | "slope" | "theta_dot0" | "steps")) => k,
        (Some("interval"), k @ ("alpha" | "beta")) => k,
        (Some("phi"), k @ ("lambda" | "n" | "allow_large_n")) => k,
        (Some("quadrature"), k @ ("rule" | "panels" | "tol" | "max_panels")) => k,
        (Some("output"), "format") => "format",
        (None, k) => k,
        _ => return None,
    };
    KEYS.iter().copied().find(|k| *k == flat)
}

/// Where a setting came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    File { path: String, line: usize },
    Flag,
    Axis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub value: String,
    pub source: Source,
}

/// Raw flat-key settings before interpretation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    map: BTreeMap<&'static str, Setting>,
}

impl Settings {
    /// Parses config text; `path` is used only in messages.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: String| Error::Parse {
                path: path.to_string(),
                line,
                msg,
            };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header '{body}'")))?
                    .trim();
                if ![
                    "problem",
                    "trajectory",
                    "interval",
                    "phi",
                    "quadrature",
                    "output",
                ]
                .contains(&name)
                {
                    return Err(err(format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', found '{body}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let flat = canonical(section.as_deref(), key).ok_or_else(|| {
                let where_ = section
                    .as_deref()
                    .map(|s| format!(" in [{s}]"))
                    .unwrap_or_default();
                err(format!("unknown key '{key}'{where_}"))
            })?;
            if value.is_empty() {
                return Err(err(format!("empty value for '{key}'")));
            }
            let setting = Setting {
                value: value.to_string(),
                source: Source::File {
                    path: path.to_string(),
                    line,
                },
            };
            if let Some(prev) = map.insert(flat, setting) {
                let first = match prev.source {
                    Source::File { line, .. } => line,
                    _ => 0,
                };
                return Err(err(format!("'{flat}' already set on line {first}")));
            }
        }
        Ok(Self { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: shown.clone(),
            msg: e.to_string(),
        })?;
        Self::parse(&text, &shown)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>, source: Source) -> Result<()> {
        let flat = canonical(None, key)
            .ok_or_else(|| Error::Config(format!("unknown setting '{key}'")))?;
        self.map.insert(
            flat,
            Setting {
                value: value.into(),
                source,
            },
        );
        Ok(())
    }

    fn raw(&self, key: &str) -> Option<&Setting> {
        self.map.get(key)
    }

    fn fail(&self, key: &str, msg: impl fmt::Display) -> Error {
        match self.raw(key).map(|s| &s.source) {
            Some(Source::File { path, line }) => Error::Parse {
                path: path.clone(),
                line: *line,
                msg: format!("{key}: {msg}"),
            },
            Some(Source::Flag) => Error::Config(format!("--{}: {msg}", key.replace('_', "-"))),
            _ => Error::Config(format!("{key}: {msg}")),
        }
    }

    /// Raw text of a setting, if present.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.raw(key).map(|s| s.value.as_str())
    }

    fn string(&self, key: &str) -> Option<&str> {
        self.get(key)
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        let Some(s) = self.string(key) else {
            return Ok(None);
        };
        let v: f64 =
            parse_real(s).ok_or_else(|| self.fail(key, format!("'{s}' is not a number")))?;
        if !v.is_finite() {
            return Err(self.fail(key, "must be finite"));
        }
        Ok(Some(v))
    }

    fn count(&self, key: &str) -> Result<Option<u64>> {
        let Some(s) = self.string(key) else {
            return Ok(None);
        };
        s.parse::<u64>()
            .map(Some)
            .map_err(|_| self.fail(key, format!("'{s}' is not a non-negative integer")))
    }

    fn flag(&self, key: &str) -> Result<bool> {
        match self.string(key) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(s) => Err(self.fail(key, format!("'{s}' is not a boolean"))),
        }
    }
}

/// Accepts plain reals plus `pi`, `pi/N` and `N*pi`.
fn parse_real(s: &str) -> Option<f64> {
    use std::f64::consts::PI;
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let s = s.trim();
    if s == "pi" {
        return Some(PI);
    }
    if let Some(d) = s.strip_prefix("pi/") {
        return d.trim().parse::<f64>().ok().map(|d| PI / d);
    }
    if let Some(c) = s.strip_suffix("*pi") {
        return c.trim().parse::<f64>().ok().map(|c| c * PI);
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "human" => Ok(Format::Human),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!(
                "unknown format '{other}' (valid: human, json, csv)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryKind {
    /// `y ≡ 0`
    Equilibrium,
    /// `θ ≡ π` (pendulum only)
    Inverted,
    Linear {
        y0: f64,
        slope: f64,
    },
    Separatrix,
    Rk4 {
        theta_dot0: Option<f64>,
        steps: usize,
    },
    Sampled(PathBuf),
}

impl TrajectoryKind {
    pub fn name(&self) -> &'static str {
        match self {
            TrajectoryKind::Equilibrium => "equilibrium",
            TrajectoryKind::Inverted => "inverted",
            TrajectoryKind::Linear { .. } => "linear",
            TrajectoryKind::Separatrix => "separatrix",
            TrajectoryKind::Rk4 { .. } => "rk4",
            TrajectoryKind::Sampled(_) => "sampled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhiSpec {
    Bump {
        lambda: f64,
        n: u32,
        allow_large_n: bool,
    },
    File(PathBuf),
}

/// A fully interpreted configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub params: ModelParams,
    pub theta0: f64,
    pub trajectory: TrajectoryKind,
    pub alpha: f64,
    pub beta: f64,
    pub phi: PhiSpec,
    pub quadrature: QuadratureSpec,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let defaults = ModelParams::default();
        let problem = s.string("problem").unwrap_or("pendulum").to_string();
        if !lagrangian::CATALOG.iter().any(|e| e.name == problem) {
            let valid: Vec<_> = lagrangian::CATALOG.iter().map(|e| e.name).collect();
            return Err(s.fail(
                "problem",
                format!("unknown model '{problem}' (valid: {})", valid.join(", ")),
            ));
        }
        let params = ModelParams {
            m: s.real("m")?.unwrap_or(defaults.m),
            ell: s.real("ell")?.unwrap_or(defaults.ell),
            g: s.real("g")?.unwrap_or(defaults.g),
            k: s.real("k")?.unwrap_or(defaults.k),
            poly_terms: s
                .string("terms")
                .unwrap_or(&defaults.poly_terms)
                .to_string(),
        };
        let theta0 = s
            .real("theta0")?
            .unwrap_or(PendulumParams::default().theta0);

        let default_traj = if problem == "pendulum" {
            "separatrix"
        } else {
            "equilibrium"
        };
        let traj_name = s.string("trajectory").unwrap_or(default_traj);
        let trajectory = match traj_name {
            "equilibrium" => TrajectoryKind::Equilibrium,
            "inverted" => TrajectoryKind::Inverted,
            "linear" => TrajectoryKind::Linear {
                y0: s.real("y0")?.unwrap_or(0.0),
                slope: s.real("slope")?.unwrap_or(1.0),
            },
            "separatrix" => TrajectoryKind::Separatrix,
            "rk4" => TrajectoryKind::Rk4 {
                theta_dot0: s.real("theta_dot0")?,
                steps: s.count("steps")?.unwrap_or(10_000) as usize,
            },
            "sampled" => TrajectoryKind::Sampled(
                s.string("traj_file")
                    .map(PathBuf::from)
                    .ok_or_else(|| s.fail("trajectory", "sampled trajectory needs traj_file"))?,
            ),
            other => {
                return Err(s.fail(
                    "trajectory",
                    format!(
                        "unknown trajectory '{other}' (valid: equilibrium, inverted, linear, separatrix, rk4, sampled)"
                    ),
                ))
            }
        };
        let supported = lagrangian::CATALOG
            .iter()
            .find(|e| e.name == problem)
            .map(|e| e.trajectories)
            .unwrap_or(&[]);
        if !supported.contains(&trajectory.name()) {
            return Err(s.fail(
                "trajectory",
                format!("'{}' is not available for {problem}", trajectory.name()),
            ));
        }

        let phi = match s.string("phi_file") {
            Some(p) => PhiSpec::File(PathBuf::from(p)),
            None => {
                let n = s.count("n")?.unwrap_or(3);
                PhiSpec::Bump {
                    lambda: s.real("lambda")?.unwrap_or(1.0),
                    n: u32::try_from(n).map_err(|_| s.fail("n", "too large"))?,
                    allow_large_n: s.flag("allow_large_n")?,
                }
            }
        };

        let qd = QuadratureSpec::default();
        let quadrature = QuadratureSpec {
            rule: match s.string("rule") {
                Some(r) => r.parse().map_err(|e: Error| s.fail("rule", e))?,
                None => qd.rule,
            },
            panels: s.count("panels")?.map_or(qd.panels, |v| v as usize),
            tol: s.real("tol")?.unwrap_or(qd.tol),
            max_panels: s.count("max_panels")?.map_or(qd.max_panels, |v| v as usize),
            exec: qd.exec,
        };
        quadrature.validate()?;

        let format = match s.string("format") {
            Some(f) => f.parse().map_err(|e: Error| s.fail("format", e))?,
            None => Format::Human,
        };

        Ok(Self {
            problem,
            params,
            theta0,
            trajectory,
            alpha: s.real("alpha")?.unwrap_or(0.0),
            beta: s.real("beta")?.unwrap_or(2.0),
            phi,
            quadrature,
            format,
            out: s.string("out").map(PathBuf::from),
        })
    }

    pub fn pendulum_params(&self) -> PendulumParams {
        PendulumParams {
            m: self.params.m,
            ell: self.params.ell,
            g: self.params.g,
            theta0: self.theta0,
        }
    }

    pub fn model(&self) -> Result<LagrangianModel> {
        lagrangian::lookup(&self.problem, &self.params)
    }

    pub fn build_trajectory(&self) -> Result<Trajectory> {
        if let TrajectoryKind::Sampled(path) = &self.trajectory {
            return Ok(Trajectory::sampled(SampledCurve::from_csv(path)?));
        }
        let iv = Interval::new(self.alpha, self.beta)?;
        let pp = self.pendulum_params();
        let traj = match &self.trajectory {
            TrajectoryKind::Equilibrium => Trajectory::constant(iv, 0.0),
            TrajectoryKind::Inverted => Trajectory::constant(iv, std::f64::consts::PI),
            TrajectoryKind::Linear { y0, slope } => Trajectory::linear(iv, *y0, *slope),
            TrajectoryKind::Separatrix => pendulum::separatrix_trajectory(&pp, iv)?,
            TrajectoryKind::Rk4 { theta_dot0, steps } => {
                let rate = match theta_dot0 {
                    Some(r) => *r,
                    None => pendulum::separatrix_initial_rate(&pp)?,
                };
                pendulum::rk4_integrate(&pp, self.theta0, rate, iv, *steps)?
            }
            TrajectoryKind::Sampled(_) => unreachable!(),
        };
        Ok(traj.with_label(self.trajectory.name()))
    }

    pub fn build_test_function(&self, interval: Interval) -> Result<TestFunction> {
        match &self.phi {
            PhiSpec::Bump {
                lambda,
                n,
                allow_large_n,
            } => {
                if *allow_large_n {
                    TestFunction::poly_bump_uncapped(interval, *lambda, *n)
                } else {
                    TestFunction::poly_bump(interval, *lambda, *n)
                }
            }
            PhiSpec::File(p) => TestFunction::from_csv(p),
        }
    }

    /// Builds every component and runs the checks. Construction failures are
    /// returned as errors; evaluation failures land in the report.
    pub fn execute(&self) -> Result<CheckReport> {
        let traj = self.build_trajectory()?;
        let tf = self.build_test_function(traj.interval)?;
        let mut report = if self.problem == "pendulum" {
            pendulum::run_pendulum_check(&self.pendulum_params(), &traj, &tf, &self.quadrature)?
        } else {
            run_check(&self.model()?, &traj, &tf, &self.quadrature)
        };
        if self.problem == "harmonic" {
            report.config.k = Some(self.params.k);
        }
        Ok(report)
    }
}
