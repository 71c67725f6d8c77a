//! Command-line front end: `check`, `sweep` and `catalog`.
//!
//! Every command is a plain function returning an [`Output`], so the binary
//! is a thin wrapper and tests can drive the commands in-process.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lagrangian::CATALOG;
use crate::second_variation::{CheckReport, Outcome};
use config::{Format, RunConfig, Settings, Source};

/// Exit code and text produced by one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(code: u8, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(err: &Error) -> Self {
        Self {
            code: Outcome::Error.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "varineq",
    version,
    about = "Second-variation checks for one-dimensional variational problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one configuration and report every check.
    Check(CheckArgs),
    /// Evaluate the cartesian product of one or more axes; CSV output.
    Sweep {
        #[command(flatten)]
        check: CheckArgs,
        /// `key=v1,v2,...` over lambda, n, theta0 or beta (repeatable).
        #[arg(long = "axis", value_name = "KEY=VALUES")]
        axes: Vec<String>,
    },
    /// List the built-in Lagrangians.
    Catalog {
        #[arg(long)]
        json: bool,
    },
}

/// Configuration file plus per-key overrides. Values stay textual so the
/// config layer reports every parse error the same way.
#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    ell: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    #[arg(long)]
    theta0: Option<String>,
    #[arg(long)]
    terms: Option<String>,
    #[arg(long)]
    trajectory: Option<String>,
    #[arg(long)]
    traj_file: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    slope: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta_dot0: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    phi_file: Option<String>,
    #[arg(long)]
    allow_large_n: bool,
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    panels: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    max_panels: Option<String>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

impl CheckArgs {
    fn settings(&self) -> Result<Settings> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let flags = [
            ("problem", &self.problem),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("lambda", &self.lambda),
            ("n", &self.n),
            ("m", &self.m),
            ("ell", &self.ell),
            ("g", &self.g),
            ("k", &self.k),
            ("theta0", &self.theta0),
            ("terms", &self.terms),
            ("trajectory", &self.trajectory),
            ("traj_file", &self.traj_file),
            ("y0", &self.y0),
            ("slope", &self.slope),
            ("theta_dot0", &self.theta_dot0),
            ("steps", &self.steps),
            ("phi_file", &self.phi_file),
            ("rule", &self.rule),
            ("panels", &self.panels),
            ("tol", &self.tol),
            ("max_panels", &self.max_panels),
            ("format", &self.format),
            ("out", &self.out),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set(key, v.as_str(), Source::Flag)?;
            }
        }
        if self.allow_large_n {
            s.set("allow_large_n", "true", Source::Flag)?;
        }
        Ok(s)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: Outcome::Error.exit_code(),
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output::ok(0, text)
            };
        }
    };
    let result = match cli.command {
        Command::Check(args) => args
            .settings()
            .and_then(|s| RunConfig::from_settings(&s))
            .and_then(|c| cmd_check(&c)),
        Command::Sweep { check, axes } => check.settings().and_then(|s| cmd_sweep(&s, &axes)),
        Command::Catalog { json } => Ok(cmd_catalog(json)),
    };
    result.unwrap_or_else(|e| Output::error(&e))
}

fn deliver(out: Option<&Path>, code: u8, text: String) -> Result<Output> {
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Error::Io {
                path: path.display().to_string(),
                msg: e.to_string(),
            })?;
            Ok(Output::ok(code, String::new()))
        }
        None => Ok(Output::ok(code, text)),
    }
}

pub fn render(report: &CheckReport, format: Format) -> Result<String> {
    match format {
        Format::Human => Ok(report::to_human(report)),
        Format::Json => Ok(report::to_json(report)),
        Format::Csv => report::write_csv(&[report::csv_row(report)]),
    }
}

/// Runs one configuration. Construction failures (bad files, inadmissible
/// φ, invalid parameters) are returned as errors and map to exit 1.
pub fn cmd_check(config: &RunConfig) -> Result<Output> {
    let report = config.execute()?;
    let code = report.outcome().exit_code();
    deliver(config.out.as_deref(), code, render(&report, config.format)?)
}

/// Keys that may be swept.
pub const AXIS_KEYS: [&str; 4] = ["lambda", "n", "theta0", "beta"];

/// Parses `key=v1,v2,...`.
pub fn parse_axis(spec: &str) -> Result<(String, Vec<String>)> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("--axis '{spec}': expected key=v1,v2,...")))?;
    let key = key.trim();
    if !AXIS_KEYS.contains(&key) {
        return Err(Error::Config(format!(
            "--axis '{key}': not a sweepable key (valid: {})",
            AXIS_KEYS.join(", ")
        )));
    }
    let values: Vec<String> = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(String::from)
        .collect();
    if values.is_empty() {
        return Err(Error::Config(format!("--axis '{key}': no values")));
    }
    Ok((key.to_string(), values))
}

/// Every combination of axis values; the first axis varies slowest.
pub fn combinations(axes: &[(String, Vec<String>)]) -> Vec<Vec<(String, String)>> {
    axes.iter().fold(vec![Vec::new()], |acc, (key, values)| {
        acc.into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push((key.clone(), v.clone()));
                    next
                })
            })
            .collect()
    })
}

const ECHO_KEYS: [&str; 10] = [
    "problem",
    "trajectory",
    "alpha",
    "beta",
    "lambda",
    "n",
    "m",
    "ell",
    "g",
    "theta0",
];

/// One CSV row per combination, evaluated in parallel and emitted in order.
/// A failing combination yields an error row; the exit code is the most
/// severe outcome over all rows.
pub fn cmd_sweep(base: &Settings, axis_specs: &[String]) -> Result<Output> {
    cmd_sweep_with(base, axis_specs, Exec::default())
}

/// [`cmd_sweep`] with an explicit executor for the combinations.
pub fn cmd_sweep_with(base: &Settings, axis_specs: &[String], exec: Exec) -> Result<Output> {
    if axis_specs.is_empty() {
        return Err(Error::Config("sweep needs at least one --axis".into()));
    }
    let axes = axis_specs
        .iter()
        .map(|a| parse_axis(a))
        .collect::<Result<Vec<_>>>()?;
    if let Some(dup) = axes
        .iter()
        .enumerate()
        .find(|(i, (k, _))| axes[..*i].iter().any(|(j, _)| j == k))
    {
        return Err(Error::Config(format!("--axis '{}' given twice", dup.1 .0)));
    }
    // Validate everything that does not depend on the axes up front.
    let first = RunConfig::from_settings(base)?;
    let combos = combinations(&axes);

    let rows: Vec<(Outcome, Vec<String>)> = exec.map_slice(&combos, |combo| {
        let mut s = base.clone();
        for (k, v) in combo {
            s.set(k, v.as_str(), Source::Axis)
                .expect("axis keys are valid");
        }
        let run = RunConfig::from_settings(&s).and_then(|mut c| {
            c.quadrature = c.quadrature.with_exec(Exec::Sequential);
            c.execute()
        });
        match run {
            Ok(r) => (r.outcome(), report::csv_row(&r)),
            Err(e) => {
                let echo: Vec<(&str, String)> = ECHO_KEYS
                    .iter()
                    .filter_map(|k| s.get(k).map(|v| (*k, v.to_string())))
                    .collect();
                (Outcome::Error, report::csv_error_row(&echo, &e))
            }
        }
    });
    let code = rows
        .iter()
        .map(|(o, _)| *o)
        .max_by_key(|o| severity(*o))
        .unwrap_or(Outcome::Pass)
        .exit_code();
    let rows: Vec<Vec<String>> = rows.into_iter().map(|(_, r)| r).collect();
    deliver(first.out.as_deref(), code, report::write_csv(&rows)?)
}

fn severity(o: Outcome) -> u8 {
    match o {
        Outcome::Pass => 0,
        Outcome::InequalityViolated => 1,
        Outcome::CheckFailed => 2,
        Outcome::Error => 3,
    }
}

pub fn cmd_catalog(json: bool) -> Output {
    if json {
        let mut s = serde_json::to_string_pretty(&CATALOG).expect("catalog serializes");
        s.push('\n');
        return Output::ok(0, s);
    }
    let mut s = String::new();
    for e in &CATALOG {
        s.push_str(&format!("{}\n  f = {}\n", e.name, e.formula));
        let params = if e.params.is_empty() {
            "(none)".to_string()
        } else {
            e.params.join(", ")
        };
        s.push_str(&format!("  params: {params}\n"));
        s.push_str(&format!("  trajectories: {}\n", e.trajectories.join(", ")));
    }
    Output::ok(0, s)
}
