//! Report emission: human text, JSON object, CSV row.
//!
//! Floats are written with 17 significant digits so that values read back
//! are bit-identical.

use serde_json::{Number, Value};

use crate::error::{Error, Result};
use crate::second_variation::{CheckReport, Outcome};

/// Fixed CSV column order. `status` is the outcome or an error message.
pub const CSV_COLUMNS: [&str; 22] = [
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
    "F_value",
    "el_residual_max",
    "I2_direct",
    "I2_paper",
    "I2_ibp_standard",
    "residual_AB",
    "residual_AC",
    "inequality_margin",
    "margin38",
    "boundary_ok",
    "converged",
    "status",
];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn csv_row(r: &CheckReport) -> Vec<String> {
    let c = &r.config;
    let status = match r.outcome() {
        Outcome::Error => format!("error: {}", r.errors.join("; ")),
        other => other.as_str().to_string(),
    };
    vec![
        c.problem.clone(),
        c.trajectory.clone(),
        fmt_f64(c.alpha),
        fmt_f64(c.beta),
        opt(c.lambda),
        c.n.map(|n| n.to_string()).unwrap_or_default(),
        opt(c.m),
        opt(c.ell),
        opt(c.g),
        opt(c.theta0),
        opt(r.f_value),
        opt(r.el_residual_max),
        opt(r.i2_direct),
        opt(r.i2_paper),
        opt(r.i2_ibp_standard),
        opt(r.residual_ab),
        opt(r.residual_ac),
        opt(r.inequality_margin),
        opt(r.margin38),
        r.boundary_ok.to_string(),
        r.converged.to_string(),
        status,
    ]
}

/// A row for a configuration that could not be built at all.
pub fn csv_error_row(echo: &[(&str, String)], err: &Error) -> Vec<String> {
    CSV_COLUMNS
        .iter()
        .map(|col| {
            if *col == "status" {
                format!("error: {err}")
            } else {
                echo.iter()
                    .find(|(k, _)| k == col)
                    .map(|(_, v)| v.clone())
                    .unwrap_or_default()
            }
        })
        .collect()
}

pub fn write_csv(rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io {
        path: "<csv>".into(),
        msg: e.to_string(),
    };
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "<csv>".into(),
        msg: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Rewrites every floating-point number in `v` with 17 significant digits.
fn normalize_floats(v: &mut Value) {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            if text.contains(['.', 'e', 'E']) {
                if let Ok(x) = text.parse::<f64>() {
                    *n = fmt_f64(x).parse::<Number>().expect("valid JSON number");
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(normalize_floats),
        Value::Object(map) => map.values_mut().for_each(normalize_floats),
        _ => {}
    }
}

pub fn to_json(r: &CheckReport) -> String {
    let mut v = serde_json::to_value(r).expect("report serializes");
    if let Value::Object(map) = &mut v {
        let outcome = r.outcome();
        map.insert("status".into(), Value::String(outcome.as_str().into()));
        map.insert("exit_code".into(), Value::from(outcome.exit_code()));
    }
    normalize_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}

pub fn to_human(r: &CheckReport) -> String {
    use std::fmt::Write;
    let show = |v: Option<f64>| {
        v.map(|x| format!("{x:.12e}"))
            .unwrap_or_else(|| "n/a".into())
    };
    let mut s = String::new();
    let c = &r.config;
    let _ = writeln!(
        s,
        "problem {} / trajectory {} on [{}, {}]",
        c.problem, c.trajectory, c.alpha, c.beta
    );
    if let (Some(l), Some(n)) = (c.lambda, c.n) {
        let _ = writeln!(s, "variation: lambda = {l}, n = {n}");
    } else {
        let _ = writeln!(s, "variation: sampled");
    }
    let rows = [
        ("F(y)", r.f_value),
        ("max |EL residual|", r.el_residual_max),
        ("I''(0) direct (A)", r.i2_direct),
        ("I''(0) term-by-term (B)", r.i2_paper),
        ("I''(0) standard parts (C)", r.i2_ibp_standard),
        ("|A-B| relative", r.residual_ab),
        ("|A-C| relative", r.residual_ac),
        ("inequality margin", r.inequality_margin),
        ("pendulum margin", r.margin38),
        ("separatrix rate at t=0", r.theta_dot0),
    ];
    for (name, v) in rows {
        if name == "pendulum margin" && v.is_none() {
            continue;
        }
        if name == "separatrix rate at t=0" && v.is_none() {
            continue;
        }
        let _ = writeln!(s, "  {name:<28} {}", show(v));
    }
    let _ = writeln!(
        s,
        "  boundary ok: {}  identity ok: {}  EL ok: {}  converged: {}",
        r.boundary_ok, r.identity_ok, r.el_ok, r.converged
    );
    if r.degenerate_variation {
        let _ = writeln!(s, "  degenerate variation (phi == 0)");
    }
    if r.theta_dot0.is_some_and(|v| v != 0.0) {
        let _ = writeln!(
            s,
            "  note: the closed-form solution starts with a nonzero rate; a zero initial rate is not reproduced"
        );
    }
    for e in &r.errors {
        let _ = writeln!(s, "  error: {e}");
    }
    let outcome = r.outcome();
    let verdict = match outcome {
        Outcome::Pass => "all checks passed",
        Outcome::InequalityViolated => "inequality violated for this phi",
        Outcome::CheckFailed => "numerical check failed",
        Outcome::Error => "evaluation error",
    };
    let _ = writeln!(s, "result: {verdict} (exit {})", outcome.exit_code());
    s
}
