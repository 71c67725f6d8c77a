//! Composite quadrature with panel-doubling refinement.
//!
//! Every integral in the crate goes through [`integrate_many`], which
//! evaluates a vector-valued integrand so that several related integrals
//! (the seven terms of Form B, for example) share
//! one set of Lagrangian evaluations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;

/// A finite interval `[alpha, beta]` with `alpha < beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub alpha: f64,
    pub beta: f64,
}

impl Interval {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Domain(format!(
                "interval endpoints must be finite, got [{alpha}, {beta}]"
            )));
        }
        if alpha >= beta {
            return Err(Error::Domain(format!(
                "interval requires alpha < beta, got [{alpha}, {beta}]"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn width(&self) -> f64 {
        self.beta - self.alpha
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.alpha && x <= self.beta
    }

    /// `n + 1` equally spaced nodes including both endpoints.
    pub fn nodes(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|i| self.node(i, n)).collect()
    }

    /// The `i`-th of `n` equal subdivisions' left edge; `node(n, n)` is exactly `beta`.
    pub fn node(&self, i: usize, n: usize) -> f64 {
        if i == n {
            self.beta
        } else {
            self.alpha + self.width() * (i as f64 / n as f64)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// 5-point Gauss–Legendre per panel; exact for polynomials of degree ≤ 9.
    Gauss5,
    Simpson,
}

impl std::str::FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss5" => Ok(Rule::Gauss5),
            "simpson" => Ok(Rule::Simpson),
            other => Err(Error::Config(format!(
                "unknown quadrature rule '{other}' (valid: gauss5, simpson)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub panels: usize,
    pub tol: f64,
    pub max_panels: usize,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rule: Rule::Gauss5,
            panels: 8,
            tol: 1e-12,
            max_panels: 4096,
            exec: Exec::default(),
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.tol <= 0.0 || !self.tol.is_finite() {
            return Err(Error::Config(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.panels < 1 {
            return Err(Error::Config("panels must be ≥ 1".into()));
        }
        if self.max_panels < self.panels {
            return Err(Error::Config(format!(
                "max_panels ({}) must be ≥ panels ({})",
                self.max_panels, self.panels
            )));
        }
        Ok(())
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

/// Result of a vector-valued integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<const N: usize> {
    pub values: [f64; N],
    /// Largest component of the last successive difference.
    pub error_estimate: f64,
    pub converged: bool,
    pub panels: usize,
}

/// Scalar result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quad {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

// Gauss–Legendre 5-point nodes and weights on [-1, 1].
const GAUSS5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GAUSS5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Panel count above which panels are dispatched to the thread pool.
const PAR_MIN_PANELS: usize = 64;

fn panel_sum<const N: usize, G>(g: &G, rule: Rule, a: f64, b: f64) -> Result<[f64; N]>
where
    G: Fn(f64) -> Result<[f64; N]>,
{
    let mut acc = [0.0; N];
    let mut sample = |x: f64, w: f64| -> Result<()> {
        let v = g(x)?;
        for (s, vi) in acc.iter_mut().zip(v) {
            if !vi.is_finite() {
                return Err(Error::NonFiniteIntegrand(x));
            }
            *s += w * vi;
        }
        Ok(())
    };
    match rule {
        Rule::Gauss5 => {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (t, w) in GAUSS5_NODES.iter().zip(GAUSS5_WEIGHTS) {
                sample(mid + half * t, w * half)?;
            }
        }
        Rule::Simpson => {
            let h6 = (b - a) / 6.0;
            sample(a, h6)?;
            sample(0.5 * (a + b), 4.0 * h6)?;
            sample(b, h6)?;
        }
    }
    Ok(acc)
}

/// Composite rule with a fixed panel count. Panel sums are added in ascending
/// panel order regardless of how they were computed.
pub fn composite<const N: usize, G>(
    g: &G,
    interval: Interval,
    rule: Rule,
    panels: usize,
    exec: Exec,
) -> Result<[f64; N]>
where
    G: Fn(f64) -> Result<[f64; N]> + Sync,
{
    let exec = if panels >= PAR_MIN_PANELS {
        exec
    } else {
        Exec::Sequential
    };
    let parts = exec.map_indexed(panels, |i| {
        panel_sum(
            g,
            rule,
            interval.node(i, panels),
            interval.node(i + 1, panels),
        )
    });
    let mut total = [0.0; N];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part?) {
            *t += p;
        }
    }
    Ok(total)
}

/// Integrates every component of `g` over `interval`, doubling the panel
/// count until successive estimates differ by less than
/// `tol · max(1, |value|)` in every component or `max_panels` is reached.
pub fn integrate_many<const N: usize, G>(
    g: G,
    interval: Interval,
    spec: &QuadratureSpec,
) -> Result<QuadResult<N>>
where
    G: Fn(f64) -> Result<[f64; N]> + Sync,
{
    spec.validate()?;
    let mut panels = spec.panels;
    let mut prev = composite(&g, interval, spec.rule, panels, spec.exec)?;
    let mut error_estimate = f64::INFINITY;
    while panels * 2 <= spec.max_panels {
        panels *= 2;
        let next = composite(&g, interval, spec.rule, panels, spec.exec)?;
        let mut done = true;
        error_estimate = 0.0;
        for (p, n) in prev.iter().zip(&next) {
            let diff = (n - p).abs();
            error_estimate = f64::max(error_estimate, diff);
            if diff >= spec.tol * n.abs().max(1.0) {
                done = false;
            }
        }
        prev = next;
        if done {
            return Ok(QuadResult {
                values: prev,
                error_estimate,
                converged: true,
                panels,
            });
        }
    }
    Ok(QuadResult {
        values: prev,
        error_estimate,
        converged: false,
        panels,
    })
}

/// Scalar convenience wrapper over [`integrate_many`].
pub fn integrate<G>(g: G, interval: Interval, spec: &QuadratureSpec) -> Result<Quad>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    let r = integrate_many(|x| g(x).map(|v| [v]), interval, spec)?;
    Ok(Quad {
        value: r.values[0],
        error_estimate: r.error_estimate,
        converged: r.converged,
    })
}
