//! Admissible variations φ: C² on `[α, β]` with φ, φ′, φ″ all vanishing at
//! both endpoints.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::Interval;
use crate::sampled::SampledCurve;

/// Largest exponent accepted by [`TestFunction::poly_bump`]. Larger `n`
/// underflows `((x−α)(x−β))ⁿ` on wide intervals; use
/// [`TestFunction::poly_bump_uncapped`] to go past it.
pub const DEFAULT_MAX_N: u32 = 12;

/// Absolute tolerance of [`boundary_check`].
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum TestKind {
    /// `φ(x) = λ((x − α)(x − β))ⁿ`
    PolyBump {
        lambda: f64,
        n: u32,
    },
    Sampled(SampledCurve),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub kind: TestKind,
    pub interval: Interval,
}

impl TestFunction {
    pub fn poly_bump(interval: Interval, lambda: f64, n: u32) -> Result<Self> {
        if n > DEFAULT_MAX_N {
            return Err(Error::Admissibility(format!(
                "n = {n} exceeds the default cap of {DEFAULT_MAX_N} (use the uncapped constructor / --allow-large-n)"
            )));
        }
        Self::poly_bump_uncapped(interval, lambda, n)
    }

    pub fn poly_bump_uncapped(interval: Interval, lambda: f64, n: u32) -> Result<Self> {
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(Error::Admissibility(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        if n < 3 {
            return Err(Error::Admissibility(format!(
                "n = {n}: the exponent must be at least 3 so that φ, φ′ and φ″ all vanish at both endpoints"
            )));
        }
        Ok(Self {
            kind: TestKind::PolyBump { lambda, n },
            interval,
        })
    }

    /// Wraps a sampled curve. Admissibility is not enforced here; see
    /// [`boundary_check`].
    pub fn sampled(curve: SampledCurve) -> Self {
        Self {
            interval: curve.interval(),
            kind: TestKind::Sampled(curve),
        }
    }

    /// Reads `x, phi, phi_prime` from CSV.
    pub fn from_csv(path: &Path) -> Result<Self> {
        Ok(Self::sampled(SampledCurve::from_csv(path)?))
    }

    /// `(φ, φ′, φ″)` at `x ∈ [α, β]`.
    pub fn eval(&self, x: f64) -> Result<[f64; 3]> {
        if !self.interval.contains(x) {
            return Err(Error::Domain(format!(
                "x={x} outside [{}, {}]",
                self.interval.alpha, self.interval.beta
            )));
        }
        match &self.kind {
            TestKind::PolyBump { lambda, n } => Ok(poly_bump_eval(self.interval, *lambda, *n, x)),
            TestKind::Sampled(c) => c.eval(x),
        }
    }

    /// φ ≡ 0. Never true for a poly bump since λ > 0.
    pub fn is_degenerate(&self) -> bool {
        match &self.kind {
            TestKind::PolyBump { .. } => false,
            TestKind::Sampled(c) => c.is_zero(),
        }
    }

    pub fn lambda_n(&self) -> Option<(f64, u32)> {
        match self.kind {
            TestKind::PolyBump { lambda, n } => Some((lambda, n)),
            TestKind::Sampled(_) => None,
        }
    }
}

fn poly_bump_eval(iv: Interval, lambda: f64, n: u32, x: f64) -> [f64; 3] {
    let q = (x - iv.alpha) * (x - iv.beta);
    let dq = 2.0 * x - iv.alpha - iv.beta;
    let n_f = n as f64;
    let qn2 = q.powi(n as i32 - 2);
    let qn1 = qn2 * q;
    [
        lambda * qn1 * q,
        lambda * n_f * qn1 * dq,
        lambda * n_f * ((n_f - 1.0) * qn2 * dq * dq + 2.0 * qn1),
    ]
}

/// `|φ⁽ᵏ⁾|` at both endpoints for `k = 0, 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub at_alpha: [f64; 3],
    pub at_beta: [f64; 3],
    pub pass: bool,
}

pub fn boundary_check(tf: &TestFunction) -> BoundaryReport {
    let abs3 = |x| {
        tf.eval(x)
            .map(|v| v.map(f64::abs))
            .unwrap_or([f64::INFINITY; 3])
    };
    let at_alpha = abs3(tf.interval.alpha);
    let at_beta = abs3(tf.interval.beta);
    let pass = at_alpha.iter().chain(&at_beta).all(|&v| v <= BOUNDARY_TOL);
    BoundaryReport {
        at_alpha,
        at_beta,
        pass,
    }
}
