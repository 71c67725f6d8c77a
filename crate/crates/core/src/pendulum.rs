//! The simple pendulum end to end.
//!
//! Lagrangian `L = ½ m ℓ² θ̇² + m g ℓ cos θ`, equation of motion
//! `θ̈ + (g/ℓ) sin θ = 0`, a fixed-step RK4 integrator, and the closed-form
//! separatrix solution
//!
//! ```text
//! θ(t) = π − 4 arctan(e^{−ωt} tan(π/4 − θ₀/4)),   ω = √(g/ℓ)
//! t(θ) = ω⁻¹ ln(tan(π/4 − θ₀/4) / tan(π/4 − θ/4))
//! ```
//!
//! With `u = e^{−ωt} tan(π/4 − θ₀/4)` the derivatives are
//! `θ̇ = 4ωu/(1+u²)` and `θ̈ = −4ω²u(1−u²)/(1+u²)²`. The solution carries the
//! separatrix energy `½θ̇² − ω² cos θ = ω²` and starts with `θ̇(0) = 2ω cos(θ₀/2)`,
//! which is nonzero on `0 < θ₀ < π`.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lagrangian::{LagrangianModel, PendulumLagrangian};
use crate::quadrature::{integrate_many, Interval, QuadratureSpec};
use crate::sampled::SampledCurve;
use crate::second_variation::{run_check, CheckReport, Trajectory};
use crate::testfn::TestFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PendulumParams {
    pub m: f64,
    pub ell: f64,
    pub g: f64,
    pub theta0: f64,
}

impl Default for PendulumParams {
    fn default() -> Self {
        Self {
            m: 1.0,
            ell: 1.0,
            g: 9.8,
            theta0: std::f64::consts::FRAC_PI_2,
        }
    }
}

impl PendulumParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("m", self.m), ("ell", self.ell), ("g", self.g)] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::Config(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !self.theta0.is_finite() {
            return Err(Error::Config(format!(
                "theta0 must be finite, got {}",
                self.theta0
            )));
        }
        Ok(())
    }

    /// `√(g/ℓ)`
    pub fn omega(&self) -> f64 {
        (self.g / self.ell).sqrt()
    }

    pub fn model(&self) -> Result<LagrangianModel> {
        self.validate()?;
        Ok(LagrangianModel::analytic(
            "pendulum",
            PendulumLagrangian {
                m: self.m,
                ell: self.ell,
                g: self.g,
            },
        ))
    }

    fn check_closed_form(&self) -> Result<()> {
        self.validate()?;
        if !(self.theta0 > 0.0 && self.theta0 < PI) {
            return Err(Error::Domain(format!(
                "the separatrix solution needs 0 < theta0 < π, got {}",
                self.theta0
            )));
        }
        Ok(())
    }
}

/// `θ̈ = −(g/ℓ) sin θ`. The rate is unused; the signature matches a
/// first-order system.
pub fn ode_rhs(params: &PendulumParams, theta: f64, _theta_dot: f64) -> f64 {
    -(params.g / params.ell) * theta.sin()
}

/// `E = ½ m ℓ² θ̇² − m g ℓ cos θ`.
pub fn energy(params: &PendulumParams, theta: f64, theta_dot: f64) -> f64 {
    let PendulumParams { m, ell, g, .. } = *params;
    0.5 * m * ell * ell * theta_dot * theta_dot - m * g * ell * theta.cos()
}

/// Classical RK4 states `[θ, θ̇]` at `steps + 1` uniform nodes of `interval`.
pub fn rk4_states(
    params: &PendulumParams,
    theta0: f64,
    theta_dot0: f64,
    interval: Interval,
    steps: usize,
) -> Result<Vec<[f64; 2]>> {
    params.validate()?;
    if steps < 10 {
        return Err(Error::Config(format!(
            "rk4 needs at least 10 steps, got {steps}"
        )));
    }
    if !theta0.is_finite() || !theta_dot0.is_finite() {
        return Err(Error::Config("rk4 initial state must be finite".into()));
    }
    let f = |s: [f64; 2]| [s[1], ode_rhs(params, s[0], s[1])];
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = [theta0, theta_dot0];
    out.push(s);
    for i in 0..steps {
        let h = interval.node(i + 1, steps) - interval.node(i, steps);
        let k1 = f(s);
        let k2 = f([s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1]]);
        let k3 = f([s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1]]);
        let k4 = f([s[0] + h * k3[0], s[1] + h * k3[1]]);
        for j in 0..2 {
            s[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        out.push(s);
    }
    Ok(out)
}

/// RK4 solution as a trajectory. Between nodes `θ` and `θ̇` come from quintic
/// Hermite interpolation of the node states; `θ̈` is taken from the equation
/// of motion at the interpolated angle.
pub fn rk4_integrate(
    params: &PendulumParams,
    theta0: f64,
    theta_dot0: f64,
    interval: Interval,
    steps: usize,
) -> Result<Trajectory> {
    let states = rk4_states(params, theta0, theta_dot0, interval, steps)?;
    let xs = interval.nodes(steps);
    let theta: Vec<f64> = states.iter().map(|s| s[0]).collect();
    let rate: Vec<f64> = states.iter().map(|s| s[1]).collect();
    let accel: Vec<f64> = states.iter().map(|s| ode_rhs(params, s[0], s[1])).collect();
    let curve = SampledCurve::with_second(&xs, theta, rate, accel)?;
    let p = *params;
    Ok(Trajectory::from_state(interval, "rk4", move |t| {
        let [th, dth, _] = curve.eval(t)?;
        Ok([th, dth, ode_rhs(&p, th, dth)])
    }))
}

/// `(θ, θ̇, θ̈)` of the separatrix solution at time `t`.
pub fn separatrix_state(params: &PendulumParams, t: f64) -> Result<[f64; 3]> {
    params.check_closed_form()?;
    let w = params.omega();
    let u = (-t * w).exp() * (FRAC_PI_4 - params.theta0 / 4.0).tan();
    let d = 1.0 + u * u;
    Ok([
        PI - 4.0 * u.atan(),
        4.0 * w * u / d,
        -4.0 * w * w * u * (1.0 - u * u) / (d * d),
    ])
}

pub fn separatrix_theta(params: &PendulumParams, t: f64) -> Result<f64> {
    separatrix_state(params, t).map(|s| s[0])
}

/// `θ̇(0) = 2ω cos(θ₀/2)` of the closed-form solution.
pub fn separatrix_initial_rate(params: &PendulumParams) -> Result<f64> {
    separatrix_state(params, 0.0).map(|s| s[1])
}

/// Inverse of [`separatrix_theta`] on `θ₀ ≤ θ < π`.
pub fn separatrix_time(params: &PendulumParams, theta: f64) -> Result<f64> {
    params.check_closed_form()?;
    // slack for θ(0) rounding one ulp below θ₀
    if !(theta >= params.theta0 - 1e-12 && theta < PI) {
        return Err(Error::Domain(format!(
            "separatrix time needs theta0 ≤ theta < π, got theta={theta}, theta0={}",
            params.theta0
        )));
    }
    let num = (FRAC_PI_4 - params.theta0 / 4.0).tan();
    let den = (FRAC_PI_4 - theta / 4.0).tan();
    Ok((num / den).ln() / params.omega())
}

pub fn separatrix_trajectory(params: &PendulumParams, interval: Interval) -> Result<Trajectory> {
    params.check_closed_form()?;
    let p = *params;
    Ok(Trajectory::from_state(interval, "separatrix", move |t| {
        separatrix_state(&p, t)
    }))
}

/// Margin of the pendulum-specific inequality `g ∫ cos θ φ² ≤ ℓ ∫ φ̇²`:
/// `ℓ ∫ φ̇² − g ∫ cos θ φ²`. Positive means it holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margin38 {
    pub margin: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

pub fn inequality38_margin(
    params: &PendulumParams,
    theta: &Trajectory,
    tf: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<Margin38> {
    params.validate()?;
    let r = integrate_many(
        |t| {
            let [th, _, _] = theta.eval(t)?;
            let [phi, dphi, _] = tf.eval(t)?;
            Ok([dphi * dphi, th.cos() * phi * phi])
        },
        theta.interval,
        spec,
    )?;
    let [kinetic, potential] = r.values;
    Ok(Margin38 {
        margin: params.ell * kinetic - params.g * potential,
        error_estimate: r.error_estimate,
        converged: r.converged,
    })
}

/// [`run_check`] for the pendulum, adding the pendulum-specific margin.
pub fn run_pendulum_check(
    params: &PendulumParams,
    theta: &Trajectory,
    tf: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<CheckReport> {
    let model = params.model()?;
    let mut r = run_check(&model, theta, tf, spec);
    r.config.m = Some(params.m);
    r.config.ell = Some(params.ell);
    r.config.g = Some(params.g);
    r.config.theta0 = Some(params.theta0);
    match inequality38_margin(params, theta, tf, spec) {
        Ok(m) => {
            r.margin38 = Some(m.margin);
            r.quad_errors.margin38 = Some(m.error_estimate);
            r.converged &= m.converged;
        }
        Err(e) => r.errors.push(format!("inequality38_margin: {e}")),
    }
    if theta.label == "separatrix" {
        r.theta_dot0 = separatrix_initial_rate(params).ok();
    }
    Ok(r)
}
