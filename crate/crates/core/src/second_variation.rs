//! Euler–Lagrange residual, the second variation in three forms, and the
//! integrated-by-parts inequality margin.
//!
//! With `y` a trajectory and `φ` an admissible variation, and every partial
//! evaluated along `(x, y(x), y′(x))`:
//!
//! * **Form A** (direct): `∫ f_yy φ² + 2 f_yy′ φφ′ + f_y′y′ φ′²`.
//! * **Form B** (term-by-term parts): `(T1 − T2) − (T3 + … + T7)`, where the
//!   derivative of `2 f_yy′ φ + f_y′y′ φ′` was expanded with the chain-rule
//!   velocity `(0, φ, φ′)`; see [`SecondVariationTerms`].
//! * **Form C** (standard parts): `∫ f_yy φ² − ∫ (d/dx[2 f_yy′ φ + f_y′y′ φ′]) φ`
//!   with the true total derivative along the trajectory, velocity `(1, y′, y″)`.
//!
//! Forms A and C agree for every C³ Lagrangian; Form B agrees with them only
//! when the third partials and `f_yy′` drop out (the pendulum, for instance).

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lagrangian::{eval_partials, LagrangianModel, Point3};
use crate::quadrature::{integrate, integrate_many, Interval, Quad, QuadratureSpec};
use crate::sampled::SampledCurve;
use crate::testfn::{boundary_check, BoundaryReport, TestFunction};

/// Identity residuals at or below this pass.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Euler–Lagrange residuals at or below this (absolute) pass.
pub const EL_TOL: f64 = 1e-6;
/// Nodes used for the Euler–Lagrange profile in [`run_check`].
pub const EL_GRID: usize = 1001;

pub type StateFn = Arc<dyn Fn(f64) -> Result<[f64; 3]> + Send + Sync>;

/// A candidate solution `y` with `y′` and `y″` on an interval.
#[derive(Clone)]
pub struct Trajectory {
    pub interval: Interval,
    pub label: String,
    state: StateFn,
}

impl std::fmt::Debug for Trajectory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Trajectory")
            .field("interval", &self.interval)
            .field("label", &self.label)
            .finish()
    }
}

impl Trajectory {
    /// From a callback returning `(y, y′, y″)`.
    pub fn from_state(
        interval: Interval,
        label: impl Into<String>,
        state: impl Fn(f64) -> Result<[f64; 3]> + Send + Sync + 'static,
    ) -> Self {
        Self {
            interval,
            label: label.into(),
            state: Arc::new(state),
        }
    }

    /// From three separate callbacks.
    pub fn new(
        interval: Interval,
        label: impl Into<String>,
        y: impl Fn(f64) -> f64 + Send + Sync + 'static,
        yp: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ypp: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::from_state(interval, label, move |x| Ok([y(x), yp(x), ypp(x)]))
    }

    pub fn constant(interval: Interval, value: f64) -> Self {
        Self::from_state(interval, "constant", move |_| Ok([value, 0.0, 0.0]))
    }

    /// `y = y0 + slope · (x − α)`.
    pub fn linear(interval: Interval, y0: f64, slope: f64) -> Self {
        let a = interval.alpha;
        Self::from_state(interval, "linear", move |x| {
            Ok([y0 + slope * (x - a), slope, 0.0])
        })
    }

    pub fn sampled(curve: SampledCurve) -> Self {
        let interval = curve.interval();
        Self::from_state(interval, "sampled", move |x| curve.eval(x))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn eval(&self, x: f64) -> Result<[f64; 3]> {
        if !self.interval.contains(x) {
            return Err(Error::Domain(format!(
                "x={x} outside trajectory interval [{}, {}]",
                self.interval.alpha, self.interval.beta
            )));
        }
        (self.state)(x)
    }

    /// Largest scaled mismatch between `y′` (resp. `y″`) and a central
    /// difference of `y` (resp. `y′`) over 50 interior points. Consistent
    /// trajectories give values below `1e-6`.
    pub fn consistency(&self) -> Result<f64> {
        let iv = self.interval;
        let w = iv.width();
        let h = 1e-5 * w.min(1.0);
        let mut worst: f64 = 0.0;
        for i in 0..50 {
            // Weyl sequence, spread over [α + 1%, β − 1%]
            let u = (0.5 + i as f64 * 0.618_033_988_749_895) % 1.0;
            let x = iv.alpha + w * (0.01 + 0.98 * u);
            let [_, yp, ypp] = self.eval(x)?;
            let [yl, ypl, _] = self.eval(x - h)?;
            let [yr, ypr, _] = self.eval(x + h)?;
            let fd1 = (yr - yl) / (2.0 * h);
            let fd2 = (ypr - ypl) / (2.0 * h);
            worst = worst
                .max((fd1 - yp).abs() / yp.abs().max(1.0))
                .max((fd2 - ypp).abs() / ypp.abs().max(1.0));
        }
        Ok(worst)
    }
}

fn same_interval(traj: &Trajectory, tf: &TestFunction) -> Result<()> {
    let (a, b) = (traj.interval, tf.interval);
    let tol = 1e-12 * a.width();
    if (a.alpha - b.alpha).abs() > tol || (a.beta - b.beta).abs() > tol {
        return Err(Error::Domain(format!(
            "test function interval [{}, {}] differs from trajectory interval [{}, {}]",
            b.alpha, b.beta, a.alpha, a.beta
        )));
    }
    Ok(())
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// `F(y) = ∫ f(x, y, y′) dx`.
pub fn functional_value(
    model: &LagrangianModel,
    traj: &Trajectory,
    spec: &QuadratureSpec,
) -> Result<Quad> {
    integrate(
        |x| {
            let [y, yp, _] = traj.eval(x)?;
            let p = Point3::new(x, y, yp);
            let v = model.value(p);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinitePartial {
                    field: "f",
                    x,
                    y,
                    yp,
                })
            }
        },
        traj.interval,
        spec,
    )
}

/// Euler–Lagrange residual profile on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElResidual {
    pub max_abs: f64,
    /// `(x, residual)` per node, endpoints included.
    pub profile: Vec<(f64, f64)>,
}

/// `f_y − d/dx f_y′` at `grid_size` uniform nodes, the total derivative
/// taken along the trajectory: `f_xy′ + f_yy′ y′ + f_y′y′ y″`.
pub fn el_residual(
    model: &LagrangianModel,
    traj: &Trajectory,
    grid_size: usize,
) -> Result<ElResidual> {
    if grid_size < 2 {
        return Err(Error::Config(format!(
            "grid_size must be ≥ 2, got {grid_size}"
        )));
    }
    model.require(false, true)?;
    let iv = traj.interval;
    let n = grid_size - 1;
    let profile = Exec::default()
        .map_indexed(grid_size, |i| {
            let x = iv.node(i, n);
            let [y, yp, ypp] = traj.eval(x)?;
            let ps = eval_partials(model, Point3::new(x, y, yp))?;
            Ok((x, ps.f_y - (ps.f_xyp + ps.f_yyp * yp + ps.f_ypyp * ypp)))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let max_abs = profile.iter().fold(0.0f64, |m, &(_, r)| m.max(r.abs()));
    Ok(ElResidual { max_abs, profile })
}

/// Second derivative of `t ↦ F(y + tφ)`, partials evaluated along the
/// shifted trajectory. Form A is `t = 0`.
pub fn second_variation_direct(
    model: &LagrangianModel,
    traj: &Trajectory,
    tf: &TestFunction,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<Quad> {
    same_interval(traj, tf)?;
    integrate(
        |x| {
            let [y, yp, _] = traj.eval(x)?;
            let [phi, dphi, _] = tf.eval(x)?;
            let ps = eval_partials(model, Point3::new(x, y + t * phi, yp + t * dphi))?;
            Ok(ps.f_yy * phi * phi + 2.0 * ps.f_yyp * phi * dphi + ps.f_ypyp * dphi * dphi)
        },
        traj.interval,
        spec,
    )
}

/// Per-term integrals of Form B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondVariationTerms {
    /// `∫ f_yy φ²`
    pub t1: f64,
    /// `∫ f_yyy′ · 2φ³`
    pub t2: f64,
    /// `∫ f_yy′ · 2φφ′`
    pub t3: f64,
    /// `∫ f_yy′y′ · 2φ²φ′`
    pub t4: f64,
    /// `∫ f_y′y′ · φφ″`
    pub t5: f64,
    /// `∫ f_yy′y′ · φ′φ²`
    pub t6: f64,
    /// `∫ f_y′y′y′ · φφ′²`
    pub t7: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

impl SecondVariationTerms {
    /// Left-hand side of the inequality: `T1 − T2`.
    pub fn lhs(&self) -> f64 {
        self.t1 - self.t2
    }

    /// Right-hand side: `T3 + T4 + T5 + T6 + T7`.
    pub fn rhs(&self) -> f64 {
        self.t3 + self.t4 + self.t5 + self.t6 + self.t7
    }

    pub fn total(&self) -> f64 {
        self.lhs() - self.rhs()
    }
}

/// Form B, as written term by term, partials along the unshifted trajectory.
pub fn second_variation_paper(
    model: &LagrangianModel,
    traj: &Trajectory,
    tf: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<(f64, SecondVariationTerms)> {
    same_interval(traj, tf)?;
    model.require(true, false)?;
    let r = integrate_many(
        |x| {
            let [y, yp, _] = traj.eval(x)?;
            let [phi, dphi, ddphi] = tf.eval(x)?;
            let ps = eval_partials(model, Point3::new(x, y, yp))?;
            let phi2 = phi * phi;
            Ok([
                ps.f_yy * phi2,
                ps.f_yyyp * 2.0 * phi2 * phi,
                ps.f_yyp * 2.0 * phi * dphi,
                ps.f_yypyp * 2.0 * phi2 * dphi,
                ps.f_ypyp * phi * ddphi,
                ps.f_yypyp * dphi * phi2,
                ps.f_ypypyp * phi * dphi * dphi,
            ])
        },
        traj.interval,
        spec,
    )?;
    let [t1, t2, t3, t4, t5, t6, t7] = r.values;
    let terms = SecondVariationTerms {
        t1,
        t2,
        t3,
        t4,
        t5,
        t6,
        t7,
        error_estimate: r.error_estimate,
        converged: r.converged,
    };
    Ok((terms.total(), terms))
}

/// Form C: integration by parts with the true total derivative.
pub fn second_variation_ibp_standard(
    model: &LagrangianModel,
    traj: &Trajectory,
    tf: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<Quad> {
    same_interval(traj, tf)?;
    model.require(true, true)?;
    integrate(
        |x| {
            let [y, yp, ypp] = traj.eval(x)?;
            let [phi, dphi, ddphi] = tf.eval(x)?;
            let ps = eval_partials(model, Point3::new(x, y, yp))?;
            let d_fyyp = ps.f_xyyp + ps.f_yyyp * yp + ps.f_yypyp * ypp;
            let d_fypyp = ps.f_xypyp + ps.f_yypyp * yp + ps.f_ypypyp * ypp;
            let d_bracket =
                2.0 * d_fyyp * phi + 2.0 * ps.f_yyp * dphi + d_fypyp * dphi + ps.f_ypyp * ddphi;
            Ok(ps.f_yy * phi * phi - d_bracket * phi)
        },
        traj.interval,
        spec,
    )
}

/// Left minus right side of the inequality (equal to Form B). Non-negative
/// means the inequality holds for this φ; the sign is reported, not asserted.
pub fn inequality_margin(
    model: &LagrangianModel,
    traj: &Trajectory,
    tf: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<f64> {
    second_variation_paper(model, traj, tf, spec).map(|(v, _)| v)
}

/// Parameters echoed into a report.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub problem: String,
    pub trajectory: String,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: Option<f64>,
    pub n: Option<u32>,
    pub m: Option<f64>,
    pub ell: Option<f64>,
    pub g: Option<f64>,
    pub theta0: Option<f64>,
    pub k: Option<f64>,
}

/// Quadrature error estimates of each integrated quantity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct QuadErrors {
    pub f_value: Option<f64>,
    pub i2_direct: Option<f64>,
    pub i2_paper: Option<f64>,
    pub i2_ibp_standard: Option<f64>,
    pub margin38: Option<f64>,
}

/// Everything computed for one (model, trajectory, φ) configuration.
/// Fields that could not be computed are `None` and the cause is in `errors`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckReport {
    pub config: ConfigEcho,
    pub f_value: Option<f64>,
    pub el_residual_max: Option<f64>,
    pub i2_direct: Option<f64>,
    pub i2_paper: Option<f64>,
    pub terms: Option<SecondVariationTerms>,
    pub i2_ibp_standard: Option<f64>,
    pub residual_ab: Option<f64>,
    pub residual_ac: Option<f64>,
    pub inequality_margin: Option<f64>,
    pub margin38: Option<f64>,
    /// Initial rate of the closed-form separatrix solution, when used.
    pub theta_dot0: Option<f64>,
    pub boundary: Option<BoundaryReport>,
    pub boundary_ok: bool,
    pub trajectory_consistency: Option<f64>,
    pub quad_errors: QuadErrors,
    pub converged: bool,
    pub degenerate_variation: bool,
    pub identity_ok: bool,
    pub el_ok: bool,
    pub errors: Vec<String>,
}

/// Exit status of a check, in increasing precedence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    InequalityViolated,
    CheckFailed,
    Error,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Error => 1,
            Outcome::CheckFailed => 2,
            Outcome::InequalityViolated => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "ok",
            Outcome::InequalityViolated => "inequality_violated",
            Outcome::CheckFailed => "check_failed",
            Outcome::Error => "error",
        }
    }
}

impl CheckReport {
    pub fn outcome(&self) -> Outcome {
        if !self.errors.is_empty() {
            Outcome::Error
        } else if !(self.boundary_ok && self.identity_ok && self.el_ok) {
            Outcome::CheckFailed
        } else if self.inequality_margin.is_some_and(|m| m < 0.0) {
            Outcome::InequalityViolated
        } else {
            Outcome::Pass
        }
    }
}

/// Runs every check for one configuration. Component failures are recorded
/// in the report; the remaining fields are still computed.
pub fn run_check(
    model: &LagrangianModel,
    traj: &Trajectory,
    tf: &TestFunction,
    spec: &QuadratureSpec,
) -> CheckReport {
    let mut r = CheckReport {
        config: ConfigEcho {
            problem: model.name.clone(),
            trajectory: traj.label.clone(),
            alpha: traj.interval.alpha,
            beta: traj.interval.beta,
            lambda: tf.lambda_n().map(|(l, _)| l),
            n: tf.lambda_n().map(|(_, n)| n),
            ..Default::default()
        },
        converged: true,
        ..Default::default()
    };
    let note = |r: &mut CheckReport, what: &str, e: Error| {
        r.errors.push(format!("{what}: {e}"));
    };
    if let Err(e) = spec.validate() {
        note(&mut r, "quadrature", e);
        return r;
    }

    let boundary = boundary_check(tf);
    r.boundary_ok = boundary.pass;
    r.boundary = Some(boundary);
    r.degenerate_variation = tf.is_degenerate();

    match traj.consistency() {
        Ok(c) => r.trajectory_consistency = Some(c),
        Err(e) => note(&mut r, "trajectory", e),
    }

    match functional_value(model, traj, spec) {
        Ok(q) => {
            r.f_value = Some(q.value);
            r.quad_errors.f_value = Some(q.error_estimate);
            r.converged &= q.converged;
        }
        Err(e) => note(&mut r, "functional_value", e),
    }

    match el_residual(model, traj, EL_GRID) {
        Ok(el) => {
            r.el_residual_max = Some(el.max_abs);
            r.el_ok = el.max_abs <= EL_TOL;
        }
        Err(e) => note(&mut r, "el_residual", e),
    }

    match second_variation_direct(model, traj, tf, 0.0, spec) {
        Ok(q) => {
            r.i2_direct = Some(q.value);
            r.quad_errors.i2_direct = Some(q.error_estimate);
            r.converged &= q.converged;
        }
        Err(e) => note(&mut r, "second_variation_direct", e),
    }

    match second_variation_paper(model, traj, tf, spec) {
        Ok((v, terms)) => {
            r.i2_paper = Some(v);
            r.inequality_margin = Some(v);
            r.terms = Some(terms);
            r.quad_errors.i2_paper = Some(terms.error_estimate);
            r.converged &= terms.converged;
        }
        Err(e) => note(&mut r, "second_variation_paper", e),
    }

    match second_variation_ibp_standard(model, traj, tf, spec) {
        Ok(q) => {
            r.i2_ibp_standard = Some(q.value);
            r.quad_errors.i2_ibp_standard = Some(q.error_estimate);
            r.converged &= q.converged;
        }
        Err(e) => note(&mut r, "second_variation_ibp_standard", e),
    }

    if let (Some(a), Some(b)) = (r.i2_direct, r.i2_paper) {
        r.residual_ab = Some(relative_gap(a, b));
    }
    if let (Some(a), Some(c)) = (r.i2_direct, r.i2_ibp_standard) {
        let gap = relative_gap(a, c);
        r.residual_ac = Some(gap);
        r.identity_ok = gap <= IDENTITY_TOL;
    }
    r
}
