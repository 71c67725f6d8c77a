//! Lagrangians `f(x, y, y′)` and their partial derivatives up to third order.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Argument triple `(x, y, y′)` of a Lagrangian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub yp: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, yp: f64) -> Self {
        Self { x, y, yp }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.yp.is_finite()
    }
}

/// Every partial of `f` the second-variation forms need, at one point.
///
/// Naming: `y` is ∂/∂y, `yp` is ∂/∂y′, `x` is ∂/∂x, so `f_yypyp` is
/// ∂³f/∂y∂y′². Each distinct mixed partial appears once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PartialSet {
    pub f: f64,
    pub f_y: f64,
    pub f_yp: f64,
    pub f_yy: f64,
    pub f_yyp: f64,
    pub f_ypyp: f64,
    pub f_yyyp: f64,
    pub f_yypyp: f64,
    pub f_ypypyp: f64,
    /// ∂²f/∂x∂y′, the explicit-x part of d/dx(∂f/∂y′).
    pub f_xyp: f64,
    pub f_xyyp: f64,
    pub f_xypyp: f64,
}

impl PartialSet {
    pub const FIELD_NAMES: [&'static str; 12] = [
        "f", "f_y", "f_yp", "f_yy", "f_yyp", "f_ypyp", "f_yyyp", "f_yypyp", "f_ypypyp", "f_xyp",
        "f_xyyp", "f_xypyp",
    ];

    /// Derivative order of each entry of [`Self::values`].
    pub const FIELD_ORDERS: [u8; 12] = [0, 1, 1, 2, 2, 2, 3, 3, 3, 2, 3, 3];

    pub fn values(&self) -> [f64; 12] {
        [
            self.f,
            self.f_y,
            self.f_yp,
            self.f_yy,
            self.f_yyp,
            self.f_ypyp,
            self.f_yyyp,
            self.f_yypyp,
            self.f_ypypyp,
            self.f_xyp,
            self.f_xyyp,
            self.f_xypyp,
        ]
    }

    fn check_finite(&self, p: Point3) -> Result<()> {
        for (name, v) in Self::FIELD_NAMES.iter().zip(self.values()) {
            if !v.is_finite() {
                return Err(Error::NonFinitePartial {
                    field: name,
                    x: p.x,
                    y: p.y,
                    yp: p.yp,
                });
            }
        }
        Ok(())
    }
}

/// Which groups of partials a provider can supply reliably.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Capabilities {
    /// ∂³f/∂y²∂y′, ∂³f/∂y∂y′², ∂³f/∂y′³.
    pub third_order: bool,
    /// ∂²f/∂x∂y′, ∂³f/∂x∂y∂y′, ∂³f/∂x∂y′².
    pub mixed_x: bool,
}

impl Capabilities {
    pub const ALL: Self = Self {
        third_order: true,
        mixed_x: true,
    };
}

/// A Lagrangian with closed-form partial derivatives.
pub trait Lagrangian: Send + Sync {
    fn value(&self, p: Point3) -> f64;

    fn partials(&self, p: Point3) -> PartialSet;

    fn capabilities(&self) -> Capabilities {
        Capabilities::ALL
    }
}

pub type ValueFn = Arc<dyn Fn(Point3) -> f64 + Send + Sync>;

/// Relative finite-difference steps per derivative order. The absolute step
/// along a coordinate `c` is `step · max(1, |c|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdSteps {
    pub first: f64,
    pub second: f64,
    pub third: f64,
}

impl Default for FdSteps {
    /// `ε^(1/(k+2))` for derivative order `k`.
    fn default() -> Self {
        let eps = f64::EPSILON;
        Self {
            first: eps.powf(1.0 / 3.0),
            second: eps.powf(1.0 / 4.0),
            third: eps.powf(1.0 / 5.0),
        }
    }
}

impl FdSteps {
    pub fn validate(&self) -> Result<()> {
        for (name, h) in [
            ("first", self.first),
            ("second", self.second),
            ("third", self.third),
        ] {
            if h <= 0.0 || !h.is_finite() {
                return Err(Error::Config(format!(
                    "finite-difference step '{name}' must be positive and finite, got {h}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone)]
pub enum Provider {
    Analytic(Arc<dyn Lagrangian>),
    /// Value-only callback; partials come from central differences and are
    /// markedly less accurate (third partials to roughly 1e-4 relative).
    Numeric {
        value: ValueFn,
        steps: FdSteps,
    },
}

#[derive(Clone)]
pub struct LagrangianModel {
    pub name: String,
    pub provider: Provider,
}

impl fmt::Debug for LagrangianModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.provider {
            Provider::Analytic(_) => "analytic",
            Provider::Numeric { .. } => "numeric",
        };
        f.debug_struct("LagrangianModel")
            .field("name", &self.name)
            .field("provider", &kind)
            .finish()
    }
}

impl LagrangianModel {
    pub fn analytic(name: impl Into<String>, l: impl Lagrangian + 'static) -> Self {
        Self {
            name: name.into(),
            provider: Provider::Analytic(Arc::new(l)),
        }
    }

    pub fn numeric(
        name: impl Into<String>,
        value: impl Fn(Point3) -> f64 + Send + Sync + 'static,
        steps: FdSteps,
    ) -> Result<Self> {
        steps.validate()?;
        Ok(Self {
            name: name.into(),
            provider: Provider::Numeric {
                value: Arc::new(value),
                steps,
            },
        })
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.provider, Provider::Analytic(_))
    }

    pub fn value(&self, p: Point3) -> f64 {
        match &self.provider {
            Provider::Analytic(l) => l.value(p),
            Provider::Numeric { value, .. } => value(p),
        }
    }

    pub fn capabilities(&self) -> Capabilities {
        match &self.provider {
            Provider::Analytic(l) => l.capabilities(),
            Provider::Numeric { .. } => Capabilities::ALL,
        }
    }

    pub(crate) fn require(&self, third_order: bool, mixed_x: bool) -> Result<()> {
        let caps = self.capabilities();
        if third_order && !caps.third_order {
            return Err(Error::Capability {
                model: self.name.clone(),
                what: "third-order partials",
            });
        }
        if mixed_x && !caps.mixed_x {
            return Err(Error::Capability {
                model: self.name.clone(),
                what: "mixed x-partials",
            });
        }
        Ok(())
    }
}

/// All partials of `model` at `p`.
pub fn eval_partials(model: &LagrangianModel, p: Point3) -> Result<PartialSet> {
    if !p.is_finite() {
        return Err(Error::Domain(format!("non-finite evaluation point {p:?}")));
    }
    let ps = match &model.provider {
        Provider::Analytic(l) => l.partials(p),
        Provider::Numeric { value, steps } => fd_partials(value.as_ref(), p, steps)?,
    };
    ps.check_finite(p)?;
    Ok(ps)
}

/// Central-difference estimates of every [`PartialSet`] field from values only.
///
/// Samples lie within `2 · max(step) · max(1, |coord|)` of `p`.
pub fn fd_partials<F>(value: &F, p: Point3, steps: &FdSteps) -> Result<PartialSet>
where
    F: Fn(Point3) -> f64 + ?Sized,
{
    steps.validate()?;
    let c = [p.x, p.y, p.yp];
    // Steps are rounded so that c ± h is exactly representable.
    let step = |rel: f64, axis: usize| {
        let h = rel * c[axis].abs().max(1.0);
        (c[axis] + h) - c[axis]
    };
    let h1 = [
        step(steps.first, 0),
        step(steps.first, 1),
        step(steps.first, 2),
    ];
    let h2 = [
        step(steps.second, 0),
        step(steps.second, 1),
        step(steps.second, 2),
    ];
    let h3 = [
        step(steps.third, 0),
        step(steps.third, 1),
        step(steps.third, 2),
    ];

    // f at p + Σ offs[k]·h[k] e_k.
    let at = |offs: [i32; 3], h: &[f64; 3]| {
        value(Point3::new(
            c[0] + offs[0] as f64 * h[0],
            c[1] + offs[1] as f64 * h[1],
            c[2] + offs[2] as f64 * h[2],
        ))
    };
    let e = |axis: usize, k: i32| {
        let mut o = [0; 3];
        o[axis] = k;
        o
    };
    let add = |a: [i32; 3], b: [i32; 3]| [a[0] + b[0], a[1] + b[1], a[2] + b[2]];

    let d1 = |axis: usize| (at(e(axis, 1), &h1) - at(e(axis, -1), &h1)) / (2.0 * h1[axis]);
    let d2 = |axis: usize| {
        (at(e(axis, 1), &h2) - 2.0 * at([0; 3], &h2) + at(e(axis, -1), &h2)) / (h2[axis] * h2[axis])
    };
    let d11 = |a: usize, b: usize| {
        let s = |i: i32, j: i32| at(add(e(a, i), e(b, j)), &h2);
        (s(1, 1) - s(1, -1) - s(-1, 1) + s(-1, -1)) / (4.0 * h2[a] * h2[b])
    };
    let d3 = |axis: usize| {
        let s = |k: i32| at(e(axis, k), &h3);
        (s(2) - 2.0 * s(1) + 2.0 * s(-1) - s(-2)) / (2.0 * h3[axis].powi(3))
    };
    // ∂³/∂a²∂b
    let d21 = |a: usize, b: usize| {
        let s = |i: i32| {
            (at(add(e(a, i), e(b, 1)), &h3) - at(add(e(a, i), e(b, -1)), &h3)) / (2.0 * h3[b])
        };
        (s(1) - 2.0 * s(0) + s(-1)) / (h3[a] * h3[a])
    };
    // ∂³/∂a∂b∂c, all distinct
    let d111 = |a: usize, b: usize, cc: usize| {
        let mut acc = 0.0;
        for i in [-1, 1] {
            for j in [-1, 1] {
                for k in [-1, 1] {
                    let sign = (i * j * k) as f64;
                    acc += sign * at(add(add(e(a, i), e(b, j)), e(cc, k)), &h3);
                }
            }
        }
        acc / (8.0 * h3[a] * h3[b] * h3[cc])
    };

    const X: usize = 0;
    const Y: usize = 1;
    const YP: usize = 2;
    let ps = PartialSet {
        f: value(p),
        f_y: d1(Y),
        f_yp: d1(YP),
        f_yy: d2(Y),
        f_yyp: d11(Y, YP),
        f_ypyp: d2(YP),
        f_yyyp: d21(Y, YP),
        f_yypyp: d21(YP, Y),
        f_ypypyp: d3(YP),
        f_xyp: d11(X, YP),
        f_xyyp: d111(X, Y, YP),
        f_xypyp: d21(YP, X),
    };
    ps.check_finite(p)?;
    Ok(ps)
}

/// `L = ½ m ℓ² θ̇² + m g ℓ cos θ`, with `y = θ`, `y′ = θ̇`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PendulumLagrangian {
    pub m: f64,
    pub ell: f64,
    pub g: f64,
}

impl Lagrangian for PendulumLagrangian {
    fn value(&self, p: Point3) -> f64 {
        let Self { m, ell, g } = *self;
        0.5 * m * ell * ell * p.yp * p.yp + m * g * ell * p.y.cos()
    }

    fn partials(&self, p: Point3) -> PartialSet {
        let Self { m, ell, g } = *self;
        let mgl = m * g * ell;
        let (s, c) = p.y.sin_cos();
        PartialSet {
            f: self.value(p),
            f_y: -mgl * s,
            f_yp: m * ell * ell * p.yp,
            f_yy: -mgl * c,
            f_ypyp: m * ell * ell,
            ..PartialSet::default()
        }
    }
}

/// `f = ½ y′² − ½ k y²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicLagrangian {
    pub k: f64,
}

impl Lagrangian for HarmonicLagrangian {
    fn value(&self, p: Point3) -> f64 {
        0.5 * p.yp * p.yp - 0.5 * self.k * p.y * p.y
    }

    fn partials(&self, p: Point3) -> PartialSet {
        PartialSet {
            f: self.value(p),
            f_y: -self.k * p.y,
            f_yp: p.yp,
            f_yy: -self.k,
            f_ypyp: 1.0,
            ..PartialSet::default()
        }
    }
}

/// `f = √(1 + y′²)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ArcLengthLagrangian;

impl Lagrangian for ArcLengthLagrangian {
    fn value(&self, p: Point3) -> f64 {
        p.yp.hypot(1.0)
    }

    fn partials(&self, p: Point3) -> PartialSet {
        let s = p.yp.hypot(1.0);
        let s3 = s * s * s;
        PartialSet {
            f: s,
            f_yp: p.yp / s,
            f_ypyp: 1.0 / s3,
            f_ypypyp: -3.0 * p.yp / (s3 * s * s),
            ..PartialSet::default()
        }
    }
}

/// One term `coef · x^px · y^py · y′^pyp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Monomial {
    pub coef: f64,
    pub px: u32,
    pub py: u32,
    pub pyp: u32,
}

/// A polynomial Lagrangian, a sum of [`Monomial`]s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialLagrangian {
    pub terms: Vec<Monomial>,
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).map(|i| n as f64 - i as f64).product()
}

fn pow(base: f64, n: u32, k: u32) -> f64 {
    if k > n {
        0.0
    } else {
        base.powi((n - k) as i32)
    }
}

impl PolynomialLagrangian {
    /// Parses `coef:px:py:pyp` terms separated by `;`, e.g. `1:0:1:1` for `y·y′`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for raw in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let parts: Vec<&str> = raw.split(':').map(str::trim).collect();
            let bad = || Error::Config(format!("polynomial term '{raw}' is not coef:px:py:pyp"));
            if parts.len() != 4 {
                return Err(bad());
            }
            let coef: f64 = parts[0].parse().map_err(|_| bad())?;
            if !coef.is_finite() {
                return Err(bad());
            }
            let exp = |s: &str| s.parse::<u32>().map_err(|_| bad());
            terms.push(Monomial {
                coef,
                px: exp(parts[1])?,
                py: exp(parts[2])?,
                pyp: exp(parts[3])?,
            });
        }
        if terms.is_empty() {
            return Err(Error::Config(
                "polynomial Lagrangian needs at least one term".into(),
            ));
        }
        Ok(Self { terms })
    }

    /// ∂^(a+b+c) f / ∂x^a ∂y^b ∂y′^c
    pub fn partial(&self, p: Point3, a: u32, b: u32, c: u32) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let k = falling(t.px, a) * falling(t.py, b) * falling(t.pyp, c);
                if k == 0.0 {
                    0.0
                } else {
                    t.coef * k * pow(p.x, t.px, a) * pow(p.y, t.py, b) * pow(p.yp, t.pyp, c)
                }
            })
            .sum()
    }
}

impl Lagrangian for PolynomialLagrangian {
    fn value(&self, p: Point3) -> f64 {
        self.partial(p, 0, 0, 0)
    }

    fn partials(&self, p: Point3) -> PartialSet {
        let d = |a, b, c| self.partial(p, a, b, c);
        PartialSet {
            f: d(0, 0, 0),
            f_y: d(0, 1, 0),
            f_yp: d(0, 0, 1),
            f_yy: d(0, 2, 0),
            f_yyp: d(0, 1, 1),
            f_ypyp: d(0, 0, 2),
            f_yyyp: d(0, 2, 1),
            f_yypyp: d(0, 1, 2),
            f_ypypyp: d(0, 0, 3),
            f_xyp: d(1, 0, 1),
            f_xyyp: d(1, 1, 1),
            f_xypyp: d(1, 0, 2),
        }
    }
}

/// Parameters shared by the catalog models. Unused keys are ignored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams {
    pub m: f64,
    pub ell: f64,
    pub g: f64,
    pub k: f64,
    pub poly_terms: String,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            m: 1.0,
            ell: 1.0,
            g: 9.8,
            k: 1.0,
            poly_terms: "1:0:1:1".into(),
        }
    }
}

/// Static description of a catalog entry.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub formula: &'static str,
    pub params: &'static [&'static str],
    pub trajectories: &'static [&'static str],
}

pub const CATALOG: [CatalogEntry; 4] = [
    CatalogEntry {
        name: "pendulum",
        formula: "1/2 m ell^2 y'^2 + m g ell cos y",
        params: &["m", "ell", "g", "theta0"],
        trajectories: &[
            "equilibrium",
            "inverted",
            "separatrix",
            "rk4",
            "linear",
            "sampled",
        ],
    },
    CatalogEntry {
        name: "harmonic",
        formula: "1/2 y'^2 - 1/2 k y^2",
        params: &["k"],
        trajectories: &["equilibrium", "linear", "sampled"],
    },
    CatalogEntry {
        name: "arclength",
        formula: "sqrt(1 + y'^2)",
        params: &[],
        trajectories: &["equilibrium", "linear", "sampled"],
    },
    CatalogEntry {
        name: "poly",
        formula: "sum coef x^px y^py y'^pyp",
        params: &["terms"],
        trajectories: &["equilibrium", "linear", "sampled"],
    },
];

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Builds the named catalog model.
pub fn lookup(name: &str, params: &ModelParams) -> Result<LagrangianModel> {
    match name {
        "pendulum" => Ok(LagrangianModel::analytic(
            name,
            PendulumLagrangian {
                m: positive("m", params.m)?,
                ell: positive("ell", params.ell)?,
                g: positive("g", params.g)?,
            },
        )),
        "harmonic" => {
            if !params.k.is_finite() {
                return Err(Error::Config(format!("k must be finite, got {}", params.k)));
            }
            Ok(LagrangianModel::analytic(
                name,
                HarmonicLagrangian { k: params.k },
            ))
        }
        "arclength" => Ok(LagrangianModel::analytic(name, ArcLengthLagrangian)),
        "poly" => Ok(LagrangianModel::analytic(
            name,
            PolynomialLagrangian::parse(&params.poly_terms)?,
        )),
        other => Err(Error::NotFound {
            name: other.to_string(),
            valid: CATALOG
                .iter()
                .map(|e| e.name)
                .collect::<Vec<_>>()
                .join(", "),
        }),
    }
}

/// Every catalog model at default parameters.
pub fn catalog() -> Vec<LagrangianModel> {
    let params = ModelParams::default();
    CATALOG
        .iter()
        .map(|e| lookup(e.name, &params).expect("catalog defaults are valid"))
        .collect()
}
