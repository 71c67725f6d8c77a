//! Worked examples checked against independently derived values.

use std::f64::consts::{FRAC_PI_2, PI};

use varineq::lagrangian::{eval_partials, lookup, FdSteps, ModelParams, PartialSet, Point3};
use varineq::pendulum::{self, PendulumParams};
use varineq::quadrature::{integrate, Interval, QuadratureSpec};
use varineq::sampled::SampledCurve;
use varineq::second_variation::{
    el_residual, functional_value, inequality_margin, run_check, second_variation_direct,
    second_variation_ibp_standard, second_variation_paper, Outcome, EL_GRID,
};
use varineq::{LagrangianModel, TestFunction, Trajectory};

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn unit_pendulum() -> LagrangianModel {
    lookup(
        "pendulum",
        &ModelParams {
            m: 1.0,
            ell: 1.0,
            g: 1.0,
            ..Default::default()
        },
    )
    .unwrap()
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

// ∫₀¹ φ′² = 1/770 and ∫₀¹ φ² = 1/12012 for ((x(x−1))³; both from
// ∫₀¹ xᵃ(1−x)ᵃ dx = (a!)²/(2a+1)!.
const PHI_PRIME_SQ: f64 = 1.0 / 770.0;
const PHI_SQ: f64 = 1.0 / 12012.0;

#[test]
fn numeric_pendulum_matches_analytic() {
    let analytic = unit_pendulum();
    let a = analytic.clone();
    let numeric =
        LagrangianModel::numeric("pendulum-fd", move |p| a.value(p), FdSteps::default()).unwrap();
    let p = Point3::new(0.0, 0.5, 0.25);
    let exact = eval_partials(&analytic, p).unwrap().values();
    let fd = eval_partials(&numeric, p).unwrap().values();
    for i in 0..exact.len() {
        let tol = [1e-10, 1e-10, 1e-7, 1e-4][PartialSet::FIELD_ORDERS[i] as usize];
        let allowed = (tol * exact[i].abs().max(1.0)).max(1e-12);
        assert!(
            (exact[i] - fd[i]).abs() <= allowed,
            "{}: {} vs {}",
            PartialSet::FIELD_NAMES[i],
            exact[i],
            fd[i]
        );
    }
}

#[test]
fn sampled_bump_reproduces_closed_form() {
    let interval = iv(0.0, 1.0);
    let bump = TestFunction::poly_bump(interval, 1.0, 3).unwrap();
    let xs = interval.nodes(2000);
    let v = xs.iter().map(|&x| bump.eval(x).unwrap()[0]).collect();
    let dv = xs.iter().map(|&x| bump.eval(x).unwrap()[1]).collect();
    let sampled = TestFunction::sampled(SampledCurve::new(&xs, v, dv).unwrap());
    let mut worst: f64 = 0.0;
    for i in 0..1999 {
        let x = (i as f64 + 0.37) / 2000.0;
        worst = worst.max((sampled.eval(x).unwrap()[0] - bump.eval(x).unwrap()[0]).abs());
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn functional_values() {
    let p = unit_pendulum();
    let unit = iv(0.0, 1.0);
    let f0 = functional_value(&p, &Trajectory::constant(unit, 0.0), &spec()).unwrap();
    assert!((f0.value - 1.0).abs() < 1e-14);
    let f90 = functional_value(&p, &Trajectory::constant(unit, FRAC_PI_2), &spec()).unwrap();
    assert!(f90.value.abs() < 1e-15);
}

#[test]
fn separatrix_is_an_extremal() {
    let pp = PendulumParams::default();
    let traj = pendulum::separatrix_trajectory(&pp, iv(0.0, 2.0)).unwrap();
    let r = el_residual(&pp.model().unwrap(), &traj, EL_GRID).unwrap();
    assert!(r.max_abs < 1e-6, "{}", r.max_abs);
    assert!(traj.consistency().unwrap() < 1e-6);
}

#[test]
fn unit_pendulum_forms_equal_beta_value() {
    let unit = iv(0.0, 1.0);
    let traj = Trajectory::constant(unit, 0.0);
    let tf = TestFunction::poly_bump(unit, 1.0, 3).unwrap();
    let expect = PHI_PRIME_SQ - PHI_SQ;
    let p = unit_pendulum();
    let a = second_variation_direct(&p, &traj, &tf, 0.0, &spec())
        .unwrap()
        .value;
    let (b, terms) = second_variation_paper(&p, &traj, &tf, &spec()).unwrap();
    let c = second_variation_ibp_standard(&p, &traj, &tf, &spec())
        .unwrap()
        .value;
    for v in [a, b, c] {
        assert!((v - expect).abs() <= 1e-10 * expect, "{v} vs {expect}");
    }
    assert!((terms.t1 + PHI_SQ).abs() < 1e-15);
    assert!((terms.t5 + PHI_PRIME_SQ).abs() < 1e-15);
    for t in [terms.t2, terms.t3, terms.t4, terms.t6, terms.t7] {
        assert_eq!(t, 0.0);
    }
}

#[test]
fn harmonic_scaled_beta_values() {
    let h = lookup("harmonic", &ModelParams::default()).unwrap();
    for beta in [1.0, 2.5, 3.5, 4.0] {
        let interval = iv(0.0, beta);
        let traj = Trajectory::constant(interval, 0.0);
        let tf = TestFunction::poly_bump(interval, 1.0, 3).unwrap();
        let expect = beta.powi(11) * PHI_PRIME_SQ - beta.powi(13) * PHI_SQ;
        let a = second_variation_direct(&h, &traj, &tf, 0.0, &spec())
            .unwrap()
            .value;
        let c = second_variation_ibp_standard(&h, &traj, &tf, &spec())
            .unwrap()
            .value;
        assert!(
            (a - expect).abs() <= 1e-10 * expect.abs().max(1.0),
            "{beta}: {a} vs {expect}"
        );
        assert!((c - a).abs() <= 1e-10 * a.abs().max(1.0));
    }
    let threshold = (12012.0f64 / 770.0).sqrt();
    assert!((threshold - 3.9497).abs() < 1e-4);
}

#[test]
fn inverted_pendulum_margin_is_positive() {
    let pp = PendulumParams {
        g: 9.8,
        ell: 2.0,
        ..Default::default()
    };
    let interval = iv(0.0, 3.0);
    let traj = Trajectory::constant(interval, PI);
    let tf = TestFunction::poly_bump(interval, 1.0, 3).unwrap();
    let m = pendulum::inequality38_margin(&pp, &traj, &tf, &spec()).unwrap();
    let kinetic = integrate(|x| tf.eval(x).map(|v| v[1] * v[1]), interval, &spec()).unwrap();
    let square = integrate(|x| tf.eval(x).map(|v| v[0] * v[0]), interval, &spec()).unwrap();
    let expect = pp.ell * kinetic.value + pp.g * square.value;
    assert!(m.margin > 0.0);
    assert!((m.margin - expect).abs() <= 1e-12 * expect);
}

#[test]
fn unit_pendulum_margin38() {
    let pp = PendulumParams {
        g: 1.0,
        ..Default::default()
    };
    let unit = iv(0.0, 1.0);
    let tf = TestFunction::poly_bump(unit, 1.0, 3).unwrap();
    let m =
        pendulum::inequality38_margin(&pp, &Trajectory::constant(unit, 0.0), &tf, &spec()).unwrap();
    let expect = PHI_PRIME_SQ - PHI_SQ;
    assert!((m.margin - expect).abs() <= 1e-12 * expect);
    // the commonly quoted 1.215447e-3 is a loose rounding of 1.2154512e-3
    assert!((expect - 1.215_451_2e-3).abs() < 1e-10);
}

#[test]
fn equilibrium_report() {
    let unit = iv(0.0, 1.0);
    let traj = Trajectory::constant(unit, 0.0);
    let tf = TestFunction::poly_bump(unit, 1.0, 3).unwrap();
    let r = run_check(&unit_pendulum(), &traj, &tf, &spec());
    assert!(r.residual_ab.unwrap() < 1e-10);
    assert!(r.residual_ac.unwrap() < 1e-10);
    assert_eq!(r.el_residual_max, Some(0.0));
    assert!(r.inequality_margin.unwrap() > 0.0);
    assert_eq!(r.outcome(), Outcome::Pass);
}

#[test]
fn margin_changes_sign_at_the_conjugate_threshold() {
    let h = lookup("harmonic", &ModelParams::default()).unwrap();
    let margin = |beta: f64| {
        let interval = iv(0.0, beta);
        let tf = TestFunction::poly_bump(interval, 1.0, 3).unwrap();
        inequality_margin(&h, &Trajectory::constant(interval, 0.0), &tf, &spec()).unwrap()
    };
    assert!(margin(3.94) > 0.0);
    assert!(margin(3.96) < 0.0);
}

#[test]
fn separatrix_time_inverts_theta() {
    let pp = PendulumParams::default();
    assert_eq!(pendulum::separatrix_time(&pp, pp.theta0).unwrap(), 0.0);
    assert!((pendulum::separatrix_theta(&pp, 0.0).unwrap() - pp.theta0).abs() < 1e-15);
    let late = pendulum::separatrix_theta(&pp, 30.0).unwrap();
    assert!((PI - late).abs() < 1e-12);
}
