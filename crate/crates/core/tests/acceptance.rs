//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the lines are always
//! printed.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varineq::lagrangian::{lookup, ModelParams};
use varineq::pendulum::{self, PendulumParams};
use varineq::quadrature::integrate;
use varineq::sampled::SampledCurve;
use varineq::second_variation::{
    inequality_margin, relative_gap, second_variation_direct, second_variation_ibp_standard,
    second_variation_paper,
};
use varineq::testfn::boundary_check;
use varineq::{Interval, LagrangianModel, QuadratureSpec, TestFunction, Trajectory};

const BETA_TOL: f64 = 1e-12;
const BETA_BUDGET: Duration = Duration::from_secs(1);
const IBP_TOL: f64 = 1e-9;
const IBP_BUDGET: Duration = Duration::from_secs(10);
const COLLAPSE_TOL: f64 = 1e-9;
const EQUIV_TOL: f64 = 1e-10;
const EQUIV_CONFIGS: usize = 20;
const EQUIV_SEED: u64 = 0x5eed_0038;
const ODE_TOL: f64 = 1e-10;
const ROUNDTRIP_TOL: f64 = 1e-10;
const RK4_TOL: f64 = 1e-6;
const DRIFT_TOL: f64 = 1e-8;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn model(name: &str) -> LagrangianModel {
    lookup(name, &ModelParams::default()).unwrap()
}

fn beta_integrals() -> Verdict {
    let start = Instant::now();
    let spec = QuadratureSpec::default();
    let unit = iv(0.0, 1.0);
    let sextic = integrate(|x: f64| Ok((x * (x - 1.0)).powi(6)), unit, &spec).unwrap();
    let tf = TestFunction::poly_bump(unit, 1.0, 3).unwrap();
    let kinetic = integrate(|x| tf.eval(x).map(|v| v[1] * v[1]), unit, &spec).unwrap();
    let elapsed = start.elapsed();
    let e1 = (sextic.value - 1.0 / 12012.0).abs() * 12012.0;
    let e2 = (kinetic.value - 1.0 / 770.0).abs() * 770.0;
    verdict(
        e1 <= BETA_TOL && e2 <= BETA_TOL && elapsed < BETA_BUDGET,
        format!("rel errors {e1:.2e}, {e2:.2e} (tol {BETA_TOL:e}); {elapsed:.2?}"),
    )
}

/// The identity matrix: (label, model, trajectory).
fn ibp_cases() -> Vec<(&'static str, LagrangianModel, Trajectory)> {
    let pp = PendulumParams::default();
    let pend_iv = iv(0.0, 2.0);
    vec![
        (
            "pendulum theta=0",
            model("pendulum"),
            Trajectory::constant(pend_iv, 0.0),
        ),
        (
            "pendulum separatrix",
            model("pendulum"),
            pendulum::separatrix_trajectory(&pp, pend_iv).unwrap(),
        ),
        (
            "harmonic y=0",
            model("harmonic"),
            Trajectory::constant(iv(0.0, 4.0), 0.0),
        ),
        (
            "arclength y=x",
            model("arclength"),
            Trajectory::linear(iv(0.0, 1.0), 0.0, 1.0),
        ),
    ]
}

const NS: [u32; 4] = [3, 4, 5, 6];
const LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];

fn ibp_identity() -> Verdict {
    let start = Instant::now();
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut worst_case = String::new();
    let mut count = 0;
    for (label, m, traj) in ibp_cases() {
        for n in NS {
            for lambda in LAMBDAS {
                let tf = TestFunction::poly_bump(traj.interval, lambda, n).unwrap();
                let a = second_variation_direct(&m, &traj, &tf, 0.0, &spec)
                    .unwrap()
                    .value;
                let c = second_variation_ibp_standard(&m, &traj, &tf, &spec)
                    .unwrap()
                    .value;
                let gap = relative_gap(a, c);
                if gap > worst {
                    worst = gap;
                    worst_case = format!("{label}, n={n}, lambda={lambda}");
                }
                count += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= IBP_TOL && elapsed < IBP_BUDGET,
        format!(
            "{count} cases, worst |A-C| scaled {worst:.2e} ({worst_case}) (tol {IBP_TOL:e}); {elapsed:.2?}"
        ),
    )
}

fn pendulum_collapse() -> Verdict {
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (label, m, traj) in ibp_cases() {
        if !label.starts_with("pendulum") {
            continue;
        }
        for n in NS {
            for lambda in LAMBDAS {
                let tf = TestFunction::poly_bump(traj.interval, lambda, n).unwrap();
                let a = second_variation_direct(&m, &traj, &tf, 0.0, &spec)
                    .unwrap()
                    .value;
                let (b, _) = second_variation_paper(&m, &traj, &tf, &spec).unwrap();
                worst = worst.max((b - a).abs() / a.abs().max(1.0));
                count += 1;
            }
        }
    }
    verdict(
        worst <= COLLAPSE_TOL,
        format!("{count} cases, worst |B-A|/max(1,|A|) {worst:.2e} (tol {COLLAPSE_TOL:e})"),
    )
}

fn margin38_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(EQUIV_SEED);
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..EQUIV_CONFIGS {
        let pp = PendulumParams {
            m: rng.random_range(0.5..3.0),
            ell: rng.random_range(0.5..3.0),
            g: rng.random_range(1.0..20.0),
            theta0: rng.random_range(0.1..3.0),
        };
        let interval = iv(0.0, rng.random_range(0.5..3.0));
        let traj = if rng.random_bool(0.5) {
            pendulum::separatrix_trajectory(&pp, interval).unwrap()
        } else {
            Trajectory::constant(interval, rng.random_range(-PI..PI))
        };
        let tf = TestFunction::poly_bump(
            interval,
            rng.random_range(0.5..2.0),
            rng.random_range(3..=6),
        )
        .unwrap();
        let general = inequality_margin(&pp.model().unwrap(), &traj, &tf, &spec).unwrap();
        let m38 = pendulum::inequality38_margin(&pp, &traj, &tf, &spec)
            .unwrap()
            .margin;
        let scaled = m38 * pp.m * pp.ell;
        // strict relative error, no absolute floor
        let gap = (scaled - general).abs() / scaled.abs().max(general.abs()).max(f64::MIN_POSITIVE);
        if gap > EQUIV_TOL {
            failures.push(i);
        }
        worst = worst.max(gap);
    }
    verdict(
        failures.is_empty(),
        format!(
            "{EQUIV_CONFIGS} seeded configs, worst relative gap {worst:.2e} (tol {EQUIV_TOL:e}), failing {failures:?}"
        ),
    )
}

fn closed_form() -> Verdict {
    let grid = iv(0.0, 5.0).nodes(1000);
    let mut ode: f64 = 0.0;
    let mut roundtrip: f64 = 0.0;
    let mut energy: f64 = 0.0;
    for theta0 in [0.5, FRAC_PI_2, 3.0] {
        for (g, ell) in [(1.0, 1.0), (9.8, 2.0)] {
            let pp = PendulumParams {
                m: 1.0,
                ell,
                g,
                theta0,
            };
            let w2 = g / ell;
            for &t in &grid {
                let [th, dth, ddth] = pendulum::separatrix_state(&pp, t).unwrap();
                ode = ode.max((ddth + w2 * th.sin()).abs());
                energy = energy.max((0.5 * dth * dth - w2 * th.cos() - w2).abs() / w2);
                let back = pendulum::separatrix_time(&pp, th).unwrap();
                roundtrip = roundtrip.max((back - t).abs());
            }
        }
    }
    verdict(
        ode < ODE_TOL && roundtrip < ROUNDTRIP_TOL,
        format!(
            "max ODE residual {ode:.2e} (tol {ODE_TOL:e}), max roundtrip {roundtrip:.2e} (tol {ROUNDTRIP_TOL:e}), energy rel {energy:.2e}"
        ),
    )
}

fn run_bin(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_varineq"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn conjugate_sign_flip() -> Verdict {
    let spec = QuadratureSpec::default();
    let h = model("harmonic");
    let margin = |beta: f64| {
        let interval = iv(0.0, beta);
        let traj = Trajectory::constant(interval, 0.0);
        let tf = TestFunction::poly_bump(interval, 1.0, 3).unwrap();
        inequality_margin(&h, &traj, &tf, &spec).unwrap()
    };
    let (m35, m40) = (margin(3.5), margin(4.0));
    let common = [
        "check",
        "--problem",
        "harmonic",
        "--trajectory",
        "equilibrium",
        "--format",
        "json",
    ];
    let code = |beta: &str| {
        let mut args = common.to_vec();
        args.extend(["--beta", beta]);
        run_bin(&args).0
    };
    let (c35, c40) = (code("3.5"), code("4.0"));
    verdict(
        m35 > 0.0 && m40 < 0.0 && c35 == 0 && c40 == 3,
        format!("margin(3.5) = {m35:.6e}, margin(4.0) = {m40:.6e}; exit codes {c35}, {c40}"),
    )
}

fn rk4_validation() -> Verdict {
    let pp = PendulumParams::default();
    let rate = pendulum::separatrix_initial_rate(&pp).unwrap();
    let short = iv(0.0, 2.0);
    let states = pendulum::rk4_states(&pp, pp.theta0, rate, short, 10_000).unwrap();
    let dev = short
        .nodes(10_000)
        .iter()
        .zip(&states)
        .map(|(&t, s)| (s[0] - pendulum::separatrix_theta(&pp, t).unwrap()).abs())
        .fold(0.0, f64::max);

    let long = pendulum::rk4_states(&pp, pp.theta0, rate, iv(0.0, 10.0), 100_000).unwrap();
    let e0 = pendulum::energy(&pp, long[0][0], long[0][1]);
    let drift = long
        .iter()
        .map(|s| (pendulum::energy(&pp, s[0], s[1]) - e0).abs() / e0.abs())
        .fold(0.0, f64::max);
    verdict(
        dev < RK4_TOL && drift < DRIFT_TOL,
        format!(
            "max |theta_rk4 - theta| on [0,2] {dev:.2e} (tol {RK4_TOL:e}); energy drift on [0,10] {drift:.2e} (tol {DRIFT_TOL:e})"
        ),
    )
}

fn admissibility() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for (a, b) in [(0.0, 1.0), (-2.0, 3.0), (0.25, 7.5), (-1e-3, 1e-3)] {
        for n in 3..=12 {
            for lambda in [0.5, 1.0, 5.0] {
                let tf = TestFunction::poly_bump(iv(a, b), lambda, n).unwrap();
                let r = boundary_check(&tf);
                let exact = r.at_alpha == [0.0; 3] && r.at_beta == [0.0; 3];
                if !(r.pass && exact) {
                    bad.push(format!("[{a},{b}] n={n} lambda={lambda}"));
                }
                checked += 1;
            }
        }
    }
    let xs: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
    let v = xs.iter().map(|x| x * (1.0 - x)).collect();
    let dv = xs.iter().map(|x| 1.0 - 2.0 * x).collect();
    let tf = TestFunction::sampled(SampledCurve::new(&xs, v, dv).unwrap());
    let sampled_fails = !boundary_check(&tf).pass;
    verdict(
        bad.is_empty() && sampled_fails,
        format!(
            "{checked} poly bumps exact-zero at both ends (failures {bad:?}); x(1-x) rejected: {sampled_fails}"
        ),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.ini");
    fs::write(
        &cfg,
        "[problem]\nname = pendulum\n[trajectory]\nkind = separatrix\n[interval]\nalpha = 0\nbeta = 2\n[phi]\nlambda = 1\nn = 4\n[output]\nformat = json\n",
    )
    .unwrap();
    let path = cfg.to_str().unwrap();
    let runs: Vec<(i32, Vec<u8>)> = (0..3)
        .map(|_| run_bin(&["check", "--config", path]))
        .collect();
    let same = runs.windows(2).all(|w| w[0] == w[1]);
    let parsed = serde_json::from_slice::<serde_json::Value>(&runs[0].1).is_ok();
    verdict(
        same && parsed && !runs[0].1.is_empty(),
        format!(
            "3 runs, {} bytes each, identical: {same}, valid JSON: {parsed}, exit {}",
            runs[0].1.len(),
            runs[0].0
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("beta-integral oracles", beta_integrals),
        ("integration-by-parts identity matrix", ibp_identity),
        ("pendulum forms collapse", pendulum_collapse),
        ("pendulum margin equivalence", margin38_equivalence),
        ("closed-form separatrix", closed_form),
        ("conjugate-point sign flip", conjugate_sign_flip),
        ("RK4 validation", rk4_validation),
        ("admissibility", admissibility),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {}", i + 1, v.detail);
        failed += usize::from(!v.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
