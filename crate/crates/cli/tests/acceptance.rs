//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero when any
//! criterion fails.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use hydroleg::fit::{assemble_regression, fit_hydro_params};
use hydroleg::hydro::{
    single_link_added_mass_torque, single_link_drag_torque, term_gains, total_hydro_torque,
};
use hydroleg::leg::{fk_foot, ik_leg, normal_acceleration, normal_velocity, Branch};
use hydroleg::resistance::{
    default_pressures, default_speeds, efficiency_report, fit_surface, monotonicity_check,
    seal_current, sensitivity_report, viscous_current, SyntheticLaws,
};
use hydroleg::sim::{
    gen_trajectory, synthesize_measurements, GaitSpec, LandBaseline, NoiseSpec, TrajectorySample,
};
use hydroleg::{EnvParams, GaussLegendre, HydroCoeffs, Joint, LegGeometry, LegState, Link};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRUTH: (f64, f64) = (2.2, 0.5);
const CLOSED_LOOP_REL_TOL: f64 = 1e-6;
const CLOSED_LOOP_TIME: Duration = Duration::from_secs(5);
const NOISE_FRACTION: f64 = 0.05;
const NOISE_RUNS: u64 = 100;
const NOISE_BAND: f64 = 0.1;
const NOISE_PASS_RATE: f64 = 0.95;
const SLOPE_RANGE: (f64, f64) = (-0.55, -0.45);
const EFFICIENCY_TOL_PP: f64 = 0.05;
const QUAD_REL_TOL: f64 = 1e-10;
const FD_STEP: f64 = 1e-4;
const FD_TOL: f64 = 1e-5;
const IK_TOL: f64 = 1e-9;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn setup() -> (LegGeometry, EnvParams, GaussLegendre) {
    (
        LegGeometry::uwml_default(),
        EnvParams::default(),
        GaussLegendre::default(),
    )
}

fn truth() -> HydroCoeffs {
    HydroCoeffs::new(TRUTH.0, TRUTH.1)
}

fn fit_joint1(traj: &[TrajectorySample], noise: NoiseSpec) -> hydroleg::fit::FitResult {
    let (g, env, quad) = setup();
    let pairs =
        synthesize_measurements(traj, &g, &env, &truth(), &noise, LandBaseline::Zero, &quad)
            .unwrap();
    let rows = assemble_regression(&pairs, &g, &env, &quad, &[Joint::J1]).unwrap();
    fit_hydro_params(&rows).unwrap()
}

fn rms(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
    (s / n as f64).sqrt()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn closed_loop() -> Outcome {
    let (g, _, _) = setup();
    let start = Instant::now();
    let spec = GaitSpec::default_gait();
    let traj = gen_trajectory(&spec, &g).unwrap();
    let fit = fit_joint1(&traj, NoiseSpec::none());
    let elapsed = start.elapsed();
    let (ecd, ecm) = (rel(fit.cd_hat, TRUTH.0), rel(fit.cm_hat, TRUTH.1));
    outcome(
        traj.len() == 500 && ecd < CLOSED_LOOP_REL_TOL && ecm < CLOSED_LOOP_REL_TOL && elapsed < CLOSED_LOOP_TIME,
        format!(
            "{} samples, rel err cd {ecd:.1e} cm {ecm:.1e} (tol {CLOSED_LOOP_REL_TOL:e}), {:.3} s (limit {} s)",
            traj.len(),
            elapsed.as_secs_f64(),
            CLOSED_LOOP_TIME.as_secs()
        ),
    )
}

fn noisy_recovery() -> Outcome {
    let (g, env, quad) = setup();
    let spec = GaitSpec::default_gait();
    let traj = gen_trajectory(&spec, &g).unwrap();
    let tau_rms = rms(traj.iter().map(|s| {
        total_hydro_torque(&s.state, &g, &env, &truth(), &quad).tau_w()[Joint::J1.index()]
    }));
    let sigma = NOISE_FRACTION * tau_rms;
    let hits = (0..NOISE_RUNS)
        .filter(|&seed| {
            let fit = fit_joint1(
                &traj,
                NoiseSpec {
                    torque_sigma: sigma,
                    seed,
                },
            );
            (fit.cd_hat - TRUTH.0).abs() <= NOISE_BAND && (fit.cm_hat - TRUTH.1).abs() <= NOISE_BAND
        })
        .count();
    let rate = hits as f64 / NOISE_RUNS as f64;

    // mean standard error against sample count on a log-log scale
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for rate_hz in [31.25, 62.5, 125.0, 250.0, 500.0] {
        let t = gen_trajectory(
            &GaitSpec {
                sample_rate: rate_hz,
                ..spec.clone()
            },
            &g,
        )
        .unwrap();
        let se: f64 = (0..20)
            .map(|seed| {
                fit_joint1(
                    &t,
                    NoiseSpec {
                        torque_sigma: sigma,
                        seed,
                    },
                )
                .cd_stderr
                .unwrap()
            })
            .sum::<f64>()
            / 20.0;
        xs.push((t.len() as f64).ln());
        ys.push(se.ln());
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();

    outcome(
        rate >= NOISE_PASS_RATE && (SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&slope),
        format!(
            "sigma {sigma:.3} N·m, {hits}/{NOISE_RUNS} runs within ±{NOISE_BAND} (need {:.0}%), stderr slope {slope:.3} (range {:?})",
            100.0 * NOISE_PASS_RATE,
            SLOPE_RANGE
        ),
    )
}

fn component_ordering() -> Outcome {
    let (g, env, quad) = setup();
    let traj = gen_trajectory(&GaitSpec::default_gait(), &g).unwrap();
    let fit = fit_joint1(&traj, NoiseSpec::none());
    let coeffs = HydroCoeffs::new(fit.cd_hat, fit.cm_hat);
    let b: Vec<_> = traj
        .iter()
        .map(|s| total_hydro_torque(&s.state, &g, &env, &coeffs, &quad))
        .collect();
    let mut pass = b.iter().all(|x| x.joint(Joint::J1).tau_f == 0.0);
    let mut detail = String::from("joint 1 buoyancy identically zero");
    for j in [Joint::J2, Joint::J3] {
        let f = rms(b.iter().map(|x| x.joint(j).tau_f));
        let d = rms(b.iter().map(|x| x.joint(j).tau_d));
        let m = rms(b.iter().map(|x| x.joint(j).tau_m));
        pass &= f > d && d > m;
        detail += &format!("; joint {} rms f {f:.2} > d {d:.2} > m {m:.2}", j.number());
    }
    outcome(pass, detail)
}

fn efficiency() -> Outcome {
    let r = efficiency_report(2.85, 10.4).unwrap();
    let (loss, eff) = (100.0 * r.loss_fraction, 100.0 * r.efficiency);
    outcome(
        (loss - 27.4).abs() <= EFFICIENCY_TOL_PP && (eff - 72.6).abs() <= EFFICIENCY_TOL_PP,
        format!("loss {loss:.3}% efficiency {eff:.3}% (tol ±{EFFICIENCY_TOL_PP} pp)"),
    )
}

fn quadrature() -> Outcome {
    let (g, env, q32) = setup();
    let q64 = GaussLegendre::new(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut closed: f64 = 0.0;
    for _ in 0..1000 {
        let l: f64 = rng.random_range(0.05..2.0);
        let d = rng.random_range(0.01..0.5);
        let area = rng.random_range(0.001..0.2);
        let w = rng.random_range(-5.0..5.0);
        let wdot = rng.random_range(-10.0..10.0);
        let cd = rng.random_range(0.1..4.0);
        let cm = rng.random_range(0.1..2.0);
        let drag = 0.5 * env.rho_water * cd * d * w * f64::abs(w) * l.powi(4) / 4.0;
        let added = env.rho_water * cm * area * wdot * l.powi(3) / 3.0;
        closed = closed.max(rel(single_link_drag_torque(l, d, w, &env, cd, &q32), drag));
        closed = closed.max(rel(
            single_link_added_mass_torque(l, area, wdot, &env, cm, &q32),
            added,
        ));
    }

    let mut doubling: f64 = 0.0;
    for _ in 0..1000 {
        let mut r = || rng.random_range(-3.2..3.2);
        let mut s = LegState::new([r(), r(), r()], [r(), r(), r()], [r(), r(), r()]);
        if rng.random_bool(0.25) {
            s.q[2] = -FRAC_PI_2 + rng.random_range(-1e-3..1e-3);
        }
        for j in Joint::ALL {
            let (a, b) = (
                term_gains(j, &s, &g, &env, &q32),
                term_gains(j, &s, &g, &env, &q64),
            );
            for (x, y) in a.iter().zip(&b) {
                for (u, v) in [
                    (x.drag_gain, y.drag_gain),
                    (x.added_mass_gain, y.added_mass_gain),
                ] {
                    if v != 0.0 {
                        doubling = doubling.max(rel(u, v));
                    }
                }
            }
        }
    }
    outcome(
        closed < QUAD_REL_TOL && doubling < QUAD_REL_TOL,
        format!("closed forms worst {closed:.1e}, 32 vs 64 nodes worst {doubling:.1e} (tol {QUAD_REL_TOL:e})"),
    )
}

fn kinematics() -> Outcome {
    let (g, _, _) = setup();
    let pairs = [
        (Joint::J1, Link::L1),
        (Joint::J1, Link::L2),
        (Joint::J1, Link::L3),
        (Joint::J2, Link::L2),
        (Joint::J2, Link::L3),
        (Joint::J3, Link::L3),
    ];
    let len = |l: Link| match l {
        Link::L1 => g.l1.max(0.1),
        Link::L2 => g.l2,
        Link::L3 => g.l3,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut fd: f64 = 0.0;
    for _ in 0..40 {
        let c = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(0.0..2.5),
        ];
        let a = [
            rng.random_range(0.0..0.6),
            rng.random_range(0.0..0.6),
            rng.random_range(0.0..0.6),
        ];
        let w = [
            TAU / rng.random_range(1.0..5.0),
            TAU / rng.random_range(1.0..5.0),
            TAU / rng.random_range(1.0..5.0),
        ];
        let ph = [
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
        ];
        let at = |t: f64| {
            let mut s = LegState::default();
            for i in 0..3 {
                let (sn, cs) = (w[i] * t + ph[i]).sin_cos();
                s.q[i] = c[i] + a[i] * sn;
                s.dq[i] = a[i] * w[i] * cs;
                s.ddq[i] = -a[i] * w[i] * w[i] * sn;
            }
            s
        };
        for k in 0..20 {
            let t = 0.17 * k as f64;
            let (s, sp, sm) = (at(t), at(t + FD_STEP), at(t - FD_STEP));
            for (j, link) in pairs {
                for frac in [0.05, 0.3, 0.77, 1.0] {
                    let x = frac * len(link);
                    let num = (normal_velocity(j, link, x, &sp, &g).unwrap()
                        - normal_velocity(j, link, x, &sm, &g).unwrap())
                        / (2.0 * FD_STEP);
                    fd = fd.max((num - normal_acceleration(j, link, x, &s, &g).unwrap()).abs());
                }
            }
        }
    }

    let mut ik: f64 = 0.0;
    let (inner, outer) = ((g.l2 - g.l3).abs(), g.l2 + g.l3);
    let mut targets = 0;
    while targets < 100 {
        let d = rng.random_range(inner + 1e-3..outer - 1e-3);
        let elev = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
        let yaw = rng.random_range(-3.0..3.0);
        let rho = d * elev.cos();
        if rho <= 1e-3 {
            continue;
        }
        targets += 1;
        let p = [rho * f64::cos(yaw), rho * f64::sin(yaw), d * elev.sin()];
        for branch in [Branch::KneeUp, Branch::KneeDown] {
            let back = fk_foot(ik_leg(p, &g, branch).unwrap(), &g);
            for i in 0..3 {
                ik = ik.max((back[i] - p[i]).abs());
            }
        }
    }
    outcome(
        fd < FD_TOL && ik < IK_TOL,
        format!("finite differences worst {fd:.1e} m/s² (tol {FD_TOL:e}), FK∘IK worst {ik:.1e} m (tol {IK_TOL:e})"),
    )
}

/// Monotone in both axes and ordered as expected, for each derived grid.
fn laws_verdict(laws: SyntheticLaws) -> [bool; 5] {
    let set = laws
        .synthesize(&default_speeds(), &default_pressures())
        .unwrap();
    let (dry, oil, seal) = set.require_all().unwrap();
    let (v, s) = (
        viscous_current(oil, dry).unwrap(),
        seal_current(seal, oil).unwrap(),
    );
    let (mv, ms) = (
        monotonicity_check(&v).unwrap(),
        monotonicity_check(&s).unwrap(),
    );
    let sens = sensitivity_report(
        &fit_surface(&v, false).unwrap(),
        &fit_surface(&s, false).unwrap(),
        None,
    )
    .unwrap();
    [
        mv.increasing_in_speed,
        mv.increasing_in_pressure,
        ms.increasing_in_speed,
        ms.increasing_in_pressure,
        sens.expected_ordering_holds,
    ]
}

fn resistance_laws() -> Outcome {
    let expected = laws_verdict(SyntheticLaws::expected_laws());
    let inverted = laws_verdict(SyntheticLaws::inverted_laws());
    // inverted grids must break monotonicity in each derived grid and the ordering
    let inverted_fails =
        !(inverted[0] && inverted[1]) && !(inverted[2] && inverted[3]) && !inverted[4];
    outcome(
        expected.iter().all(|&b| b) && inverted_fails,
        format!(
            "expected grids [visc n, visc p, seal n, seal p, ordering] = {expected:?}; inverted = {inverted:?}"
        ),
    )
}

fn hydroleg(out: &Path, args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_hydroleg"))
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--seed")
        .arg("7")
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&status.stderr)
        ))
    }
}

fn run_all_commands(dir: &Path) -> Result<(), String> {
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    hydroleg(
        dir,
        &["simulate", "--noise", "0.4", "--baseline", "gravity"],
    )?;
    hydroleg(dir, &["torques", "--trajectory", &p("trajectory.csv")])?;
    hydroleg(dir, &["decompose", "--breakdown", &p("breakdown.csv")])?;
    hydroleg(dir, &["fit", "--pairs", &p("pairs.csv"), "--joints", "all"])?;
    hydroleg(dir, &["synth-grids"])?;
    hydroleg(
        dir,
        &["resistance", "--grids", &p("grids.csv"), "--rated", "10.4"],
    )?;
    hydroleg(dir, &["efficiency", "--loss", "2.85", "--rated", "10.4"])?;
    Ok(())
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    if let Err(e) = run_all_commands(a.path()).and_then(|_| run_all_commands(b.path())) {
        return outcome(false, e);
    }
    let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
    let differing: Vec<&str> = sa
        .iter()
        .zip(&sb)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.0.as_str())
        .collect();
    outcome(
        sa.len() == sb.len() && sa.len() >= 14 && differing.is_empty(),
        format!("{} files compared, differing: {differing:?}", sa.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("closed-loop recovery", closed_loop),
        ("noisy recovery", noisy_recovery),
        ("component ordering", component_ordering),
        ("efficiency arithmetic", efficiency),
        ("quadrature correctness", quadrature),
        ("kinematic consistency", kinematics),
        ("resistance laws", resistance_laws),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "{} {}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
