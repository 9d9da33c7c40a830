use std::f64::consts::{FRAC_PI_2, TAU};

use approx::assert_abs_diff_eq;
use hydroleg::leg::{
    cos_alpha, fk_foot, foot_kinematics, ik_leg, normal_acceleration, normal_velocity,
    slice_radius_r31, Branch,
};
use hydroleg::{Joint, LegGeometry, LegState, Link};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PAIRS: [(Joint, Link); 6] = [
    (Joint::J1, Link::L1),
    (Joint::J1, Link::L2),
    (Joint::J1, Link::L3),
    (Joint::J2, Link::L2),
    (Joint::J2, Link::L3),
    (Joint::J3, Link::L3),
];

fn geom() -> LegGeometry {
    LegGeometry::uwml_default()
}

fn link_len(link: Link, g: &LegGeometry) -> f64 {
    match link {
        Link::L1 => g.l1.max(0.1),
        Link::L2 => g.l2,
        Link::L3 => g.l3,
    }
}

/// Sinusoidal joint motion with exact rates and accelerations.
fn gait_state(t: f64, c: [f64; 3], a: [f64; 3], w: [f64; 3], ph: [f64; 3]) -> LegState {
    let mut s = LegState::default();
    for i in 0..3 {
        let (sn, cs) = (w[i] * t + ph[i]).sin_cos();
        s.q[i] = c[i] + a[i] * sn;
        s.dq[i] = a[i] * w[i] * cs;
        s.ddq[i] = -a[i] * w[i] * w[i] * sn;
    }
    s
}

fn angle() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn rate() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

proptest! {
    #[test]
    fn velocity_is_linear_in_the_driving_rate(
        q in [angle(), angle(), angle()],
        dq in [rate(), rate(), rate()],
        k in -4.0..4.0f64,
        frac in 0.0..1.0f64,
    ) {
        let g = geom();
        let s = LegState::new(q, dq, [0.0; 3]);
        for (j, link) in PAIRS {
            let x = frac * link_len(link, &g);
            let mut scaled = s;
            scaled.dq[j.index()] *= k;
            let v = normal_velocity(j, link, x, &s, &g).unwrap();
            let vk = normal_velocity(j, link, x, &scaled, &g).unwrap();
            prop_assert!((vk - k * v).abs() <= 1e-12 * (1.0 + v.abs() * k.abs()));
        }
    }

    #[test]
    fn r31_triangle_bounds(q3 in -10.0..10.0f64, frac in 0.0..=1.0f64) {
        let g = geom();
        let x = frac * g.l3;
        let r = slice_radius_r31(x, q3, &g).unwrap();
        prop_assert!(r >= (g.l2 - x).abs() - 1e-12);
        prop_assert!(r <= g.l2 + x + 1e-12);
    }

    #[test]
    fn cos_alpha_is_a_cosine(q3 in -10.0..10.0f64, frac in 1e-6..=1.0f64) {
        let g = geom();
        let x = frac * g.l3;
        if let Ok(c) = cos_alpha(x, q3, &g) {
            prop_assert!((-1.0..=1.0).contains(&c));
        }
    }
}

#[test]
fn accelerations_match_central_differences() {
    let g = geom();
    let h = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
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
        for k in 0..20 {
            let t = k as f64 * 0.17;
            let s = gait_state(t, c, a, w, ph);
            let (sp, sm) = (
                gait_state(t + h, c, a, w, ph),
                gait_state(t - h, c, a, w, ph),
            );
            for (j, link) in PAIRS {
                for frac in [0.05, 0.3, 0.77, 1.0] {
                    let x = frac * link_len(link, &g);
                    let fd = (normal_velocity(j, link, x, &sp, &g).unwrap()
                        - normal_velocity(j, link, x, &sm, &g).unwrap())
                        / (2.0 * h);
                    let an = normal_acceleration(j, link, x, &s, &g).unwrap();
                    worst = worst.max((fd - an).abs());
                }
            }
            let (fp, fm) = (foot_kinematics(&sp, &g), foot_kinematics(&sm, &g));
            let f = foot_kinematics(&s, &g);
            for i in 0..3 {
                worst = worst.max(((fp.v[i] - fm.v[i]) / (2.0 * h) - f.a[i]).abs());
                worst = worst.max(((fp.p[i] - fm.p[i]) / (2.0 * h) - f.v[i]).abs());
            }
        }
    }
    assert!(worst < 1e-5, "worst mismatch {worst:e} m/s²");
}

fn random_reachable(rng: &mut ChaCha8Rng, g: &LegGeometry) -> [f64; 3] {
    let (inner, outer) = ((g.l2 - g.l3).abs(), g.l2 + g.l3);
    loop {
        let d = rng.random_range(inner + 1e-3..outer - 1e-3);
        let elev = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
        let yaw = rng.random_range(-3.0..3.0);
        let rho = d * elev.cos();
        if rho > 1e-3 {
            return [rho * f64::cos(yaw), rho * f64::sin(yaw), d * elev.sin()];
        }
    }
}

#[test]
fn fk_inverts_ik_on_both_branches() {
    let g = geom();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let p = random_reachable(&mut rng, &g);
        for branch in [Branch::KneeUp, Branch::KneeDown] {
            let q = ik_leg(p, &g, branch).unwrap();
            let back = fk_foot(q, &g);
            for i in 0..3 {
                assert_abs_diff_eq!(back[i], p[i], epsilon = 1e-9);
            }
        }
    }
}
