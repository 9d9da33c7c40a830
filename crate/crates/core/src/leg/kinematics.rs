use serde::{Deserialize, Serialize};

use super::{LegGeometry, LegState};
use crate::error::{Error, Result};

/// Elbow branch of the planar two-link solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Knee on the upper side of the hip-to-foot line (`q3 <= pi/2`).
    #[default]
    KneeUp,
    /// Knee on the lower side of the hip-to-foot line (`q3 >= pi/2`).
    KneeDown,
}

/// Foot position, velocity and acceleration in the base frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FootMotion {
    pub p: [f64; 3],
    pub v: [f64; 3],
    pub a: [f64; 3],
}

/// Horizontal reach and height of the foot in the leg plane.
fn planar(q2: f64, q3: f64, geom: &LegGeometry) -> (f64, f64) {
    let rho = geom.l2 * q2.cos() + geom.l3 * (q2 + q3).sin();
    let z = geom.l2 * q2.sin() - geom.l3 * (q2 + q3).cos();
    (rho, z)
}

/// Foot position in the base frame (origin on the intersecting hip axes).
pub fn fk_foot(q: [f64; 3], geom: &LegGeometry) -> [f64; 3] {
    let (rho, z) = planar(q[1], q[2], geom);
    [rho * q[0].cos(), rho * q[0].sin(), z]
}

pub fn foot_kinematics(state: &LegState, geom: &LegGeometry) -> FootMotion {
    let [q1, q2, q3] = state.q;
    let [dq1, dq2, dq3] = state.dq;
    let [ddq1, ddq2, ddq3] = state.ddq;
    let (l2, l3) = (geom.l2, geom.l3);
    let (s2, c2) = q2.sin_cos();
    let (s23, c23) = (q2 + q3).sin_cos();
    let (s1, c1) = q1.sin_cos();
    let (rho, z) = planar(q2, q3, geom);

    let (rho_2, rho_3) = (-l2 * s2 + l3 * c23, l3 * c23);
    let (z_2, z_3) = (l2 * c2 + l3 * s23, l3 * s23);
    let w23 = dq2 + dq3;

    let rho_dot = rho_2 * dq2 + rho_3 * dq3;
    let z_dot = z_2 * dq2 + z_3 * dq3;
    let rho_ddot = rho_2 * ddq2 + rho_3 * ddq3 - l2 * c2 * dq2 * dq2 - l3 * s23 * w23 * w23;
    let z_ddot = z_2 * ddq2 + z_3 * ddq3 - l2 * s2 * dq2 * dq2 + l3 * c23 * w23 * w23;

    // radial / tangential components in the rotating leg plane
    let a_r = rho_ddot - rho * dq1 * dq1;
    let a_t = rho * ddq1 + 2.0 * rho_dot * dq1;
    FootMotion {
        p: [rho * c1, rho * s1, z],
        v: [
            rho_dot * c1 - rho * dq1 * s1,
            rho_dot * s1 + rho * dq1 * c1,
            z_dot,
        ],
        a: [a_r * c1 - a_t * s1, a_r * s1 + a_t * c1, z_ddot],
    }
}

/// Inverse position kinematics. The yaw angle always points the leg plane
/// at the target (non-negative horizontal reach).
pub fn ik_leg(p_foot: [f64; 3], geom: &LegGeometry, branch: Branch) -> Result<[f64; 3]> {
    if p_foot.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("foot target is not finite".into()));
    }
    let (l2, l3) = (geom.l2, geom.l3);
    let [x, y, z] = p_foot;
    let q1 = y.atan2(x);
    let rho = x.hypot(y);
    let d = rho.hypot(z);

    let outer = l2 + l3;
    let inner = (l2 - l3).abs();
    let slack = 1e-12 * outer;
    if d > outer + slack {
        return Err(Error::Unreachable {
            distance: d,
            closest: outer,
        });
    }
    if d < inner - slack {
        return Err(Error::Unreachable {
            distance: d,
            closest: inner,
        });
    }

    let cos_bend = ((d * d - l2 * l2 - l3 * l3) / (2.0 * l2 * l3)).clamp(-1.0, 1.0);
    let bend = match branch {
        Branch::KneeUp => -cos_bend.acos(),
        Branch::KneeDown => cos_bend.acos(),
    };
    let q2 = z.atan2(rho) - (l3 * bend.sin()).atan2(l2 + l3 * bend.cos());
    let q3 = bend + std::f64::consts::FRAC_PI_2;
    Ok([q1, q2, q3])
}

/// Inverse kinematics of position, velocity and acceleration.
///
/// Rates solve `J dq = v`; accelerations solve `J ddq = a - dJ/dt dq`, both
/// exactly. Fails near the yaw axis and at the stretched or folded knee where
/// the Jacobian is singular.
pub fn ik_leg_motion(motion: &FootMotion, geom: &LegGeometry, branch: Branch) -> Result<LegState> {
    let q = ik_leg(motion.p, geom, branch)?;
    let [q1, q2, q3] = q;
    let (l2, l3) = (geom.l2, geom.l3);
    let (s2, c2) = q2.sin_cos();
    let (s23, c23) = (q2 + q3).sin_cos();
    let (s1, c1) = q1.sin_cos();
    let (rho, _) = planar(q2, q3, geom);

    let scale = l2 + l3;
    if rho.abs() < 1e-9 * scale {
        return Err(Error::Singular("foot on the yaw axis".into()));
    }
    let det = -l2 * l3 * q3.cos();
    if det.abs() < 1e-9 * scale * scale {
        return Err(Error::Singular("knee stretched or folded".into()));
    }
    let (rho_2, rho_3) = (-l2 * s2 + l3 * c23, l3 * c23);
    let (z_2, z_3) = (l2 * c2 + l3 * s23, l3 * s23);
    let solve = |b_rho: f64, b_z: f64| {
        (
            (z_3 * b_rho - rho_3 * b_z) / det,
            (-z_2 * b_rho + rho_2 * b_z) / det,
        )
    };

    let [vx, vy, vz] = motion.v;
    let rho_dot = vx * c1 + vy * s1;
    let dq1 = (vy * c1 - vx * s1) / rho;
    let (dq2, dq3) = solve(rho_dot, vz);

    let [ax, ay, az] = motion.a;
    let a_r = ax * c1 + ay * s1;
    let a_t = ay * c1 - ax * s1;
    let rho_ddot = a_r + rho * dq1 * dq1;
    let ddq1 = (a_t - 2.0 * rho_dot * dq1) / rho;
    let w23 = dq2 + dq3;
    let h_rho = -l2 * c2 * dq2 * dq2 - l3 * s23 * w23 * w23;
    let h_z = -l2 * s2 * dq2 * dq2 + l3 * c23 * w23 * w23;
    let (ddq2, ddq3) = solve(rho_ddot - h_rho, az - h_z);

    Ok(LegState::new(q, [dq1, dq2, dq3], [ddq1, ddq2, ddq3]))
}
