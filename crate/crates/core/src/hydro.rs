//! Morison slice-theory torques on the leg joints.
//!
//! Each joint torque is a sum of slice integrals. A term pairs one link with
//! one velocity contribution (see [`crate::leg`]) and a lever about the joint:
//!
//! ```text
//! drag        tau_d = 1/2 rho Cd D ∫ lever(x) v(x) |v(x)| dx
//! added mass  tau_m =     rho Cm A ∫ lever(x) v'(x)       dx
//! ```
//!
//! The lever of a contribution about its own driving joint is `dv/d(dq)`.
//! Cross terms between joints 2 and 3 use the projections `r31 cos(alpha)`
//! and `x cos(alpha)`. Terms are superposed one velocity contribution at a
//! time, which is an approximation since drag is quadratic in the total
//! velocity; identification relies on exactly this structure.
//!
//! Buoyancy acts at the link centroids, so its torque is the gravity torque
//! scaled by `rho_water / rho_link`. It is positive by convention and
//!
//! ```text
//! tau_w = tau_f - tau_d - tau_m
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::leg::slice::{
    acceleration_raw, arm_raw, cos_alpha_raw, r31_projection, velocity_raw, Pair,
};
use crate::leg::{EnvParams, Joint, LegGeometry, LegState, Link};
use crate::quadrature::GaussLegendre;

/// Drag (`cd`) and added-mass (`cm`) coefficients of the Morison formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydroCoeffs {
    pub cd: f64,
    pub cm: f64,
}

impl HydroCoeffs {
    pub const fn new(cd: f64, cm: f64) -> Self {
        Self { cd, cm }
    }

    pub const UNIT: HydroCoeffs = HydroCoeffs { cd: 1.0, cm: 1.0 };
}

/// Force per unit length on a slice: `1/2 rho Cd D |v| v + rho Cm A v'`.
pub fn morison_slice_force(
    v: f64,
    vdot: f64,
    d: f64,
    a: f64,
    env: &EnvParams,
    coeffs: &HydroCoeffs,
) -> f64 {
    let rho = env.rho_water;
    0.5 * rho * coeffs.cd * d * v.abs() * v + rho * coeffs.cm * a * vdot
}

/// Drag torque of a single link of `length` spinning at `omega` about one end.
pub fn single_link_drag_torque(
    length: f64,
    d: f64,
    omega: f64,
    env: &EnvParams,
    cd: f64,
    quad: &GaussLegendre,
) -> f64 {
    let integral = quad.integrate(
        |x| {
            let v = omega * x;
            x * v * v.abs()
        },
        0.0,
        length,
    );
    0.5 * env.rho_water * cd * d * integral
}

/// Added-mass torque of a single link under angular acceleration `omega_dot`.
pub fn single_link_added_mass_torque(
    length: f64,
    a: f64,
    omega_dot: f64,
    env: &EnvParams,
    cm: f64,
    quad: &GaussLegendre,
) -> f64 {
    let integral = quad.integrate(|x| x * (omega_dot * x), 0.0, length);
    env.rho_water * cm * a * integral
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lever {
    /// `dv/d(dq)` of the drag contribution.
    Own,
    /// `r31 cos(alpha)`: link-3 slice about joint 2.
    ProjectedRadius,
    /// `x cos(alpha)`: force normal to `r31` about joint 3.
    ProjectedPosition,
}

#[derive(Debug, Clone, Copy)]
struct Term {
    link: Link,
    driver: Joint,
    drag_velocity: Pair,
    added_mass_accel: Pair,
    lever: Lever,
}

const fn term(link: Link, driver: Joint, drag: Pair, accel: Pair, lever: Lever) -> Term {
    Term {
        link,
        driver,
        drag_velocity: drag,
        added_mass_accel: accel,
        lever,
    }
}

// Link 1 has no length and no wetted section (r11 = 0), so it never appears.
const JOINT1_TERMS: [Term; 2] = [
    term(Link::L2, Joint::J1, Pair::V21, Pair::V21, Lever::Own),
    term(Link::L3, Joint::J1, Pair::V31, Pair::V31, Lever::Own),
];

// The added-mass cross term integrates the joint-2 contribution v32' while
// its drag counterpart uses v33.
const JOINT2_TERMS: [Term; 3] = [
    term(Link::L2, Joint::J2, Pair::V22, Pair::V22, Lever::Own),
    term(Link::L3, Joint::J2, Pair::V32, Pair::V32, Lever::Own),
    term(
        Link::L3,
        Joint::J3,
        Pair::V33,
        Pair::V32,
        Lever::ProjectedRadius,
    ),
];

const JOINT3_TERMS: [Term; 2] = [
    term(Link::L3, Joint::J3, Pair::V33, Pair::V33, Lever::Own),
    term(
        Link::L3,
        Joint::J2,
        Pair::V32,
        Pair::V32,
        Lever::ProjectedPosition,
    ),
];

fn terms(joint: Joint) -> &'static [Term] {
    match joint {
        Joint::J1 => &JOINT1_TERMS,
        Joint::J2 => &JOINT2_TERMS,
        Joint::J3 => &JOINT3_TERMS,
    }
}

/// Section dimension facing the motion: joint 1 sweeps the section height,
/// joints 2 and 3 sweep the width.
fn facing_dimension(joint: Joint, link: Link, geom: &LegGeometry) -> f64 {
    match joint {
        Joint::J1 => geom.height(link),
        Joint::J2 | Joint::J3 => geom.width(link),
    }
}

/// Panel boundaries on link 3 where an integrand loses smoothness: the sign
/// change of the yaw velocity and the closest approach of the slice to the
/// joint-2 axis. Near `sin q3 = -1` the radius `r31` has a sharp bend of
/// width `L2 |cos q3|`, which gets a geometrically graded set of panels.
fn link3_breaks(state: &LegState, geom: &LegGeometry) -> Vec<f64> {
    let [_, q2, q3] = state.q;
    let s23 = (q2 + q3).sin();
    let mut breaks = Vec::new();
    if s23 != 0.0 {
        breaks.push(-geom.l2 * q2.cos() / s23);
    }
    let (s3, c3) = q3.sin_cos();
    let closest = -geom.l2 * s3;
    breaks.push(closest);
    let mut width = geom.l2 * c3.abs();
    while width > 0.0 && width < geom.l3 {
        breaks.extend([closest - width, closest + width]);
        width *= 2.0;
    }
    breaks
}

/// Drag and added-mass gains (values at `Cd = 1`, `Cm = 1`) of one term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermGain {
    pub joint: Joint,
    pub link: Link,
    /// Joint whose rotation produces the velocity contribution.
    pub driver: Joint,
    pub drag_gain: f64,
    pub added_mass_gain: f64,
}

/// Per-term gains of `joint`, in the order the terms are summed.
pub fn term_gains(
    joint: Joint,
    state: &LegState,
    geom: &LegGeometry,
    env: &EnvParams,
    quad: &GaussLegendre,
) -> Vec<TermGain> {
    let rho = env.rho_water;
    let q3 = state.q[2];
    terms(joint)
        .iter()
        .map(|t| {
            let length = geom.length(t.link);
            let breaks = match t.link {
                Link::L3 => link3_breaks(state, geom),
                _ => Vec::new(),
            };
            let lever = |x: f64| match t.lever {
                Lever::Own => arm_raw(t.drag_velocity, x, state, geom),
                Lever::ProjectedRadius => r31_projection(x, q3, geom),
                Lever::ProjectedPosition => x * cos_alpha_raw(x, q3, geom),
            };
            let drag_integral = quad.integrate_split(
                |x| {
                    let v = velocity_raw(t.drag_velocity, x, state, geom);
                    lever(x) * v * v.abs()
                },
                0.0,
                length,
                &breaks,
            );
            let added_integral = quad.integrate_split(
                |x| lever(x) * acceleration_raw(t.added_mass_accel, x, state, geom),
                0.0,
                length,
                &breaks,
            );
            TermGain {
                joint,
                link: t.link,
                driver: t.driver,
                drag_gain: 0.5 * rho * facing_dimension(joint, t.link, geom) * drag_integral,
                added_mass_gain: rho * geom.area(t.link) * added_integral,
            }
        })
        .collect()
}

/// Linear gains of one joint: `tau_d = alpha * Cd`, `tau_m = beta * Cm`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointGains {
    pub alpha: f64,
    pub beta: f64,
}

pub fn joint_gains(
    joint: Joint,
    state: &LegState,
    geom: &LegGeometry,
    env: &EnvParams,
    quad: &GaussLegendre,
) -> JointGains {
    term_gains(joint, state, geom, env, quad)
        .iter()
        .fold(JointGains::default(), |acc, t| JointGains {
            alpha: acc.alpha + t.drag_gain,
            beta: acc.beta + t.added_mass_gain,
        })
}

pub fn gain_coefficients(
    state: &LegState,
    geom: &LegGeometry,
    env: &EnvParams,
    quad: &GaussLegendre,
) -> [JointGains; 3] {
    Joint::ALL.map(|j| joint_gains(j, state, geom, env, quad))
}

pub fn drag_torque_joint(
    joint: Joint,
    state: &LegState,
    geom: &LegGeometry,
    env: &EnvParams,
    cd: f64,
    quad: &GaussLegendre,
) -> f64 {
    joint_gains(joint, state, geom, env, quad).alpha * cd
}

pub fn added_mass_torque_joint(
    joint: Joint,
    state: &LegState,
    geom: &LegGeometry,
    env: &EnvParams,
    cm: f64,
    quad: &GaussLegendre,
) -> f64 {
    joint_gains(joint, state, geom, env, quad).beta * cm
}

/// Gravity torque of the links below `joint`, about that joint.
pub fn gravity_torque_joint(joint: Joint, state: &LegState, geom: &LegGeometry) -> f64 {
    let [_, q2, q3] = state.q;
    let g = geom.g;
    match joint {
        // yaw axis is parallel to gravity
        Joint::J1 => 0.0,
        Joint::J2 => {
            geom.m2 * g * geom.lc2 * q2.cos()
                + geom.m3 * g * (geom.l2 * q2.cos() + geom.lc3 * (q2 + q3).sin())
        }
        Joint::J3 => geom.m3 * g * geom.lc3 * (q2 + q3).sin(),
    }
}

pub fn buoyancy_torque_joint(
    joint: Joint,
    state: &LegState,
    geom: &LegGeometry,
    env: &EnvParams,
) -> f64 {
    gravity_torque_joint(joint, state, geom) * (env.rho_water / geom.rho_link)
}

/// Torque components of one joint, N·m.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointTorque {
    pub tau_w: f64,
    pub tau_f: f64,
    pub tau_d: f64,
    pub tau_m: f64,
    pub alpha_gain: f64,
    pub beta_gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TorqueBreakdown {
    pub joints: [JointTorque; 3],
}

impl TorqueBreakdown {
    pub fn joint(&self, joint: Joint) -> &JointTorque {
        &self.joints[joint.index()]
    }

    pub fn tau_w(&self) -> [f64; 3] {
        self.joints.map(|j| j.tau_w)
    }
}

pub fn total_hydro_torque(
    state: &LegState,
    geom: &LegGeometry,
    env: &EnvParams,
    coeffs: &HydroCoeffs,
    quad: &GaussLegendre,
) -> TorqueBreakdown {
    let joints = Joint::ALL.map(|j| {
        let gains = joint_gains(j, state, geom, env, quad);
        let tau_f = buoyancy_torque_joint(j, state, geom, env);
        let tau_d = gains.alpha * coeffs.cd;
        let tau_m = gains.beta * coeffs.cm;
        JointTorque {
            tau_w: tau_f - tau_d - tau_m,
            tau_f,
            tau_d,
            tau_m,
            alpha_gain: gains.alpha,
            beta_gain: gains.beta,
        }
    });
    TorqueBreakdown { joints }
}

/// [`total_hydro_torque`] over many samples, evaluated in parallel; output
/// order follows input order.
pub fn breakdown_batch(
    states: &[LegState],
    geom: &LegGeometry,
    env: &EnvParams,
    coeffs: &HydroCoeffs,
    quad: &GaussLegendre,
) -> Vec<TorqueBreakdown> {
    states
        .par_iter()
        .map(|s| total_hydro_torque(s, geom, env, coeffs, quad))
        .collect()
}
