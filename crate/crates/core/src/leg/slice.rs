//! Normal velocity and acceleration of a thin slice of a link.
//!
//! A slice sits at distance `x` along `link` from that link's own joint. Its
//! velocity contribution due to rotation of `joint_axis` is
//!
//! | axis | link | velocity                                   |
//! |------|------|--------------------------------------------|
//! | 1    | 1    | 0 (hip yaw and hip roll axes intersect)    |
//! | 1    | 2    | `dq1 * x * cos q2`                         |
//! | 1    | 3    | `dq1 * (L2 cos q2 + x sin(q2 + q3))`       |
//! | 2    | 2    | `dq2 * x`                                  |
//! | 2    | 3    | `dq2 * r31(x, q3)`                         |
//! | 3    | 3    | `dq3 * x`                                  |
//!
//! Accelerations are the exact time derivatives of these expressions.

use super::{Joint, LegGeometry, LegState, Link};
use crate::error::{Error, Result};

/// Velocity, acceleration and lever of one slice about one joint axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceKinematics {
    /// Normal velocity, m/s.
    pub v: f64,
    /// Normal acceleration, m/s².
    pub vdot: f64,
    /// Lever about the driving axis, `dv/d(dq_axis)`. Signed: it turns
    /// negative when the slice lies behind the yaw axis.
    pub arm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pair {
    V11,
    V21,
    V31,
    V22,
    V32,
    V33,
}

impl Pair {
    fn resolve(axis: Joint, link: Link) -> Result<Self> {
        match (axis, link) {
            (Joint::J1, Link::L1) => Ok(Pair::V11),
            (Joint::J1, Link::L2) => Ok(Pair::V21),
            (Joint::J1, Link::L3) => Ok(Pair::V31),
            (Joint::J2, Link::L2) => Ok(Pair::V22),
            (Joint::J2, Link::L3) => Ok(Pair::V32),
            (Joint::J3, Link::L3) => Ok(Pair::V33),
            _ => Err(Error::Domain(format!(
                "joint {} does not move link {:?}",
                axis.number(),
                link
            ))),
        }
    }
}

fn check_position(pair: Pair, link: Link, x: f64, geom: &LegGeometry) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("slice position {x} is not finite")));
    }
    // r11 is taken as zero, so link-1 slices are position independent.
    if pair == Pair::V11 {
        return Ok(());
    }
    let length = geom.length(link);
    if !(0.0..=length).contains(&x) {
        return Err(Error::Domain(format!(
            "slice position {x} outside [0, {length}] of link {link:?}"
        )));
    }
    Ok(())
}

pub(crate) fn r31(x: f64, q3: f64, geom: &LegGeometry) -> f64 {
    let l2 = geom.l2;
    (l2 * l2 + x * x + 2.0 * l2 * x * q3.sin()).max(0.0).sqrt()
}

/// `r31 * cos(alpha)`: projection of the joint-2-to-slice vector on link 3.
pub(crate) fn r31_projection(x: f64, q3: f64, geom: &LegGeometry) -> f64 {
    x + geom.l2 * q3.sin()
}

/// `cos(alpha)` without the domain guard. At `r31 = 0` every term that
/// uses it is also multiplied by a vanishing factor, so 0 is returned.
pub(crate) fn cos_alpha_raw(x: f64, q3: f64, geom: &LegGeometry) -> f64 {
    let r = r31(x, q3, geom);
    if r > 0.0 {
        (r31_projection(x, q3, geom) / r).clamp(-1.0, 1.0)
    } else {
        0.0
    }
}

pub(crate) fn velocity_raw(pair: Pair, x: f64, s: &LegState, geom: &LegGeometry) -> f64 {
    let [_, q2, q3] = s.q;
    let [dq1, dq2, dq3] = s.dq;
    match pair {
        Pair::V11 => 0.0,
        Pair::V21 => dq1 * x * q2.cos(),
        Pair::V31 => dq1 * (geom.l2 * q2.cos() + x * (q2 + q3).sin()),
        Pair::V22 => dq2 * x,
        Pair::V32 => dq2 * r31(x, q3, geom),
        Pair::V33 => dq3 * x,
    }
}

pub(crate) fn acceleration_raw(pair: Pair, x: f64, s: &LegState, geom: &LegGeometry) -> f64 {
    let [_, q2, q3] = s.q;
    let [dq1, dq2, dq3] = s.dq;
    let [ddq1, ddq2, ddq3] = s.ddq;
    let l2 = geom.l2;
    match pair {
        Pair::V11 => 0.0,
        Pair::V21 => ddq1 * x * q2.cos() - dq1 * dq2 * x * q2.sin(),
        Pair::V31 => {
            let lever = l2 * q2.cos() + x * (q2 + q3).sin();
            let lever_rate = -l2 * q2.sin() * dq2 + x * (q2 + q3).cos() * (dq2 + dq3);
            ddq1 * lever + dq1 * lever_rate
        }
        Pair::V22 => ddq2 * x,
        Pair::V32 => {
            let r = r31(x, q3, geom);
            let r_rate = if r > 0.0 {
                l2 * x * q3.cos() * dq3 / r
            } else {
                0.0
            };
            ddq2 * r + dq2 * r_rate
        }
        Pair::V33 => ddq3 * x,
    }
}

pub(crate) fn arm_raw(pair: Pair, x: f64, s: &LegState, geom: &LegGeometry) -> f64 {
    let [_, q2, q3] = s.q;
    match pair {
        Pair::V11 => 0.0,
        Pair::V21 => x * q2.cos(),
        Pair::V31 => geom.l2 * q2.cos() + x * (q2 + q3).sin(),
        Pair::V22 | Pair::V33 => x,
        Pair::V32 => r31(x, q3, geom),
    }
}

/// Normal velocity of the slice at `x` on `link` due to rotation of `joint_axis`.
pub fn normal_velocity(
    joint_axis: Joint,
    link: Link,
    x: f64,
    state: &LegState,
    geom: &LegGeometry,
) -> Result<f64> {
    let pair = Pair::resolve(joint_axis, link)?;
    check_position(pair, link, x, geom)?;
    Ok(velocity_raw(pair, x, state, geom))
}

/// Time derivative of [`normal_velocity`] along the trajectory through
/// `q`, `dq`, `ddq`.
pub fn normal_acceleration(
    joint_axis: Joint,
    link: Link,
    x: f64,
    state: &LegState,
    geom: &LegGeometry,
) -> Result<f64> {
    let pair = Pair::resolve(joint_axis, link)?;
    check_position(pair, link, x, geom)?;
    Ok(acceleration_raw(pair, x, state, geom))
}

pub fn slice_kinematics(
    joint_axis: Joint,
    link: Link,
    x: f64,
    state: &LegState,
    geom: &LegGeometry,
) -> Result<SliceKinematics> {
    let pair = Pair::resolve(joint_axis, link)?;
    check_position(pair, link, x, geom)?;
    Ok(SliceKinematics {
        v: velocity_raw(pair, x, state, geom),
        vdot: acceleration_raw(pair, x, state, geom),
        arm: arm_raw(pair, x, state, geom),
    })
}

/// Distance from the joint-2 axis to the slice at `x` on link 3:
/// `sqrt(L2² + x² + 2 L2 x sin q3)`.
pub fn slice_radius_r31(x: f64, q3: f64, geom: &LegGeometry) -> Result<f64> {
    if !(0.0..=geom.l3).contains(&x) {
        return Err(Error::Domain(format!(
            "slice position {x} outside [0, {}] of link 3",
            geom.l3
        )));
    }
    Ok(r31(x, q3, geom))
}

/// Cosine of the angle between the joint-2-to-slice vector and link 3,
/// by the law of cosines on the triangle (L2, x, r31).
pub fn cos_alpha(x: f64, q3: f64, geom: &LegGeometry) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::Singular(
            "cos(alpha) is undefined for the slice at joint 3 (x = 0)".into(),
        ));
    }
    if !(0.0..=geom.l3).contains(&x) {
        return Err(Error::Domain(format!(
            "slice position {x} outside (0, {}] of link 3",
            geom.l3
        )));
    }
    let r = r31(x, q3, geom);
    if r == 0.0 {
        return Err(Error::Singular(format!(
            "slice at x = {x} coincides with the joint-2 axis"
        )));
    }
    let l2 = geom.l2;
    Ok(((x * x + r * r - l2 * l2) / (2.0 * x * r)).clamp(-1.0, 1.0))
}
