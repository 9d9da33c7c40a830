//! Geometry, joint state and kinematics of the 3-DOF leg.
//!
//! Frame convention: joint 1 (hip yaw) rotates about the vertical axis,
//! parallel to buoyancy. Joints 2 and 3 rotate links 2 and 3 inside the
//! vertical plane selected by `q1`. In that plane, with `rho` the horizontal
//! distance from the yaw axis and `z` the height,
//!
//! * link 2 points along `(cos q2, sin q2)`,
//! * link 3 points along `(sin(q2 + q3), -cos(q2 + q3))`,
//!
//! so the leg is fully stretched out horizontally at `q = (0, 0, pi/2)` and
//! the calf hangs straight down at `q2 + q3 = 0`.

mod geometry;
mod kinematics;
pub(crate) mod slice;

pub use geometry::{AngleUnit, EnvParams, LegGeometry, ModelConfig, DEFAULT_PROFILE};
pub use kinematics::{fk_foot, foot_kinematics, ik_leg, ik_leg_motion, Branch, FootMotion};
pub use slice::{
    cos_alpha, normal_acceleration, normal_velocity, slice_kinematics, slice_radius_r31,
    SliceKinematics,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Joint {
    /// Hip yaw.
    J1,
    /// Hip roll.
    J2,
    /// Knee roll.
    J3,
}

impl Joint {
    pub const ALL: [Joint; 3] = [Joint::J1, Joint::J2, Joint::J3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Joint::J1),
            2 => Ok(Joint::J2),
            3 => Ok(Joint::J3),
            _ => Err(Error::Domain(format!(
                "joint number must be 1, 2 or 3, got {n}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Link {
    L1,
    L2,
    L3,
}

impl Link {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Link::L1),
            2 => Ok(Link::L2),
            3 => Ok(Link::L3),
            _ => Err(Error::Domain(format!(
                "link number must be 1, 2 or 3, got {n}"
            ))),
        }
    }
}

/// Joint angles (rad), rates (rad/s) and accelerations (rad/s²) at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LegState {
    pub q: [f64; 3],
    pub dq: [f64; 3],
    pub ddq: [f64; 3],
}

impl LegState {
    pub fn new(q: [f64; 3], dq: [f64; 3], ddq: [f64; 3]) -> Self {
        Self { q, dq, ddq }
    }

    pub fn at_rest(q: [f64; 3]) -> Self {
        Self {
            q,
            ..Self::default()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.q
            .iter()
            .chain(&self.dq)
            .chain(&self.ddq)
            .all(|v| v.is_finite())
    }

    pub fn is_static(&self) -> bool {
        self.dq.iter().chain(&self.ddq).all(|&v| v == 0.0)
    }
}
