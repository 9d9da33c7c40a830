//! Hydrodynamic joint torques of a 3-DOF underwater leg, identification of
//! the drag and added-mass coefficients from land/underwater torque logs,
//! and analysis of oil-viscous and dynamic-seal joint resistance.

pub mod error;
pub mod fit;
pub mod hydro;
pub mod io;
pub mod leg;
pub mod quadrature;
pub mod resistance;
pub mod sim;

pub use error::{Error, Result};
pub use hydro::{HydroCoeffs, JointTorque, TorqueBreakdown};
pub use leg::{EnvParams, Joint, LegGeometry, LegState, Link, ModelConfig};
pub use quadrature::{GaussLegendre, QuadratureSpec};
