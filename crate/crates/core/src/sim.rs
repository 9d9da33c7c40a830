//! Synthetic gaits and paired land / underwater torque logs.
//!
//! A log pair is built from known coefficients: the land torque is a chosen
//! baseline and the underwater torque is the baseline minus the model
//! hydrodynamic torque, so differencing the logs gives the model torque back.
//! Noise, when requested, is drawn independently for each log.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::TorquePairSample;
use crate::hydro::{gravity_torque_joint, total_hydro_torque, HydroCoeffs};
use crate::leg::{ik_leg_motion, Branch, EnvParams, FootMotion, Joint, LegGeometry, LegState};
use crate::quadrature::GaussLegendre;

/// One sample of a time-indexed joint trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: LegState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GaitShape {
    /// `q_i(t) = center_i + amplitude_i * sin(2 pi t / period + phase_i)`, rad.
    JointSinusoid {
        center: [f64; 3],
        amplitude: [f64; 3],
        #[serde(default)]
        phase: [f64; 3],
    },
    /// Foot on an ellipse in the vertical plane through `center` parallel to
    /// the base y axis: `p = center + (0, a cos th, b sin th)` with
    /// `th = 2 pi t / period + phase`. Lengths in m.
    FootEllipse {
        center: [f64; 3],
        semi_axes: [f64; 2],
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        branch: Branch,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitSpec {
    /// s
    pub period: f64,
    /// Hz
    pub sample_rate: f64,
    pub cycles: u32,
    #[serde(flatten)]
    pub shape: GaitShape,
}

impl GaitSpec {
    /// Two 4 s cycles of a joint sinusoid sampled at 62.5 Hz (500 samples).
    /// Slow enough that buoyancy dominates joints 2 and 3.
    pub fn default_gait() -> Self {
        Self {
            period: 4.0,
            sample_rate: 62.5,
            cycles: 2,
            shape: GaitShape::JointSinusoid {
                center: [0.0, 0.2, 1.2],
                amplitude: [0.4, 0.25, 0.35],
                phase: [0.0, 1.0, 2.0],
            },
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("gait spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::Config(format!(
                "period must be positive, got {}",
                self.period
            )));
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(Error::Config(format!(
                "sample_rate must be positive, got {}",
                self.sample_rate
            )));
        }
        if self.cycles == 0 {
            return Err(Error::Config("cycles must be at least 1".into()));
        }
        let finite = match &self.shape {
            GaitShape::JointSinusoid {
                center,
                amplitude,
                phase,
            } => center
                .iter()
                .chain(amplitude)
                .chain(phase)
                .all(|v| v.is_finite()),
            GaitShape::FootEllipse {
                center,
                semi_axes,
                phase,
                ..
            } => center.iter().chain(semi_axes).all(|v| v.is_finite()) && phase.is_finite(),
        };
        if !finite {
            return Err(Error::Config("gait parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        (f64::from(self.cycles) * self.period * self.sample_rate).round() as usize
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.sample_count())
            .map(|k| k as f64 / self.sample_rate)
            .collect()
    }
}

fn sinusoid_state(
    t: f64,
    omega: f64,
    center: &[f64; 3],
    amp: &[f64; 3],
    phase: &[f64; 3],
) -> LegState {
    let mut s = LegState::default();
    for i in 0..3 {
        let (sin, cos) = (omega * t + phase[i]).sin_cos();
        s.q[i] = center[i] + amp[i] * sin;
        s.dq[i] = amp[i] * omega * cos;
        s.ddq[i] = -amp[i] * omega * omega * sin;
    }
    s
}

fn ellipse_motion(
    t: f64,
    omega: f64,
    center: &[f64; 3],
    axes: &[f64; 2],
    phase: f64,
) -> FootMotion {
    let (sin, cos) = (omega * t + phase).sin_cos();
    let [a, b] = *axes;
    let w2 = omega * omega;
    FootMotion {
        p: [center[0], center[1] + a * cos, center[2] + b * sin],
        v: [0.0, -a * omega * sin, b * omega * cos],
        a: [0.0, -a * w2 * cos, -b * w2 * sin],
    }
}

/// Samples a gait. Joint rates and accelerations are exact derivatives of
/// the angles: closed form for the sinusoid, and for the ellipse the exact
/// inverse of the analytic foot velocity and acceleration through the leg
/// Jacobian.
pub fn gen_trajectory(spec: &GaitSpec, geom: &LegGeometry) -> Result<Vec<TrajectorySample>> {
    spec.validate()?;
    geom.validate()?;
    let omega = TAU / spec.period;
    spec.times()
        .into_iter()
        .map(|t| {
            let state = match &spec.shape {
                GaitShape::JointSinusoid {
                    center,
                    amplitude,
                    phase,
                } => sinusoid_state(t, omega, center, amplitude, phase),
                GaitShape::FootEllipse {
                    center,
                    semi_axes,
                    phase,
                    branch,
                } => ik_leg_motion(
                    &ellipse_motion(t, omega, center, semi_axes, *phase),
                    geom,
                    *branch,
                )?,
            };
            Ok(TrajectorySample { t, state })
        })
        .collect()
}

/// Additive Gaussian torque noise, N·m, applied per joint to each log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub torque_sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self {
            torque_sigma: 0.0,
            seed: 0,
        }
    }
}

/// Land torque the underwater log is offset from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LandBaseline {
    #[default]
    Zero,
    /// Torque holding the links against gravity.
    Gravity,
}

/// Builds the paired torque logs for a trajectory.
///
/// Each sample draws its noise from its own ChaCha stream (seed, index), so
/// the result does not depend on evaluation order.
pub fn synthesize_measurements(
    traj: &[TrajectorySample],
    geom: &LegGeometry,
    env: &EnvParams,
    truth: &HydroCoeffs,
    noise: &NoiseSpec,
    baseline: LandBaseline,
    quad: &GaussLegendre,
) -> Result<Vec<TorquePairSample>> {
    if !(noise.torque_sigma.is_finite() && noise.torque_sigma >= 0.0) {
        return Err(Error::Domain(format!(
            "torque_sigma must be non-negative, got {}",
            noise.torque_sigma
        )));
    }
    let normal = Normal::new(0.0, noise.torque_sigma).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(traj
        .par_iter()
        .enumerate()
        .map(|(k, s)| {
            let tau_w = total_hydro_torque(&s.state, geom, env, truth, quad).tau_w();
            let base = match baseline {
                LandBaseline::Zero => [0.0; 3],
                LandBaseline::Gravity => {
                    Joint::ALL.map(|j| gravity_torque_joint(j, &s.state, geom))
                }
            };
            let mut tau_land = base;
            let mut tau_water: [f64; 3] = std::array::from_fn(|i| base[i] - tau_w[i]);
            if noise.torque_sigma > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
                rng.set_stream(k as u64);
                for v in tau_land.iter_mut().chain(tau_water.iter_mut()) {
                    *v += normal.sample(&mut rng);
                }
            }
            TorquePairSample {
                t: s.t,
                state: s.state,
                tau_land,
                tau_water,
            }
        })
        .collect())
}
