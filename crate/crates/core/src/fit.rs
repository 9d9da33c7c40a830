//! Identification of the drag and added-mass coefficients.
//!
//! A land run and an underwater run track the same trajectory. Their torque
//! difference is the hydrodynamic torque `tau_w`, and per joint
//!
//! ```text
//! tau_f - tau_w = alpha * Cd + beta * Cm
//! ```
//!
//! is linear in the unknowns, so ordinary least squares gives the exact
//! minimizer. Only joint 1 is used by default: its axis is vertical, so the
//! gravity and buoyancy models cannot bias its rows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hydro::{buoyancy_torque_joint, joint_gains};
use crate::leg::{EnvParams, Joint, LegGeometry, LegState};
use crate::quadrature::GaussLegendre;

/// One time sample of the paired land / underwater torque logs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorquePairSample {
    pub t: f64,
    pub state: LegState,
    pub tau_land: [f64; 3],
    pub tau_water: [f64; 3],
}

impl TorquePairSample {
    pub fn hydro_torque(&self) -> [f64; 3] {
        std::array::from_fn(|i| self.tau_land[i] - self.tau_water[i])
    }
}

/// Hydrodynamic torque as land minus water torque. At a static pose this is
/// the buoyancy torque: the motor holds less load under water.
pub fn hydro_torque_from_measurements(tau_land: &[f64], tau_water: &[f64]) -> Result<Vec<f64>> {
    if tau_land.len() != tau_water.len() {
        return Err(Error::LengthMismatch {
            expected: tau_land.len(),
            actual: tau_water.len(),
        });
    }
    Ok(tau_land.iter().zip(tau_water).map(|(l, w)| l - w).collect())
}

/// Regression row `y = a * Cd + b * Cm` for one joint of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionRow {
    pub t: f64,
    pub joint: Joint,
    /// `tau_f - tau_w`, N·m.
    pub y: f64,
    /// Drag gain `alpha`, N·m.
    pub a: f64,
    /// Added-mass gain `beta`, N·m.
    pub b: f64,
}

fn normal_equations(rows: &[RegressionRow]) -> (f64, f64, f64, f64, f64) {
    rows.iter()
        .fold((0.0, 0.0, 0.0, 0.0, 0.0), |(aa, ab, bb, ay, by), r| {
            (
                aa + r.a * r.a,
                ab + r.a * r.b,
                bb + r.b * r.b,
                ay + r.a * r.y,
                by + r.b * r.y,
            )
        })
}

fn check_design(aa: f64, ab: f64, bb: f64) -> Result<f64> {
    let det = aa * bb - ab * ab;
    if aa == 0.0 || bb == 0.0 || !(det > 1e-12 * aa * bb) {
        return Err(Error::DegenerateDesign(
            "drag and added-mass gains are collinear or vanish; the trajectory must \
             excite both joint velocity and acceleration"
                .into(),
        ));
    }
    Ok(det)
}

/// Builds the regression rows for the selected joints, sample-major.
pub fn assemble_regression(
    samples: &[TorquePairSample],
    geom: &LegGeometry,
    env: &EnvParams,
    quad: &GaussLegendre,
    joints: &[Joint],
) -> Result<Vec<RegressionRow>> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    if joints.is_empty() {
        return Err(Error::Domain("no joints selected".into()));
    }
    if let Some(w) = samples.windows(2).find(|w| !(w[1].t > w[0].t)) {
        return Err(Error::Domain(format!(
            "sample times must increase strictly ({} then {})",
            w[0].t, w[1].t
        )));
    }
    if let Some(s) = samples.iter().find(|s| {
        !s.state.is_finite()
            || s.tau_land
                .iter()
                .chain(&s.tau_water)
                .any(|v| !v.is_finite())
    }) {
        return Err(Error::Domain(format!("non-finite sample at t = {}", s.t)));
    }

    let rows: Vec<RegressionRow> = samples
        .par_iter()
        .flat_map_iter(|s| {
            let tau_w = s.hydro_torque();
            joints.iter().map(move |&j| {
                let gains = joint_gains(j, &s.state, geom, env, quad);
                let tau_f = buoyancy_torque_joint(j, &s.state, geom, env);
                RegressionRow {
                    t: s.t,
                    joint: j,
                    y: tau_f - tau_w[j.index()],
                    a: gains.alpha,
                    b: gains.beta,
                }
            })
        })
        .collect();

    let (aa, ab, bb, _, _) = normal_equations(&rows);
    check_design(aa, ab, bb)?;
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub cd_hat: f64,
    pub cm_hat: f64,
    /// Absent with fewer than three rows.
    pub cd_stderr: Option<f64>,
    pub cm_stderr: Option<f64>,
    pub cod: f64,
    pub residual_rms: f64,
    pub sample_count: usize,
}

/// Least-squares estimate of `(Cd, Cm)` with standard errors from the
/// unbiased residual variance.
pub fn fit_hydro_params(rows: &[RegressionRow]) -> Result<FitResult> {
    if rows.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 rows, got {}",
            rows.len()
        )));
    }
    let (aa, ab, bb, ay, by) = normal_equations(rows);
    let det = check_design(aa, ab, bb)?;
    let cd = (bb * ay - ab * by) / det;
    let cm = (aa * by - ab * ay) / det;

    let y: Vec<f64> = rows.iter().map(|r| r.y).collect();
    let yhat: Vec<f64> = rows.iter().map(|r| r.a * cd + r.b * cm).collect();
    let ss_res: f64 = y.iter().zip(&yhat).map(|(a, b)| (a - b).powi(2)).sum();
    let n = rows.len();
    let cod = coefficient_of_determination(&y, &yhat)?;

    let (cd_stderr, cm_stderr) = if n > 2 {
        let sigma2 = ss_res / (n - 2) as f64;
        // (X^T X)^-1 diagonal
        (
            Some((sigma2 * bb / det).sqrt()),
            Some((sigma2 * aa / det).sqrt()),
        )
    } else {
        (None, None)
    };

    Ok(FitResult {
        cd_hat: cd,
        cm_hat: cm,
        cd_stderr,
        cm_stderr,
        cod,
        residual_rms: (ss_res / n as f64).sqrt(),
        sample_count: n,
    })
}

/// `1 - SS_res / SS_tot`.
pub fn coefficient_of_determination(y: &[f64], yhat: &[f64]) -> Result<f64> {
    if y.len() != yhat.len() {
        return Err(Error::LengthMismatch {
            expected: y.len(),
            actual: yhat.len(),
        });
    }
    if y.len() < 2 {
        return Err(Error::InsufficientData("need at least 2 values".into()));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::Numeric(
            "coefficient of determination is undefined for constant data".into(),
        ));
    }
    let ss_res: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// First and second derivative at `t` of the parabola through three points.
fn parabola_derivatives(ts: [f64; 3], fs: [f64; 3], t: f64) -> (f64, f64) {
    let d01 = (fs[1] - fs[0]) / (ts[1] - ts[0]);
    let d12 = (fs[2] - fs[1]) / (ts[2] - ts[1]);
    let d012 = (d12 - d01) / (ts[2] - ts[0]);
    (d01 + d012 * ((t - ts[0]) + (t - ts[1])), 2.0 * d012)
}

/// Rates and accelerations for a log that only records angles, by
/// second-order finite differences on the log's own (possibly uneven) time
/// base. Interior samples use the centered stencil, the two ends the
/// nearest one-sided stencil.
pub fn derive_states(times: &[f64], angles: &[[f64; 3]]) -> Result<Vec<LegState>> {
    if times.len() != angles.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            actual: angles.len(),
        });
    }
    let n = times.len();
    if n < 3 {
        return Err(Error::InsufficientData(
            "need at least 3 samples to differentiate angles".into(),
        ));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("sample times must increase strictly".into()));
    }
    Ok((0..n)
        .map(|i| {
            let c = i.clamp(1, n - 2);
            let ts = [times[c - 1], times[c], times[c + 1]];
            let mut dq = [0.0; 3];
            let mut ddq = [0.0; 3];
            for j in 0..3 {
                let fs = [angles[c - 1][j], angles[c][j], angles[c + 1][j]];
                (dq[j], ddq[j]) = parabola_derivatives(ts, fs, times[i]);
            }
            LegState::new(angles[i], dq, ddq)
        })
        .collect())
}
