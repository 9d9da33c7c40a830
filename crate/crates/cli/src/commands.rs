//! Command implementations. Each takes parsed inputs and returns the files
//! it would write, so nothing touches the disk until every step succeeded.

use std::collections::BTreeMap;

use anyhow::{bail, ensure, Context, Result};
use serde::Serialize;

use hydroleg::fit::{assemble_regression, fit_hydro_params};
use hydroleg::hydro::breakdown_batch;
use hydroleg::io::{self, BreakdownRow};
use hydroleg::resistance::{
    compare_surfaces, efficiency_report, ingest_grid, monotonicity_check, seal_current,
    sensitivity_report, total_loss_current, viscous_current, Dominance, EfficiencyReport, GridKind,
    ResistanceGrid, ResistanceRecord, ResistanceSurface, SurfaceCoefficients, SurfaceModel,
    SyntheticLaws,
};
use hydroleg::sim::{gen_trajectory, synthesize_measurements, GaitSpec, LandBaseline, NoiseSpec};
use hydroleg::{GaussLegendre, HydroCoeffs, Joint, ModelConfig};

use crate::output::Outputs;
use crate::svg::{line_chart, Series};

/// Model, quadrature rule and seed shared by all commands.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub quad: GaussLegendre,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(model: ModelConfig, node_count: usize, seed: u64) -> Result<Self> {
        ensure!(
            node_count >= 2,
            "--nodes must be at least 2, got {node_count}"
        );
        Ok(Self {
            model,
            quad: GaussLegendre::new(node_count)?,
            seed,
        })
    }
}

fn to_toml<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).context("serializing report")
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> hydroleg::Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

/// Per-sample torque breakdown of a trajectory.
pub fn cmd_torques(
    trajectory_csv: &str,
    cfg: &RunConfig,
    coeffs: HydroCoeffs,
    joints: &[Joint],
) -> Result<Outputs> {
    let traj = io::read_trajectory(trajectory_csv.as_bytes(), cfg.model.angles)
        .context("reading trajectory")?;
    let states: Vec<_> = traj.iter().map(|s| s.state).collect();
    let times: Vec<_> = traj.iter().map(|s| s.t).collect();
    let b = breakdown_batch(
        &states,
        &cfg.model.geometry,
        &cfg.model.environment,
        &coeffs,
        &cfg.quad,
    );
    let rows = io::breakdown_rows(&times, &b, joints);
    let mut out = Outputs::new();
    out.add(
        "breakdown.csv",
        csv_bytes(|w| io::write_breakdown(w, &rows))?,
    );
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentStats {
    pub rms: f64,
    pub peak: f64,
}

fn stats(values: &[f64]) -> ComponentStats {
    let n = values.len().max(1) as f64;
    ComponentStats {
        rms: (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt(),
        peak: values.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDecomposition {
    pub joint: u8,
    pub samples: usize,
    /// False when every component is zero and shares have no meaning.
    pub shares_defined: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub largest_component: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buoyancy_share_percent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drag_share_percent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub added_mass_share_percent: Option<f64>,
    pub tau_w: ComponentStats,
    pub tau_f: ComponentStats,
    pub tau_d: ComponentStats,
    pub tau_m: ComponentStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub joints: Vec<JointDecomposition>,
}

pub fn decompose(rows: &[BreakdownRow]) -> Result<DecompositionReport> {
    ensure!(!rows.is_empty(), "breakdown has no rows");
    let mut by_joint: BTreeMap<Joint, Vec<&BreakdownRow>> = BTreeMap::new();
    for r in rows {
        by_joint.entry(r.joint).or_default().push(r);
    }
    let joints = by_joint
        .into_iter()
        .map(|(joint, rs)| {
            let col = |f: fn(&BreakdownRow) -> f64| rs.iter().map(|r| f(r)).collect::<Vec<_>>();
            let tau_w = stats(&col(|r| r.torque.tau_w));
            let tau_f = stats(&col(|r| r.torque.tau_f));
            let tau_d = stats(&col(|r| r.torque.tau_d));
            let tau_m = stats(&col(|r| r.torque.tau_m));
            let total = tau_f.rms + tau_d.rms + tau_m.rms;
            let defined = total > 0.0;
            let share = |c: ComponentStats| defined.then(|| 100.0 * c.rms / total);
            let largest = defined.then(|| {
                let named = [
                    ("buoyancy", tau_f.rms),
                    ("drag", tau_d.rms),
                    ("added_mass", tau_m.rms),
                ];
                named
                    .iter()
                    .fold(named[0], |best, c| if c.1 > best.1 { *c } else { best })
                    .0
                    .to_string()
            });
            JointDecomposition {
                joint: joint.number(),
                samples: rs.len(),
                shares_defined: defined,
                largest_component: largest,
                buoyancy_share_percent: share(tau_f),
                drag_share_percent: share(tau_d),
                added_mass_share_percent: share(tau_m),
                tau_w,
                tau_f,
                tau_d,
                tau_m,
            }
        })
        .collect();
    Ok(DecompositionReport { joints })
}

/// Component statistics and one chart per joint.
pub fn cmd_decompose(breakdown_csv: &str) -> Result<Outputs> {
    let rows = io::read_breakdown(breakdown_csv.as_bytes()).context("reading breakdown")?;
    let report = decompose(&rows)?;
    let mut out = Outputs::new();
    out.add("decomposition.toml", to_toml(&report)?);
    for j in &report.joints {
        let rs: Vec<_> = rows
            .iter()
            .filter(|r| r.joint.number() == j.joint)
            .collect();
        let series = |label: &str, f: fn(&BreakdownRow) -> f64| {
            Series::new(label, rs.iter().map(|r| (r.t, f(r))).collect())
        };
        let chart = line_chart(
            &format!("Joint {} hydrodynamic torque", j.joint),
            "t (s)",
            "torque (N·m)",
            &[
                series("tau_w", |r| r.torque.tau_w),
                series("tau_f", |r| r.torque.tau_f),
                series("tau_d", |r| r.torque.tau_d),
                series("tau_m", |r| r.torque.tau_m),
            ],
        );
        out.add(format!("joint{}.svg", j.joint), chart);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub joints: Vec<u8>,
    pub samples: usize,
    pub rows: usize,
    pub cd: f64,
    pub cm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cd_stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cm_stderr: Option<f64>,
    pub cod: f64,
    pub residual_rms: f64,
}

/// Least-squares coefficients from a paired land / underwater log.
pub fn cmd_fit(
    pairs_csv: &str,
    trajectory_csv: Option<&str>,
    cfg: &RunConfig,
    joints: &[Joint],
) -> Result<Outputs> {
    let rows =
        io::read_pairs(pairs_csv.as_bytes(), cfg.model.angles).context("reading torque log")?;
    let traj = trajectory_csv
        .map(|t| io::read_trajectory(t.as_bytes(), cfg.model.angles))
        .transpose()
        .context("reading trajectory")?;
    let samples = io::attach_states(&rows, traj.as_deref())?;
    let reg = assemble_regression(
        &samples,
        &cfg.model.geometry,
        &cfg.model.environment,
        &cfg.quad,
        joints,
    )?;
    let fit = fit_hydro_params(&reg)?;
    let report = FitReport {
        joints: joints.iter().map(|j| j.number()).collect(),
        samples: samples.len(),
        rows: reg.len(),
        cd: fit.cd_hat,
        cm: fit.cm_hat,
        cd_stderr: fit.cd_stderr,
        cm_stderr: fit.cm_stderr,
        cod: fit.cod,
        residual_rms: fit.residual_rms,
    };
    let mut out = Outputs::new();
    out.add("fit.toml", to_toml(&report)?);
    Ok(out)
}

/// Trajectory and paired torque logs for a gait and known coefficients.
pub fn cmd_simulate(
    gait: &GaitSpec,
    cfg: &RunConfig,
    truth: HydroCoeffs,
    torque_sigma: f64,
    baseline: LandBaseline,
) -> Result<Outputs> {
    let traj = gen_trajectory(gait, &cfg.model.geometry)?;
    let noise = NoiseSpec {
        torque_sigma,
        seed: cfg.seed,
    };
    let pairs = synthesize_measurements(
        &traj,
        &cfg.model.geometry,
        &cfg.model.environment,
        &truth,
        &noise,
        baseline,
        &cfg.quad,
    )?;
    let mut out = Outputs::new();
    out.add("gait.toml", gait.to_toml_string());
    out.add(
        "trajectory.csv",
        csv_bytes(|w| io::write_trajectory(w, &traj))?,
    );
    out.add("pairs.csv", csv_bytes(|w| io::write_pairs(w, &pairs))?);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceReport {
    pub model: SurfaceModel,
    pub coefficients: SurfaceCoefficients,
    pub fit_cod: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adjusted_r2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bilinear_adjusted_r2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadratic_adjusted_r2: Option<f64>,
}

impl SurfaceReport {
    fn new(chosen: &ResistanceSurface, bilinear: Option<f64>, quadratic: Option<f64>) -> Self {
        Self {
            model: chosen.model,
            coefficients: chosen.coefficients,
            fit_cod: chosen.fit_cod,
            adjusted_r2: chosen.adjusted_r2,
            bilinear_adjusted_r2: bilinear,
            quadratic_adjusted_r2: quadratic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResistanceSummary {
    pub samples: usize,
    pub negative_samples: usize,
    pub increasing_in_speed: bool,
    pub increasing_in_pressure: bool,
    pub monotonicity_violations: usize,
    pub speed_sensitivity: f64,
    pub pressure_sensitivity: f64,
    pub dominant: Dominance,
    pub surface: SurfaceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    /// Both resistances grow with speed and with pressure.
    pub both_increase: bool,
    /// Viscous resistance is speed-dominant and seal resistance is
    /// pressure-dominant.
    pub expected_ordering: bool,
    pub laws_hold: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub more_speed_sensitive: Option<GridKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyBlock {
    pub speed_rpm: f64,
    pub pressure_mpa: f64,
    pub loss_current_a: f64,
    pub rated_current_a: f64,
    pub loss_percent: f64,
    pub efficiency_percent: f64,
    pub exceeds_rated: bool,
}

impl EfficiencyBlock {
    fn new(speed: f64, pressure: f64, r: &EfficiencyReport) -> Self {
        Self {
            speed_rpm: speed,
            pressure_mpa: pressure,
            loss_current_a: r.loss_current,
            rated_current_a: r.rated_current,
            loss_percent: 100.0 * r.loss_fraction,
            efficiency_percent: 100.0 * r.efficiency,
            exceeds_rated: r.exceeds_rated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResistanceReport {
    pub verdict: Verdict,
    pub viscous: ResistanceSummary,
    pub seal: ResistanceSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub efficiency: Option<EfficiencyBlock>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ResistanceOptions {
    pub quadratic: bool,
    pub rated_current: Option<f64>,
    /// Operating point of the efficiency block; defaults to the largest
    /// speed and pressure of the grid.
    pub operating_point: Option<(f64, f64)>,
}

fn grid_records(grid: &ResistanceGrid) -> Vec<ResistanceRecord> {
    grid.samples()
        .iter()
        .map(|s| ResistanceRecord {
            config: grid.kind.to_string(),
            speed_rpm: s.speed,
            pressure_mpa: s.pressure,
            current_a: s.current,
        })
        .collect()
}

fn grid_chart(grid: &ResistanceGrid) -> String {
    let mut lines: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    for s in grid.samples() {
        lines
            .entry(s.pressure.to_bits())
            .or_default()
            .push((s.speed, s.current));
    }
    let mut keys: Vec<_> = lines.keys().copied().collect();
    keys.sort_by(|a, b| f64::from_bits(*a).total_cmp(&f64::from_bits(*b)));
    let series: Vec<_> = keys
        .into_iter()
        .map(|k| Series::new(format!("{} MPa", f64::from_bits(k)), lines[&k].clone()))
        .collect();
    line_chart(
        &format!("{} resistance current", grid.kind),
        "speed (r/min)",
        "current (A)",
        &series,
    )
}

pub fn analyse_resistance(
    records: &[ResistanceRecord],
    opts: &ResistanceOptions,
) -> Result<(ResistanceReport, ResistanceGrid, ResistanceGrid)> {
    let set = ingest_grid(records)?;
    let (dry, oil, seal) = set.require_all()?;
    let viscous = viscous_current(oil, dry)?;
    let seal = seal_current(seal, oil)?;

    let pick = |g: &ResistanceGrid| -> Result<(ResistanceSurface, SurfaceReport)> {
        let cmp = compare_surfaces(g)?;
        let chosen = if opts.quadratic {
            *cmp.quadratic
                .as_ref()
                .context("quadratic surface needs at least 6 well-spread samples")?
        } else {
            cmp.bilinear
        };
        let report = SurfaceReport::new(
            &chosen,
            cmp.bilinear.adjusted_r2,
            cmp.quadratic.and_then(|q| q.adjusted_r2),
        );
        Ok((chosen, report))
    };
    let (vs, vr) = pick(&viscous)?;
    let (ss, sr) = pick(&seal)?;
    let sens = sensitivity_report(&vs, &ss, None)?;
    let (vm, sm) = (monotonicity_check(&viscous)?, monotonicity_check(&seal)?);

    let summary = |g: &ResistanceGrid,
                   m: &hydroleg::resistance::MonotonicityReport,
                   s: &hydroleg::resistance::SurfaceSensitivity,
                   r: SurfaceReport| ResistanceSummary {
        samples: g.len(),
        negative_samples: g.negative_samples().len(),
        increasing_in_speed: m.increasing_in_speed,
        increasing_in_pressure: m.increasing_in_pressure,
        monotonicity_violations: m.violations.len(),
        speed_sensitivity: s.speed,
        pressure_sensitivity: s.pressure,
        dominant: s.dominant,
        surface: r,
    };
    let both_increase = vm.increasing_in_speed
        && vm.increasing_in_pressure
        && sm.increasing_in_speed
        && sm.increasing_in_pressure;

    let efficiency = match opts.rated_current {
        None => None,
        Some(rated) => {
            let (n, p) = opts.operating_point.unwrap_or_else(|| {
                let d = seal.domain();
                (d.speed.1, d.pressure.1)
            });
            let loss = total_loss_current(&viscous, &seal, n, p)?;
            if loss < 0.0 {
                bail!("total resistance current at ({n} r/min, {p} MPa) is negative: {loss} A");
            }
            Some(EfficiencyBlock::new(n, p, &efficiency_report(loss, rated)?))
        }
    };

    let report = ResistanceReport {
        verdict: Verdict {
            both_increase,
            expected_ordering: sens.expected_ordering_holds,
            laws_hold: both_increase && sens.expected_ordering_holds,
            more_speed_sensitive: sens.more_speed_sensitive,
        },
        viscous: summary(&viscous, &vm, &sens.viscous, vr),
        seal: summary(&seal, &sm, &sens.seal, sr),
        efficiency,
    };
    Ok((report, viscous, seal))
}

/// Derived grids, fitted surfaces and the qualitative verdict.
pub fn cmd_resistance(grids_csv: &str, opts: &ResistanceOptions) -> Result<Outputs> {
    let records = io::read_resistance(grids_csv.as_bytes()).context("reading resistance grids")?;
    let (report, viscous, seal) = analyse_resistance(&records, opts)?;
    let mut out = Outputs::new();
    out.add(
        "viscous.csv",
        csv_bytes(|w| io::write_resistance(w, &grid_records(&viscous)))?,
    );
    out.add(
        "seal.csv",
        csv_bytes(|w| io::write_resistance(w, &grid_records(&seal)))?,
    );
    out.add("resistance.toml", to_toml(&report)?);
    out.add("viscous.svg", grid_chart(&viscous));
    out.add("seal.svg", grid_chart(&seal));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyOutput {
    pub loss_current_a: f64,
    pub rated_current_a: f64,
    pub loss_fraction: f64,
    pub efficiency: f64,
    pub loss_percent: f64,
    pub efficiency_percent: f64,
    pub exceeds_rated: bool,
}

pub fn cmd_efficiency(loss_current: f64, rated_current: f64) -> Result<Outputs> {
    let r = efficiency_report(loss_current, rated_current)?;
    let report = EfficiencyOutput {
        loss_current_a: r.loss_current,
        rated_current_a: r.rated_current,
        loss_fraction: r.loss_fraction,
        efficiency: r.efficiency,
        loss_percent: 100.0 * r.loss_fraction,
        efficiency_percent: 100.0 * r.efficiency,
        exceeds_rated: r.exceeds_rated,
    };
    let mut out = Outputs::new();
    out.add("efficiency.toml", to_toml(&report)?);
    Ok(out)
}

/// Three-configuration grid built from the expected or the inverted laws.
pub fn cmd_synth_grids(inverted: bool, speeds: &[f64], pressures: &[f64]) -> Result<Outputs> {
    let laws = if inverted {
        SyntheticLaws::inverted_laws()
    } else {
        SyntheticLaws::expected_laws()
    };
    let set = laws.synthesize(speeds, pressures)?;
    let mut out = Outputs::new();
    out.add(
        "grids.csv",
        csv_bytes(|w| io::write_resistance(w, &set.to_records()))?,
    );
    Ok(out)
}
