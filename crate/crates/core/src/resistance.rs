//! Oil-viscous and dynamic-seal resistance of a watertight joint.
//!
//! The joint is run in three configurations over a (speed, pressure) grid and
//! the motor current is logged:
//!
//! * `dry`: no compensation oil, no pressure effect (speed only),
//! * `oil_no_seal`: oil-filled housing, output-shaft seal removed,
//! * `oil_seal`: oil-filled housing with the seal installed.
//!
//! Current is proportional to resistance torque, so the viscous resistance is
//! read as `I_oil_no_seal - I_dry` and the seal resistance as
//! `I_oil_seal - I_oil_no_seal`. Both are fitted by low-order polynomial
//! surfaces in speed (r/min) and pressure (MPa).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Dry,
    OilNoSeal,
    OilSeal,
    Viscous,
    Seal,
}

impl GridKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GridKind::Dry => "dry",
            GridKind::OilNoSeal => "oil_no_seal",
            GridKind::OilSeal => "oil_seal",
            GridKind::Viscous => "viscous",
            GridKind::Seal => "seal",
        }
    }

    pub fn is_measured(self) -> bool {
        matches!(
            self,
            GridKind::Dry | GridKind::OilNoSeal | GridKind::OilSeal
        )
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GridKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dry" => Ok(GridKind::Dry),
            "oil_no_seal" => Ok(GridKind::OilNoSeal),
            "oil_seal" => Ok(GridKind::OilSeal),
            "viscous" => Ok(GridKind::Viscous),
            "seal" => Ok(GridKind::Seal),
            other => Err(Error::Domain(format!("unknown configuration '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResistanceSample {
    /// r/min
    pub speed: f64,
    /// MPa
    pub pressure: f64,
    /// A
    pub current: f64,
}

/// Exact lookup key; `-0.0` and `0.0` compare equal.
fn key(speed: f64, pressure: f64) -> (u64, u64) {
    ((speed + 0.0).to_bits(), (pressure + 0.0).to_bits())
}

/// Current samples of one configuration (or one derived resistance).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResistanceGrid {
    pub kind: GridKind,
    /// Sorted by speed, then pressure.
    samples: Vec<ResistanceSample>,
}

impl ResistanceGrid {
    /// Validates and sorts measured or derived samples. Negative currents are
    /// rejected for measured configurations only; differenced grids keep them.
    pub fn new(kind: GridKind, mut samples: Vec<ResistanceSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let mut seen = BTreeSet::new();
        for s in &samples {
            if !(s.speed.is_finite() && s.pressure.is_finite() && s.current.is_finite()) {
                return Err(Error::Domain(format!("non-finite value in {kind} grid")));
            }
            if s.speed < 0.0 || s.pressure < 0.0 {
                return Err(Error::Domain(format!(
                    "negative speed or pressure in {kind} grid: ({}, {})",
                    s.speed, s.pressure
                )));
            }
            if kind.is_measured() && s.current < 0.0 {
                return Err(Error::Domain(format!(
                    "negative current {} A in {kind} grid",
                    s.current
                )));
            }
            if kind == GridKind::Dry && s.pressure != 0.0 {
                return Err(Error::Domain(format!(
                    "dry grid rows must carry pressure 0, got {} MPa",
                    s.pressure
                )));
            }
            if !seen.insert(key(s.speed, s.pressure)) {
                return Err(Error::DuplicateKey {
                    config: kind.to_string(),
                    speed: s.speed,
                    pressure: s.pressure,
                });
            }
        }
        samples.sort_by(|a, b| {
            a.speed
                .total_cmp(&b.speed)
                .then(a.pressure.total_cmp(&b.pressure))
        });
        Ok(Self { kind, samples })
    }

    pub fn samples(&self) -> &[ResistanceSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn get(&self, speed: f64, pressure: f64) -> Option<f64> {
        let k = key(speed, pressure);
        self.samples
            .iter()
            .find(|s| key(s.speed, s.pressure) == k)
            .map(|s| s.current)
    }

    /// Samples with a negative current (measurement noise in a difference).
    pub fn negative_samples(&self) -> Vec<ResistanceSample> {
        self.samples
            .iter()
            .copied()
            .filter(|s| s.current < 0.0)
            .collect()
    }

    pub fn domain(&self) -> DomainBox {
        let mut b = DomainBox {
            speed: (f64::INFINITY, f64::NEG_INFINITY),
            pressure: (f64::INFINITY, f64::NEG_INFINITY),
        };
        for s in &self.samples {
            b.speed = (b.speed.0.min(s.speed), b.speed.1.max(s.speed));
            b.pressure = (b.pressure.0.min(s.pressure), b.pressure.1.max(s.pressure));
        }
        b
    }

    /// Copy with `offset` added to every current.
    pub fn offset(&self, offset: f64) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .map(|s| ResistanceSample {
                current: s.current + offset,
                ..*s
            })
            .collect();
        Self::new(self.kind, samples)
    }
}

/// One CSV row of a resistance table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResistanceRecord {
    pub config: String,
    pub speed_rpm: f64,
    pub pressure_mpa: f64,
    pub current_a: f64,
}

/// The measured configurations present in a table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResistanceSet {
    pub dry: Option<ResistanceGrid>,
    pub oil_no_seal: Option<ResistanceGrid>,
    pub oil_seal: Option<ResistanceGrid>,
}

impl ResistanceSet {
    /// The three grids, or an error naming the first missing configuration.
    pub fn require_all(&self) -> Result<(&ResistanceGrid, &ResistanceGrid, &ResistanceGrid)> {
        let missing = |kind: GridKind| Error::Domain(format!("missing configuration '{kind}'"));
        Ok((
            self.dry.as_ref().ok_or_else(|| missing(GridKind::Dry))?,
            self.oil_no_seal
                .as_ref()
                .ok_or_else(|| missing(GridKind::OilNoSeal))?,
            self.oil_seal
                .as_ref()
                .ok_or_else(|| missing(GridKind::OilSeal))?,
        ))
    }

    pub fn to_records(&self) -> Vec<ResistanceRecord> {
        [&self.dry, &self.oil_no_seal, &self.oil_seal]
            .into_iter()
            .flatten()
            .flat_map(|g| {
                g.samples().iter().map(|s| ResistanceRecord {
                    config: g.kind.to_string(),
                    speed_rpm: s.speed,
                    pressure_mpa: s.pressure,
                    current_a: s.current,
                })
            })
            .collect()
    }
}

/// Splits a resistance table by configuration and validates each grid.
pub fn ingest_grid(records: &[ResistanceRecord]) -> Result<ResistanceSet> {
    if records.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut by_kind: BTreeMap<GridKind, Vec<ResistanceSample>> = BTreeMap::new();
    for r in records {
        let kind: GridKind = r.config.parse()?;
        if !kind.is_measured() {
            return Err(Error::Domain(format!(
                "configuration '{kind}' is derived, not measured"
            )));
        }
        by_kind.entry(kind).or_default().push(ResistanceSample {
            speed: r.speed_rpm,
            pressure: r.pressure_mpa,
            current: r.current_a,
        });
    }
    let mut set = ResistanceSet::default();
    for (kind, samples) in by_kind {
        let grid = Some(ResistanceGrid::new(kind, samples)?);
        match kind {
            GridKind::Dry => set.dry = grid,
            GridKind::OilNoSeal => set.oil_no_seal = grid,
            GridKind::OilSeal => set.oil_seal = grid,
            _ => unreachable!(),
        }
    }
    Ok(set)
}

fn expect_kind(grid: &ResistanceGrid, kind: GridKind) -> Result<()> {
    if grid.kind != kind {
        return Err(Error::Domain(format!(
            "expected a {kind} grid, got {}",
            grid.kind
        )));
    }
    Ok(())
}

/// Viscous resistance current `I_oil_no_seal(n, p) - I_dry(n)`.
pub fn viscous_current(oil: &ResistanceGrid, dry: &ResistanceGrid) -> Result<ResistanceGrid> {
    expect_kind(oil, GridKind::OilNoSeal)?;
    expect_kind(dry, GridKind::Dry)?;
    let samples = oil
        .samples()
        .iter()
        .map(|s| {
            dry.get(s.speed, 0.0)
                .map(|base| ResistanceSample {
                    current: s.current - base,
                    ..*s
                })
                .ok_or(Error::MissingKey {
                    config: GridKind::Dry.to_string(),
                    speed: s.speed,
                    pressure: 0.0,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    ResistanceGrid::new(GridKind::Viscous, samples)
}

/// Seal resistance current `I_oil_seal(n, p) - I_oil_no_seal(n, p)`.
pub fn seal_current(seal: &ResistanceGrid, oil: &ResistanceGrid) -> Result<ResistanceGrid> {
    expect_kind(seal, GridKind::OilSeal)?;
    expect_kind(oil, GridKind::OilNoSeal)?;
    let samples = seal
        .samples()
        .iter()
        .map(|s| {
            oil.get(s.speed, s.pressure)
                .map(|base| ResistanceSample {
                    current: s.current - base,
                    ..*s
                })
                .ok_or(Error::MissingKey {
                    config: GridKind::OilNoSeal.to_string(),
                    speed: s.speed,
                    pressure: s.pressure,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    ResistanceGrid::new(GridKind::Seal, samples)
}

/// Total resistance current (viscous plus seal) at one operating point.
pub fn total_loss_current(
    viscous: &ResistanceGrid,
    seal: &ResistanceGrid,
    speed: f64,
    pressure: f64,
) -> Result<f64> {
    let missing = |g: &ResistanceGrid| Error::MissingKey {
        config: g.kind.to_string(),
        speed,
        pressure,
    };
    let v = viscous
        .get(speed, pressure)
        .ok_or_else(|| missing(viscous))?;
    let s = seal.get(speed, pressure).ok_or_else(|| missing(seal))?;
    Ok(v + s)
}

/// Axis-aligned (speed, pressure) rectangle, bounds inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub speed: (f64, f64),
    pub pressure: (f64, f64),
}

impl DomainBox {
    pub fn new(speed: (f64, f64), pressure: (f64, f64)) -> Self {
        Self { speed, pressure }
    }

    pub fn intersect(&self, other: &DomainBox) -> Option<DomainBox> {
        let speed = (
            self.speed.0.max(other.speed.0),
            self.speed.1.min(other.speed.1),
        );
        let pressure = (
            self.pressure.0.max(other.pressure.0),
            self.pressure.1.min(other.pressure.1),
        );
        (speed.0 <= speed.1 && pressure.0 <= pressure.1).then_some(DomainBox { speed, pressure })
    }

    pub fn contains(&self, speed: f64, pressure: f64) -> bool {
        (self.speed.0..=self.speed.1).contains(&speed)
            && (self.pressure.0..=self.pressure.1).contains(&pressure)
    }

    fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.speed.0 + self.speed.1),
            0.5 * (self.pressure.0 + self.pressure.1),
        )
    }
}

/// `I = c00 + c10 n + c01 p + c11 n p (+ c20 n² + c02 p²)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SurfaceCoefficients {
    pub c00: f64,
    pub c10: f64,
    pub c01: f64,
    pub c11: f64,
    pub c20: f64,
    pub c02: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceModel {
    Bilinear,
    Quadratic,
}

impl SurfaceModel {
    fn parameter_count(self) -> usize {
        match self {
            SurfaceModel::Bilinear => 4,
            SurfaceModel::Quadratic => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResistanceSurface {
    pub kind: GridKind,
    pub model: SurfaceModel,
    pub coefficients: SurfaceCoefficients,
    pub fit_cod: f64,
    /// Absent when there are no residual degrees of freedom.
    pub adjusted_r2: Option<f64>,
    pub sample_count: usize,
    pub domain: DomainBox,
}

impl ResistanceSurface {
    pub fn evaluate(&self, speed: f64, pressure: f64) -> f64 {
        let c = &self.coefficients;
        c.c00
            + c.c10 * speed
            + c.c01 * pressure
            + c.c11 * speed * pressure
            + c.c20 * speed * speed
            + c.c02 * pressure * pressure
    }

    pub fn d_speed(&self, speed: f64, pressure: f64) -> f64 {
        let c = &self.coefficients;
        c.c10 + c.c11 * pressure + 2.0 * c.c20 * speed
    }

    pub fn d_pressure(&self, speed: f64, pressure: f64) -> f64 {
        let c = &self.coefficients;
        c.c01 + c.c11 * speed + 2.0 * c.c02 * pressure
    }
}

fn design_row(model: SurfaceModel, n: f64, p: f64) -> Vec<f64> {
    let mut row = vec![1.0, n, p, n * p];
    if model == SurfaceModel::Quadratic {
        row.extend([n * n, p * p]);
    }
    row
}

/// Least-squares polynomial surface over a grid.
pub fn fit_surface(grid: &ResistanceGrid, include_quadratic: bool) -> Result<ResistanceSurface> {
    let model = if include_quadratic {
        SurfaceModel::Quadratic
    } else {
        SurfaceModel::Bilinear
    };
    let k = model.parameter_count();
    let n = grid.len();
    if n < k {
        return Err(Error::InsufficientData(format!(
            "{model:?} surface needs at least {k} samples, got {n}"
        )));
    }
    let rows: Vec<f64> = grid
        .samples()
        .iter()
        .flat_map(|s| design_row(model, s.speed, s.pressure))
        .collect();
    let x = DMatrix::from_row_slice(n, k, &rows);
    let y = DVector::from_iterator(n, grid.samples().iter().map(|s| s.current));

    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin <= 1e-10 * smax {
        return Err(Error::DegenerateDesign(format!(
            "{model:?} surface is not identifiable from the sampled (speed, pressure) points"
        )));
    }
    let beta = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::Numeric(e.to_string()))?;

    let yhat = &x * &beta;
    let mean = y.mean();
    let ss_res: f64 = (&y - &yhat).iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    // Constant data (up to rounding) is reproduced by the intercept alone.
    let scale: f64 = y.iter().map(|v| v * v).sum();
    let fit_cod = if ss_tot > 1e-24 * scale {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    let adjusted_r2 = (n > k).then(|| 1.0 - (1.0 - fit_cod) * (n - 1) as f64 / (n - k) as f64);

    let mut c = SurfaceCoefficients {
        c00: beta[0],
        c10: beta[1],
        c01: beta[2],
        c11: beta[3],
        ..Default::default()
    };
    if model == SurfaceModel::Quadratic {
        c.c20 = beta[4];
        c.c02 = beta[5];
    }
    Ok(ResistanceSurface {
        kind: grid.kind,
        model,
        coefficients: c,
        fit_cod,
        adjusted_r2,
        sample_count: n,
        domain: grid.domain(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceComparison {
    pub bilinear: ResistanceSurface,
    pub quadratic: Option<ResistanceSurface>,
    /// Model with the higher adjusted R²; bilinear on ties or when the
    /// quadratic fit is unavailable.
    pub preferred: SurfaceModel,
}

impl SurfaceComparison {
    pub fn preferred_surface(&self) -> &ResistanceSurface {
        match (self.preferred, &self.quadratic) {
            (SurfaceModel::Quadratic, Some(q)) => q,
            _ => &self.bilinear,
        }
    }
}

pub fn compare_surfaces(grid: &ResistanceGrid) -> Result<SurfaceComparison> {
    let bilinear = fit_surface(grid, false)?;
    let quadratic = match fit_surface(grid, true) {
        Ok(s) => Some(s),
        Err(Error::InsufficientData(_) | Error::DegenerateDesign(_)) => None,
        Err(e) => return Err(e),
    };
    let preferred = match (&quadratic, bilinear.adjusted_r2) {
        (Some(q), Some(b)) if q.adjusted_r2.is_some_and(|qa| qa > b) => SurfaceModel::Quadratic,
        _ => SurfaceModel::Bilinear,
    };
    Ok(SurfaceComparison {
        bilinear,
        quadratic,
        preferred,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Speed,
    Pressure,
}

/// A neighbouring pair along one axis where the current decreases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axis: Axis,
    pub from: (f64, f64),
    pub to: (f64, f64),
    /// Change in current from `from` to `to` (negative), A.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub increasing_in_speed: bool,
    pub increasing_in_pressure: bool,
    pub violations: Vec<Violation>,
}

fn check_points(points: &[ResistanceSample]) -> Result<MonotonicityReport> {
    let distinct = |f: fn(&ResistanceSample) -> f64| {
        points
            .iter()
            .map(|s| (f(s) + 0.0).to_bits())
            .collect::<BTreeSet<_>>()
            .len()
    };
    if distinct(|s| s.speed) < 2 || distinct(|s| s.pressure) < 2 {
        return Err(Error::InsufficientData(
            "monotonicity needs at least 2 distinct speeds and 2 distinct pressures".into(),
        ));
    }

    let mut violations = Vec::new();
    let mut rises = [false, false];
    for axis in [Axis::Speed, Axis::Pressure] {
        // group by the other coordinate, walk along this one
        let mut lines: BTreeMap<u64, Vec<&ResistanceSample>> = BTreeMap::new();
        for s in points {
            let other = match axis {
                Axis::Speed => s.pressure,
                Axis::Pressure => s.speed,
            };
            lines.entry((other + 0.0).to_bits()).or_default().push(s);
        }
        let along = |s: &ResistanceSample| match axis {
            Axis::Speed => s.speed,
            Axis::Pressure => s.pressure,
        };
        let mut line_keys: Vec<_> = lines.keys().copied().collect();
        line_keys.sort_by(|a, b| f64::from_bits(*a).total_cmp(&f64::from_bits(*b)));
        for lk in line_keys {
            let line = lines.get_mut(&lk).expect("key present");
            line.sort_by(|a, b| along(a).total_cmp(&along(b)));
            for w in line.windows(2) {
                let delta = w[1].current - w[0].current;
                if delta < 0.0 {
                    violations.push(Violation {
                        axis,
                        from: (w[0].speed, w[0].pressure),
                        to: (w[1].speed, w[1].pressure),
                        delta,
                    });
                } else if delta > 0.0 {
                    rises[axis as usize] = true;
                }
            }
        }
    }
    let clean = |axis: Axis| !violations.iter().any(|v| v.axis == axis);
    Ok(MonotonicityReport {
        increasing_in_speed: clean(Axis::Speed) && rises[0],
        increasing_in_pressure: clean(Axis::Pressure) && rises[1],
        violations,
    })
}

/// Pairwise checks between neighbouring grid points along each axis.
pub fn monotonicity_check(grid: &ResistanceGrid) -> Result<MonotonicityReport> {
    check_points(grid.samples())
}

/// Monotonicity of a fitted surface on a `resolution x resolution` lattice
/// over its domain.
pub fn monotonicity_check_surface(
    surface: &ResistanceSurface,
    resolution: usize,
) -> Result<MonotonicityReport> {
    let r = resolution.max(2);
    let d = surface.domain;
    let lerp = |(lo, hi): (f64, f64), i: usize| lo + (hi - lo) * i as f64 / (r - 1) as f64;
    let points: Vec<_> = (0..r)
        .flat_map(|i| {
            (0..r).map(move |j| {
                let (n, p) = (lerp(d.speed, i), lerp(d.pressure, j));
                ResistanceSample {
                    speed: n,
                    pressure: p,
                    current: surface.evaluate(n, p),
                }
            })
        })
        .collect();
    check_points(&points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    Speed,
    Pressure,
    Tie,
}

/// Box-normalized sensitivities of one surface: mean partial derivative over
/// the box times the box width along that axis, A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSensitivity {
    pub speed: f64,
    pub pressure: f64,
    pub dominant: Dominance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub domain: DomainBox,
    pub viscous: SurfaceSensitivity,
    pub seal: SurfaceSensitivity,
    /// Which resistance has the larger share of speed sensitivity.
    pub more_speed_sensitive: Option<GridKind>,
    /// Viscous is speed-dominant and seal is pressure-dominant.
    pub expected_ordering_holds: bool,
}

fn dominance(speed: f64, pressure: f64) -> Dominance {
    let (s, p) = (speed.abs(), pressure.abs());
    if (s - p).abs() <= 1e-9 * s.max(p) {
        Dominance::Tie
    } else if s > p {
        Dominance::Speed
    } else {
        Dominance::Pressure
    }
}

fn sensitivity(surface: &ResistanceSurface, domain: &DomainBox) -> SurfaceSensitivity {
    // partial derivatives are affine, so their box mean is the center value
    let (nc, pc) = domain.center();
    let speed = surface.d_speed(nc, pc) * (domain.speed.1 - domain.speed.0);
    let pressure = surface.d_pressure(nc, pc) * (domain.pressure.1 - domain.pressure.0);
    SurfaceSensitivity {
        speed,
        pressure,
        dominant: dominance(speed, pressure),
    }
}

/// Compares how strongly each resistance responds to speed and to pressure.
/// The box defaults to the overlap of both surface domains and is clipped
/// to it otherwise.
pub fn sensitivity_report(
    viscous: &ResistanceSurface,
    seal: &ResistanceSurface,
    domain: Option<DomainBox>,
) -> Result<SensitivityReport> {
    let overlap = viscous
        .domain
        .intersect(&seal.domain)
        .ok_or_else(|| Error::DisjointDomains("viscous and seal surfaces do not overlap".into()))?;
    let domain = match domain {
        Some(b) => b
            .intersect(&overlap)
            .ok_or_else(|| Error::DisjointDomains("box lies outside both surfaces".into()))?,
        None => overlap,
    };
    let v = sensitivity(viscous, &domain);
    let s = sensitivity(seal, &domain);
    let share = |x: &SurfaceSensitivity| {
        let total = x.speed.abs() + x.pressure.abs();
        (total > 0.0).then(|| x.speed.abs() / total)
    };
    let more_speed_sensitive = match (share(&v), share(&s)) {
        (Some(a), Some(b)) if (a - b).abs() > 1e-9 => Some(if a > b {
            GridKind::Viscous
        } else {
            GridKind::Seal
        }),
        _ => None,
    };
    Ok(SensitivityReport {
        domain,
        viscous: v,
        seal: s,
        more_speed_sensitive,
        expected_ordering_holds: v.dominant == Dominance::Speed
            && s.dominant == Dominance::Pressure,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub loss_current: f64,
    pub rated_current: f64,
    pub loss_fraction: f64,
    pub efficiency: f64,
    /// The loss exceeds the rated current (reported, not rejected).
    pub exceeds_rated: bool,
}

/// Share of the rated motor current consumed by joint resistance.
pub fn efficiency_report(total_loss_current: f64, rated_current: f64) -> Result<EfficiencyReport> {
    if !(rated_current.is_finite() && rated_current > 0.0) {
        return Err(Error::Domain(format!(
            "rated current must be positive, got {rated_current}"
        )));
    }
    if !(total_loss_current.is_finite() && total_loss_current >= 0.0) {
        return Err(Error::Domain(format!(
            "loss current must be non-negative, got {total_loss_current}"
        )));
    }
    let loss_fraction = total_loss_current / rated_current;
    Ok(EfficiencyReport {
        loss_current: total_loss_current,
        rated_current,
        loss_fraction,
        efficiency: 1.0 - loss_fraction,
        exceeds_rated: total_loss_current > rated_current,
    })
}

/// Current laws used to synthesize three-configuration grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticLaws {
    /// Dry current `a + b n`.
    pub dry: (f64, f64),
    pub viscous: SurfaceCoefficients,
    pub seal: SurfaceCoefficients,
}

impl SyntheticLaws {
    /// Viscous current rises mostly with speed, seal current mostly with
    /// pressure; together they draw 2.85 A at 10 r/min and 10 MPa.
    pub fn expected_laws() -> Self {
        Self {
            dry: (1.0, 0.05),
            viscous: SurfaceCoefficients {
                c10: 0.13,
                c01: 0.005,
                c11: 0.0012,
                ..Default::default()
            },
            seal: SurfaceCoefficients {
                c10: 0.025,
                c01: 0.1,
                c11: 0.0013,
                ..Default::default()
            },
        }
    }

    /// Counterexample: viscous current falls with speed and is
    /// pressure-dominant, seal current falls with pressure and is
    /// speed-dominant.
    pub fn inverted_laws() -> Self {
        Self {
            dry: (1.0, 0.05),
            viscous: SurfaceCoefficients {
                c00: 1.5,
                c10: -0.02,
                c01: 0.13,
                ..Default::default()
            },
            seal: SurfaceCoefficients {
                c00: 1.5,
                c10: 0.1,
                c01: -0.02,
                ..Default::default()
            },
        }
    }

    pub fn synthesize(&self, speeds: &[f64], pressures: &[f64]) -> Result<ResistanceSet> {
        let eval = |c: &SurfaceCoefficients, n: f64, p: f64| {
            c.c00 + c.c10 * n + c.c01 * p + c.c11 * n * p + c.c20 * n * n + c.c02 * p * p
        };
        let dry_at = |n: f64| self.dry.0 + self.dry.1 * n;
        let dry = speeds
            .iter()
            .map(|&n| ResistanceSample {
                speed: n,
                pressure: 0.0,
                current: dry_at(n),
            })
            .collect();
        let mut oil = Vec::new();
        let mut seal = Vec::new();
        for &n in speeds {
            for &p in pressures {
                let i_oil = dry_at(n) + eval(&self.viscous, n, p);
                oil.push(ResistanceSample {
                    speed: n,
                    pressure: p,
                    current: i_oil,
                });
                seal.push(ResistanceSample {
                    speed: n,
                    pressure: p,
                    current: i_oil + eval(&self.seal, n, p),
                });
            }
        }
        Ok(ResistanceSet {
            dry: Some(ResistanceGrid::new(GridKind::Dry, dry)?),
            oil_no_seal: Some(ResistanceGrid::new(GridKind::OilNoSeal, oil)?),
            oil_seal: Some(ResistanceGrid::new(GridKind::OilSeal, seal)?),
        })
    }
}

/// Default operating grid: 2–10 r/min, 0–10 MPa.
pub fn default_speeds() -> Vec<f64> {
    vec![2.0, 4.0, 6.0, 8.0, 10.0]
}

pub fn default_pressures() -> Vec<f64> {
    vec![0.0, 2.5, 5.0, 7.5, 10.0]
}
