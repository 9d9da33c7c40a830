//! CSV interchange formats.
//!
//! All files carry a header row. Column order is free on input and fixed on
//! output. Floats are written in the shortest form that parses back to the
//! same value, so files are deterministic and round-trip exactly.
//!
//! | file        | columns |
//! |-------------|---------|
//! | trajectory  | `t,q1,q2,q3,dq1,dq2,dq3,ddq1,ddq2,ddq3` (rates optional) |
//! | paired      | `t,tau1_land,tau2_land,tau3_land,tau1_water,tau2_water,tau3_water` (trajectory columns optional) |
//! | breakdown   | `t,joint,tau_w,tau_f,tau_d,tau_m,alpha_gain,beta_gain` |
//! | resistance  | `config,speed_rpm,pressure_mpa,current_a` |

use std::collections::HashMap;
use std::io::{Read, Write};

use csv::{ReaderBuilder, StringRecord, Trim};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{derive_states, TorquePairSample};
use crate::hydro::{JointTorque, TorqueBreakdown};
use crate::leg::{AngleUnit, Joint, LegState};
use crate::resistance::ResistanceRecord;
use crate::sim::TrajectorySample;

pub const TRAJECTORY_HEADER: [&str; 10] = [
    "t", "q1", "q2", "q3", "dq1", "dq2", "dq3", "ddq1", "ddq2", "ddq3",
];
pub const TORQUE_HEADER: [&str; 6] = [
    "tau1_land",
    "tau2_land",
    "tau3_land",
    "tau1_water",
    "tau2_water",
    "tau3_water",
];
pub const BREAKDOWN_HEADER: [&str; 8] = [
    "t",
    "joint",
    "tau_w",
    "tau_f",
    "tau_d",
    "tau_m",
    "alpha_gain",
    "beta_gain",
];
pub const RESISTANCE_HEADER: [&str; 4] = ["config", "speed_rpm", "pressure_mpa", "current_a"];

fn parse_error(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// A parsed CSV file with header lookup and line-aware field access.
struct Table {
    columns: HashMap<String, usize>,
    rows: Vec<(u64, StringRecord)>,
}

impl Table {
    fn read<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = ReaderBuilder::new().trim(Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| csv_error(&e))?.clone();
        if headers.is_empty() || headers.iter().all(str::is_empty) {
            return Err(parse_error(1, "missing header row"));
        }
        let mut columns = HashMap::new();
        for (i, h) in headers.iter().enumerate() {
            if columns.insert(h.to_string(), i).is_some() {
                return Err(parse_error(1, format!("duplicate column '{h}'")));
            }
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| csv_error(&e))?;
            let line = rec.position().map_or(0, |p| p.line());
            rows.push((line, rec));
        }
        Ok(Self { columns, rows })
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.columns.get(name).copied()
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.column(name)
            .ok_or_else(|| parse_error(1, format!("missing column '{name}'")))
    }

    fn require_all<const N: usize>(&self, names: [&str; N]) -> Result<[usize; N]> {
        let mut out = [0; N];
        for (o, n) in out.iter_mut().zip(names) {
            *o = self.require(n)?;
        }
        Ok(out)
    }

    /// Indices of all `names`, none of them, or an error for a partial set.
    fn optional_group<const N: usize>(&self, names: [&str; N]) -> Result<Option<[usize; N]>> {
        let found: Vec<_> = names.iter().map(|n| self.column(n)).collect();
        if found.iter().all(Option::is_none) {
            return Ok(None);
        }
        if let Some(i) = found.iter().position(Option::is_none) {
            return Err(parse_error(1, format!("missing column '{}'", names[i])));
        }
        Ok(Some(std::array::from_fn(|i| found[i].expect("checked"))))
    }
}

fn csv_error(e: &csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    parse_error(line, e.to_string())
}

fn field<'a>(line: u64, rec: &'a StringRecord, idx: usize, name: &str) -> Result<&'a str> {
    rec.get(idx)
        .ok_or_else(|| parse_error(line, format!("missing field '{name}'")))
}

fn float(line: u64, rec: &StringRecord, idx: usize, name: &str) -> Result<f64> {
    let text = field(line, rec, idx, name)?;
    let v: f64 = text
        .parse()
        .map_err(|_| parse_error(line, format!("'{name}' is not a number: '{text}'")))?;
    if !v.is_finite() {
        return Err(parse_error(
            line,
            format!("'{name}' is not finite: '{text}'"),
        ));
    }
    Ok(v)
}

fn floats<const N: usize>(
    line: u64,
    rec: &StringRecord,
    idx: [usize; N],
    names: [&str; N],
) -> Result<[f64; N]> {
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = float(line, rec, idx[i], names[i])?;
    }
    Ok(out)
}

fn check_times(times: impl Iterator<Item = (u64, f64)>) -> Result<()> {
    let mut prev: Option<f64> = None;
    for (line, t) in times {
        if prev.is_some_and(|p| t <= p) {
            return Err(parse_error(
                line,
                format!("time {t} is not after the previous sample"),
            ));
        }
        prev = Some(t);
    }
    Ok(())
}

fn fmt(v: f64) -> String {
    // no "-0" in output files
    format!("{}", v + 0.0)
}

fn write_rows<W: Write>(
    writer: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn scale_state(state: &mut LegState, factor: f64) {
    for v in state
        .q
        .iter_mut()
        .chain(&mut state.dq)
        .chain(&mut state.ddq)
    {
        *v *= factor;
    }
}

/// States read from trajectory columns. Rates and accelerations are derived
/// by finite differences when the file has angles only.
fn read_states(table: &Table, angles: AngleUnit) -> Result<Option<Vec<TrajectorySample>>> {
    let names3 = |a: &'static str, b: &'static str, c: &'static str| [a, b, c];
    let q_names = names3("q1", "q2", "q3");
    let Some(q_idx) = table.optional_group(q_names)? else {
        return Ok(None);
    };
    let t_idx = table.require("t")?;
    let dq_names = names3("dq1", "dq2", "dq3");
    let ddq_names = names3("ddq1", "ddq2", "ddq3");
    let dq_idx = table.optional_group(dq_names)?;
    let ddq_idx = table.optional_group(ddq_names)?;
    let factor = angles.to_radians_factor();

    let mut out = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let t = float(*line, rec, t_idx, "t")?;
        let q = floats(*line, rec, q_idx, q_names)?;
        let dq = dq_idx
            .map(|i| floats(*line, rec, i, dq_names))
            .transpose()?;
        let ddq = ddq_idx
            .map(|i| floats(*line, rec, i, ddq_names))
            .transpose()?;
        out.push((t, q, dq, ddq));
    }
    check_times(
        table
            .rows
            .iter()
            .map(|(l, _)| *l)
            .zip(out.iter().map(|r| r.0)),
    )?;

    let samples: Vec<TrajectorySample> = match (dq_idx, ddq_idx) {
        (Some(_), Some(_)) => out
            .into_iter()
            .map(|(t, q, dq, ddq)| TrajectorySample {
                t,
                state: LegState::new(q, dq.expect("present"), ddq.expect("present")),
            })
            .collect(),
        (None, None) => {
            let times: Vec<f64> = out.iter().map(|r| r.0).collect();
            let q: Vec<[f64; 3]> = out.iter().map(|r| r.1).collect();
            let states = if times.len() == 1 {
                vec![LegState::at_rest(q[0])]
            } else {
                derive_states(&times, &q)?
            };
            times
                .into_iter()
                .zip(states)
                .map(|(t, state)| TrajectorySample { t, state })
                .collect()
        }
        _ => {
            return Err(parse_error(
                1,
                "give both rate and acceleration columns, or neither",
            ))
        }
    };
    Ok(Some(
        samples
            .into_iter()
            .map(|mut s: TrajectorySample| {
                scale_state(&mut s.state, factor);
                s
            })
            .collect(),
    ))
}

/// Reads a trajectory CSV. Angles in degrees are converted to radians.
pub fn read_trajectory<R: Read>(reader: R, angles: AngleUnit) -> Result<Vec<TrajectorySample>> {
    let table = Table::read(reader)?;
    table.require("t")?;
    match read_states(&table, angles)? {
        Some(s) if !s.is_empty() => Ok(s),
        Some(_) => Err(Error::InsufficientData("trajectory has no samples".into())),
        None => Err(parse_error(1, "missing column 'q1'")),
    }
}

fn state_fields(t: f64, s: &LegState) -> Vec<String> {
    std::iter::once(t)
        .chain(s.q)
        .chain(s.dq)
        .chain(s.ddq)
        .map(fmt)
        .collect()
}

pub fn write_trajectory<W: Write>(writer: W, samples: &[TrajectorySample]) -> Result<()> {
    write_rows(
        writer,
        &TRAJECTORY_HEADER,
        samples.iter().map(|s| state_fields(s.t, &s.state)),
    )
}

/// One row of a paired torque log; `state` is absent when the file has no
/// trajectory columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub t: f64,
    pub state: Option<LegState>,
    pub tau_land: [f64; 3],
    pub tau_water: [f64; 3],
}

pub fn read_pairs<R: Read>(reader: R, angles: AngleUnit) -> Result<Vec<PairRow>> {
    let table = Table::read(reader)?;
    let t_idx = table.require("t")?;
    let tau = table.require_all(TORQUE_HEADER)?;
    let states = read_states(&table, angles)?;
    let mut out = Vec::with_capacity(table.rows.len());
    for (k, (line, rec)) in table.rows.iter().enumerate() {
        let v = floats(*line, rec, tau, TORQUE_HEADER)?;
        out.push(PairRow {
            t: float(*line, rec, t_idx, "t")?,
            state: states.as_ref().map(|s| s[k].state),
            tau_land: [v[0], v[1], v[2]],
            tau_water: [v[3], v[4], v[5]],
        });
    }
    if out.is_empty() {
        return Err(Error::InsufficientData("torque log has no samples".into()));
    }
    check_times(
        table
            .rows
            .iter()
            .map(|(l, _)| *l)
            .zip(out.iter().map(|r| r.t)),
    )?;
    Ok(out)
}

/// Joins torque rows with their states, taken from the rows themselves or
/// from a trajectory with the same time stamps.
pub fn attach_states(
    rows: &[PairRow],
    trajectory: Option<&[TrajectorySample]>,
) -> Result<Vec<TorquePairSample>> {
    if let Some(traj) = trajectory {
        if traj.len() != rows.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                actual: traj.len(),
            });
        }
    }
    rows.iter()
        .enumerate()
        .map(|(k, r)| {
            let state = match (trajectory, r.state) {
                (Some(traj), _) => {
                    if traj[k].t != r.t {
                        return Err(Error::Domain(format!(
                            "trajectory time {} does not match torque time {} at sample {}",
                            traj[k].t,
                            r.t,
                            k + 1
                        )));
                    }
                    traj[k].state
                }
                (None, Some(s)) => s,
                (None, None) => {
                    return Err(Error::InsufficientData(
                        "torque log has no trajectory columns and no trajectory was given".into(),
                    ))
                }
            };
            Ok(TorquePairSample {
                t: r.t,
                state,
                tau_land: r.tau_land,
                tau_water: r.tau_water,
            })
        })
        .collect()
}

/// Writes a paired log including the trajectory columns.
pub fn write_pairs<W: Write>(writer: W, samples: &[TorquePairSample]) -> Result<()> {
    let header: Vec<&str> = TRAJECTORY_HEADER
        .iter()
        .chain(&TORQUE_HEADER)
        .copied()
        .collect();
    write_rows(
        writer,
        &header,
        samples.iter().map(|s| {
            let mut r = state_fields(s.t, &s.state);
            r.extend(s.tau_land.iter().chain(&s.tau_water).map(|v| fmt(*v)));
            r
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRow {
    pub t: f64,
    pub joint: Joint,
    pub torque: JointTorque,
}

/// Flattens per-sample breakdowns into one row per joint.
pub fn breakdown_rows(
    times: &[f64],
    breakdowns: &[TorqueBreakdown],
    joints: &[Joint],
) -> Vec<BreakdownRow> {
    times
        .iter()
        .zip(breakdowns)
        .flat_map(|(&t, b)| {
            joints.iter().map(move |&j| BreakdownRow {
                t,
                joint: j,
                torque: *b.joint(j),
            })
        })
        .collect()
}

pub fn read_breakdown<R: Read>(reader: R) -> Result<Vec<BreakdownRow>> {
    let table = Table::read(reader)?;
    let idx = table.require_all(BREAKDOWN_HEADER)?;
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let jtext = field(*line, rec, idx[1], "joint")?;
        let joint = jtext
            .parse::<u8>()
            .ok()
            .and_then(|n| Joint::from_number(n).ok())
            .ok_or_else(|| parse_error(*line, format!("joint must be 1, 2 or 3, got '{jtext}'")))?;
        let v: Vec<f64> = [0, 2, 3, 4, 5, 6, 7]
            .iter()
            .map(|&i| float(*line, rec, idx[i], BREAKDOWN_HEADER[i]))
            .collect::<Result<_>>()?;
        out.push(BreakdownRow {
            t: v[0],
            joint,
            torque: JointTorque {
                tau_w: v[1],
                tau_f: v[2],
                tau_d: v[3],
                tau_m: v[4],
                alpha_gain: v[5],
                beta_gain: v[6],
            },
        });
    }
    Ok(out)
}

pub fn write_breakdown<W: Write>(writer: W, rows: &[BreakdownRow]) -> Result<()> {
    write_rows(
        writer,
        &BREAKDOWN_HEADER,
        rows.iter().map(|r| {
            let j = &r.torque;
            let mut f = vec![fmt(r.t), r.joint.number().to_string()];
            f.extend(
                [
                    j.tau_w,
                    j.tau_f,
                    j.tau_d,
                    j.tau_m,
                    j.alpha_gain,
                    j.beta_gain,
                ]
                .map(fmt),
            );
            f
        }),
    )
}

pub fn read_resistance<R: Read>(reader: R) -> Result<Vec<ResistanceRecord>> {
    let table = Table::read(reader)?;
    let idx = table.require_all(RESISTANCE_HEADER)?;
    table
        .rows
        .iter()
        .map(|(line, rec)| {
            let config = field(*line, rec, idx[0], "config")?.to_string();
            if config.is_empty() {
                return Err(parse_error(*line, "empty 'config'"));
            }
            Ok(ResistanceRecord {
                config,
                speed_rpm: float(*line, rec, idx[1], "speed_rpm")?,
                pressure_mpa: float(*line, rec, idx[2], "pressure_mpa")?,
                current_a: float(*line, rec, idx[3], "current_a")?,
            })
        })
        .collect()
}

pub fn write_resistance<W: Write>(writer: W, records: &[ResistanceRecord]) -> Result<()> {
    write_rows(
        writer,
        &RESISTANCE_HEADER,
        records.iter().map(|r| {
            vec![
                r.config.clone(),
                fmt(r.speed_rpm),
                fmt(r.pressure_mpa),
                fmt(r.current_a),
            ]
        }),
    )
}
