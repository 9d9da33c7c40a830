//! Command-line front end: torque breakdowns, decomposition charts,
//! coefficient fitting, synthetic experiments and joint resistance analysis.

pub mod commands;
pub mod output;
pub mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hydroleg::leg::DEFAULT_PROFILE;
use hydroleg::quadrature::DEFAULT_NODE_COUNT;
use hydroleg::resistance::{default_pressures, default_speeds};
use hydroleg::sim::{GaitSpec, LandBaseline};
use hydroleg::{HydroCoeffs, Joint, ModelConfig};

use commands::{ResistanceOptions, RunConfig};
pub use output::Outputs;

#[derive(Parser, Debug)]
#[command(
    name = "hydroleg",
    version,
    about = "Hydrodynamic torque and joint resistance analysis for a 3-DOF underwater leg"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Geometry profile name or TOML model file
    #[arg(long, global = true, default_value = DEFAULT_PROFILE)]
    pub geometry: String,

    /// Gauss-Legendre nodes per integral
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_COUNT)]
    pub nodes: usize,

    /// Random seed
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct CoeffArgs {
    /// Drag coefficient
    #[arg(long, default_value_t = 2.2)]
    pub cd: f64,

    /// Added-mass coefficient
    #[arg(long, default_value_t = 0.5)]
    pub cm: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Zero,
    Gravity,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Per-sample torque breakdown of a trajectory (breakdown.csv)
    Torques {
        /// Trajectory CSV
        #[arg(long)]
        trajectory: PathBuf,
        #[command(flatten)]
        coeffs: CoeffArgs,
        /// Joints to report, e.g. "1,2,3"
        #[arg(long, default_value = "1,2,3", value_parser = parse_joints)]
        joints: JointSet,
    },
    /// Component statistics and charts of a breakdown (decomposition.toml, jointN.svg)
    Decompose {
        /// Breakdown CSV
        #[arg(long)]
        breakdown: PathBuf,
    },
    /// Fit the drag and added-mass coefficients (fit.toml)
    Fit {
        /// Paired land / underwater torque CSV
        #[arg(long)]
        pairs: PathBuf,
        /// Trajectory CSV when the torque log has no joint columns
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Joints whose rows enter the regression
        #[arg(long, default_value = "1", value_parser = parse_joints)]
        joints: JointSet,
    },
    /// Synthetic gait and torque logs (gait.toml, trajectory.csv, pairs.csv)
    Simulate {
        /// Gait TOML; the built-in sinusoid gait when omitted
        #[arg(long)]
        gait: Option<PathBuf>,
        #[command(flatten)]
        coeffs: CoeffArgs,
        /// Torque noise standard deviation per log, N·m
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Land torque the underwater log is offset from
        #[arg(long, value_enum, default_value_t = Baseline::Zero)]
        baseline: Baseline,
    },
    /// Viscous and seal resistance analysis (viscous.csv, seal.csv, resistance.toml, *.svg)
    Resistance {
        /// Three-configuration resistance CSV
        #[arg(long)]
        grids: PathBuf,
        /// Rated motor current, A; adds an efficiency block
        #[arg(long)]
        rated: Option<f64>,
        /// Operating speed of the efficiency block, r/min
        #[arg(long, requires = "pressure")]
        speed: Option<f64>,
        /// Operating pressure of the efficiency block, MPa
        #[arg(long, requires = "speed")]
        pressure: Option<f64>,
        /// Report the quadratic surfaces instead of the bilinear ones
        #[arg(long)]
        quadratic: bool,
    },
    /// Share of the rated current lost to joint resistance (efficiency.toml)
    Efficiency {
        /// Resistance current, A
        #[arg(long)]
        loss: f64,
        /// Rated motor current, A
        #[arg(long)]
        rated: f64,
    },
    /// Synthetic three-configuration resistance grid (grids.csv)
    SynthGrids {
        /// Use laws that contradict the expected behaviour
        #[arg(long)]
        inverted: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointSet(pub Vec<Joint>);

pub fn parse_joints(text: &str) -> Result<JointSet, String> {
    if text == "all" {
        return Ok(JointSet(Joint::ALL.to_vec()));
    }
    let mut joints = Vec::new();
    for part in text.split(',').map(str::trim) {
        let j = part
            .parse::<u8>()
            .ok()
            .and_then(|n| Joint::from_number(n).ok())
            .ok_or_else(|| format!("joint must be 1, 2 or 3, got '{part}'"))?;
        if !joints.contains(&j) {
            joints.push(j);
        }
    }
    joints.sort();
    Ok(JointSet(joints))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn coeffs(c: CoeffArgs) -> Result<HydroCoeffs> {
    if !(c.cd.is_finite() && c.cm.is_finite()) {
        bail!("--cd and --cm must be finite");
    }
    Ok(HydroCoeffs::new(c.cd, c.cm))
}

/// Builds the files for a parsed command line without writing them.
pub fn render(cli: &Cli) -> Result<Outputs> {
    let g = &cli.global;
    let model = ModelConfig::load(&g.geometry)?;
    let cfg = RunConfig::new(model, g.nodes, g.seed)?;
    match &cli.command {
        Command::Torques {
            trajectory,
            coeffs: c,
            joints,
        } => commands::cmd_torques(&read(trajectory)?, &cfg, coeffs(*c)?, &joints.0),
        Command::Decompose { breakdown } => commands::cmd_decompose(&read(breakdown)?),
        Command::Fit {
            pairs,
            trajectory,
            joints,
        } => {
            let traj = trajectory.as_deref().map(read).transpose()?;
            commands::cmd_fit(&read(pairs)?, traj.as_deref(), &cfg, &joints.0)
        }
        Command::Simulate {
            gait,
            coeffs: c,
            noise,
            baseline,
        } => {
            let spec = match gait {
                Some(p) => GaitSpec::from_toml_str(&read(p)?)
                    .with_context(|| format!("parsing {}", p.display()))?,
                None => GaitSpec::default_gait(),
            };
            let baseline = match baseline {
                Baseline::Zero => LandBaseline::Zero,
                Baseline::Gravity => LandBaseline::Gravity,
            };
            commands::cmd_simulate(&spec, &cfg, coeffs(*c)?, *noise, baseline)
        }
        Command::Resistance {
            grids,
            rated,
            speed,
            pressure,
            quadratic,
        } => {
            let opts = ResistanceOptions {
                quadratic: *quadratic,
                rated_current: *rated,
                operating_point: speed.zip(*pressure),
            };
            commands::cmd_resistance(&read(grids)?, &opts)
        }
        Command::Efficiency { loss, rated } => commands::cmd_efficiency(*loss, *rated),
        Command::SynthGrids { inverted } => {
            commands::cmd_synth_grids(*inverted, &default_speeds(), &default_pressures())
        }
    }
}

/// Renders and writes the command's files; returns the written paths.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let outputs = render(cli)?;
    outputs.commit(&cli.global.out)
}
