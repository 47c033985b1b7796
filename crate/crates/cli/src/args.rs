use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use phasedetect_core::analytic::{ProtocolParams, StateFamily};
use phasedetect_core::fock::DEFAULT_TAIL_TOL;
use phasedetect_core::protocol::{NumericConfig, SweepAxis};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "phasedetect", version, about = "Unambiguous phase-shift detection with Fock and cat probes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probe overlap with its displaced copy: closed form against the truncated basis.
    Overlap(GridArgs),
    /// Parity of the lossy displaced cat: closed form against the Kraus channel.
    Parity(GridArgs),
    /// Error rates at one displacement or phase.
    Evaluate(EvaluateArgs),
    /// Operating point and its error rates.
    Optimize(OptimizeArgs),
    /// Error rates along one parameter axis.
    Sweep(SweepArgs),
    /// Data behind figures 2 to 6.
    Figure(FigureArgs),
    /// Closed forms against the numeric oracle; exit 3 on any failure.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Fock,
    Cat,
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Photon number of the Fock probe.
    #[arg(long)]
    pub n: Option<u32>,
    /// Cat amplitude.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Detector quantum efficiency.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Squeeze factor.
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    /// Carrier photon number N.
    #[arg(long, default_value_t = 1e6)]
    pub photons: f64,
    /// Prior of the no-signal hypothesis.
    #[arg(long, default_value_t = 0.5)]
    pub p0: f64,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Clone, Args)]
pub struct NumericArgs {
    /// Fixed basis size (default: sized from the tail tolerance).
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,
    /// Also run the truncated-basis oracle.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Single displacement instead of a grid.
    #[arg(long, conflicts_with_all = ["delta_max", "steps"])]
    pub delta: Option<f64>,
    /// Grid `delta_max * i / steps`, i = 0..steps.
    #[arg(long, required_unless_present = "delta")]
    pub delta_max: Option<f64>,
    #[arg(long, default_value_t = 300)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Effective displacement δ (default: the canonical operating point).
    #[arg(long, conflicts_with = "phi")]
    pub delta: Option<f64>,
    /// Phase shift in radians.
    #[arg(long)]
    pub phi: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PointKind {
    /// Fock threshold or cat parity minimum.
    Canonical,
    /// First zero of the cat overlap.
    OverlapZero,
    /// π/(4α).
    Asymptotic,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = PointKind::Canonical)]
    pub point: PointKind,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Alpha,
    Eta,
    N,
    Delta,
    R,
}

impl From<Axis> for SweepAxis {
    fn from(a: Axis) -> Self {
        match a {
            Axis::Alpha => SweepAxis::Alpha,
            Axis::Eta => SweepAxis::Eta,
            Axis::N => SweepAxis::N,
            Axis::Delta => SweepAxis::Delta,
            Axis::R => SweepAxis::Squeeze,
        }
    }
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("grid").required(true).args(["values", "range"])))]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Option<Vec<f64>>,
    /// start,end,steps (inclusive).
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub range: Option<Vec<f64>>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// Figure number, 2 to 6.
    pub id: u8,
    /// Grid size (figure 3: δ points; figures 4 to 6: α points).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Efficiency for figures 3 and 4.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Efficiency grid for figures 5 and 6.
    #[arg(long, value_delimiter = ',')]
    pub etas: Option<Vec<f64>>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridSize {
    Small,
    Full,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Replace every check's tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, value_enum, default_value_t = GridSize::Full)]
    pub grid: GridSize,
    #[command(flatten)]
    pub out: OutArgs,
}

impl ScenarioArgs {
    pub fn params(&self) -> Result<ProtocolParams, CliError> {
        self.params_for(None)
    }

    /// Parameters with the swept field allowed to be absent.
    pub fn params_for(&self, axis: Option<SweepAxis>) -> Result<ProtocolParams, CliError> {
        let family = match self.family {
            Family::Fock => {
                if self.alpha.is_some() {
                    return Err(CliError::invalid("--alpha applies to --family cat"));
                }
                match (self.n, axis) {
                    (Some(n), _) => StateFamily::Fock { n },
                    (None, Some(SweepAxis::N)) => StateFamily::Fock { n: 1 },
                    (None, _) => return Err(CliError::invalid("--family fock requires --n")),
                }
            }
            Family::Cat => {
                if self.n.is_some() {
                    return Err(CliError::invalid("--n applies to --family fock"));
                }
                match (self.alpha, axis) {
                    (Some(alpha), _) => StateFamily::Cat { alpha },
                    (None, Some(SweepAxis::Alpha)) => StateFamily::Cat { alpha: 1.0 },
                    (None, _) => return Err(CliError::invalid("--family cat requires --alpha")),
                }
            }
        };
        let params = ProtocolParams::new(family)
            .with_eta(self.eta)
            .with_squeeze(self.r)
            .with_photons(self.photons)
            .with_priors(self.p0, 1.0 - self.p0);
        params.validate()?;
        Ok(params)
    }
}

impl NumericArgs {
    pub fn config(&self) -> Result<NumericConfig, CliError> {
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(CliError::invalid(format!("--tail-tol must lie in (0, 1), got {}", self.tail_tol)));
        }
        if matches!(self.dim, Some(d) if d < 2) {
            return Err(CliError::invalid("--dim must be at least 2"));
        }
        Ok(NumericConfig { dim: self.dim, tail_tol: self.tail_tol })
    }

    pub fn oracle(&self) -> Result<Option<NumericConfig>, CliError> {
        let cfg = self.config()?;
        Ok(self.oracle.then_some(cfg))
    }
}

impl GridArgs {
    pub fn deltas(&self) -> Result<Vec<f64>, CliError> {
        if let Some(d) = self.delta {
            if !d.is_finite() {
                return Err(CliError::invalid("--delta must be finite"));
            }
            return Ok(vec![d]);
        }
        let max = self.delta_max.expect("clap enforces --delta-max");
        if !(max.is_finite() && max > 0.0) {
            return Err(CliError::invalid("--delta-max must be positive"));
        }
        if self.steps == 0 {
            return Err(CliError::invalid("--steps must be positive"));
        }
        Ok((0..self.steps).map(|i| max * i as f64 / self.steps as f64).collect())
    }
}

impl SweepArgs {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let values = match (&self.values, &self.range) {
            (Some(v), _) => v.clone(),
            (None, Some(r)) => {
                let [start, end, steps] = r[..] else {
                    return Err(CliError::invalid("--range takes start,end,steps"));
                };
                if !(steps >= 1.0 && steps.fract() == 0.0) {
                    return Err(CliError::invalid("--range steps must be a positive integer"));
                }
                crate::output::linspace(start, end, steps as usize)
            }
            (None, None) => unreachable!("clap requires --values or --range"),
        };
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::invalid("sweep values must be finite and non-empty"));
        }
        Ok(values)
    }
}
