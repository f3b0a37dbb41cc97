use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::GridSpec;
use crate::error::CliError;

/// Single-photon routing through an emitter chain between two waveguides.
///
/// Detunings are in units of Gamma0, lengths in nanometres.
#[derive(Debug, Parser)]
#[command(name = "chiral-ladder", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transport intensities versus detuning, with peak report.
    Spectrum(SpectrumArgs),
    /// Tt and T over a (detuning, spacing) grid.
    SweepSeparation(SweepArgs),
    /// Routing figures of merit versus emitter number.
    ScaleN(ScaleArgs),
    /// Check a config and print derived quantities.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct DetuningFlags {
    #[arg(long, allow_negative_numbers = true)]
    pub delta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_max: Option<f64>,
    #[arg(long)]
    pub delta_points: Option<usize>,
}

impl DetuningFlags {
    pub fn grid(&self) -> GridSpec {
        GridSpec {
            min: self.delta_min,
            max: self.delta_max,
            points: self.delta_points,
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub detuning: DetuningFlags,
    /// CSV destination; peaks and manifest are written beside it.
    #[arg(long)]
    pub out: PathBuf,
    /// Polish peak locations with extra solves between grid points.
    #[arg(long)]
    pub refine_peaks: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub detuning: DetuningFlags,
    #[arg(long, default_value_t = 5.0)]
    pub l_min: f64,
    #[arg(long, default_value_t = 100.0)]
    pub l_max: f64,
    #[arg(long, default_value_t = 96)]
    pub l_points: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Comma-separated, strictly increasing emitter numbers, e.g. 10,20,30.
    #[arg(long)]
    pub n_list: String,
    #[command(flatten)]
    pub detuning: DetuningFlags,
    /// JSON report destination; the manifest is written beside it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Emit the N×N coupling matrix as CSV (to --out, else stdout).
    #[arg(long)]
    pub dump_ddi: bool,
    #[arg(long, requires = "dump_ddi")]
    pub out: Option<PathBuf>,
}

pub fn parse_n_list(text: &str) -> Result<Vec<usize>, CliError> {
    let list = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>().map_err(|_| {
                CliError::Usage(format!("--n-list: `{s}` is not a non-negative integer"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if list.is_empty() {
        return Err(CliError::Usage(
            "--n-list must name at least one emitter number".into(),
        ));
    }
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_list_parses_and_tolerates_spaces() {
        assert_eq!(parse_n_list("1, 2,5 ,30").unwrap(), [1, 2, 5, 30]);
    }

    #[test]
    fn empty_or_garbage_n_list_is_a_usage_error() {
        for bad in ["", " , ", "1,x", "-3"] {
            assert_eq!(parse_n_list(bad).unwrap_err().exit_code(), 1, "{bad:?}");
        }
    }

    #[test]
    fn negative_detuning_flags_parse() {
        let cli = Cli::try_parse_from([
            "chiral-ladder",
            "spectrum",
            "--config",
            "c.json",
            "--out",
            "o.csv",
            "--delta-min",
            "-40",
            "--delta-max",
            "40",
        ])
        .unwrap();
        let Command::Spectrum(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.detuning.delta_min, Some(-40.0));
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
