use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod grid_arg;
mod output;

use commands::*;
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "pendular", version, about = "Pendular-state polar molecules as spin-1/2 Heisenberg models")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write data here (plus `<out>.manifest.json`) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for scans (default: available cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,
    /// Molecule preset file (TOML, `[[molecule]]` records).
    #[arg(long, global = true, env = "PENDULAR_PRESETS")]
    pub presets: Option<PathBuf>,
    /// Add a laboratory-units block for this molecule.
    #[arg(long, global = true)]
    pub molecule: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stark energies of the lowest states per m.
    StarkMap(StarkMapArgs),
    /// Spherical-harmonic coefficients of a pseudo-spin state.
    Coefficients(CoefficientsArgs),
    /// Energies, orientation cosines and transition moment.
    Moments(MomentsArgs),
    /// Heisenberg XYZ constants of a molecule pair.
    Couplings(CouplingsArgs),
    /// Coupling constants per unit Ω over an (x, α) grid.
    Contour(ContourArgs),
    /// Refit the approximation formulas and compare with the published ones.
    Fit(FitArgs),
    /// Exact diagonalisation of one XXZ chain.
    ChainEd(ChainEdArgs),
    /// Chain phase labels over (x, Ω/B).
    PhaseDiagram(PhaseDiagramArgs),
    /// Convert laboratory units to reduced variables and back.
    Convert(ConvertArgs),
    /// List the molecule presets.
    Presets,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::StarkMap(a) => stark_map(&cli.global, a),
        Command::Coefficients(a) => coefficients(&cli.global, a),
        Command::Moments(a) => moments(&cli.global, a),
        Command::Couplings(a) => couplings(&cli.global, a),
        Command::Contour(a) => contour(&cli.global, a),
        Command::Fit(a) => fit(&cli.global, a),
        Command::ChainEd(a) => chain_ed(&cli.global, a),
        Command::PhaseDiagram(a) => phase_diagram(&cli.global, a),
        Command::Convert(a) => convert(&cli.global, a),
        Command::Presets => presets(&cli.global),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for bad input, 1 for numerical or I/O failures.
fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<pendular::Error>() {
            return match err {
                pendular::Error::NoConvergence { .. } | pendular::Error::RankDeficient { .. } => 1,
                _ => 2,
            };
        }
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
    }
    1
}
