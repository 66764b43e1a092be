use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heyland_cli::{CliError, Outputs, Settings, SlipRange};
use heyland_core::PfAxis;

#[derive(Parser)]
#[command(name = "heyland", version, about = "Heyland circle diagrams for induction machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the diagram and write SVG, CSV and report artifacts.
    Build {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        range: Range,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Report file; printed to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check the construction against the circuit, plus random draws.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sample the locus over a slip range as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        range: Range,
        /// CSV file; printed to stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol_geom: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_equiv: f64,
    /// Diagram axis that carries the voltage, for power-factor readout.
    #[arg(long, value_enum, default_value_t = Axis::Y)]
    pf_axis: Axis,
}

#[derive(Args)]
struct Range {
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    slip_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    slip_max: f64,
    #[arg(long, default_value_t = 101)]
    samples: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    X,
    Y,
}

impl Common {
    fn settings(&self) -> Settings {
        let pf_axis = match self.pf_axis {
            Axis::X => PfAxis::X,
            Axis::Y => PfAxis::Y,
        };
        Settings { tol_geom: self.tol_geom, tol_equiv: self.tol_equiv, pf_axis }
    }
}

impl Range {
    fn slip_range(&self) -> Result<SlipRange, CliError> {
        Ok(SlipRange::new(self.slip_min, self.slip_max, self.samples)?)
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Build { common, range, svg, csv, report } => {
            let outputs = Outputs { svg, csv, report };
            heyland_cli::build(&common.input, common.settings(), &range.slip_range()?, &outputs)
        }
        Command::Verify { common, draws, seed, report } => {
            heyland_cli::verify(&common.input, common.settings(), draws, seed, report.as_deref())
        }
        Command::Sweep { common, range, csv } => {
            heyland_cli::sweep(&common.input, common.settings(), &range.slip_range()?, csv.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.stage.exit_code();
            ExitCode::from(code as u8)
        }
    }
}
