use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spin_dimer_cli::commands::{emit, observables_csv, propagate_csv, Column};
use spin_dimer_cli::config::RunConfig;
use spin_dimer_cli::figures::{write_figure, FIGURES};
use spin_dimer_cli::verify::{self, Level, Library};
use spin_dimer_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "spin-dimer", version, about = "Exact dynamics of a driven spin-1/2 dimer")]
struct Cli {
    /// INI run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config entry, e.g. --set time.t_max=20
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output CSV path (stdout if omitted and not set in the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append time in seconds and the lab fields in tesla
    #[arg(long)]
    si: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Amplitude trajectory of the initial state
    Propagate(Output),
    /// Observables along the trajectory
    Observables {
        #[command(flatten)]
        output: Output,
        /// Comma-separated subset of sz,s2,sx,concurrence,cxx,cyy,cxy,fidelities
        #[arg(long)]
        columns: Option<String>,
    },
    /// Closed-form data for one figure, or all of them
    Figure {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        number: Option<u8>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Closed forms against the integrator and the structural invariants
    Verify {
        #[arg(long, default_value = "fast")]
        level: Level,
    },
}

fn load(cli: &Cli) -> CliResult<RunConfig> {
    RunConfig::from_file(cli.config.as_deref(), &cli.overrides)
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Propagate(o) => {
            let cfg = load(&cli)?;
            let csv = propagate_csv(&cfg, o.si)?;
            emit(&csv, o.out.as_deref().or(cfg.output.as_deref()))
        }
        Command::Observables { output, columns } => {
            let cfg = load(&cli)?;
            let cols = match columns.as_deref().or(cfg.columns.as_deref()) {
                Some(list) => Column::parse_list(list)?,
                None => Column::ALL.to_vec(),
            };
            let csv = observables_csv(&cfg, &cols, output.si)?;
            emit(&csv, output.out.as_deref().or(cfg.output.as_deref()))
        }
        Command::Figure { number, all, out_dir } => {
            let list: Vec<u8> = if *all { FIGURES.collect() } else { number.iter().copied().collect() };
            for n in list {
                let path = write_figure(n, out_dir)?;
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Verify { level } => {
            let seed = verify::seed_from_env();
            println!("verify level={level:?} seed={seed}");
            let results = verify::run(*level, seed, &Library);
            for r in &results {
                println!("{r}");
            }
            let failed: Vec<String> = results.iter().filter(|r| !r.passed()).map(|r| r.to_string()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Verify(failed.join("; ")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spin-dimer: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
