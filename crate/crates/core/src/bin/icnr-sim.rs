use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use icnr_core::report::emit_report;
use icnr_core::{
    parse_config, run_experiment, Error, IntegrationLevel, OutputFormat, ScenarioConfig,
};

/// Compare separate LEO shells with function- and signal-level integration
/// for vehicular communication, navigation and remote sensing.
#[derive(Debug, Parser)]
#[command(name = "icnr-sim", version)]
struct Cli {
    /// Scenario file of `key = value` lines; defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Comma-separated integration levels.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "traditional,function,signal"
    )]
    levels: Vec<IntegrationLevel>,

    #[arg(long, default_value_t = 10_000)]
    trials: u64,

    /// Master seed of all trial streams.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    #[arg(long, default_value = "all", value_name = "csv|json|svg|all")]
    format: OutputFormat,

    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, Error> {
    let config = match &cli.config {
        Some(path) => parse_config(path)?,
        None => ScenarioConfig::default(),
    };
    let report = run_experiment(&cli.levels, &config, cli.trials, cli.seed)?;
    emit_report(&report, cli.format, &cli.out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    let result = match cli.threads {
        Some(0) => {
            eprintln!("error: invalid value for `--threads`: must be at least 1");
            return ExitCode::from(1);
        }
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => {
                eprintln!("error: `--threads`: {e}");
                return ExitCode::from(1);
            }
        },
        None => run(&cli),
    };

    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
