use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fuzzysum_cli::{
    reproduce_examples, run, write_json, GridSpec, ReproduceConfig, RunConfig, RunMode,
};

#[derive(Parser)]
#[command(
    name = "fuzzysum",
    version,
    about = "Summability experiments on sequences of fuzzy functions"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one family and write CSV traces plus a JSON report.
    Run(RunArgs),
    /// Re-run the worked examples and compare against their stated classes.
    Reproduce(ReproduceArgs),
}

#[derive(Parser)]
struct RunArgs {
    /// ex3.1[:M=..], ex3.2, ex3.3, ex4.1, remark3:n=..[,M=..], recip, const:c or file:<path>
    #[arg(long)]
    family: String,
    /// classical, pow:p, lambda:<n|sqrt|log2|half>, lacunary:pow2 or file:<path>
    #[arg(long, default_value = "classical")]
    scheme: String,
    /// const:c, recip5, harmonicplus or file:<path>
    #[arg(long, default_value = "const:1")]
    weights: String,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    theta: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// a,b,count
    #[arg(long, default_value = "1,2,5")]
    grid: GridSpec,
    /// Defaults to 2^20 for ex3.1 and 2^12 otherwise; at least 64.
    #[arg(long)]
    horizon: Option<u64>,
    /// Any of sp, abs, ord, tauberian.
    #[arg(long, value_delimiter = ',', default_value = "sp,abs,ord")]
    modes: Vec<RunMode>,
    #[arg(long, default_value = "fuzzysum-out")]
    out_dir: PathBuf,
    /// JSON report path (default <out-dir>/report.json).
    #[arg(long)]
    json: Option<PathBuf>,
    /// CSV trace path (default <out-dir>/traces.csv).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Parser)]
struct ReproduceArgs {
    /// Horizon for every example instead of the per-example default.
    #[arg(long)]
    horizon: Option<u64>,
    /// Comma-separated example ids: ex3.1, ex3.2, ex3.3, ex4.1, remark3.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Also write the table as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Run(a) => {
            let config = RunConfig {
                family: a.family,
                scheme: a.scheme,
                weights: a.weights,
                thetas: a.theta,
                eps: a.eps,
                horizon: a.horizon,
                grid: a.grid,
                modes: a.modes,
                out_dir: a.out_dir,
                json: a.json,
                csv: a.csv,
            };
            let report = run(&config)?;
            print!("{}", report.summary());
            println!(
                "wrote {} and {}",
                config.csv_path().display(),
                config.json_path().display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Reproduce(a) => {
            let summary = reproduce_examples(&ReproduceConfig {
                horizon: a.horizon,
                only: a.only,
            })?;
            print!("{}", summary.table());
            if let Some(path) = a.json {
                write_json(&summary, &path)?;
            }
            if summary.inconclusive() > 0 {
                eprintln!(
                    "warning: {} example(s) inconclusive at this horizon",
                    summary.inconclusive()
                );
            }
            Ok(if summary.disagreements() > 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}
