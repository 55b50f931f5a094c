mod job;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use job::{read_job, Command, Job};

#[derive(Parser, Debug)]
#[command(name = "dyntwist", version, about = "Exact checks for dynamical r-matrices, twists and star-products")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Write the JSON report here; `-` for standard output.
    #[arg(long, global = true)]
    json_out: Option<String>,
    /// Truncation order in ħ.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Evaluate star-products at ħ = 1 instead of formally.
    #[arg(long, global = true)]
    hbar_one: bool,
    /// Read the command from a JSON job file.
    #[arg(long, global = true)]
    job: Option<PathBuf>,
    /// Omit timings so reports are byte-identical across runs.
    #[arg(long, global = true)]
    canonical: bool,
}

const DEFAULT_ORDER: usize = 4;

fn resolve(cli: Cli) -> Result<(run::Options, Command), String> {
    let (command, job) = match (cli.command, cli.job) {
        (Some(_), Some(_)) => return Err("give either a subcommand or --job, not both".into()),
        (None, None) => return Err("missing subcommand (or --job FILE)".into()),
        (Some(c), None) => (c, None),
        (None, Some(p)) => {
            let j: Job = read_job(&p)?;
            (j.command.clone(), Some(j))
        }
    };
    let order = cli
        .order
        .or(job.as_ref().and_then(|j| j.order))
        .unwrap_or(DEFAULT_ORDER);
    let opts = run::Options {
        order,
        hbar_one: cli.hbar_one || job.as_ref().and_then(|j| j.hbar_one).unwrap_or(false),
        canonical: cli.canonical,
        json_out: cli.json_out.or(job.and_then(|j| j.json_out)),
    };
    Ok((opts, command))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (opts, command) = match resolve(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    ExitCode::from(run::execute(&command, &opts))
}
