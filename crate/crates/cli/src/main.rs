use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use derivlab::bundled::{self, SCENARIOS};
use derivlab::{parse_scenario, run_scenario, RunOptions};

#[derive(Parser)]
#[command(name = "derivlab", version, about = "Check derivation and additive-map identities with exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run a bundled scenario.
    Demo {
        name: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// List bundled scenarios with their anchors.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Args)]
struct Opts {
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Draw random samples with this seed instead of the default list.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of samples.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=10_000))]
    samples: Option<u64>,
    /// Leave the timestamp out of JSON output.
    #[arg(long)]
    no_timestamp: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::List => {
            let width = SCENARIOS.iter().map(|b| b.name.len()).max().unwrap_or(0);
            for b in SCENARIOS {
                println!("{:<width$}  {}", b.name, b.anchor());
            }
            ExitCode::SUCCESS
        }
        Cmd::Run { file, opts } => match std::fs::read_to_string(&file) {
            Ok(text) => execute(&file.display().to_string(), &text, None, &opts),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", file.display());
                ExitCode::from(2)
            }
        },
        Cmd::Demo { name, opts } => match bundled::find(&name) {
            Some(b) => execute(b.name, b.source, Some(b.name), &opts),
            None => {
                let names: Vec<&str> = SCENARIOS.iter().map(|b| b.name).collect();
                eprintln!("error: no bundled scenario `{name}` (available: {})", names.join(", "));
                ExitCode::from(2)
            }
        },
    }
}

fn execute(label: &str, text: &str, scenario: Option<&str>, opts: &Opts) -> ExitCode {
    let s = match parse_scenario(text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{label}:{e}");
            return ExitCode::from(2);
        }
    };
    let timestamp = if opts.no_timestamp {
        None
    } else {
        SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
    };
    let run = RunOptions {
        seed: opts.seed,
        samples: opts.samples.map(|n| n as usize),
        timestamp,
        scenario: scenario.map(String::from),
    };
    let report = run_scenario(&s, &run);
    match opts.format {
        FormatArg::Json => print!("{}", report.to_json()),
        FormatArg::Text => print!("{}", report.to_text()),
    }
    ExitCode::from(report.exit_code() as u8)
}
