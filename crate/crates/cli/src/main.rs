use std::process::ExitCode;

use bnsharp_cli::{expand_config, run, Cli, ExperimentConfig};
use bnsharp_core::Error;
use clap::Parser;

fn usage(e: &Error) -> ExitCode {
    eprintln!("usage error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => return usage(&e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let (kind, common) = cli.command.parts();
    let config = match ExperimentConfig::from_args(kind, common) {
        Ok(c) => c,
        Err(e) => return usage(&e),
    };
    let workers = common.workers;
    let task = || run(&config);
    let result = match workers {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(task),
            Err(e) => return usage(&Error::InvalidParameter(format!("workers: {e}"))),
        },
        _ => task(),
    };
    match result {
        Ok(summary) => {
            if let Some(text) = summary.stdout {
                print!("{text}");
            } else if let (Some(csv), Some(m)) = (summary.csv, summary.manifest) {
                eprintln!(
                    "{} rows -> {} ({})",
                    summary.rows,
                    csv.display(),
                    m.display()
                );
            }
            ExitCode::SUCCESS
        }
        Err(e @ Error::Parse { .. }) => usage(&e),
        Err(e) => {
            let record = serde_json::json!({
                "error": format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("Error"),
                "message": e.to_string(),
            });
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}
