use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rmc_cli::{exit_code_for, run, Cli, EXIT_OK, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            if out
                .write_all(outcome.render(cli.format).as_bytes())
                .is_err()
            {
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
