mod args;
mod commands;

use clap::Parser;

use args::Cli;

/// Exit codes: 0 success, 1 validation/usage error, 2 runtime/IO error,
/// 3 partial run (some items failed).
fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };

    let logger = commands::Logger::new(cli.json_logs);
    let code = match commands::dispatch(cli.command, &logger) {
        Ok(code) => code,
        Err(commands::CliError::Usage(message)) => {
            logger.error(&message);
            1
        }
        Err(commands::CliError::Runtime(message)) => {
            logger.error(&message);
            2
        }
    };
    std::process::exit(code);
}
