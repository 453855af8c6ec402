mod cli;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{Cli, EXIT_USAGE};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Cli::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let name = args.command.name();
    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("{name}: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{name}: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }
    match args.command.run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("{name}: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
