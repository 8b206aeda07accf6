use std::env;
use std::process::exit;

use clap::Parser;

use logbath::cli::{run, Cli, RunConfig};

fn main() {
    // The thread cap must be installed before any parallel work runs;
    // nothing else in the crate touches the global pool.
    if let Ok(v) = env::var("LOGBATH_THREADS") {
        match v.parse::<usize>() {
            Ok(t) if t >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            _ => eprintln!("ignoring LOGBATH_THREADS = '{v}': expected a positive integer"),
        }
    }
    let cli = Cli::parse();
    match run(RunConfig { command: cli.command }) {
        Ok(code) => exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            exit(e.exit_code());
        }
    }
}
