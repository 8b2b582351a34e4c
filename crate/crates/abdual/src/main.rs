use clap::Parser;

use abdual::cli::{execute, RunConfig};

fn main() {
    let config = RunConfig::parse();
    match execute(config) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            std::process::exit(outcome.exit_code);
        }
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    }
}
