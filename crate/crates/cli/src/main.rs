use std::process;

use clap::Parser;

use bchchain_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => print!("{}", output),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            process::exit(failure.code);
        }
    }
}
