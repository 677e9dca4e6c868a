use std::io::Write;

use clap::Parser;
use gauge2d::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let run = execute(&cli);
    print!("{}", run.stdout);
    eprint!("{}", run.stderr);
    std::io::stdout().flush().ok();
    std::process::exit(run.code);
}
