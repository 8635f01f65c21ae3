use clap::Parser;

use buyback_cli::args::Cli;
use buyback_cli::{commands, execute, exit};

fn main() {
    let cli = Cli::parse();
    let raw: Vec<String> = std::env::args().skip(1).collect();
    match execute(&cli, &raw) {
        Ok((_, stdout)) => {
            commands::print(&stdout);
            std::process::exit(exit::OK);
        }
        Err(e) => {
            eprintln!("buyback-lab: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
