use clap::Parser;
use qamlab_cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
