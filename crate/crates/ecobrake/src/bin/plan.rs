use clap::Parser;
use ecobrake::cli::{run, Args};

fn main() {
    let args = Args::parse();
    std::process::exit(run(&args));
}
