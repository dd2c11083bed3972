use clap::Parser;
use hslab::RunConfig;

fn main() {
    let config = RunConfig::parse();
    std::process::exit(hslab::run(&config));
}
