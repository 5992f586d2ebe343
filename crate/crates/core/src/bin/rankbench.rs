use clap::Parser;
use rankbench::cli::{main_with, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RANKBENCH_LOG", "warn")).init();
    let cli = Cli::parse();
    std::process::exit(main_with(&cli));
}
