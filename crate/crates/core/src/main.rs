use clap::Parser;
use vecport::cli::{log_filter, run, Cli};

fn main() {
    let verbose = Cli::try_parse().map(|c| c.verbose).unwrap_or(0);
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(log_filter(verbose))).init();
    let code = run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
