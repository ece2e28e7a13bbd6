use clap::Parser;
use renewal_control::cli::{run_cli, Cli};

fn main() {
    let cli = Cli::parse();
    let code = run_cli(cli, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
