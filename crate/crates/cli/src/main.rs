use clap::Parser;

use ils_summ_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(err) = ils_summ_cli::run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
