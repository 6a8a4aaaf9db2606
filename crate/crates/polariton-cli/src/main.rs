use clap::Parser;

fn main() {
    let cli = polariton_cli::Cli::parse();
    std::process::exit(polariton_cli::run(&cli));
}
