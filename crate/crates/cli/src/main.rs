use clap::Parser;

fn main() {
    let cli = pharmonic_cli::Cli::parse();
    std::process::exit(pharmonic_cli::run(cli));
}
