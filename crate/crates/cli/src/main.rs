use clap::Parser;

fn main() {
    let cli = hochlab_cli::cli::Cli::parse();
    std::process::exit(hochlab_cli::cli::run(&cli));
}
