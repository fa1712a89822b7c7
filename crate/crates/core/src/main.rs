use clap::Parser;

fn main() {
    std::process::exit(hencky::cli::main_with(hencky::cli::Args::parse()));
}
