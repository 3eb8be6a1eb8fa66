use clap::Parser;

fn main() {
    let args = singular_rd::cli::Args::parse();
    std::process::exit(singular_rd::cli::main_with(args));
}
