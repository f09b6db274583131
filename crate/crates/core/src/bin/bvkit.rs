use clap::Parser;

fn main() {
    let cli = bvkit::cli::Cli::parse();
    std::process::exit(bvkit::cli::run(&cli));
}
