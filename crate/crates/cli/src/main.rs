use clap::Parser;

fn main() {
    let cli = charfol_cli::opts::Cli::parse();
    std::process::exit(charfol_cli::run(cli));
}
