use clap::Parser;

fn main() {
    let cli = formreg_cli::Cli::parse();
    std::process::exit(formreg_cli::run(cli));
}
