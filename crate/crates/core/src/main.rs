use clap::Parser;

fn main() {
    let cli = fwcodes::cli::Cli::parse();
    std::process::exit(fwcodes::cli::main_with(cli));
}
