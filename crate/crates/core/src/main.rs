use clap::Parser;

fn main() -> std::process::ExitCode {
    g2flow::cli::main_with(g2flow::cli::Cli::parse())
}
