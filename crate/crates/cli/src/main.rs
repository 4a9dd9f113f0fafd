use clap::Parser;

fn main() {
    let cli = finitopos_cli::Cli::parse();
    let outcome = finitopos_cli::run(
        &cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(outcome.status);
}
