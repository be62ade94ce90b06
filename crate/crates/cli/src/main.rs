use clap::Parser;

fn main() {
    let cli = mofqnlp_cli::Cli::parse();
    if let Err(e) = mofqnlp_cli::execute(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
