use clap::Parser;

fn main() {
    let cli = remoteop::cli::Cli::parse();
    std::process::exit(remoteop::cli::run(cli));
}
