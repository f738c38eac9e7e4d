use clap::Parser;
use protocol_lab::cli::Cli;
use protocol_lab::commands::run;

fn main() {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    if let Err(e) = run(cli, &mut lock) {
        drop(lock);
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
