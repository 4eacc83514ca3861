mod commands;
mod config;

use clap::Parser;

fn main() {
    let cli = config::Cli::parse();
    match commands::run(&cli.command) {
        Ok(sidecar) => eprintln!("wrote {}", sidecar.display()),
        Err(e) => {
            eprintln!("fht {}: {e}", cli.command.name());
            std::process::exit(e.exit_code());
        }
    }
}
