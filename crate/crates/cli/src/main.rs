use clap::Parser;
use goe_charpoly_cli::config::Cli;
use goe_charpoly_cli::EXIT_USAGE;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help and version requests are not errors
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(goe_charpoly_cli::run(&cli.command));
}
