use clap::Parser;
use jsspt_cli::{run, Cli};

fn main() {
    match run(Cli::parse()) {
        Ok(text) => println!("{}", text.trim_end()),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            std::process::exit(e.exit_code());
        }
    }
}
