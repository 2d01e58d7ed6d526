//! Serves a built-in dispatching-rule combo over the line protocol on
//! stdin/stdout. Usage: `jsspt-rule-policy <OP+AGV>`.

use std::io::{self, BufWriter};

use jsspt_core::protocol::serve_combo;
use jsspt_core::rules::RuleRegistry;

fn main() {
    let Some(id) = std::env::args().nth(1) else {
        eprintln!("usage: jsspt-rule-policy <OP+AGV>");
        std::process::exit(2);
    };
    let combo = match RuleRegistry::default().combo(&id) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    };
    let stdin = io::stdin();
    let stdout = io::stdout();
    if let Err(e) = serve_combo(&combo, stdin.lock(), BufWriter::new(stdout.lock())) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
