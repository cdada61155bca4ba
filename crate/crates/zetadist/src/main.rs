use std::process::ExitCode;

use clap::Parser;
use zetadist::commands::execute;
use zetadist::config::Cli;
use zetadist::io::write_outputs;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = cli.command.name();
    let (settings, outcome) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("zetadist {name}: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = write_outputs(&settings.out, &outcome.files) {
        eprintln!("zetadist {name}: writing {}: {e}", settings.out.display());
        return ExitCode::from(1);
    }
    println!("{name}: {}", outcome.summary);
    for (f, _) in &outcome.files {
        println!("  wrote {}", settings.out.join(f).display());
    }
    if outcome.invariants_ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("zetadist {name}: asserted invariants failed");
        ExitCode::from(2)
    }
}
