use clap::Parser;

use padlift::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let outcome = run(&cli);
    let mut text = outcome.rendered;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    if outcome.exit_code == 1 {
        eprint!("{text}");
    } else if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("cannot write {}: {e}", path.display());
            std::process::exit(1);
        }
    } else {
        print!("{text}");
    }
    std::process::exit(outcome.exit_code);
}
