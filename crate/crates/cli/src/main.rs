use bellrep_cli::{emit, run, Cli};
use clap::Parser;

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| {
        emit(&outcome, cli.output.out.as_ref())?;
        Ok(outcome.checks_passed)
    });
    match result {
        Ok(true) => {}
        Ok(false) => {
            eprintln!("bellrep: one or more checks failed");
            std::process::exit(3);
        }
        Err(e) => {
            eprintln!("bellrep: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
