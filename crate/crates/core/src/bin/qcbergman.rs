use clap::Parser;
use qcbergman::cli::{emit, error_exit_code, run, Cli, EXIT_NUMERICAL};

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli.command) {
        Ok(outcome) => match emit(&outcome, cli.command.common().out.as_ref()) {
            Ok(()) => outcome.exit_code(),
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                EXIT_NUMERICAL
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    };
    std::process::exit(code);
}
