// Driving the command layer from code and reading the JSON report.

use qcbergman::cli::{run as run_command, Command, CommonArgs};

pub fn run() -> qcbergman::Result<()> {
    let args = CommonArgs {
        symbol: Some("stretch:1.05:0.5".into()),
        basis: 32,
        ..Default::default()
    };
    let outcome = run_command(&Command::Certify(args))?;
    println!("exit code {}", outcome.exit_code());
    println!(
        "{}",
        serde_json::to_string_pretty(&outcome.report.results["verdict"]).unwrap()
    );
    let outcome = run_command(&Command::Repro {
        example: 3,
        common: CommonArgs::default(),
    })?;
    println!("repro 3 reproduced: {:?}", outcome.report.passed);
    Ok(())
}

#[allow(dead_code)]
fn main() -> qcbergman::Result<()> {
    run()
}
