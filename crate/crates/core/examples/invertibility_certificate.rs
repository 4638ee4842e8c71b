// Constants ledger and the two sufficient invertibility checks.

use qcbergman::certificates::{
    build_ledger, check_conformal_core, check_dilatation, check_example_thresholds, ExampleFamily,
    LedgerOptions, MarginGrid,
};
use qcbergman::weights::Weight;

pub fn run() -> qcbergman::Result<()> {
    let w = Weight::standard(0.0)?;
    let opts = LedgerOptions::default();
    for family in [
        ExampleFamily::Twist { c: 0.5 },
        ExampleFamily::Twist { c: 2.0 },
        ExampleFamily::Stretch {
            exponent: 1.1,
            radius: 0.5,
        },
        ExampleFamily::Stretch {
            exponent: 3.0,
            radius: 0.5,
        },
    ] {
        let s = family.symbol()?;
        let ledger = build_ledger(&s, &w, &opts)?;
        let general = check_dilatation(&s, &w, &ledger, &MarginGrid::for_symbol(&s))?;
        let threshold = check_example_thresholds(family, &w, &ledger)?;
        let core = check_conformal_core(&s, &w, 2.0, &ledger)?;
        println!(
            "{family:?}: dilatation {:?}, threshold {:?}, conformal core {:?}",
            general.verdict, threshold.verdict, core.verdict
        );
    }
    println!(
        "ledger format:\n{}",
        build_ledger(&qcbergman::symbols::Identity, &w, &opts)?.to_json()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> qcbergman::Result<()> {
    run()
}
