// A symbol that annihilates the first mode: tuning and the null column.

use qcbergman::bergman::BasisTable;
use qcbergman::operators::{assemble_k, operator_rule, spectral_diagnostics};
use qcbergman::symbols::example3::{inner_radius, step_profile_integral};
use qcbergman::symbols::{tune_example3, RadialSymbol};
use qcbergman::weights::Weight;

pub fn run() -> qcbergman::Result<()> {
    let r = inner_radius();
    println!(
        "R = {r:.12}, step-profile integral = {:.2e}",
        step_profile_integral(r)
    );
    let t = tune_example3()?;
    println!(
        "delta_a = {:.8}, delta = {}, delta_b = {:.8}, I = ({:.1e}, {:.1e})",
        t.params.delta_a, t.params.delta, t.params.delta_b, t.i_re, t.i_im
    );
    let symbol = RadialSymbol::example3(t.params)?;
    let w = Weight::standard(0.0)?;
    let basis = BasisTable::new(w, 2.0, 32)?;
    let a = assemble_k(
        &symbol,
        &basis,
        &operator_rule(&symbol, &w, 256, 1024)?,
        true,
    )?;
    let d = spectral_diagnostics(&a)?;
    println!(
        "column 1 norm = {:.2e}, sigma_min = {:.2e}",
        a.column_norm(1),
        d.sigma_min
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> qcbergman::Result<()> {
    run()
}
