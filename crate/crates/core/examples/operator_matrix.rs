// Truncated matrix of `K_φ`, its spectrum and the composition norm bound.

use qcbergman::bergman::BasisTable;
use qcbergman::operators::{assemble_k, c_phi_norm_bound, operator_rule, spectral_diagnostics};
use qcbergman::symbols::parse_symbol;
use qcbergman::weights::Weight;

pub fn run() -> qcbergman::Result<()> {
    let w = Weight::standard(0.0)?;
    for spec in ["twist:poly:1.5", "stretch:1.2:0.5", "mobius:0.3,0"] {
        let s = parse_symbol(spec)?;
        let rule = operator_rule(s.as_ref(), &w, 256, 1024)?;
        let nb = c_phi_norm_bound(s.as_ref(), &w, 2.0, &rule)?;
        for n in [16, 32] {
            let basis = BasisTable::new(w, 2.0, n)?;
            let a = assemble_k(s.as_ref(), &basis, &rule, true)?;
            let d = spectral_diagnostics(&a)?;
            println!(
                "{spec:<16} N={n:<3} sigma=[{:.4e}, {:.4}] off-diagonal={:.2e} |C_phi|<={:.4}",
                d.sigma_min,
                d.sigma_max,
                a.off_diagonal_mass(),
                nb.norm_upper
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> qcbergman::Result<()> {
    run()
}
