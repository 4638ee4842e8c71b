// The left inverse `M` of `∂̄` and the estimate of its norm.

use qcbergman::bergman::BasisTable;
use qcbergman::dbar::{complement, dbar_apply, estimate_d_m, m_apply, BiPolynomial};
use qcbergman::weights::Weight;

pub fn run() -> qcbergman::Result<()> {
    for w in [Weight::standard(0.0)?, Weight::exponential(1.0, 1.0)?] {
        let basis = BasisTable::new(w, 2.0, 16)?;
        let f = BiPolynomial::monomial(4, 2);
        let lhs = m_apply(&dbar_apply(&f), &basis)?;
        let rhs = complement(&f, &basis)?;
        println!(
            "{w}: |M dbar f - (f - P f)| = {:.2e}",
            lhs.max_abs_diff(&rhs)
        );
        for d in [6, 10] {
            let est = estimate_d_m(&w, d)?;
            println!("  d_M >= {:.6} at bidegree {d}", est.estimate.value);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> qcbergman::Result<()> {
    run()
}
