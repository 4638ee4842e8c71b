// Bergman projection of a non-analytic field, kernel bounds and `d_LP`.

use num_complex::Complex64;
use qcbergman::bergman::BasisTable;
use qcbergman::dbar::{project, BiPolynomial};
use qcbergman::weights::Weight;

pub fn run() -> qcbergman::Result<()> {
    let w = Weight::standard(0.0)?;
    let basis = BasisTable::new(w, 2.0, 64)?;
    // z^3 z̄ projects onto (h_3/h_2) z^2
    let f = BiPolynomial::monomial(3, 1);
    let pf = project(&f, &basis)?;
    println!("P(z^3 conj z) = {} z^2", pf.coeff(2, 0));
    let k = basis.kernel_diag(Complex64::new(0.5, 0.0))?;
    println!("K(1/2, 1/2) = {:.6} (closed form 16/9)", k.k_zz);
    println!("beta_infty = {:.6}", basis.beta_infty()?);
    let lp = basis.d_lp()?;
    println!(
        "d_LP = {:.6}, g_(N-1) = {:.6}, g_(N/2) = {:.6}",
        lp.value, lp.g_last, lp.g_half
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> qcbergman::Result<()> {
    run()
}
