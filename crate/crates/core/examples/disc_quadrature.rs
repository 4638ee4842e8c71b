// Tensor Gauss–Legendre × trapezoid rules on the disc.

use num_complex::Complex64;
use qcbergman::quadrature::QuadratureRule;

pub fn run() -> qcbergman::Result<()> {
    let rule = QuadratureRule::gauss_legendre(64, 128)?;
    // ∫|z|^4 dA = 1/3 for the normalized area measure
    let v = rule.integrate_disc(|z| Complex64::new(z.norm_sqr().powi(2), 0.0))?;
    println!("integral of |z|^4 = {:.15} (exact 1/3)", v.re);
    let graded = QuadratureRule::graded(128, 64, 8, &[0.5])?;
    let w = graded.integrate_radial(|r| 2.0 * r * (-1.0 / (1.0 - r * r)).exp());
    println!(
        "graded rule: {} radial nodes, integral of exp(-1/(1-r^2)) dA = {w:.12}",
        graded.n_r()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> qcbergman::Result<()> {
    run()
}
