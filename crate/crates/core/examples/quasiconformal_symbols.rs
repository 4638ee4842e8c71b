// Builder symbols: parse, validate and inspect the Beltrami coefficient.

use num_complex::Complex64;
use qcbergman::symbols::{beltrami, parse_symbol, validate};

pub fn run() -> qcbergman::Result<()> {
    for spec in ["id", "mobius:0.3,0.1", "twist:poly:2", "stretch:1.5:0.5"] {
        let s = parse_symbol(spec)?;
        let rep = validate(s.as_ref(), 32)?;
        let z = Complex64::new(0.2, 0.1);
        println!(
            "{spec:<16} sup|mu|={:.4} min J={:.4} inverse err={:.1e} fd err={:.1e} mu(0.2+0.1i)={:.4}",
            rep.sup_mu,
            rep.min_jacobian,
            rep.max_inverse_error,
            rep.max_fd_discrepancy,
            beltrami(s.as_ref(), z)?.norm()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> qcbergman::Result<()> {
    run()
}
