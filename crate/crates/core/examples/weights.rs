// Radial weights, their moments and the boundary fields `τ`, `R`.

use qcbergman::weights::Weight;

pub fn run() -> qcbergman::Result<()> {
    for w in [
        Weight::standard(0.0)?,
        Weight::standard(2.5)?,
        Weight::exponential(1.0, 1.0)?,
    ] {
        let h = w.moments(2.0, 6)?;
        println!("{w}: class {:?}", w.class());
        println!(
            "  h_0..h_5 = {:?}",
            h.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>()
        );
        for r in [0.0, 0.5, 0.9, 0.99] {
            println!(
                "  r={r:<5} omega={:.6e} log_omega={:.6} tau={:?}",
                w.omega(r),
                w.log_omega(r),
                w.tau(r)
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> qcbergman::Result<()> {
    run()
}
