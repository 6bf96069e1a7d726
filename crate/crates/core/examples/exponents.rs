//! The c, κ, α correspondence and the half-disk hull maps.

use loopsoup::restriction::{ExponentTriple, HullMap};

fn main() -> loopsoup::Result<()> {
    println!("{:>8} {:>8} {:>8}", "kappa", "c", "alpha");
    for kappa in [2.7, 3.0, 3.2, 3.6, 4.0] {
        let t = ExponentTriple::from_kappa(kappa)?;
        println!("{:>8.4} {:>8.4} {:>8.4}", t.kappa, t.c, t.alpha);
    }
    let t = ExponentTriple::from_c(14.0 / 15.0)?;
    println!("c = 14/15 gives kappa {:.6}, alpha {:.6}", t.kappa, t.alpha);

    let a = HullMap::new(-2.0, 1.0)?;
    let b = HullMap::new(-4.0, 1.0)?;
    let (da, db) = (a.derivative_at_origin(), b.derivative_at_origin());
    println!("phi'(0): {da} and {db}; log ratio {:.5}", da.ln() / db.ln());
    Ok(())
}
