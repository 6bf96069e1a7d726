//! Fits the excursion intensity that reproduces a target exponent at a
//! reference hull.

use loopsoup::restriction::{calibrate_lambda, Chart, ExcursionLaw, Hull};
use loopsoup::LatticeDomain;

fn main() -> loopsoup::Result<()> {
    let radius = 64;
    let law = ExcursionLaw::lower_half(LatticeDomain::disk(radius)?, 20.0)?;
    let reference = Hull::new(-2.0, 1.0, Chart::Disk { radius, sigma: 6.0 })?;
    for alpha in [0.25, 1.0 / 3.0, 0.625] {
        let cal = calibrate_lambda(&law, &reference, alpha, 500, 3)?;
        println!(
            "alpha {alpha:.4}: lambda* = {:.3} [{:.3}, {:.3}] (pilot avoidance {:.3})",
            cal.lambda_star, cal.lambda_ci[0], cal.lambda_ci[1], cal.pilot.avoidance.estimate
        );
    }
    Ok(())
}
