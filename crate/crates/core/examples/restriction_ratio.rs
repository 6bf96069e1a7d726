//! Ratio test of avoidance probabilities for two hulls under an
//! arc-attached excursion ensemble. The log-ratio does not depend on the
//! unknown lattice normalisation of the intensity.
//!
//! cargo run --release --example restriction_ratio -- [replicas]

use loopsoup::restriction::{choose_lambda, restriction_ratio_test, AvoidanceLaw, Chart, ExcursionLaw, Hull};
use loopsoup::LatticeDomain;

fn main() -> loopsoup::Result<()> {
    let replicas: u64 = std::env::args().nth(1).map_or(2000, |v| v.parse().expect("replicas"));
    let radius = 64;
    let domain = LatticeDomain::disk(radius)?;
    let chart = Chart::Disk { radius, sigma: 6.0 };
    let first = Hull::new(-2.0, 1.0, chart)?;
    let second = Hull::new(-4.0, 1.0, chart)?;
    let law = ExcursionLaw::lower_half(domain, 1.0)?;

    let lambda = choose_lambda(&law, &first, 0.12, 500, 1)?;
    println!("lambda = {lambda:.2}, {} hull sites and {}", first.sites(&domain).len(), second.sites(&domain).len());
    let r = restriction_ratio_test(&AvoidanceLaw::Excursions(law.with_lambda(lambda)), &first, &second, replicas, 2)?;
    println!(
        "avoidance {:.4} and {:.4}; log-ratio {:.4} ± {:.4} vs {:.4}; z = {:.2}",
        r.first.avoidance.estimate, r.second.avoidance.estimate, r.observed, r.std_error, r.predicted, r.z
    );
    Ok(())
}
