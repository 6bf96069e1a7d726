//! Probability that the cluster around the centre reaches a small disk at
//! the boundary, and its power-law fit in ε.

use loopsoup::exploration::{estimate_pinning_scaling, sample_pinned_cluster};
use loopsoup::loop_measure::SoupConfig;
use loopsoup::{LatticeDomain, Site};

fn main() -> loopsoup::Result<()> {
    let domain = LatticeDomain::disk(24)?;
    let cfg = SoupConfig::new(domain, 1.0, 21);
    let pin = domain.right_boundary_point();

    let pinned = sample_pinned_cluster(&cfg, Site::ORIGIN, pin, 4, 10_000)?;
    println!(
        "pinned cluster: {} loops, filling {}, after {} tries ({} surrounded)",
        pinned.cluster.members.len(),
        pinned.cluster.filling.len(),
        pinned.tries,
        pinned.surrounded
    );

    let report = estimate_pinning_scaling(&cfg, Site::ORIGIN, pin, &[2, 4, 8], 300)?;
    for (eps, u) in report.eps.iter().zip(&report.u) {
        println!("u({eps}) = {:.3} [{:.3}, {:.3}]", u.estimate, u.ci_low, u.ci_high);
    }
    println!("beta = {:.3} ± {:.3}", report.beta, report.beta_se);
    Ok(())
}
