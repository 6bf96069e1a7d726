//! Cut points on the outer boundary: single encircling loops have them at
//! a positive rate, excursion ensembles almost never do.

use loopsoup::restriction::{cutpoint_contrast, ContrastConfig};

fn main() -> loopsoup::Result<()> {
    let cfg = ContrastConfig { radii: vec![16, 32, 48], replicas: 200, lambda: 2.2, seed: 5, max_tries: 10_000 };
    let report = cutpoint_contrast(&cfg)?;
    for r in &report.rows {
        println!(
            "R = {:>3}: loop {:.3} ({} draws), excursions {:.3} ({} draws), z = {:.2}",
            r.radius, r.loop_frequency.estimate, r.loop_draws, r.excursion_frequency.estimate, r.excursion_draws, r.z
        );
    }
    println!("excursion frequency non-increasing: {}", report.excursion_non_increasing);
    Ok(())
}
