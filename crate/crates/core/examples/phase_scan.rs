//! Hookup fraction of boundary-touching loops across intensities.

use loopsoup::io::{phase_scan, DEFAULT_C_GRID};
use loopsoup::loop_measure::SoupConfig;
use loopsoup::LatticeDomain;

fn main() -> loopsoup::Result<()> {
    let base = SoupConfig::new(LatticeDomain::disk(48)?, 1.0, 11);
    let report = phase_scan(&base, &DEFAULT_C_GRID, 300, 20_000)?;
    println!("macroscopic means diameter >= {:.1}", report.diameter_floor);
    for row in &report.rows {
        println!(
            "c = {:.4}: {:>4}/{:<4} hooked, fraction {:.3} [{:.3}, {:.3}] from {} soups",
            row.c, row.hooked, row.clusters, row.fraction.estimate, row.fraction.ci_low, row.fraction.ci_high, row.soups
        );
    }
    if let Some(s) = &report.spearman {
        println!("Spearman rho {:.3}, one-sided p {:.4}", s.statistic, s.p_value);
    }
    println!("drop z {:?}", report.drop_z);
    Ok(())
}
