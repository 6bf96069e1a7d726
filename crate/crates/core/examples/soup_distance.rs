//! The d* distance between soups, comparing two seeds and a soup with a
//! thinned copy of itself.

use loopsoup::loop_measure::{sample_loop_soup, soup_distance, BandScheme, SoupConfig};
use loopsoup::LatticeDomain;

fn main() -> loopsoup::Result<()> {
    let domain = LatticeDomain::disk(24)?;
    let a = sample_loop_soup(&SoupConfig::new(domain, 1.0, 1))?;
    let b = sample_loop_soup(&SoupConfig::new(domain, 1.0, 2))?;
    let bands = BandScheme { reference: 48.0 };
    let thinned: Vec<_> = a.loops.iter().filter(|l| l.len() > 4).cloned().collect();
    println!("d*(seed 1, seed 2) = {:.4}", soup_distance(&a.loops, &b.loops, 8.0, bands));
    println!("d*(soup, soup without length-4 loops) = {:.4}", soup_distance(&a.loops, &thinned, 8.0, bands));
    println!("d*(soup, itself) = {:.4}", soup_distance(&a.loops, &a.loops, 8.0, bands));
    Ok(())
}
