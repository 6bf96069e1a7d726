//! Draws one loop-soup in a disk and summarises it.
//!
//! cargo run --release --example sample_soup -- [radius] [c] [seed]

use loopsoup::loop_measure::{sample_loop_soup, SoupConfig};
use loopsoup::LatticeDomain;
use std::collections::BTreeMap;

fn main() -> loopsoup::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let radius: u32 = args.first().map_or(32, |v| v.parse().expect("radius"));
    let c: f64 = args.get(1).map_or(1.0, |v| v.parse().expect("c"));
    let seed: u64 = args.get(2).map_or(1, |v| v.parse().expect("seed"));

    let cfg = SoupConfig::new(LatticeDomain::disk(radius)?, c, seed);
    let sample = sample_loop_soup(&cfg)?;

    let mut by_len: BTreeMap<usize, usize> = BTreeMap::new();
    for l in &sample.loops {
        *by_len.entry(l.len()).or_default() += 1;
    }
    println!("{} loops, truncation tail mass {:.2e}", sample.loops.len(), sample.truncation_tail_mass);
    for (len, n) in by_len.iter().take(8) {
        println!("  length {len:>4}: {n}");
    }
    let longest = sample.loops.iter().map(|l| l.len()).max().unwrap_or(0);
    println!("longest loop {longest}");
    Ok(())
}
