//! After an exploration the unexplored region should still carry a soup of
//! the same intensity. Compares length-2 loop counts there with c/8.

use loopsoup::exploration::markov_consistency;
use loopsoup::loop_measure::SoupConfig;
use loopsoup::LatticeDomain;

fn main() -> loopsoup::Result<()> {
    let cfg = SoupConfig::new(LatticeDomain::disk(48)?, 1.0, 3).with_cutoff(2);
    let r = markov_consistency(&cfg, 200, 3)?;
    println!(
        "{} explorations ({} without a surrounding cluster), {} deep cells, {} loops",
        r.explorations, r.skipped, r.cells, r.loops
    );
    println!("mean {:.5} ± {:.5}, expected {:.5}, z = {:.2}", r.mean.estimate, r.mean.std_error, r.expected, r.z);
    Ok(())
}
