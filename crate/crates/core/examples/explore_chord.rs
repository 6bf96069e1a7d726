//! Explores a horizontal chord from the boundary toward the centre until it
//! meets the cluster surrounding the centre, then prints the JSON export.

use loopsoup::cluster::ClusterSet;
use loopsoup::exploration::{explore_chord, Chord};
use loopsoup::loop_measure::{sample_loop_soup, SoupConfig};
use loopsoup::{Error, LatticeDomain, Site};

fn main() -> loopsoup::Result<()> {
    let domain = LatticeDomain::disk(48)?;
    let chord = Chord::toward(&domain, Site::ORIGIN);
    for seed in 1..20 {
        let sample = sample_loop_soup(&SoupConfig::new(domain, 1.0, seed))?;
        let clusters = ClusterSet::build(&sample.loops);
        match explore_chord(&sample, &clusters, Site::ORIGIN, &chord) {
            Ok(r) => {
                println!("seed {seed}: T = {:?} after {} absorbed clusters", r.t, r.absorbed.len());
                let json = r.to_json();
                println!("explored {} sites, remaining component {}", r.explored.len(), json["remaining_size"]);
                return Ok(());
            }
            Err(Error::NoSurroundingCluster) => println!("seed {seed}: centre not surrounded"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
