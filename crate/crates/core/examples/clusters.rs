//! Clusters, outermost clusters, fillings and outer contours of one soup.

use loopsoup::cluster::ClusterSet;
use loopsoup::loop_measure::{sample_loop_soup, SoupConfig};
use loopsoup::topology::{articulation_sites, boundary_touching_loops};
use loopsoup::LatticeDomain;

fn main() -> loopsoup::Result<()> {
    let cfg = SoupConfig::new(LatticeDomain::disk(48)?, 1.0, 7);
    let sample = sample_loop_soup(&cfg)?;
    let clusters = ClusterSet::build(&sample.loops);
    println!(
        "{} loops in {} clusters, {} outermost; largest cluster holds {:.1}% of occupied sites",
        sample.loops.len(),
        clusters.len(),
        clusters.outermost_clusters().len(),
        100.0 * clusters.largest_cluster_fraction()
    );

    let mut complete = clusters.complete_clusters(&sample.loops);
    complete.sort_by_key(|c| std::cmp::Reverse(c.filling.len()));
    for cc in complete.iter().take(5) {
        let touching = boundary_touching_loops(cc, &sample.loops);
        let cuts = articulation_sites(&cc.trace, Some(&cc.contour));
        println!(
            "cluster {:>4}: {:>3} loops, filling {:>5}, contour {:>4} edges, diameter {:>5.1}, {} boundary-touching loops, {} contour cut sites",
            cc.core,
            cc.members.len(),
            cc.filling.len(),
            cc.contour.len(),
            cc.diameter(),
            touching.len(),
            cuts.len()
        );
    }
    Ok(())
}
