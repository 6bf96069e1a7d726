//! Rejection sampling of the near-gluing event in a half-plane box.

use loopsoup::exploration::{near_glued, sample_glued_near, GlueGeometry};
use loopsoup::loop_measure::SoupConfig;
use loopsoup::{LatticeDomain, Site};

fn main() -> loopsoup::Result<()> {
    let cfg = SoupConfig::new(LatticeDomain::half_plane_box(24, 16)?, 1.0, 9);
    let geometry = GlueGeometry { unit: 6, delta: 3, eps: 2 };
    let p = sample_glued_near(&cfg, geometry, 20_000)?;
    println!(
        "accepted after {} tries (acceptance {:.4}); contour {} edges, replay ok = {}",
        p.tries,
        p.acceptance_rate(),
        p.cluster.contour.len(),
        near_glued(&p.cluster.contour, Site::ORIGIN, geometry)
    );
    Ok(())
}
