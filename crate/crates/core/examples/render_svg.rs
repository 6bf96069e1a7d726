//! Renders a soup with fillings, loops and contours to `soup.svg`.

use loopsoup::io::{render_svg, Layer, RenderSpec};
use loopsoup::loop_measure::{sample_loop_soup, SoupConfig};
use loopsoup::LatticeDomain;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "soup.svg".into());
    let sample = sample_loop_soup(&SoupConfig::new(LatticeDomain::disk(32)?, 1.0, 4))?;
    let spec = RenderSpec {
        layers: vec![Layer::Fillings, Layer::BoundaryTouching, Layer::Interior, Layer::Contours],
        ..RenderSpec::default()
    };
    let svg = render_svg(&sample, &spec, Some("disk:32 c=1 seed=4"));
    std::fs::write(&path, svg)?;
    println!("wrote {path}");
    Ok(())
}
