//! The rooted random-walk loop measure and Poisson loop-soups.

mod bridge;
mod distance;
mod measure;
mod soup;

pub use bridge::{sample_bridge, sample_free_bridge, RwLoop, DEFAULT_BRIDGE_BUDGET};
pub use distance::{hausdorff, soup_distance, BandScheme};
pub use measure::{
    return_probability, return_probability_exact, rooted_loop_mass, tail_mass, LengthTable,
};
pub use soup::{sample_loop_soup, sample_loop_soup_with, CellRecord, LoopSoupSample, SoupConfig};
