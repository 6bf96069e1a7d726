//! Restriction exponents, half-disk hull maps, Poisson excursion ensembles
//! and the avoidance-probability tests built on them.

mod cutpoints;
mod excursions;
mod exponents;
mod hull;

pub use cutpoints::{cutpoint_contrast, loop_has_cut_point, sample_encircling_loop, ContrastConfig, ContrastReport, ContrastRow, EncirclingLoopSampler};
pub use excursions::{
    avoidance_probability, calibrate_lambda, choose_lambda, restriction_ratio_test, sample_excursions, Arc,
    AvoidanceLaw, CalibrationReport, ExcursionEnsemble, ExcursionLaw, RatioTestReport, RestrictionEstimate,
};
pub use exponents::{alpha_of_kappa, c_of_kappa, kappa_of_c, ExponentTriple};
pub use hull::{Chart, Hull, HullMap};
