//! A random-walk loop-soup laboratory on the square lattice.
//!
//! The crate samples Poisson ensembles of closed random walks (the discrete
//! Brownian loop-soup), groups them into clusters, extracts fillings and
//! outer boundaries, runs the chordal exploration of the cluster surrounding
//! a point, and measures restriction-type statistics of boundary-attached
//! ensembles. Every Monte Carlo routine is keyed by explicit seeds and is
//! independent of the number of worker threads.
//!
//! Start with [`loop_measure::sample_loop_soup`] and [`cluster::ClusterSet`];
//! the `examples/` directory has one runnable program per capability.

pub mod cluster;
pub mod error;
pub mod exploration;
pub mod io;
pub mod lattice;
pub mod loop_measure;
pub mod restriction;
pub mod rng;
pub mod site_set;
pub mod stats;
pub mod topology;

pub use error::{Error, Result};
pub use lattice::{BBox, DomainKind, LatticeDomain, Site};
pub use site_set::SiteSet;
