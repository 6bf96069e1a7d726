use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bridge::{try_bridge_in, RwLoop};
use super::measure::{tail_mass, LengthTable};
use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, Site};
use crate::rng::{site_word, stream, Tag};

/// Parameters of a random-walk loop-soup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoupConfig {
    pub domain: LatticeDomain,
    /// Intensity multiplier on the loop measure.
    pub c: f64,
    /// Shortest loop length kept.
    pub cutoff: u32,
    /// Longest loop length sampled.
    pub n_max: u32,
    pub seed: u64,
}

impl SoupConfig {
    pub const DEFAULT_CUTOFF: u32 = 4;

    /// Default cutoff 4 and length cap 2·scale².
    pub fn new(domain: LatticeDomain, c: f64, seed: u64) -> Self {
        let s = domain.scale();
        let n_max = 2 * s * s;
        SoupConfig { domain, c, cutoff: Self::DEFAULT_CUTOFF, n_max, seed }
    }

    pub fn with_cutoff(mut self, cutoff: u32) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_n_max(mut self, n_max: u32) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.c.is_finite() || self.c < 0.0 {
            return Err(Error::InvalidParameter(format!("intensity c = {} must be >= 0", self.c)));
        }
        if self.cutoff < 2 || !self.cutoff.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "cutoff {} must be an even integer >= 2",
                self.cutoff
            )));
        }
        if self.n_max < self.cutoff || !self.n_max.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "n_max {} must be even and >= cutoff {}",
                self.n_max, self.cutoff
            )));
        }
        Ok(())
    }

    pub fn length_table(&self) -> Result<LengthTable> {
        LengthTable::new(self.cutoff, self.n_max)
    }
}

/// Draw and acceptance counts of one (root site, length) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRecord {
    pub root: Site,
    pub length: u32,
    /// Loops proposed from the free (unrestricted) Poisson count.
    pub drawn: u32,
    /// Proposals that stayed inside the domain.
    pub accepted: u32,
}

/// One realisation of the loop-soup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopSoupSample {
    pub config: SoupConfig,
    /// Rooted mass per site, times c, lost by capping lengths at n_max.
    pub truncation_tail_mass: f64,
    pub loops: Vec<RwLoop>,
    /// Non-empty cells only, in root-site order; not serialised.
    #[serde(skip)]
    pub cells: Vec<CellRecord>,
}

impl LoopSoupSample {
    /// A sample built from explicit loops, used for hand-made configurations.
    pub fn from_loops(config: SoupConfig, loops: Vec<RwLoop>) -> Self {
        LoopSoupSample { config, truncation_tail_mass: 0.0, loops, cells: Vec::new() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sample serialises")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

fn sample_site(
    config: &SoupConfig,
    table: &LengthTable,
    poisson: Option<&Poisson<f64>>,
    root: Site,
) -> (Vec<RwLoop>, Vec<CellRecord>) {
    let Some(poisson) = poisson else {
        return (Vec::new(), Vec::new());
    };
    let mut rng = stream(config.seed, Tag::SoupSite, site_word(root.x, root.y), 0, 0);
    let count = poisson.sample(&mut rng) as usize;
    if count == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut lengths: Vec<u32> = (0..count).map(|_| table.sample(&mut rng)).collect();
    lengths.sort_unstable();
    let mut loops = Vec::new();
    let mut cells: Vec<CellRecord> = Vec::new();
    for len in lengths {
        let accepted = match try_bridge_in(root, len, &config.domain, &mut rng) {
            Some(l) => {
                loops.push(l);
                1
            }
            None => 0,
        };
        match cells.last_mut() {
            Some(c) if c.length == len => {
                c.drawn += 1;
                c.accepted += accepted;
            }
            _ => cells.push(CellRecord { root, length: len, drawn: 1, accepted }),
        }
    }
    (loops, cells)
}

/// Samples the soup with a precomputed length table (see [`SoupConfig::length_table`]).
///
/// Each root site draws a Poisson number of rooted loops with mean
/// c · Σ p(len)/len over the length range, splits it over lengths with the
/// table, and keeps the bridges that stay in the domain. Splitting one
/// Poisson count by lengths yields independent Poisson counts per
/// (site, length) cell, and discarding exiting bridges thins each cell to
/// the domain-restricted mean.
pub fn sample_loop_soup_with(config: &SoupConfig, table: &LengthTable) -> Result<LoopSoupSample> {
    config.validate()?;
    let mean = config.c * table.total_mass();
    let poisson = if mean > 0.0 {
        Some(Poisson::new(mean).map_err(|e| Error::InvalidParameter(e.to_string()))?)
    } else {
        None
    };
    let roots: Vec<Site> = config.domain.sites().collect();
    let per_site: Vec<(Vec<RwLoop>, Vec<CellRecord>)> = roots
        .par_iter()
        .map(|&root| sample_site(config, table, poisson.as_ref(), root))
        .collect();
    let mut loops = Vec::new();
    let mut cells = Vec::new();
    for (l, c) in per_site {
        loops.extend(l);
        cells.extend(c);
    }
    Ok(LoopSoupSample {
        config: config.clone(),
        truncation_tail_mass: config.c * tail_mass(config.n_max),
        loops,
        cells,
    })
}

pub fn sample_loop_soup(config: &SoupConfig) -> Result<LoopSoupSample> {
    config.validate()?;
    sample_loop_soup_with(config, &config.length_table()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_intensity_is_empty() {
        let cfg = SoupConfig::new(LatticeDomain::disk(16).unwrap(), 0.0, 1);
        let s = sample_loop_soup(&cfg).unwrap();
        assert!(s.loops.is_empty());
        assert!(s.cells.is_empty());
        assert_eq!(s.truncation_tail_mass, 0.0);
    }

    #[test]
    fn validation() {
        let d = LatticeDomain::disk(16).unwrap();
        assert!(sample_loop_soup(&SoupConfig::new(d, -1.0, 1)).is_err());
        assert!(sample_loop_soup(&SoupConfig::new(d, 1.0, 1).with_cutoff(3)).is_err());
        assert!(sample_loop_soup(&SoupConfig::new(d, 1.0, 1).with_n_max(2)).is_err());
        assert!(sample_loop_soup(&SoupConfig::new(d, f64::NAN, 1)).is_err());
    }

    #[test]
    fn loops_respect_domain_and_lengths() {
        let d = LatticeDomain::disk(16).unwrap();
        let cfg = SoupConfig::new(d, 2.0, 5).with_cutoff(2).with_n_max(200);
        let s = sample_loop_soup(&cfg).unwrap();
        assert!(!s.loops.is_empty());
        for l in &s.loops {
            assert!(l.sites().iter().all(|&x| d.contains(x)));
            assert!((2..=200).contains(&(l.len() as u32)));
        }
        let accepted: u32 = s.cells.iter().map(|c| c.accepted).sum();
        assert_eq!(accepted as usize, s.loops.len());
        assert!(s.truncation_tail_mass > 0.0);
    }

    #[test]
    fn identical_configs_give_identical_samples() {
        let cfg = SoupConfig::new(LatticeDomain::disk(20).unwrap(), 1.0, 42);
        let a = sample_loop_soup(&cfg).unwrap();
        let b = sample_loop_soup(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = sample_loop_soup(&cfg.clone().with_seed(43)).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let cfg = SoupConfig::new(LatticeDomain::half_plane_box(12, 8).unwrap(), 1.0, 3);
        let a = sample_loop_soup(&cfg).unwrap();
        let text = a.to_json();
        let back = LoopSoupSample::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.loops, a.loops);
    }
}
