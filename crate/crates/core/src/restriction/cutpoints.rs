use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, Site};
use crate::loop_measure::{return_probability, sample_free_bridge, RwLoop};
use crate::restriction::excursions::{sample_excursions, ExcursionLaw};
use crate::rng::{stream, stream_seed, StreamRng, Tag};
use crate::site_set::SiteSet;
use crate::stats::{difference_z, wilson_interval, EstimatorReport};
use crate::topology::{encircles, point_cut_sites};

/// Exact sampler for the loop measure restricted to loops of length in
/// `[min_len, max_len]` that stay in the domain and encircle `point`.
///
/// A loop of length L rooted at x can only encircle `point` if the L¹
/// distance from x to it is at most L/2, so (L, x) is drawn with weight
/// p_L / L over those pairs, a free bridge is attached and the draw is
/// rejected unless it stays in the domain and encircles the point.
#[derive(Debug, Clone)]
pub struct EncirclingLoopSampler {
    domain: LatticeDomain,
    point: Site,
    /// Domain sites sorted by L¹ distance to `point`.
    roots: Vec<Site>,
    lengths: Vec<u32>,
    cdf: Vec<f64>,
    /// Number of usable roots per length.
    reach: Vec<usize>,
}

impl EncirclingLoopSampler {
    pub fn new(domain: LatticeDomain, point: Site, min_len: u32, max_len: u32) -> Result<Self> {
        if !domain.contains(point) {
            return Err(Error::SiteOutsideDomain(point));
        }
        let min_len = min_len.max(8).next_multiple_of(2);
        if max_len < min_len {
            return Err(Error::InvalidParameter(format!("max_len {max_len} < min_len {min_len}")));
        }
        let l1 = |s: &Site| (s.x - point.x).unsigned_abs() + (s.y - point.y).unsigned_abs();
        let mut roots: Vec<Site> = domain.sites().collect();
        roots.sort_by_key(|s| (l1(s), *s));
        let mut lengths = Vec::new();
        let mut cdf = Vec::new();
        let mut reach = Vec::new();
        let mut total = 0.0;
        let mut k = 0;
        for len in (min_len..=max_len).step_by(2) {
            while k < roots.len() && l1(&roots[k]) <= len / 2 {
                k += 1;
            }
            total += return_probability(len)? / len as f64 * k as f64;
            lengths.push(len);
            cdf.push(total);
            reach.push(k);
        }
        Ok(EncirclingLoopSampler { domain, point, roots, lengths, cdf, reach })
    }

    pub fn point(&self) -> Site {
        self.point
    }

    /// Draws until acceptance; returns the loop and the number of draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, max_tries: u64) -> Result<(RwLoop, u64)> {
        let total = *self.cdf.last().unwrap();
        for t in 1..=max_tries {
            let u = rng.gen::<f64>() * total;
            let i = self.cdf.partition_point(|&c| c <= u).min(self.lengths.len() - 1);
            let root = self.roots[rng.gen_range(0..self.reach[i])];
            let l = sample_free_bridge(root, self.lengths[i], rng)?;
            if l.sites().iter().all(|&s| self.domain.contains(s)) && encircles(&l.trace(), self.point) {
                return Ok((l, t));
            }
        }
        Err(Error::ConditioningFailure { tries: max_tries })
    }
}

/// One loop of the measure conditioned as in [`EncirclingLoopSampler`].
pub fn sample_encircling_loop(
    domain: LatticeDomain,
    point: Site,
    min_len: u32,
    max_len: u32,
    rng: &mut StreamRng,
    max_tries: u64,
) -> Result<RwLoop> {
    EncirclingLoopSampler::new(domain, point, min_len, max_len)?.sample(rng, max_tries).map(|(l, _)| l)
}

/// Whether some site of the loop separates `point` from infinity.
pub fn loop_has_cut_point(l: &RwLoop, point: Site) -> bool {
    !point_cut_sites(&l.trace(), point, None).is_empty()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastConfig {
    pub radii: Vec<u32>,
    pub replicas: u64,
    /// Excursion intensity per arc site.
    pub lambda: f64,
    pub seed: u64,
    /// Draws allowed per accepted replica.
    pub max_tries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastRow {
    pub radius: u32,
    pub loop_frequency: EstimatorReport,
    pub excursion_frequency: EstimatorReport,
    pub loop_draws: u64,
    pub excursion_draws: u64,
    /// z of loop minus excursion frequency.
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastReport {
    pub config: ContrastConfig,
    pub rows: Vec<ContrastRow>,
    /// No later radius has an excursion interval entirely above an earlier one.
    pub excursion_non_increasing: bool,
}

impl ContrastReport {
    pub fn z_at_largest(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.z)
    }
}

fn loop_frequency(config: &ContrastConfig, radius: u32) -> Result<(u64, u64)> {
    let domain = LatticeDomain::disk(radius)?;
    let min_len = (radius / 4).pow(2);
    let max_len = 2 * radius * radius;
    let sampler = EncirclingLoopSampler::new(domain, Site::ORIGIN, min_len, max_len)?;
    let out = (0..config.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(config.seed, Tag::SingleLoop, radius as u64, r, 0);
            let (l, tries) = sampler.sample(&mut rng, config.max_tries)?;
            Ok((loop_has_cut_point(&l, Site::ORIGIN) as u64, tries))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(out.iter().fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1)))
}

/// Excursion ensemble in the R × R half-plane box attached to the whole
/// bottom edge, conditioned to encircle (0, R/4) together with the edge;
/// a replica counts when some edge site separates the point from infinity.
fn excursion_frequency(config: &ContrastConfig, radius: u32) -> Result<(u64, u64)> {
    let domain = LatticeDomain::half_plane_box(radius, radius)?;
    let law = ExcursionLaw::full_arc(domain, config.lambda)?;
    let point = Site::new(0, (radius / 4) as i32);
    let edge: SiteSet = law.arc.sites(&law.domain).into_iter().collect();
    let out = (0..config.replicas)
        .into_par_iter()
        .map(|r| {
            let seed = stream_seed(config.seed, Tag::Replica, radius as u64, r, 0);
            for t in 0..config.max_tries {
                let e = sample_excursions(&law, seed, t);
                let set: SiteSet = e.sites().chain(edge.iter()).collect();
                if encircles(&set, point) {
                    let cut = !point_cut_sites(&set, point, Some(&edge)).is_empty();
                    return Ok((cut as u64, t + 1));
                }
            }
            Err(Error::ConditioningFailure { tries: config.max_tries })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(out.iter().fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1)))
}

/// Compares how often a single loop and an excursion ensemble, each
/// conditioned to encircle a marked point, have a cut point separating it
/// from infinity, across a grid of radii.
pub fn cutpoint_contrast(config: &ContrastConfig) -> Result<ContrastReport> {
    if config.radii.is_empty() || config.radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("radii must be nonempty and increasing".into()));
    }
    if config.replicas == 0 || config.max_tries == 0 {
        return Err(Error::InvalidParameter("replicas and max_tries must be >= 1".into()));
    }
    let mut rows = Vec::new();
    for &radius in &config.radii {
        let (ex_hits, excursion_draws) = excursion_frequency(config, radius)?;
        let (loop_hits, loop_draws) = loop_frequency(config, radius)?;
        let seeds = [config.seed, radius as u64];
        let loop_frequency = wilson_interval(loop_hits, config.replicas, 0.95).with_seeds(&seeds);
        let excursion_frequency = wilson_interval(ex_hits, config.replicas, 0.95).with_seeds(&seeds);
        let z = difference_z(&loop_frequency, &excursion_frequency);
        rows.push(ContrastRow { radius, loop_frequency, excursion_frequency, loop_draws, excursion_draws, z });
    }
    let excursion_non_increasing = rows.iter().enumerate().all(|(j, later)| {
        rows[..j].iter().all(|earlier| later.excursion_frequency.ci_low <= earlier.excursion_frequency.ci_high)
    });
    Ok(ContrastReport { config: config.clone(), rows, excursion_non_increasing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_loop_has_no_cut_point() {
        let sq = RwLoop::new(vec![Site::new(0, 0), Site::new(1, 0), Site::new(1, 1), Site::new(0, 1)]).unwrap();
        assert!(!loop_has_cut_point(&sq, Site::ORIGIN));
        assert!(!loop_has_cut_point(&sq, Site::new(5, 5)));
    }

    #[test]
    fn diamond_ring_has_cut_points() {
        // the 8-site ring around the origin: every site is a cut site
        let ring = RwLoop::new(vec![
            Site::new(1, 0),
            Site::new(1, 1),
            Site::new(0, 1),
            Site::new(-1, 1),
            Site::new(-1, 0),
            Site::new(-1, -1),
            Site::new(0, -1),
            Site::new(1, -1),
        ])
        .unwrap();
        assert!(loop_has_cut_point(&ring, Site::ORIGIN));
    }

    #[test]
    fn encircling_sampler_conditions() {
        let d = LatticeDomain::disk(16).unwrap();
        let s = EncirclingLoopSampler::new(d, Site::ORIGIN, 8, 512).unwrap();
        for r in 0..20 {
            let mut rng = stream(1, Tag::SingleLoop, 0, r, 0);
            let (l, _) = s.sample(&mut rng, 100_000).unwrap();
            assert!(l.len() >= 8 && l.len() <= 512);
            assert!(l.sites().iter().all(|&x| d.contains(x)));
            assert!(encircles(&l.trace(), Site::ORIGIN));
        }
    }

    #[test]
    fn zero_intensity_never_encircles() {
        let cfg = ContrastConfig { radii: vec![16], replicas: 3, lambda: 0.0, seed: 1, max_tries: 5 };
        assert_eq!(cutpoint_contrast(&cfg), Err(Error::ConditioningFailure { tries: 5 }));
    }

    #[test]
    fn small_contrast_runs() {
        let cfg = ContrastConfig { radii: vec![16, 24], replicas: 30, lambda: 6.0, seed: 4, max_tries: 200 };
        let rep = cutpoint_contrast(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert_eq!(rep, cutpoint_contrast(&cfg).unwrap());
    }
}
