//! Chordal exploration of the complete cluster around a point, pinned
//! cluster sampling and the near-gluing rejection sampler.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::{ClusterSet, CompleteCluster};
use crate::error::{Error, Result};
use crate::lattice::{DomainKind, Grid, LatticeDomain, Site};
use crate::loop_measure::{return_probability, sample_loop_soup_with, LengthTable, LoopSoupSample, RwLoop, SoupConfig};
use crate::rng::{stream_seed, Tag};
use crate::site_set::SiteSet;
use crate::stats::{wilson_interval, EstimatorReport};
use crate::topology::Contour;

/// Lattice segment explored from its first site (on the domain boundary)
/// toward the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chord {
    pub sites: Vec<Site>,
}

impl Chord {
    /// Horizontal segment from the domain's right boundary point to `target`.
    pub fn toward(domain: &LatticeDomain, target: Site) -> Self {
        let start = domain.right_boundary_point();
        let y = target.y;
        let x0 = start.x;
        let sites = (target.x..=x0).rev().map(|x| Site::new(x, y)).filter(|&s| domain.contains(s)).collect();
        Chord { sites }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationResult {
    /// First chord site, from the boundary end, on the trace of the cluster
    /// surrounding the target.
    #[serde(rename = "T")]
    pub t: Site,
    /// Position of `t` along the chord.
    pub t_index: usize,
    /// Filling of the chord part before `t` together with the complete
    /// clusters that part meets.
    pub explored: SiteSet,
    /// Component of the domain minus `explored` containing the target.
    pub remaining: SiteSet,
    /// Outermost cluster surrounding the target.
    pub hit_cluster: usize,
    /// Outermost clusters absorbed into `explored`.
    pub absorbed: Vec<usize>,
}

impl ExplorationResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "T": [self.t.x, self.t.y],
            "explored": self.explored,
            "remaining_size": self.remaining.len(),
            "cluster": self.hit_cluster,
        })
    }
}

/// Flood fill of `domain \ blocked` from `start`.
fn domain_component(domain: &LatticeDomain, blocked: &SiteSet, start: Site) -> SiteSet {
    if !domain.contains(start) || blocked.contains(start) {
        return SiteSet::new();
    }
    let mut seen = Grid::new(*domain.bbox(), false);
    seen.set(start, true);
    let mut stack = vec![start];
    let mut out = vec![start];
    while let Some(s) = stack.pop() {
        for t in s.adjacent() {
            if domain.contains(t) && !blocked.contains(t) && !seen.get(t).copied().unwrap_or(true) {
                seen.set(t, true);
                stack.push(t);
                out.push(t);
            }
        }
    }
    out.into_iter().collect()
}

/// `set` together with its bounded complementary components, except the one
/// holding `target`.
fn filling_away_from(set: &SiteSet, target: Site) -> SiteSet {
    let Some(bb) = set.bbox() else {
        return SiteSet::new();
    };
    let ambient = bb.expand(1);
    let mut mark = Grid::new(ambient, false);
    let mut stack: Vec<Site> = ambient.rim().filter(|&s| !set.contains(s)).collect();
    if ambient.contains(target) && !set.contains(target) {
        stack.push(target);
    }
    for &s in &stack {
        mark.set(s, true);
    }
    while let Some(s) = stack.pop() {
        for t in s.adjacent() {
            if let Some(m) = mark.get_mut(t) {
                if !*m && !set.contains(t) {
                    *m = true;
                    stack.push(t);
                }
            }
        }
    }
    bb.sites().filter(|&s| !*mark.get(s).unwrap()).collect()
}

/// Explores `chord` from its boundary end until it meets the trace of the
/// outermost cluster surrounding `target`.
pub fn explore_chord(
    sample: &LoopSoupSample,
    clusters: &ClusterSet,
    target: Site,
    chord: &Chord,
) -> Result<ExplorationResult> {
    let domain = &sample.config.domain;
    if !domain.contains(target) {
        return Err(Error::SiteOutsideDomain(target));
    }
    let hit = clusters.cluster_containing(target).ok_or(Error::NoSurroundingCluster)?;
    let trace = &clusters.cluster(hit).trace;
    let t_index = chord
        .sites
        .iter()
        .position(|&s| trace.contains(s))
        .ok_or_else(|| Error::InvalidParameter("chord never meets the surrounding cluster".into()))?;
    let before = &chord.sites[..t_index];
    let mut absorbed: Vec<usize> = before.iter().filter_map(|&s| clusters.cluster_containing(s)).collect();
    absorbed.sort_unstable();
    absorbed.dedup();
    let mut union: Vec<Site> = before.to_vec();
    for &id in &absorbed {
        union.extend(clusters.outermost_filling(id).unwrap().iter());
    }
    let explored = filling_away_from(&union.into_iter().collect(), target);
    let remaining = domain_component(domain, &explored, target);
    Ok(ExplorationResult { t: chord.sites[t_index], t_index, explored, remaining, hit_cluster: hit, absorbed })
}

/// Sites of `set` whose lattice distance to the complement is at least `depth`.
pub fn deep_sites(set: &SiteSet, depth: u32) -> SiteSet {
    let Some(bb) = set.bbox() else {
        return SiteSet::new();
    };
    let mut dist: Grid<u32> = Grid::new(bb, u32::MAX);
    let mut frontier: Vec<Site> = set
        .iter()
        .filter(|s| s.adjacent().iter().any(|&t| !set.contains(t)))
        .collect();
    for &s in &frontier {
        dist.set(s, 1);
    }
    let mut d = 1;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for s in frontier {
            for t in s.adjacent() {
                if set.contains(t) && *dist.get(t).unwrap() == u32::MAX {
                    dist.set(t, d);
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    set.iter().filter(|&s| *dist.get(s).unwrap() >= depth).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovReport {
    pub explorations: u64,
    /// Explorations with no cluster surrounding the target.
    pub skipped: u64,
    pub cells: u64,
    pub loops: u64,
    /// Mean number of length-2 loops rooted per deep cell, Poisson standard error.
    pub mean: EstimatorReport,
    pub expected: f64,
    pub z: f64,
}

/// Length-2 loops rooted in the unexplored region after one exploration:
/// cells of the remaining component, minus the trace of the hit cluster,
/// at depth at least `depth`. Returns (cells, loops).
pub fn unexplored_length2_counts(sample: &LoopSoupSample, result: &ExplorationResult, hit_trace: &SiteSet, depth: u32) -> (u64, u64) {
    let free: SiteSet = result.remaining.difference(hit_trace);
    let cells = deep_sites(&free, depth);
    let loops = sample.loops.iter().filter(|l| l.len() == 2 && cells.contains(l.root())).count();
    (cells.len() as u64, loops as u64)
}

/// Markov-consistency check of the exploration: after exploring the chord
/// toward the centre, loops in the unexplored region should still be a soup
/// of intensity c, so length-2 loops are rooted at rate c·p₂/2 = c/8 per cell.
/// Needs cutoff 2.
pub fn markov_consistency(config: &SoupConfig, explorations: u64, depth: u32) -> Result<MarkovReport> {
    if config.cutoff != 2 {
        return Err(Error::InvalidParameter("markov consistency needs cutoff 2".into()));
    }
    config.validate()?;
    let table = config.length_table()?;
    let target = Site::ORIGIN;
    let chord = Chord::toward(&config.domain, target);
    let counts = (0..explorations)
        .into_par_iter()
        .map(|j| {
            let sample = sample_loop_soup_with(&config.clone().with_seed(replica_seed(config.seed, 0, j)), &table)?;
            let cs = ClusterSet::build(&sample.loops);
            match explore_chord(&sample, &cs, target, &chord) {
                Ok(r) => {
                    let trace = cs.cluster(r.hit_cluster).trace.clone();
                    let (c, l) = unexplored_length2_counts(&sample, &r, &trace, depth);
                    Ok((c, l, 0))
                }
                Err(Error::NoSurroundingCluster) => Ok((0, 0, 1)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let (cells, loops, skipped) = counts.iter().fold((0, 0, 0), |a, x| (a.0 + x.0, a.1 + x.1, a.2 + x.2));
    if cells == 0 {
        return Err(Error::InsufficientData("no unexplored cells".into()));
    }
    let expected = config.c * return_probability(2)? / 2.0;
    let m = loops as f64 / cells as f64;
    let se = ((loops.max(1)) as f64).sqrt() / cells as f64;
    let mean = EstimatorReport {
        estimate: m,
        ci_low: m - 1.96 * se,
        ci_high: m + 1.96 * se,
        std_error: se,
        n: cells,
        method: crate::stats::CiMethod::Normal,
        seed_hash: String::new(),
    }
    .with_seeds(&[config.seed]);
    Ok(MarkovReport { explorations, skipped, cells, loops, mean, expected, z: (m - expected) / se })
}

/// A complete cluster drawn under a conditioning event, with its soup.
#[derive(Debug, Clone)]
pub struct PinnedSample {
    pub sample: LoopSoupSample,
    pub cluster: CompleteCluster,
    pub eps: u32,
    /// Draws made, including the accepted one.
    pub tries: u64,
    pub rejections: u64,
    /// Draws in which the anchor was surrounded at all.
    pub surrounded: u64,
    pub seed: u64,
}

impl PinnedSample {
    pub fn acceptance_rate(&self) -> f64 {
        1.0 / self.tries as f64
    }
}

/// Seed of replica `index` in stream `lane` of a base configuration.
pub fn replica_seed(base: u64, lane: u64, index: u64) -> u64 {
    stream_seed(base, Tag::Replica, lane, index, 0)
}

/// Smallest squared distance from `pin` to a site visited by a member loop.
fn member_dist2(cluster: &CompleteCluster, loops: &[RwLoop], pin: Site) -> i64 {
    cluster
        .members
        .iter()
        .flat_map(|&i| loops[i].sites().iter())
        .map(|s| s.dist2(pin))
        .min()
        .unwrap_or(i64::MAX)
}

/// One replica: the complete cluster around `anchor` (if any) and its
/// squared distance to `pin`.
fn pinning_draw(
    config: &SoupConfig,
    table: &LengthTable,
    anchor: Site,
    pin: Site,
    seed: u64,
) -> Result<(LoopSoupSample, Option<(CompleteCluster, i64)>)> {
    let cfg = config.clone().with_seed(seed);
    let sample = sample_loop_soup_with(&cfg, table)?;
    let cs = ClusterSet::build(&sample.loops);
    let found = match cs.cluster_containing(anchor) {
        Some(id) => {
            let cc = cs.complete_cluster(&sample.loops, id)?;
            let d2 = member_dist2(&cc, &sample.loops, pin);
            Some((cc, d2))
        }
        None => None,
    };
    Ok((sample, found))
}

/// Rejection sampler for the complete cluster surrounding `anchor`,
/// conditioned to visit the half-disk of radius `eps` at `pin`.
pub fn sample_pinned_cluster(
    config: &SoupConfig,
    anchor: Site,
    pin: Site,
    eps: u32,
    max_tries: u64,
) -> Result<PinnedSample> {
    if eps < 1 {
        return Err(Error::InvalidParameter("eps must be >= 1".into()));
    }
    config.validate()?;
    let table = config.length_table()?;
    let eps2 = (eps as i64).pow(2);
    let mut surrounded = 0;
    for t in 0..max_tries {
        let seed = replica_seed(config.seed, 0, t);
        let (sample, found) = pinning_draw(config, &table, anchor, pin, seed)?;
        if let Some((cluster, d2)) = found {
            surrounded += 1;
            if d2 < eps2 {
                return Ok(PinnedSample { sample, cluster, eps, tries: t + 1, rejections: t, surrounded, seed });
            }
        }
    }
    Err(Error::TriesExhausted { tries: max_tries, accepted: 0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinningScalingReport {
    pub eps: Vec<u32>,
    pub u: Vec<EstimatorReport>,
    /// Slope of log u against log ε.
    pub beta: f64,
    pub beta_se: f64,
    pub beta_ci: [f64; 2],
    /// Adjacent grid pairs whose estimates decrease in ε by more than their CIs allow.
    pub monotonicity_violations: Vec<[u32; 2]>,
}

/// Estimates u(ε), the probability that the complete cluster around
/// `anchor` visits the ε half-disk at `pin`, on a grid of ε, and fits the
/// power law u ∝ ε^β by weighted least squares on log–log scale. Each grid
/// point uses its own independent replicas.
pub fn estimate_pinning_scaling(
    config: &SoupConfig,
    anchor: Site,
    pin: Site,
    eps_grid: &[u32],
    samples: u64,
) -> Result<PinningScalingReport> {
    if eps_grid.len() < 3 || eps_grid.contains(&0) {
        return Err(Error::InvalidParameter("need at least 3 positive eps values".into()));
    }
    config.validate()?;
    let table = config.length_table()?;
    let mut u = Vec::with_capacity(eps_grid.len());
    for (k, &eps) in eps_grid.iter().enumerate() {
        let eps2 = (eps as i64).pow(2);
        let hits = (0..samples)
            .into_par_iter()
            .map(|r| {
                let seed = replica_seed(config.seed, 1 + k as u64, r);
                pinning_draw(config, &table, anchor, pin, seed)
                    .map(|(_, f)| f.is_some_and(|(_, d2)| d2 < eps2) as u64)
            })
            .collect::<Result<Vec<u64>>>()?
            .into_iter()
            .sum::<u64>();
        u.push(wilson_interval(hits, samples, 0.95).with_seeds(&[config.seed, k as u64]));
    }
    if let Some(i) = u.iter().position(|r| r.estimate == 0.0) {
        return Err(Error::DegenerateFit(format!("u(eps = {}) estimated as 0", eps_grid[i])));
    }
    let (beta, beta_se) = weighted_log_fit(eps_grid, &u);
    let monotonicity_violations = eps_grid
        .windows(2)
        .zip(u.windows(2))
        .filter(|(_, w)| w[1].ci_high < w[0].ci_low)
        .map(|(e, _)| [e[0], e[1]])
        .collect();
    Ok(PinningScalingReport {
        eps: eps_grid.to_vec(),
        u,
        beta,
        beta_se,
        beta_ci: [beta - 1.96 * beta_se, beta + 1.96 * beta_se],
        monotonicity_violations,
    })
}

/// Weighted least squares slope of log u on log ε, weights 1/Var(log û)
/// with Var(log û) ≈ (1 − u)/(n u).
fn weighted_log_fit(eps: &[u32], u: &[EstimatorReport]) -> (f64, f64) {
    let pts: Vec<(f64, f64, f64)> = eps
        .iter()
        .zip(u)
        .map(|(&e, r)| {
            let p = r.estimate;
            let var = ((1.0 - p) / (r.n as f64 * p)).max(1e-12);
            ((e as f64).ln(), p.ln(), 1.0 / var)
        })
        .collect();
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    (slope, (1.0 / sxx).sqrt())
}

/// Parameters of the near-gluing event in a half-plane box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlueGeometry {
    /// Lattice length of the unit segment [0, 1].
    pub unit: u32,
    /// Width parameter δ in lattice units.
    pub delta: u32,
    /// Pinning radius at the origin.
    pub eps: u32,
}

/// Whether the contour, followed from the corner nearest `pin` with the
/// unbounded complement on its left (counterclockwise as seen from the
/// upper half-plane), reaches the column x = unit inside the rectangle
/// [−δ, unit] × [0, 2δ] before leaving that rectangle. Coordinates are in
/// site units; contour corners sit at half-integers.
pub fn near_glued(contour: &Contour, pin: Site, geometry: GlueGeometry) -> bool {
    let corners = contour.corners();
    if corners.is_empty() {
        return false;
    }
    let p = (pin.x as f64, pin.y as f64);
    let d = |&(i, j): &(i32, i32)| {
        let (x, y) = (i as f64 - 0.5, j as f64 - 0.5);
        (x - p.0).powi(2) + (y - p.1).powi(2)
    };
    let start = (0..corners.len())
        .min_by(|&a, &b| {
            d(&corners[a])
                .total_cmp(&d(&corners[b]))
                .then(corners[a].cmp(&corners[b]))
        })
        .unwrap();
    let (unit, delta) = (geometry.unit as i32, geometry.delta as i32);
    // corner (i, j) is the point (i − ½, j − ½)
    let inside = |&(i, j): &(i32, i32)| i >= -delta && i <= unit + 1 && j >= 0 && j <= 2 * delta + 1;
    let n = corners.len();
    for k in 0..n {
        let c = corners[(start + n - k) % n];
        if !inside(&c) {
            return false;
        }
        if c.0 >= unit {
            return true;
        }
    }
    false
}

/// Rejection sampler for the near-gluing event: soups in a half-plane box
/// are drawn until the outermost complete cluster nearest the origin visits
/// the ε half-disk there and satisfies [`near_glued`].
pub fn sample_glued_near(config: &SoupConfig, geometry: GlueGeometry, max_tries: u64) -> Result<PinnedSample> {
    if !matches!(config.domain.kind(), DomainKind::HalfPlaneBox { .. }) {
        return Err(Error::InvalidParameter("near-gluing needs a half-plane box domain".into()));
    }
    if geometry.delta < 1 || geometry.eps < 1 || geometry.unit < 1 {
        return Err(Error::InvalidParameter("unit, delta and eps must be >= 1".into()));
    }
    config.validate()?;
    let table = config.length_table()?;
    let pin = Site::ORIGIN;
    let eps2 = (geometry.eps as i64).pow(2);
    let mut pinned = 0;
    for t in 0..max_tries {
        let seed = replica_seed(config.seed, 0, t);
        let sample = sample_loop_soup_with(&config.clone().with_seed(seed), &table)?;
        let cs = ClusterSet::build(&sample.loops);
        let best = cs
            .complete_clusters(&sample.loops)
            .into_iter()
            .map(|cc| (member_dist2(&cc, &sample.loops, pin), cc))
            .filter(|(d2, _)| *d2 < eps2)
            .min_by_key(|(d2, cc)| (*d2, cc.core));
        if let Some((_, cluster)) = best {
            pinned += 1;
            if near_glued(&cluster.contour, pin, geometry) {
                return Ok(PinnedSample {
                    sample,
                    cluster,
                    eps: geometry.eps,
                    tries: t + 1,
                    rejections: t,
                    surrounded: pinned,
                    seed,
                });
            }
        }
    }
    Err(Error::TriesExhausted { tries: max_tries, accepted: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{filling, outer_contour};

    fn rect_loop(x0: i32, y0: i32, x1: i32, y1: i32) -> RwLoop {
        let mut v = Vec::new();
        for x in x0..x1 {
            v.push(Site::new(x, y0));
        }
        for y in y0..y1 {
            v.push(Site::new(x1, y));
        }
        for x in (x0 + 1..=x1).rev() {
            v.push(Site::new(x, y1));
        }
        for y in (y0 + 1..=y1).rev() {
            v.push(Site::new(x0, y));
        }
        RwLoop::new(v).unwrap()
    }

    fn hand_sample(loops: Vec<RwLoop>) -> LoopSoupSample {
        let cfg = SoupConfig::new(LatticeDomain::disk(16).unwrap(), 1.0, 0);
        LoopSoupSample::from_loops(cfg, loops)
    }

    #[test]
    fn single_loop_hit_at_its_rightmost_chord_site() {
        let s = hand_sample(vec![rect_loop(-4, -3, 5, 3)]);
        let cs = ClusterSet::build(&s.loops);
        let chord = Chord::toward(&s.config.domain, Site::ORIGIN);
        assert_eq!(chord.sites[0], Site::new(16, 0));
        let r = explore_chord(&s, &cs, Site::ORIGIN, &chord).unwrap();
        assert_eq!(r.t, Site::new(5, 0));
        assert!(r.absorbed.is_empty());
        assert!(r.remaining.contains(Site::ORIGIN));
        assert!(!r.explored.intersects(&r.remaining));
        assert!(r.explored.contains(Site::new(6, 0)));
        assert!(!r.explored.contains(Site::new(5, 0)));
    }

    #[test]
    fn nothing_surrounds_target() {
        let s = hand_sample(vec![rect_loop(5, 5, 8, 8)]);
        let cs = ClusterSet::build(&s.loops);
        let chord = Chord::toward(&s.config.domain, Site::ORIGIN);
        assert_eq!(explore_chord(&s, &cs, Site::ORIGIN, &chord), Err(Error::NoSurroundingCluster));
    }

    #[test]
    fn cluster_on_the_chord_is_absorbed() {
        let s = hand_sample(vec![rect_loop(-4, -3, 5, 3), rect_loop(8, -2, 11, 2)]);
        let cs = ClusterSet::build(&s.loops);
        let chord = Chord::toward(&s.config.domain, Site::ORIGIN);
        let r = explore_chord(&s, &cs, Site::ORIGIN, &chord).unwrap();
        assert_eq!(r.t, Site::new(5, 0));
        assert_eq!(r.absorbed, vec![1]);
        let other = filling(&s.loops[1].trace());
        assert!(other.is_subset(&r.explored));
        assert!(!other.intersects(&r.remaining));
        assert!(!r.explored.intersects(&r.remaining));
        // deterministic
        assert_eq!(r, explore_chord(&s, &cs, Site::ORIGIN, &chord).unwrap());
    }

    #[test]
    fn markov_small_run() {
        let cfg = SoupConfig::new(LatticeDomain::disk(24).unwrap(), 1.0, 5).with_cutoff(2);
        let rep = markov_consistency(&cfg, 40, 3).unwrap();
        assert!(rep.cells > 0 && rep.explorations == 40);
        assert!(rep.z.abs() < 5.0, "{rep:?}");
        assert!(markov_consistency(&cfg.with_cutoff(4), 4, 3).is_err());
    }

    #[test]
    fn deep_sites_of_a_block() {
        let block: SiteSet = (0..7).flat_map(|x| (0..7).map(move |y| Site::new(x, y))).collect();
        assert_eq!(deep_sites(&block, 1).len(), 49);
        assert_eq!(deep_sites(&block, 2).len(), 25);
        assert_eq!(deep_sites(&block, 4).len(), 1);
    }

    #[test]
    fn pinned_sampler_examples() {
        let d = LatticeDomain::disk(16).unwrap();
        let cfg = SoupConfig::new(d, 0.0, 3);
        let err = sample_pinned_cluster(&cfg, Site::ORIGIN, Site::new(16, 0), 2, 5).unwrap_err();
        assert_eq!(err, Error::TriesExhausted { tries: 5, accepted: 0 });
        // vacuous pin: every surrounded draw is accepted
        let cfg = SoupConfig::new(LatticeDomain::disk(16).unwrap(), 1.0, 3);
        let p = sample_pinned_cluster(&cfg, Site::ORIGIN, Site::new(16, 0), 40, 500).unwrap();
        assert_eq!(p.surrounded, 1);
        assert!(p.cluster.filling.contains(Site::ORIGIN));
    }

    #[test]
    fn near_glued_on_hand_contours() {
        let geometry = GlueGeometry { unit: 6, delta: 2, eps: 1 };
        // flat cluster along the bottom reaching x = 6
        let flat: SiteSet = (0..=6).flat_map(|x| (0..=1).map(move |y| Site::new(x, y))).collect();
        assert!(near_glued(&outer_contour(&flat).unwrap(), Site::ORIGIN, geometry));
        // too short
        let short: SiteSet = (0..=4).map(|x| Site::new(x, 0)).collect();
        assert!(!near_glued(&outer_contour(&short).unwrap(), Site::ORIGIN, geometry));
        // a tall tower at x = 2 makes the contour leave the strip first
        let mut tall: Vec<Site> = (0..=6).map(|x| Site::new(x, 0)).collect();
        tall.extend((1..=9).map(|y| Site::new(2, y)));
        let tall: SiteSet = tall.into_iter().collect();
        assert!(!near_glued(&outer_contour(&tall).unwrap(), Site::ORIGIN, geometry));
        // a tower standing on the target column does not matter
        let mut right: Vec<Site> = (0..=6).map(|x| Site::new(x, 0)).collect();
        right.extend((1..=9).map(|y| Site::new(6, y)));
        let right: SiteSet = right.into_iter().collect();
        assert!(near_glued(&outer_contour(&right).unwrap(), Site::ORIGIN, geometry));
        // vacuous rectangle: any cluster reaching x = unit qualifies
        let wide = GlueGeometry { unit: 6, delta: 50, eps: 1 };
        assert!(near_glued(&outer_contour(&tall).unwrap(), Site::ORIGIN, wide));
    }

    #[test]
    fn glued_sampler_requires_box() {
        let cfg = SoupConfig::new(LatticeDomain::disk(16).unwrap(), 1.0, 3);
        let g = GlueGeometry { unit: 4, delta: 2, eps: 1 };
        assert!(matches!(sample_glued_near(&cfg, g, 3), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn glued_sampler_accepts_and_replays() {
        let cfg = SoupConfig::new(LatticeDomain::half_plane_box(16, 12).unwrap(), 1.0, 9);
        let g = GlueGeometry { unit: 4, delta: 3, eps: 2 };
        let p = sample_glued_near(&cfg, g, 2000).unwrap();
        assert!(near_glued(&p.cluster.contour, Site::ORIGIN, g));
        assert!(p.tries >= 1);
    }
}
