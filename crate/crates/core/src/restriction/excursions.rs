use rand::RngCore;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exploration::replica_seed;
use crate::lattice::{DomainKind, Grid, LatticeDomain, Site};
use crate::loop_measure::{sample_loop_soup_with, SoupConfig};
use crate::restriction::hull::Hull;
use crate::rng::{site_word, stream, StreamRng, Tag};
use crate::stats::{normal_sf, wilson_interval, EstimatorReport};

/// Attachment arc on the domain boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "arc", rename_all = "snake_case")]
pub enum Arc {
    /// Sites (x, 0) with `x_min ≤ x ≤ x_max` on the bottom edge of a half-plane box.
    Bottom { x_min: i32, x_max: i32 },
    /// Boundary sites of a disk with y < 0.
    LowerHalf,
}

impl Arc {
    #[inline]
    pub fn contains(&self, domain: &LatticeDomain, s: Site) -> bool {
        match *self {
            Arc::Bottom { x_min, x_max } => s.y == 0 && s.x >= x_min && s.x <= x_max && domain.contains(s),
            Arc::LowerHalf => s.y < 0 && domain.is_boundary(s),
        }
    }

    pub fn sites(&self, domain: &LatticeDomain) -> Vec<Site> {
        domain.boundary_sites().filter(|&s| self.contains(domain, s)).collect()
    }
}

/// Poisson law of excursions. Every arc edge, from an arc site to an
/// interior neighbour, starts Poisson(λ) walks that run until they first hit
/// the domain boundary. Walks landing off the arc are discarded, so the kept
/// paths are arc-to-arc excursions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcursionLaw {
    pub domain: LatticeDomain,
    pub arc: Arc,
    pub lambda: f64,
}

impl ExcursionLaw {
    pub fn new(domain: LatticeDomain, arc: Arc, lambda: f64) -> Result<Self> {
        match (domain.kind(), arc) {
            (DomainKind::HalfPlaneBox { width, .. }, Arc::Bottom { x_min, x_max }) => {
                let w = width as i32;
                if x_min > x_max || x_min < -w || x_max > w {
                    return Err(Error::InvalidParameter(format!("arc [{x_min}, {x_max}] not on the bottom edge")));
                }
            }
            (DomainKind::Disk { .. }, Arc::LowerHalf) => {}
            _ => return Err(Error::InvalidParameter("arc does not fit the domain".into())),
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} must be finite and >= 0")));
        }
        Ok(ExcursionLaw { domain, arc, lambda })
    }

    /// The nonnegative half of a box's bottom edge.
    pub fn right_arc(domain: LatticeDomain, lambda: f64) -> Result<Self> {
        let w = domain.right_boundary_point().x;
        Self::new(domain, Arc::Bottom { x_min: 0, x_max: w }, lambda)
    }

    /// The whole bottom edge of a box.
    pub fn full_arc(domain: LatticeDomain, lambda: f64) -> Result<Self> {
        let w = domain.right_boundary_point().x;
        Self::new(domain, Arc::Bottom { x_min: -w, x_max: w }, lambda)
    }

    /// The lower semicircle of a disk.
    pub fn lower_half(domain: LatticeDomain, lambda: f64) -> Result<Self> {
        Self::new(domain, Arc::LowerHalf, lambda)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    /// Number of arc edges; the expected number of starts is λ times this.
    pub fn edge_count(&self) -> usize {
        Walker::new(self).starts.iter().map(|s| s.1.len()).sum()
    }
}

const INTERIOR: u8 = 1;
const BOUNDARY: u8 = 2;
const ARC: u8 = 3;

/// Site classification and start edges of a law, built once per run.
struct Walker {
    law: ExcursionLaw,
    state: Grid<u8>,
    starts: Vec<(Site, Vec<Site>)>,
}

impl Walker {
    fn new(law: &ExcursionLaw) -> Self {
        let d = &law.domain;
        let mut state = Grid::new(d.bbox().expand(1), 0u8);
        for s in d.sites() {
            let v = if !d.is_boundary(s) {
                INTERIOR
            } else if law.arc.contains(d, s) {
                ARC
            } else {
                BOUNDARY
            };
            state.set(s, v);
        }
        let starts = law
            .arc
            .sites(d)
            .into_iter()
            .map(|s| (s, s.adjacent().into_iter().filter(|&t| *state.get(t).unwrap() == INTERIOR).collect()))
            .collect();
        Walker { law: *law, state, starts }
    }

    fn start_count(&self, rng: &mut StreamRng) -> u64 {
        if self.law.lambda == 0.0 {
            0
        } else {
            Poisson::new(self.law.lambda).unwrap().sample(rng) as u64
        }
    }

    /// Runs one walk from `first` until it hits the boundary; `visit` sees
    /// every site after the start. Returns the landing site and whether it
    /// is on the arc.
    #[inline]
    fn run<F: FnMut(Site)>(&self, first: Site, rng: &mut StreamRng, mut visit: F) -> (Site, bool) {
        let mut s = first;
        visit(s);
        let mut bits = 0u64;
        let mut left = 0;
        loop {
            if left == 0 {
                bits = rng.next_u64();
                left = 32;
            }
            match bits & 3 {
                0 => s.x += 1,
                1 => s.y += 1,
                2 => s.x -= 1,
                _ => s.y -= 1,
            }
            bits >>= 2;
            left -= 1;
            visit(s);
            match *self.state.get(s).unwrap() {
                INTERIOR => {}
                ARC => return (s, true),
                _ => return (s, false),
            }
        }
    }
}

fn site_stream(seed: u64, lane: u64, replica: u64, s: Site) -> StreamRng {
    stream(seed, Tag::Excursion, lane, replica, site_word(s.x, s.y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionEnsemble {
    pub lambda: f64,
    pub arc: Arc,
    /// Kept excursions, each from its arc site to its landing site.
    pub paths: Vec<Vec<Site>>,
    /// Walks started, kept or not.
    pub starts: u64,
    pub discarded: u64,
    pub seed: u64,
    pub replica: u64,
}

impl ExcursionEnsemble {
    /// All sites visited by kept excursions.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.paths.iter().flatten().copied()
    }
}

/// Draws one ensemble. Deterministic in (seed, replica, arc site).
pub fn sample_excursions(law: &ExcursionLaw, seed: u64, replica: u64) -> ExcursionEnsemble {
    sample_with(&Walker::new(law), seed, replica)
}

fn sample_with(walker: &Walker, seed: u64, replica: u64) -> ExcursionEnsemble {
    let mut paths = Vec::new();
    let (mut starts, mut discarded) = (0, 0);
    for (start, firsts) in &walker.starts {
        let mut rng = site_stream(seed, 0, replica, *start);
        for &first in firsts {
            let n = walker.start_count(&mut rng);
            starts += n;
            for _ in 0..n {
                let mut path = vec![*start];
                let (_, on_arc) = walker.run(first, &mut rng, |s| path.push(s));
                if on_arc {
                    paths.push(path);
                } else {
                    discarded += 1;
                }
            }
        }
    }
    let law = &walker.law;
    ExcursionEnsemble { lambda: law.lambda, arc: law.arc, paths, starts, discarded, seed, replica }
}

/// Whether no kept excursion of one replica meets `hull`; stops at the first hit.
fn excursions_avoid(walker: &Walker, hull: &Hull, seed: u64, lane: u64, replica: u64) -> bool {
    for (start, firsts) in &walker.starts {
        let mut rng = site_stream(seed, lane, replica, *start);
        for &first in firsts {
            let n = walker.start_count(&mut rng);
            for _ in 0..n {
                let mut hit = hull.contains(*start);
                let (_, on_arc) = walker.run(first, &mut rng, |s| hit = hit || hull.contains(s));
                if hit && on_arc {
                    return false;
                }
            }
        }
    }
    true
}

/// The random set whose avoidance probability is estimated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum AvoidanceLaw {
    Excursions(ExcursionLaw),
    Soup(SoupConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictionEstimate {
    pub hull: Hull,
    pub avoidance: EstimatorReport,
    /// φ′(0)^α when an exponent is supplied.
    pub predicted: Option<f64>,
    pub z: Option<f64>,
    /// The estimate is 0 or 1, so its interval is one-sided.
    pub degenerate: bool,
}

/// Stream lane for a hull: equal hulls share replicas, distinct hulls are independent.
fn hull_lane(hull: &Hull) -> u64 {
    hull.key() | 1
}

/// Monte Carlo estimate of P(nothing in the law meets `hull`) with a Wilson
/// interval over `replicas` independent replicas.
pub fn avoidance_probability(
    law: &AvoidanceLaw,
    hull: &Hull,
    replicas: u64,
    seed: u64,
    alpha: Option<f64>,
) -> Result<RestrictionEstimate> {
    if replicas == 0 {
        return Err(Error::InvalidParameter("replicas must be >= 1".into()));
    }
    let lane = hull_lane(hull);
    let avoided: u64 = match law {
        AvoidanceLaw::Excursions(ex) => {
            let walker = Walker::new(ex);
            (0..replicas)
                .into_par_iter()
                .map(|r| excursions_avoid(&walker, hull, seed, lane, r) as u64)
                .sum()
        }
        AvoidanceLaw::Soup(cfg) => {
            cfg.validate()?;
            let table = cfg.length_table()?;
            (0..replicas)
                .into_par_iter()
                .map(|r| {
                    let s = sample_loop_soup_with(&cfg.clone().with_seed(replica_seed(seed, lane, r)), &table)?;
                    Ok(!s.loops.iter().any(|l| l.sites().iter().any(|&x| hull.contains(x))) as u64)
                })
                .collect::<Result<Vec<u64>>>()?
                .into_iter()
                .sum()
        }
    };
    let avoidance = wilson_interval(avoided, replicas, 0.95).with_seeds(&[seed, lane]);
    let predicted = alpha.map(|a| hull.map().derivative_at_origin().powf(a));
    let z = predicted.map(|p| {
        let se = (p * (1.0 - p) / replicas as f64).sqrt();
        (avoidance.estimate - p) / se
    });
    let degenerate = avoided == 0 || avoided == replicas;
    Ok(RestrictionEstimate { hull: *hull, avoidance, predicted, z, degenerate })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTestReport {
    pub law: AvoidanceLaw,
    pub first: RestrictionEstimate,
    pub second: RestrictionEstimate,
    /// log P̂(avoid A₁) / log P̂(avoid A₂).
    pub observed: f64,
    /// log φ′_{A₁}(0) / log φ′_{A₂}(0).
    pub predicted: f64,
    /// Delta-method standard error of `observed`.
    pub std_error: f64,
    pub z: f64,
    /// Two-sided normal p-value of `z`.
    pub p_value: f64,
    pub degenerate: bool,
}

impl RatioTestReport {
    pub fn within_sigma(&self, k: f64) -> bool {
        !self.degenerate && self.z.abs() < k
    }
}

/// Calibration-free test of the restriction formula: for a Poisson
/// ensemble P(avoid A) = exp(−λ M(A)), so the ratio of log avoidance
/// probabilities must equal the ratio of log φ′_A(0) whatever the lattice
/// normalisation of λ.
pub fn restriction_ratio_test(
    law: &AvoidanceLaw,
    first: &Hull,
    second: &Hull,
    replicas: u64,
    seed: u64,
) -> Result<RatioTestReport> {
    let e1 = avoidance_probability(law, first, replicas, seed, None)?;
    let e2 = if first == second { e1.clone() } else { avoidance_probability(law, second, replicas, seed, None)? };
    let predicted = first.map().derivative_at_origin().ln() / second.map().derivative_at_origin().ln();
    let degenerate = e1.degenerate || e2.degenerate;
    let (l1, l2) = (e1.avoidance.estimate.ln(), e2.avoidance.estimate.ln());
    let observed = if first == second { 1.0 } else { l1 / l2 };
    let var_log = |e: &RestrictionEstimate| {
        let p = e.avoidance.estimate;
        (1.0 - p) / (e.avoidance.n as f64 * p)
    };
    let std_error = if first == second || degenerate {
        0.0
    } else {
        observed.abs() * (var_log(&e1) / (l1 * l1) + var_log(&e2) / (l2 * l2)).sqrt()
    };
    let z = if std_error > 0.0 { (observed - predicted) / std_error } else if observed == predicted { 0.0 } else { f64::NAN };
    let p_value = if z.is_nan() { f64::NAN } else { 2.0 * normal_sf(z.abs()) };
    Ok(RatioTestReport { law: law.clone(), first: e1, second: e2, observed, predicted, std_error, z, p_value, degenerate })
}

/// Picks λ so that the avoidance probability of `hull` is near `target`,
/// from a pilot run at the law's own λ (scaled until the pilot is
/// informative).
pub fn choose_lambda(law: &ExcursionLaw, hull: &Hull, target: f64, pilot_replicas: u64, seed: u64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!("target {target} must be in (0, 1)")));
    }
    let mut lambda = if law.lambda > 0.0 { law.lambda } else { 1.0 };
    for round in 0..12u64 {
        let walker = Walker::new(&law.with_lambda(lambda));
        let lane = hull_lane(hull) ^ (round + 1) << 48;
        let avoided = (0..pilot_replicas)
            .into_par_iter()
            .map(|r| excursions_avoid(&walker, hull, seed ^ 0x5eed, lane, r) as u64)
            .sum::<u64>();
        if avoided == 0 {
            lambda /= 4.0;
        } else if avoided == pilot_replicas {
            lambda *= 4.0;
        } else {
            let p = avoided as f64 / pilot_replicas as f64;
            let mass = -p.ln() / lambda;
            return Ok(-target.ln() / mass);
        }
    }
    Err(Error::InsufficientData("pilot runs never informative".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub reference: Hull,
    pub alpha: f64,
    pub pilot: RestrictionEstimate,
    /// Excursion mass per unit λ meeting the reference hull.
    pub mass: f64,
    /// λ for which P(avoid reference) = φ′(0)^α.
    pub lambda_star: f64,
    pub lambda_ci: [f64; 2],
}

/// Fits the lattice normalisation of λ: the intensity at which the
/// excursion ensemble reproduces exponent `alpha` at the reference hull.
pub fn calibrate_lambda(law: &ExcursionLaw, reference: &Hull, alpha: f64, replicas: u64, seed: u64) -> Result<CalibrationReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
    }
    if law.lambda <= 0.0 {
        return Err(Error::InvalidParameter("pilot lambda must be positive".into()));
    }
    let pilot = avoidance_probability(&AvoidanceLaw::Excursions(*law), reference, replicas, seed, None)?;
    if pilot.degenerate {
        return Err(Error::DegenerateFit("pilot avoidance probability is 0 or 1".into()));
    }
    let p = pilot.avoidance.estimate;
    let mass = -p.ln() / law.lambda;
    let target = -alpha * reference.map().derivative_at_origin().ln();
    let lambda_star = target / mass;
    // Var(log p̂) ≈ (1 − p)/(n p); relative error of the mass is that over |log p|
    let rel = ((1.0 - p) / (replicas as f64 * p)).sqrt() / p.ln().abs();
    let lambda_ci = [lambda_star / (1.0 + 1.96 * rel), lambda_star / (1.0 - 1.96 * rel).max(1e-12)];
    Ok(CalibrationReport { reference: *reference, alpha, pilot, mass, lambda_star, lambda_ci })
}
