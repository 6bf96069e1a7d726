//! The d* distance between loop collections.
//!
//! Loops are sorted into dyadic diameter bands relative to a reference
//! scale D: band 0 holds diameters above D/2, band n ≥ 1 holds diameters in
//! (D·2^{-n-1}, D·2^{-n}]. Within a band the collections are compared by the
//! bottleneck matching distance capped at M, and bands are summed with
//! weights 2^{-n}.

use super::bridge::RwLoop;
use crate::site_set::SiteSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandScheme {
    pub reference: f64,
}

impl BandScheme {
    pub fn band_of(&self, diameter: f64) -> usize {
        let mut n = 0usize;
        let mut upper = self.reference / 2.0;
        while diameter <= upper && upper > 0.0 && n < 200 {
            n += 1;
            upper /= 2.0;
        }
        n
    }
}

/// Hausdorff distance between two finite site sets.
pub fn hausdorff(a: &SiteSet, b: &SiteSet) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    let directed = |p: &SiteSet, q: &SiteSet| {
        p.iter()
            .map(|s| q.iter().map(|t| s.dist2(t)).min().unwrap())
            .max()
            .unwrap()
    };
    (directed(a, b).max(directed(b, a)) as f64).sqrt()
}

/// Whether a perfect matching exists using pairs with cost ≤ limit.
fn perfect_matching(cost: &[Vec<f64>], limit: f64) -> bool {
    let n = cost.len();
    let mut match_right: Vec<Option<usize>> = vec![None; n];
    fn augment(
        u: usize,
        cost: &[Vec<f64>],
        limit: f64,
        seen: &mut [bool],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for v in 0..cost.len() {
            if cost[u][v] <= limit && !seen[v] {
                seen[v] = true;
                if match_right[v].is_none_or(|w| augment(w, cost, limit, seen, match_right)) {
                    match_right[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|u| augment(u, cost, limit, &mut vec![false; n], &mut match_right))
}

/// min over bijections σ of max_γ d(γ, σ(γ)), or ∞ when none exists.
fn bottleneck(a: &[SiteSet], b: &[SiteSet]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| hausdorff(x, y)).collect()).collect();
    let mut values: Vec<f64> = cost.iter().flatten().copied().collect();
    values.sort_by(|x, y| x.total_cmp(y));
    values.dedup();
    let (mut lo, mut hi) = (0usize, values.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(&cost, values[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    values[lo]
}

/// d*(Γ, Γ') with cap `cap` (M) and the given band scheme.
pub fn soup_distance(a: &[RwLoop], b: &[RwLoop], cap: f64, bands: BandScheme) -> f64 {
    let bucket = |loops: &[RwLoop]| {
        let mut out: Vec<Vec<SiteSet>> = Vec::new();
        for l in loops {
            let trace = l.trace();
            let n = bands.band_of(trace.diameter());
            if out.len() <= n {
                out.resize_with(n + 1, Vec::new);
            }
            out[n].push(trace);
        }
        out
    };
    let (ba, bb) = (bucket(a), bucket(b));
    let empty = Vec::new();
    (0..ba.len().max(bb.len()))
        .map(|n| {
            let d = bottleneck(ba.get(n).unwrap_or(&empty), bb.get(n).unwrap_or(&empty));
            d.min(cap) * 0.5f64.powi(n as i32)
        })
        .sum()
}
