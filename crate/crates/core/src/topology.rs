//! Fillings, outer contours, articulation sites and related planar queries.
//!
//! All connectivity is 4-connectivity, for site sets and for their
//! complements alike. Contours live on the dual lattice: the corner `(i, j)`
//! stands for the point `(i − ½, j − ½)`, so site `(x, y)` is the unit
//! square with corners `(x, y)` and `(x + 1, y + 1)`.

use serde::{Deserialize, Serialize};

use crate::cluster::CompleteCluster;
use crate::error::{Error, Result};
use crate::lattice::{BBox, Grid, Site};
use crate::loop_measure::RwLoop;
use crate::site_set::SiteSet;

pub use crate::cluster::subset_connected;

/// Marks the sites of `ambient` reachable from its rim through sites not in
/// `blocked`.
fn exterior_mask(blocked: &SiteSet, ambient: BBox) -> Grid<bool> {
    let mut outside = Grid::new(ambient, false);
    let mut stack: Vec<Site> = ambient.rim().filter(|&s| !blocked.contains(s)).collect();
    for &s in &stack {
        outside.set(s, true);
    }
    while let Some(s) = stack.pop() {
        for t in s.adjacent() {
            if let Some(seen) = outside.get_mut(t) {
                if !*seen && !blocked.contains(t) {
                    *seen = true;
                    stack.push(t);
                }
            }
        }
    }
    outside
}

/// Sites of the complement of `blocked` 4-connected to `start` inside `ambient`.
fn complement_component(blocked: &SiteSet, ambient: BBox, start: Site) -> Grid<bool> {
    let mut mark = Grid::new(ambient, false);
    if !ambient.contains(start) || blocked.contains(start) {
        return mark;
    }
    mark.set(start, true);
    let mut stack = vec![start];
    while let Some(s) = stack.pop() {
        for t in s.adjacent() {
            if let Some(seen) = mark.get_mut(t) {
                if !*seen && !blocked.contains(t) {
                    *seen = true;
                    stack.push(t);
                }
            }
        }
    }
    mark
}

/// The filling of `set` computed inside `ambient`: the box minus the
/// component of the complement touching the box rim. The ambient box is
/// widened so that it keeps at least one free site around `set`.
pub fn filling_in(set: &SiteSet, ambient: BBox) -> SiteSet {
    let Some(bb) = set.bbox() else {
        return SiteSet::new();
    };
    let ambient = ambient.union(&bb.expand(1));
    let outside = exterior_mask(set, ambient);
    // only the set's own box can hold filled sites
    bb.sites().filter(|&s| !*outside.get(s).unwrap()).collect()
}

/// The filling of `set`: complement of the unbounded complementary component.
pub fn filling(set: &SiteSet) -> SiteSet {
    match set.bbox() {
        Some(bb) => filling_in(set, bb.expand(1)),
        None => SiteSet::new(),
    }
}

/// True iff `point` lies in the filling of `set`.
pub fn encircles(set: &SiteSet, point: Site) -> bool {
    match set.bbox() {
        Some(bb) if bb.contains(point) => {
            set.contains(point) || !*exterior_mask(set, bb.expand(1)).get(point).unwrap()
        }
        _ => false,
    }
}

/// Whether the set is non-empty and 4-connected.
pub fn is_connected(set: &SiteSet) -> bool {
    let Some(first) = set.iter().next() else {
        return false;
    };
    let mut seen = std::collections::HashSet::from([first]);
    let mut stack = vec![first];
    while let Some(s) = stack.pop() {
        for t in s.adjacent() {
            if set.contains(t) && seen.insert(t) {
                stack.push(t);
            }
        }
    }
    seen.len() == set.len()
}

/// Closed counterclockwise cycle of dual-lattice corners around a filled set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contour {
    /// Corner `i` to corner `i + 1` (cyclically) is one unit dual edge.
    corners: Vec<(i32, i32)>,
    /// Filled sites incident to a contour edge, i.e. with an exterior neighbour.
    incident: SiteSet,
}

impl Contour {
    pub fn corners(&self) -> &[(i32, i32)] {
        &self.corners
    }

    /// Number of dual edges.
    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    pub fn incident_sites(&self) -> &SiteSet {
        &self.incident
    }

    /// Signed area enclosed, by the shoelace formula.
    pub fn signed_area(&self) -> f64 {
        let n = self.corners.len();
        let twice: i64 = (0..n)
            .map(|i| {
                let (x0, y0) = self.corners[i];
                let (x1, y1) = self.corners[(i + 1) % n];
                x0 as i64 * y1 as i64 - x1 as i64 * y0 as i64
            })
            .sum();
        twice as f64 / 2.0
    }

    /// Corner coordinates in site units, closed by repeating the first point.
    pub fn polyline(&self) -> Vec<[f64; 2]> {
        self.corners
            .iter()
            .chain(self.corners.first())
            .map(|&(i, j)| [i as f64 - 0.5, j as f64 - 0.5])
            .collect()
    }

    /// The cycle rotated to start at the first corner nearest `p`, in
    /// site coordinates.
    pub fn rotated_to_nearest(&self, p: [f64; 2]) -> Vec<(i32, i32)> {
        let d = |&(i, j): &(i32, i32)| {
            let dx = i as f64 - 0.5 - p[0];
            let dy = j as f64 - 0.5 - p[1];
            dx * dx + dy * dy
        };
        let start = (0..self.corners.len())
            .min_by(|&a, &b| d(&self.corners[a]).total_cmp(&d(&self.corners[b])).then(a.cmp(&b)))
            .unwrap_or(0);
        let mut v = self.corners[start..].to_vec();
        v.extend_from_slice(&self.corners[..start]);
        v
    }
}

/// The outer boundary of a filled, 4-connected set, traced counterclockwise
/// from its lexicographically smallest dual edge.
pub fn outer_contour(filled: &SiteSet) -> Result<Contour> {
    if filled.is_empty() {
        return Err(Error::NotConnected);
    }
    if !is_connected(filled) {
        return Err(Error::NotConnected);
    }
    if filling(filled) != *filled {
        return Err(Error::NotFilled);
    }
    // every corner has exactly one outgoing boundary edge: a pinch corner
    // would enclose a complementary site, contradicting filledness
    let mut next: std::collections::HashMap<(i32, i32), (i32, i32)> = Default::default();
    let mut incident = Vec::new();
    for s in filled.iter() {
        let (x, y) = (s.x, s.y);
        let mut touches = false;
        let [e, n, w, so] = s.adjacent();
        if !filled.contains(so) {
            next.insert((x, y), (x + 1, y));
            touches = true;
        }
        if !filled.contains(e) {
            next.insert((x + 1, y), (x + 1, y + 1));
            touches = true;
        }
        if !filled.contains(n) {
            next.insert((x + 1, y + 1), (x, y + 1));
            touches = true;
        }
        if !filled.contains(w) {
            next.insert((x, y + 1), (x, y));
            touches = true;
        }
        if touches {
            incident.push(s);
        }
    }
    let start = next.iter().map(|(&a, &b)| (a, b)).min().unwrap().0;
    let mut corners = vec![start];
    let mut cur = next[&start];
    while cur != start {
        corners.push(cur);
        cur = next[&cur];
    }
    if corners.len() != next.len() {
        return Err(Error::NotConnected);
    }
    Ok(Contour { corners, incident: incident.into_iter().collect() })
}

/// Articulation sites of the 4-adjacency graph on `set`, optionally
/// restricted to the sites incident to `contour`.
pub fn articulation_sites(set: &SiteSet, contour: Option<&Contour>) -> SiteSet {
    let sites = set.as_slice();
    let n = sites.len();
    if n < 3 {
        return SiteSet::new();
    }
    let index = |s: Site| sites.binary_search(&s).ok();
    let nbrs: Vec<Vec<usize>> = sites
        .iter()
        .map(|s| s.adjacent().into_iter().filter_map(index).collect())
        .collect();
    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut time = 0;
    for root in 0..n {
        if disc[root] != UNSEEN {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        // (vertex, parent, next neighbour slot)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, UNSEEN, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, parent, slot) = *top;
            if slot < nbrs[v].len() {
                top.2 += 1;
                let w = nbrs[v][slot];
                if disc[w] == UNSEEN {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if w != parent {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != UNSEEN {
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= disc[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    sites
        .iter()
        .zip(is_cut)
        .filter(|&(s, cut)| cut && contour.is_none_or(|c| c.incident_sites().contains(*s)))
        .map(|(&s, _)| s)
        .collect()
}

/// Sites of `set` that alone separate `point` from infinity: each has a
/// 4-neighbour in the unbounded complementary component and another in the
/// complementary component containing `point`. Empty when `point` is on the
/// set or not encircled. `restrict` limits the candidate sites.
pub fn point_cut_sites(set: &SiteSet, point: Site, restrict: Option<&SiteSet>) -> SiteSet {
    let Some(bb) = set.bbox() else {
        return SiteSet::new();
    };
    if set.contains(point) || !bb.contains(point) {
        return SiteSet::new();
    }
    let ambient = bb.expand(1);
    let outside = exterior_mask(set, ambient);
    if *outside.get(point).unwrap() {
        return SiteSet::new();
    }
    let face = complement_component(set, ambient, point);
    set.iter()
        .filter(|&s| restrict.is_none_or(|r| r.contains(s)))
        .filter(|&s| {
            let adj = s.adjacent();
            adj.iter().any(|&t| *outside.get(t).unwrap_or(&true))
                && adj.iter().any(|&t| *face.get(t).unwrap_or(&false))
        })
        .collect()
}

/// Indices (into `loops`) of the complete cluster's members that visit a
/// site incident to its outer contour.
pub fn boundary_touching_loops(cluster: &CompleteCluster, loops: &[RwLoop]) -> Vec<usize> {
    let incident = cluster.contour.incident_sites();
    cluster
        .members
        .iter()
        .copied()
        .filter(|&i| loops[i].sites().iter().any(|&s| incident.contains(s)))
        .collect()
}
