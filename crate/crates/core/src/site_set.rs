use serde::{Deserialize, Serialize};

use crate::lattice::{BBox, Site};

/// A finite set of sites: sorted coordinates plus a bitmap over the bounding
/// box for constant-time membership.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Site>", into = "Vec<Site>")]
pub struct SiteSet {
    sites: Vec<Site>,
    bbox: Option<BBox>,
    bits: Vec<u64>,
}

impl PartialEq for SiteSet {
    fn eq(&self, other: &Self) -> bool {
        self.sites == other.sites
    }
}

impl Eq for SiteSet {}

impl SiteSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from an already sorted, deduplicated vector.
    fn from_sorted(sites: Vec<Site>) -> Self {
        let bbox = BBox::of(sites.iter().copied());
        let mut bits = Vec::new();
        if let Some(b) = bbox {
            bits = vec![0u64; b.area().div_ceil(64)];
            for &s in &sites {
                let i = b.index(s);
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        SiteSet { sites, bbox, bits }
    }

    #[inline]
    pub fn contains(&self, s: Site) -> bool {
        match self.bbox {
            Some(b) if b.contains(s) => {
                let i = b.index(s);
                self.bits[i / 64] & (1 << (i % 64)) != 0
            }
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn bbox(&self) -> Option<BBox> {
        self.bbox
    }

    /// Sites in lexicographic (x, y) order.
    pub fn iter(&self) -> impl Iterator<Item = Site> + '_ {
        self.sites.iter().copied()
    }

    pub fn as_slice(&self) -> &[Site] {
        &self.sites
    }

    pub fn is_subset(&self, other: &SiteSet) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    pub fn intersects(&self, other: &SiteSet) -> bool {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().any(|s| big.contains(s))
    }

    pub fn union(&self, other: &SiteSet) -> SiteSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn difference(&self, other: &SiteSet) -> SiteSet {
        self.iter().filter(|&s| !other.contains(s)).collect()
    }

    pub fn intersection(&self, other: &SiteSet) -> SiteSet {
        self.iter().filter(|&s| other.contains(s)).collect()
    }

    /// Largest Euclidean distance between two member sites.
    pub fn diameter(&self) -> f64 {
        // the extreme pair always lies on the convex hull; the hull of a
        // lattice set is small, so filter to per-column extremes first
        let mut extremes: Vec<Site> = Vec::new();
        let mut i = 0;
        while i < self.sites.len() {
            let x = self.sites[i].x;
            let mut j = i;
            while j + 1 < self.sites.len() && self.sites[j + 1].x == x {
                j += 1;
            }
            extremes.push(self.sites[i]);
            if j != i {
                extremes.push(self.sites[j]);
            }
            i = j + 1;
        }
        let mut best = 0i64;
        for (k, &a) in extremes.iter().enumerate() {
            for &b in &extremes[k + 1..] {
                best = best.max(a.dist2(b));
            }
        }
        (best as f64).sqrt()
    }
}

impl FromIterator<Site> for SiteSet {
    fn from_iter<I: IntoIterator<Item = Site>>(iter: I) -> Self {
        let mut sites: Vec<Site> = iter.into_iter().collect();
        sites.sort_unstable();
        sites.dedup();
        SiteSet::from_sorted(sites)
    }
}

impl From<Vec<Site>> for SiteSet {
    fn from(v: Vec<Site>) -> Self {
        v.into_iter().collect()
    }
}

impl From<SiteSet> for Vec<Site> {
    fn from(s: SiteSet) -> Self {
        s.sites
    }
}
