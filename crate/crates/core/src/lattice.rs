//! Square-lattice sites, bounding boxes and the two domain shapes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::site_set::SiteSet;

/// A point of the square lattice Z².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct Site {
    pub x: i32,
    pub y: i32,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    #[inline]
    pub const fn new(x: i32, y: i32) -> Self {
        Site { x, y }
    }

    /// The four nearest neighbours in the fixed order E, N, W, S.
    #[inline]
    pub fn adjacent(self) -> [Site; 4] {
        [
            Site::new(self.x + 1, self.y),
            Site::new(self.x, self.y + 1),
            Site::new(self.x - 1, self.y),
            Site::new(self.x, self.y - 1),
        ]
    }

    #[inline]
    pub fn is_adjacent(self, other: Site) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }

    #[inline]
    pub fn dist2(self, other: Site) -> i64 {
        let dx = (self.x - other.x) as i64;
        let dy = (self.y - other.y) as i64;
        dx * dx + dy * dy
    }
}

impl From<[i32; 2]> for Site {
    fn from(p: [i32; 2]) -> Self {
        Site::new(p[0], p[1])
    }
}

impl From<Site> for [i32; 2] {
    fn from(s: Site) -> Self {
        [s.x, s.y]
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Inclusive axis-aligned box of lattice sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub min_x: i32,
    pub min_y: i32,
    pub max_x: i32,
    pub max_y: i32,
}

impl BBox {
    pub fn point(s: Site) -> Self {
        BBox { min_x: s.x, min_y: s.y, max_x: s.x, max_y: s.y }
    }

    pub fn of<I: IntoIterator<Item = Site>>(sites: I) -> Option<Self> {
        let mut it = sites.into_iter();
        let first = it.next()?;
        let mut b = BBox::point(first);
        for s in it {
            b.include(s);
        }
        Some(b)
    }

    pub fn include(&mut self, s: Site) {
        self.min_x = self.min_x.min(s.x);
        self.min_y = self.min_y.min(s.y);
        self.max_x = self.max_x.max(s.x);
        self.max_y = self.max_y.max(s.y);
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            min_x: self.min_x.min(other.min_x),
            min_y: self.min_y.min(other.min_y),
            max_x: self.max_x.max(other.max_x),
            max_y: self.max_y.max(other.max_y),
        }
    }

    pub fn expand(&self, margin: i32) -> BBox {
        BBox {
            min_x: self.min_x - margin,
            min_y: self.min_y - margin,
            max_x: self.max_x + margin,
            max_y: self.max_y + margin,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        (self.max_x - self.min_x + 1) as usize
    }

    #[inline]
    pub fn height(&self) -> usize {
        (self.max_y - self.min_y + 1) as usize
    }

    #[inline]
    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    #[inline]
    pub fn contains(&self, s: Site) -> bool {
        s.x >= self.min_x && s.x <= self.max_x && s.y >= self.min_y && s.y <= self.max_y
    }

    /// True when `inner` fits inside `self` with at least `margin` sites to spare.
    pub fn contains_box_with_margin(&self, inner: &BBox, margin: i32) -> bool {
        inner.min_x - margin >= self.min_x
            && inner.min_y - margin >= self.min_y
            && inner.max_x + margin <= self.max_x
            && inner.max_y + margin <= self.max_y
    }

    /// Row-major index of a site inside the box.
    #[inline]
    pub fn index(&self, s: Site) -> usize {
        (s.y - self.min_y) as usize * self.width() + (s.x - self.min_x) as usize
    }

    #[inline]
    pub fn site_at(&self, idx: usize) -> Site {
        let w = self.width();
        Site::new(self.min_x + (idx % w) as i32, self.min_y + (idx / w) as i32)
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (self.min_y..=self.max_y)
            .flat_map(move |y| (self.min_x..=self.max_x).map(move |x| Site::new(x, y)))
    }

    /// Sites on the outermost ring of the box.
    pub fn rim(&self) -> impl Iterator<Item = Site> + '_ {
        self.sites().filter(move |s| {
            s.x == self.min_x || s.x == self.max_x || s.y == self.min_y || s.y == self.max_y
        })
    }
}

/// Dense per-site storage over a bounding box.
#[derive(Debug, Clone)]
pub struct Grid<T> {
    bbox: BBox,
    cells: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn new(bbox: BBox, fill: T) -> Self {
        Grid { bbox, cells: vec![fill; bbox.area()] }
    }
}

impl<T> Grid<T> {
    pub fn bbox(&self) -> &BBox {
        &self.bbox
    }

    #[inline]
    pub fn get(&self, s: Site) -> Option<&T> {
        if self.bbox.contains(s) {
            Some(&self.cells[self.bbox.index(s)])
        } else {
            None
        }
    }

    #[inline]
    pub fn get_mut(&mut self, s: Site) -> Option<&mut T> {
        if self.bbox.contains(s) {
            let i = self.bbox.index(s);
            Some(&mut self.cells[i])
        } else {
            None
        }
    }

    #[inline]
    pub fn set(&mut self, s: Site, value: T) {
        let i = self.bbox.index(s);
        self.cells[i] = value;
    }
}

/// Shape of a lattice domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    /// Sites with x² + y² ≤ R².
    Disk { radius: u32 },
    /// Sites with |x| ≤ W and 0 ≤ y ≤ H; the row y = 0 plays the real line.
    HalfPlaneBox { width: u32, height: u32 },
}

/// A finite, 4-connected set of lattice sites with O(1) membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DomainKind", into = "DomainKind")]
pub struct LatticeDomain {
    kind: DomainKind,
    bbox: BBox,
}

impl TryFrom<DomainKind> for LatticeDomain {
    type Error = Error;

    fn try_from(kind: DomainKind) -> Result<Self> {
        LatticeDomain::build(kind)
    }
}

impl From<LatticeDomain> for DomainKind {
    fn from(d: LatticeDomain) -> Self {
        d.kind
    }
}

impl LatticeDomain {
    pub const MIN_RADIUS: u32 = 8;

    pub fn build(kind: DomainKind) -> Result<Self> {
        let bbox = match kind {
            DomainKind::Disk { radius } => {
                if radius < Self::MIN_RADIUS {
                    return Err(Error::InvalidSize(format!(
                        "disk radius {radius} is below the minimum {}",
                        Self::MIN_RADIUS
                    )));
                }
                let r = radius as i32;
                BBox { min_x: -r, min_y: -r, max_x: r, max_y: r }
            }
            DomainKind::HalfPlaneBox { width, height } => {
                if width == 0 || height == 0 {
                    return Err(Error::InvalidSize(format!(
                        "half-plane box needs positive width and height, got {width}x{height}"
                    )));
                }
                BBox { min_x: -(width as i32), min_y: 0, max_x: width as i32, max_y: height as i32 }
            }
        };
        Ok(LatticeDomain { kind, bbox })
    }

    pub fn disk(radius: u32) -> Result<Self> {
        Self::build(DomainKind::Disk { radius })
    }

    pub fn half_plane_box(width: u32, height: u32) -> Result<Self> {
        Self::build(DomainKind::HalfPlaneBox { width, height })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn bbox(&self) -> &BBox {
        &self.bbox
    }

    #[inline]
    pub fn contains(&self, s: Site) -> bool {
        match self.kind {
            DomainKind::Disk { radius } => {
                let r = radius as i64;
                (s.x as i64).pow(2) + (s.y as i64).pow(2) <= r * r
            }
            DomainKind::HalfPlaneBox { .. } => self.bbox.contains(s),
        }
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.bbox.sites().filter(move |&s| self.contains(s))
    }

    pub fn site_count(&self) -> usize {
        self.sites().count()
    }

    /// In-domain nearest neighbours of `site`, in E, N, W, S order.
    pub fn neighbors(&self, site: Site) -> Result<Vec<Site>> {
        if !self.contains(site) {
            return Err(Error::SiteOutsideDomain(site));
        }
        Ok(site.adjacent().into_iter().filter(|&t| self.contains(t)).collect())
    }

    /// A site is on the boundary when it has fewer than four in-domain neighbours.
    pub fn is_boundary(&self, site: Site) -> bool {
        self.contains(site) && site.adjacent().iter().any(|&t| !self.contains(t))
    }

    pub fn boundary_sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.sites().filter(move |&s| self.is_boundary(s))
    }

    /// Largest Euclidean extent, used as the default reference scale.
    pub fn diameter(&self) -> f64 {
        match self.kind {
            DomainKind::Disk { radius } => 2.0 * radius as f64,
            DomainKind::HalfPlaneBox { width, height } => {
                ((2.0 * width as f64).powi(2) + (height as f64).powi(2)).sqrt()
            }
        }
    }

    /// Characteristic linear size: the radius for disks, max(W, H) for boxes.
    pub fn scale(&self) -> u32 {
        match self.kind {
            DomainKind::Disk { radius } => radius,
            DomainKind::HalfPlaneBox { width, height } => width.max(height),
        }
    }

    /// Domain sites at Euclidean distance strictly less than `eps` from `a`.
    pub fn half_disk_sites(&self, a: Site, eps: u32) -> SiteSet {
        let e = eps as i32;
        let eps2 = (eps as i64) * (eps as i64);
        let window = BBox { min_x: a.x - e, min_y: a.y - e, max_x: a.x + e, max_y: a.y + e };
        window
            .sites()
            .filter(|&s| self.contains(s) && s.dist2(a) < eps2)
            .collect()
    }

    /// The lattice point on the domain boundary to the right of the origin:
    /// (R, 0) for disks and (W, 0) for boxes.
    pub fn right_boundary_point(&self) -> Site {
        match self.kind {
            DomainKind::Disk { radius } => Site::new(radius as i32, 0),
            DomainKind::HalfPlaneBox { width, .. } => Site::new(width as i32, 0),
        }
    }
}
