use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BBox, LatticeDomain, Site};
use crate::site_set::SiteSet;

pub const DEFAULT_BRIDGE_BUDGET: u64 = 10_000;

/// A closed nearest-neighbour walk. `sites[0]` is the root; the step from
/// the last site back to the root closes the loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Site>", into = "Vec<Site>")]
pub struct RwLoop {
    sites: Vec<Site>,
}

impl RwLoop {
    pub fn new(sites: Vec<Site>) -> Result<Self> {
        let n = sites.len();
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("loop length {n} must be even and >= 2")));
        }
        for i in 0..n {
            if !sites[i].is_adjacent(sites[(i + 1) % n]) {
                return Err(Error::InvalidParameter(format!(
                    "loop step {i} from {} to {} is not a unit step",
                    sites[i],
                    sites[(i + 1) % n]
                )));
            }
        }
        Ok(RwLoop { sites })
    }

    pub fn root(&self) -> Site {
        self.sites[0]
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    /// The set of distinct visited sites.
    pub fn trace(&self) -> SiteSet {
        self.sites.iter().copied().collect()
    }

    pub fn bbox(&self) -> BBox {
        BBox::of(self.sites.iter().copied()).unwrap()
    }
}

impl TryFrom<Vec<Site>> for RwLoop {
    type Error = Error;

    fn try_from(v: Vec<Site>) -> Result<Self> {
        RwLoop::new(v)
    }
}

impl From<RwLoop> for Vec<Site> {
    fn from(l: RwLoop) -> Self {
        l.sites
    }
}

/// Draws ±1 from an urn holding `plus` of +1 and `minus` of −1.
#[inline]
fn draw_sign<R: Rng + ?Sized>(rng: &mut R, plus: &mut u32, minus: &mut u32) -> i32 {
    if rng.gen_range(0..*plus + *minus) < *plus {
        *plus -= 1;
        1
    } else {
        *minus -= 1;
        -1
    }
}

/// Walks a uniformly random closed walk of length `len` from `root`,
/// calling `visit` on every site after the root. Stops early (returning
/// false) as soon as `visit` does.
///
/// Under the rotation (x, y) -> (x + y, x − y) a planar walk splits into two
/// independent ±1 walks; a closed walk is a pair of 1-d bridges, each a
/// uniform arrangement of len/2 up-steps and len/2 down-steps.
fn walk_bridge<R: Rng + ?Sized>(
    root: Site,
    len: u32,
    rng: &mut R,
    mut visit: impl FnMut(Site) -> bool,
) -> bool {
    let half = len / 2;
    let (mut up_plus, mut up_minus) = (half, half);
    let (mut vp_plus, mut vp_minus) = (half, half);
    let mut cur = root;
    for _ in 0..len - 1 {
        let u = draw_sign(rng, &mut up_plus, &mut up_minus);
        let v = draw_sign(rng, &mut vp_plus, &mut vp_minus);
        cur = Site::new(cur.x + (u + v) / 2, cur.y + (u - v) / 2);
        if !visit(cur) {
            return false;
        }
    }
    true
}

/// A uniformly distributed closed walk of length `len` rooted at `root`,
/// with no domain constraint.
pub fn sample_free_bridge<R: Rng + ?Sized>(root: Site, len: u32, rng: &mut R) -> Result<RwLoop> {
    if len < 2 || !len.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("bridge length {len} must be even and >= 2")));
    }
    let mut sites = Vec::with_capacity(len as usize);
    sites.push(root);
    walk_bridge(root, len, rng, |s| {
        sites.push(s);
        true
    });
    Ok(RwLoop { sites })
}

/// Attempts one bridge that must stay inside `domain`; `None` when it exits.
pub(crate) fn try_bridge_in<R: Rng + ?Sized>(
    root: Site,
    len: u32,
    domain: &LatticeDomain,
    rng: &mut R,
) -> Option<RwLoop> {
    let mut sites = Vec::with_capacity(len as usize);
    sites.push(root);
    let inside = walk_bridge(root, len, rng, |s| {
        sites.push(s);
        domain.contains(s)
    });
    inside.then_some(RwLoop { sites })
}

/// Uniform closed walk from `root` conditioned to stay in `domain`, by
/// rejection. Fails with `BudgetExceeded` after `budget` exiting proposals.
pub fn sample_bridge<R: Rng + ?Sized>(
    root: Site,
    len: u32,
    domain: &LatticeDomain,
    rng: &mut R,
    budget: u64,
) -> Result<RwLoop> {
    if len < 2 || !len.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("bridge length {len} must be even and >= 2")));
    }
    if !domain.contains(root) {
        return Err(Error::SiteOutsideDomain(root));
    }
    for _ in 0..budget {
        if let Some(l) = try_bridge_in(root, len, domain, rng) {
            return Ok(l);
        }
    }
    Err(Error::BudgetExceeded { budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Tag};
    use std::collections::HashMap;

    #[test]
    fn rejects_open_walks() {
        assert!(RwLoop::new(vec![Site::new(0, 0), Site::new(1, 0), Site::new(2, 0), Site::new(1, 0)]).is_ok());
        assert!(RwLoop::new(vec![Site::new(0, 0), Site::new(1, 0), Site::new(1, 1), Site::new(2, 1)]).is_err());
        assert!(RwLoop::new(vec![Site::new(0, 0)]).is_err());
    }

    #[test]
    fn free_bridges_are_closed() {
        let mut rng = stream(3, Tag::Bridge, 0, 0, 0);
        for len in [2, 4, 10, 100, 1000] {
            let l = sample_free_bridge(Site::new(5, -2), len, &mut rng).unwrap();
            assert_eq!(l.len(), len as usize);
            assert!(RwLoop::new(l.sites().to_vec()).is_ok());
        }
    }

    #[test]
    fn length_two_bridges_are_uniform_over_four_loops() {
        let d = LatticeDomain::disk(8).unwrap();
        let mut rng = stream(11, Tag::Bridge, 0, 0, 0);
        let mut hist: HashMap<Site, u32> = HashMap::new();
        let n = 40_000;
        for _ in 0..n {
            let l = sample_bridge(Site::ORIGIN, 2, &d, &mut rng, 10).unwrap();
            *hist.entry(l.sites()[1]).or_default() += 1;
        }
        assert_eq!(hist.len(), 4);
        for &c in hist.values() {
            let z = (c as f64 - n as f64 / 4.0) / (n as f64 * 0.25 * 0.75).sqrt();
            assert!(z.abs() < 4.0);
        }
    }

    #[test]
    fn edge_root_can_exhaust_budget() {
        // from (8, 0) only the step to (7, 0) stays inside the R = 8 disk, so a
        // single proposal succeeds with probability 1/4
        let d = LatticeDomain::disk(8).unwrap();
        let mut outcomes = (0, 0);
        for seed in 0..64 {
            let mut rng = stream(seed, Tag::Bridge, 0, 0, 0);
            match sample_bridge(Site::new(8, 0), 2, &d, &mut rng, 1) {
                Ok(l) => {
                    assert_eq!(l.sites()[1], Site::new(7, 0));
                    outcomes.0 += 1;
                }
                Err(Error::BudgetExceeded { budget: 1 }) => outcomes.1 += 1,
                Err(e) => panic!("unexpected {e}"),
            }
        }
        assert!(outcomes.0 > 0 && outcomes.1 > outcomes.0);
        let mut rng = stream(1, Tag::Bridge, 0, 0, 0);
        assert!(matches!(
            sample_bridge(Site::new(9, 0), 2, &d, &mut rng, 50),
            Err(Error::SiteOutsideDomain(_))
        ));
    }
}
