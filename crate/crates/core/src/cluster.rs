//! Loop clusters under the shared-site relation, outermost clusters and
//! complete clusters.

use crate::error::{Error, Result};
use crate::lattice::{BBox, Grid, Site};
use crate::loop_measure::RwLoop;
use crate::site_set::SiteSet;
use crate::topology::{filling, outer_contour, Contour};

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Groups the given loops by shared sites. Returns, for each loop, the index
/// of its group; groups are numbered by their smallest member.
pub fn shared_site_labels<'a, I>(loops: I) -> Vec<usize>
where
    I: IntoIterator<Item = &'a RwLoop>,
    I::IntoIter: Clone,
{
    let iter = loops.into_iter();
    let n = iter.clone().count();
    let Some(bbox) = iter.clone().map(|l| l.bbox()).reduce(|a, b| a.union(&b)) else {
        return Vec::new();
    };
    let mut uf = UnionFind::new(n);
    let mut first_seen: Grid<u32> = Grid::new(bbox, u32::MAX);
    for (i, l) in iter.enumerate() {
        for &s in l.sites() {
            let slot = first_seen.get_mut(s).unwrap();
            if *slot == u32::MAX {
                *slot = i as u32;
            } else {
                uf.union(*slot as usize, i);
            }
        }
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut next = 0;
    (0..n)
        .map(|i| {
            let r = uf.find(i);
            if label_of_root[r] == usize::MAX {
                label_of_root[r] = next;
                next += 1;
            }
            label_of_root[r]
        })
        .collect()
}

/// Whether the loops at `subset` (indices into `loops`) form a single cluster.
pub fn subset_connected(loops: &[RwLoop], subset: &[usize]) -> Result<bool> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let labels = shared_site_labels(subset.iter().map(|&i| &loops[i]));
    Ok(labels.iter().all(|&l| l == 0))
}

#[derive(Debug, Clone)]
pub struct Cluster {
    /// Member loop indices, ascending.
    pub loops: Vec<usize>,
    pub trace: SiteSet,
    pub bbox: BBox,
}

/// Partition of a loop collection into clusters, with outermost fillings.
#[derive(Debug, Clone)]
pub struct ClusterSet {
    clusters: Vec<Cluster>,
    loop_cluster: Vec<usize>,
    outermost: Vec<usize>,
    /// Fillings of outermost clusters, indexed like `clusters`.
    fillings: Vec<Option<SiteSet>>,
    /// Outermost cluster owning each site of the ambient box.
    owner: Option<Grid<u32>>,
}

const NO_OWNER: u32 = u32::MAX;

impl ClusterSet {
    /// Clusters `loops` (two loops are joined iff their traces share a site)
    /// and resolves which clusters are outermost.
    pub fn build(loops: &[RwLoop]) -> Self {
        let labels = shared_site_labels(loops);
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
        for (i, &l) in labels.iter().enumerate() {
            members[l].push(i);
        }
        let clusters: Vec<Cluster> = members
            .into_iter()
            .map(|idx| {
                let trace: SiteSet =
                    idx.iter().flat_map(|&i| loops[i].sites().iter().copied()).collect();
                let bbox = trace.bbox().unwrap();
                Cluster { loops: idx, trace, bbox }
            })
            .collect();

        let mut fillings = vec![None; clusters.len()];
        let mut outermost = Vec::new();
        let owner = clusters.iter().map(|c| c.bbox).reduce(|a, b| a.union(&b)).map(|bb| {
            let mut owner = Grid::new(bb, NO_OWNER);
            // a nested cluster sits strictly inside its host's box, so
            // visiting by decreasing box area sees hosts first
            let mut order: Vec<usize> = (0..clusters.len()).collect();
            order.sort_by_key(|&i| (std::cmp::Reverse(clusters[i].bbox.area()), i));
            for i in order {
                let probe = clusters[i].trace.iter().next().unwrap();
                if *owner.get(probe).unwrap() != NO_OWNER {
                    continue;
                }
                let f = filling(&clusters[i].trace);
                for s in f.iter() {
                    owner.set(s, i as u32);
                }
                fillings[i] = Some(f);
                outermost.push(i);
            }
            owner
        });
        outermost.sort_unstable();
        ClusterSet { clusters, loop_cluster: labels, outermost, fillings, owner }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster(&self, id: usize) -> &Cluster {
        &self.clusters[id]
    }

    pub fn cluster_of_loop(&self, loop_index: usize) -> usize {
        self.loop_cluster[loop_index]
    }

    /// Ids of clusters whose filling lies in no other cluster's filling.
    pub fn outermost_clusters(&self) -> &[usize] {
        &self.outermost
    }

    pub fn is_outermost(&self, id: usize) -> bool {
        self.fillings[id].is_some()
    }

    /// Filling of an outermost cluster.
    pub fn outermost_filling(&self, id: usize) -> Option<&SiteSet> {
        self.fillings[id].as_ref()
    }

    /// Filling of any cluster (computed on demand for nested ones).
    pub fn filling_of(&self, id: usize) -> SiteSet {
        match &self.fillings[id] {
            Some(f) => f.clone(),
            None => filling(&self.clusters[id].trace),
        }
    }

    /// The outermost cluster whose filling contains `point`.
    pub fn cluster_containing(&self, point: Site) -> Option<usize> {
        let o = *self.owner.as_ref()?.get(point)?;
        (o != NO_OWNER).then_some(o as usize)
    }

    /// Outermost cluster `id` together with every loop lying in its filling.
    pub fn complete_cluster(&self, loops: &[RwLoop], id: usize) -> Result<CompleteCluster> {
        let filling = self.fillings.get(id).and_then(|f| f.clone()).ok_or_else(|| {
            Error::InvalidParameter(format!("cluster {id} is not an outermost cluster"))
        })?;
        let core = &self.clusters[id];
        let members: Vec<usize> = (0..loops.len())
            .filter(|&i| {
                self.loop_cluster[i] == id
                    || loops[i].sites().iter().all(|&s| filling.contains(s))
            })
            .collect();
        let contour = outer_contour(&filling)?;
        Ok(CompleteCluster {
            core: id,
            core_loops: core.loops.clone(),
            members,
            trace: core.trace.clone(),
            filling,
            contour,
        })
    }

    /// Complete clusters of all outermost clusters, in id order.
    pub fn complete_clusters(&self, loops: &[RwLoop]) -> Vec<CompleteCluster> {
        self.outermost
            .iter()
            .map(|&id| self.complete_cluster(loops, id).expect("outermost clusters are complete"))
            .collect()
    }

    /// Trace size of the largest cluster over the number of occupied sites.
    pub fn largest_cluster_fraction(&self) -> f64 {
        let total: usize = self.clusters.iter().map(|c| c.trace.len()).sum();
        let largest = self.clusters.iter().map(|c| c.trace.len()).max().unwrap_or(0);
        if total == 0 {
            0.0
        } else {
            largest as f64 / total as f64
        }
    }
}

/// An outermost cluster plus every loop inside its filling.
#[derive(Debug, Clone)]
pub struct CompleteCluster {
    pub core: usize,
    pub core_loops: Vec<usize>,
    /// Core loops and enclosed loops, ascending loop indices.
    pub members: Vec<usize>,
    /// Trace of the core cluster.
    pub trace: SiteSet,
    pub filling: SiteSet,
    pub contour: Contour,
}

impl CompleteCluster {
    pub fn diameter(&self) -> f64 {
        self.trace.diameter()
    }
}
