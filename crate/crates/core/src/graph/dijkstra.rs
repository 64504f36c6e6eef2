use rayon::prelude::*;

use super::radix::RadixHeap;
use super::Graph;
use crate::error::{Error, Result};
use crate::points::{CenterSet, WeightedPointSet};

const NO_OWNER: usize = usize::MAX;
const NO_SOURCE: u32 = u32::MAX;

/// Tentative distance and owner of one vertex, kept together so a relaxation
/// reads a single slot.
#[derive(Copy, Clone)]
struct Label {
    dist: f64,
    owner: u32,
}

/// Distances and owning sources from a multi-source Dijkstra run.
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    dist: Vec<f64>,
    owner: Vec<usize>,
}

impl ShortestPaths {
    /// Distance to the nearest source, `f64::INFINITY` if unreachable.
    pub fn distance(&self, u: usize) -> f64 {
        self.dist[u]
    }

    /// The source attaining the minimum, `None` if unreachable.
    pub fn owner(&self, u: usize) -> Option<usize> {
        match self.owner[u] {
            NO_OWNER => None,
            s => Some(s),
        }
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn into_distances(self) -> Vec<f64> {
        self.dist
    }
}

/// Simultaneous Dijkstra from every `(source, offset)` pair.
///
/// `distance(u)` is the minimum over sources of `offset + d(source, u)`. When
/// several sources attain it, the smallest source id owns `u`.
pub fn multi_source_dijkstra(g: &Graph, sources: &[(usize, f64)]) -> Result<ShortestPaths> {
    if sources.is_empty() {
        return Err(Error::invalid(
            "multi-source Dijkstra needs at least one source",
        ));
    }
    let n = g.vertex_count();
    for &(s, off) in sources {
        if s >= n {
            return Err(Error::invalid(format!("source {s} out of range")));
        }
        if !(off >= 0.0 && off.is_finite()) {
            return Err(Error::invalid(format!(
                "source {s} has invalid offset {off}"
            )));
        }
    }
    Ok(run(g, sources.iter().copied()))
}

fn run(g: &Graph, sources: impl Iterator<Item = (usize, f64)>) -> ShortestPaths {
    let n = g.vertex_count();
    let mut labels = vec![
        Label {
            dist: f64::INFINITY,
            owner: NO_SOURCE,
        };
        n
    ];
    let mut heap = RadixHeap::new();
    let mut seeds: Vec<(usize, f64)> = sources.collect();
    // The queue needs keys in nondecreasing order from the first pop on.
    seeds.sort_by(|a, b| a.1.total_cmp(&b.1));
    for (s, off) in seeds {
        let s32 = s as u32;
        if better(off, s32, labels[s]) {
            labels[s] = Label {
                dist: off,
                owner: s32,
            };
            heap.push(off, (s32, s32));
        }
    }
    // Equal distances may pop in any owner order; a later, smaller owner
    // re-labels and re-expands the vertex, so the lexicographic minimum wins.
    while let Some((d, (o, u))) = heap.pop() {
        let cur = labels[u as usize];
        if d != cur.dist || o != cur.owner {
            continue;
        }
        for (v, w) in g.neighbors(u as usize) {
            let nd = d + w;
            if better(nd, o, labels[v]) {
                labels[v] = Label { dist: nd, owner: o };
                heap.push(nd, (o, v as u32));
            }
        }
    }
    let dist = labels.iter().map(|l| l.dist).collect();
    let owner = labels
        .iter()
        .map(|l| {
            if l.owner == NO_SOURCE {
                NO_OWNER
            } else {
                l.owner as usize
            }
        })
        .collect();
    ShortestPaths { dist, owner }
}

#[inline]
fn better(d: f64, o: u32, cur: Label) -> bool {
    d < cur.dist || (d == cur.dist && o < cur.owner)
}

/// Zero-offset multi-source run from a center set.
pub(crate) fn from_centers(g: &Graph, centers: &CenterSet) -> Result<ShortestPaths> {
    if centers.is_empty() {
        return Err(Error::invalid("center set is empty"));
    }
    centers.check_bounds(g.vertex_count())?;
    Ok(run(g, centers.as_slice().iter().map(|&c| (c, 0.0))))
}

/// Lowers `dist` in place to account for extra zero-offset sources. Only
/// vertices whose distance actually improves are expanded.
pub(crate) fn relax_from(g: &Graph, dist: &mut [f64], sources: &[usize]) {
    let mut heap = RadixHeap::new();
    for &s in sources {
        if 0.0 < dist[s] {
            dist[s] = 0.0;
            heap.push(0.0, s as u32);
        }
    }
    while let Some((d, u)) = heap.pop() {
        if d != dist[u as usize] {
            continue;
        }
        for (v, w) in g.neighbors(u as usize) {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(nd, v as u32);
            }
        }
    }
}

/// Distances from `source` to every vertex.
pub fn single_source(g: &Graph, source: usize) -> Result<Vec<f64>> {
    multi_source_dijkstra(g, &[(source, 0.0)]).map(ShortestPaths::into_distances)
}

/// `rows[i][j] = d(sources[i], targets[j])`. Each search stops once every
/// target is settled. Rows are computed in parallel.
pub fn distance_rows(g: &Graph, sources: &[usize], targets: &[usize]) -> Result<Vec<Vec<f64>>> {
    let n = g.vertex_count();
    if let Some(&bad) = sources.iter().chain(targets).find(|&&v| v >= n) {
        return Err(Error::invalid(format!("vertex {bad} out of range")));
    }
    let mut slot = vec![NO_OWNER; n];
    let mut distinct = 0usize;
    for (j, &t) in targets.iter().enumerate() {
        if slot[t] == NO_OWNER {
            slot[t] = j;
            distinct += 1;
        }
    }
    let rows = sources
        .par_iter()
        .map(|&s| {
            let mut dist = vec![f64::INFINITY; n];
            let mut row = vec![f64::INFINITY; targets.len()];
            let mut settled = 0usize;
            let mut heap = RadixHeap::new();
            dist[s] = 0.0;
            heap.push(0.0, s as u32);
            while let Some((d, u)) = heap.pop() {
                let u = u as usize;
                if d != dist[u] {
                    continue;
                }
                if slot[u] != NO_OWNER {
                    row[slot[u]] = d;
                    settled += 1;
                    if settled == distinct {
                        break;
                    }
                }
                for (v, w) in g.neighbors(u) {
                    let nd = d + w;
                    if nd < dist[v] {
                        dist[v] = nd;
                        heap.push(nd, v as u32);
                    }
                }
            }
            // Duplicate targets share the first occurrence's slot.
            for (j, &t) in targets.iter().enumerate() {
                if slot[t] != j {
                    row[j] = row[slot[t]];
                }
            }
            row
        })
        .collect();
    Ok(rows)
}

/// `Σ weight · distance` over `x`. Infinite if some point is unreachable.
pub(crate) fn weighted_sum(dist: &[f64], x: &WeightedPointSet) -> f64 {
    x.entries().iter().map(|&(id, w)| w * dist[id]).sum()
}

fn first_unreachable(dist: &[f64], x: &WeightedPointSet) -> Option<usize> {
    x.ids().find(|&id| dist[id].is_infinite())
}

/// k-median cost of `x` against `c`: one multi-source run, then a weighted sum.
pub fn cost(g: &Graph, x: &WeightedPointSet, c: &CenterSet) -> Result<f64> {
    x.check_bounds(g.vertex_count())?;
    let paths = from_centers(g, c)?;
    if let Some(vertex) = first_unreachable(&paths.dist, x) {
        return Err(Error::Unreachable { vertex });
    }
    Ok(weighted_sum(&paths.dist, x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub point: usize,
    pub weight: f64,
    pub center: usize,
    pub distance: f64,
}

/// Nearest-center assignment of a weighted point set.
#[derive(Clone, Debug)]
pub struct ClusteringStats {
    pub centers: CenterSet,
    /// One entry per data point, in data order.
    pub assignments: Vec<Assignment>,
    /// Total member weight per center, aligned with `centers.as_slice()`.
    pub cluster_weights: Vec<f64>,
    pub cost: f64,
}

impl ClusteringStats {
    /// Number of centers that received at least one point.
    pub fn nonempty_clusters(&self) -> usize {
        self.cluster_weights.iter().filter(|&&w| w > 0.0).count()
    }

    pub fn cluster_weight_of(&self, center: usize) -> f64 {
        self.centers
            .index_of(center)
            .map_or(0.0, |i| self.cluster_weights[i])
    }
}

pub fn assign(g: &Graph, x: &WeightedPointSet, c: &CenterSet) -> Result<ClusteringStats> {
    x.check_bounds(g.vertex_count())?;
    let paths = from_centers(g, c)?;
    let mut cluster_weights = vec![0.0; c.len()];
    let mut assignments = Vec::with_capacity(x.len());
    for &(point, weight) in x.entries() {
        let center = paths
            .owner(point)
            .ok_or(Error::Unreachable { vertex: point })?;
        let distance = paths.distance(point);
        let slot = c.index_of(center).expect("owners are centers");
        cluster_weights[slot] += weight;
        assignments.push(Assignment {
            point,
            weight,
            center,
            distance,
        });
    }
    let cost = assignments.iter().map(|a| a.weight * a.distance).sum();
    Ok(ClusteringStats {
        centers: c.clone(),
        assignments,
        cluster_weights,
        cost,
    })
}
