//! Immutable weighted undirected graphs and their shortest-path metric.
//!
//! Graphs are stored in compressed sparse row form with symmetric adjacency.
//! Parallel edges collapse to their minimum weight and self-loops are dropped
//! at construction, since neither can shorten a path.

pub(crate) mod dijkstra;
mod io;
mod radix;
pub mod synth;

pub use dijkstra::{
    assign, cost, distance_rows, multi_source_dijkstra, single_source, ClusteringStats,
    ShortestPaths,
};
pub use io::{load_graph, parse_graph, write_edge_list, GraphFormat};

use crate::error::{Error, Result};

/// Undirected graph with nonnegative edge weights in compressed adjacency
/// form. Both directions of every edge are stored.
#[derive(Clone, Debug)]
pub struct Graph {
    offsets: Vec<usize>,
    arcs: Vec<Arc>,
}

/// Target and weight side by side, so a row scan touches one array.
#[derive(Clone, Copy, Debug)]
struct Arc {
    target: u32,
    weight: f64,
}

impl Graph {
    /// Builds a graph on `vertex_count` vertices from undirected edges.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if vertex_count > u32::MAX as usize {
            return Err(Error::invalid(format!(
                "{vertex_count} vertices exceed the supported maximum"
            )));
        }
        let mut canon: Vec<(usize, usize, f64)> = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{vertex_count}"
                )));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) has invalid weight {w}"
                )));
            }
            if u != v {
                canon.push((u.min(v), u.max(v), w));
            }
        }
        canon.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        canon.dedup_by(|later, first| later.0 == first.0 && later.1 == first.1);

        let mut arcs: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * canon.len());
        for &(u, v, w) in &canon {
            arcs.push((u, v, w));
            arcs.push((v, u, w));
        }
        arcs.sort_unstable_by_key(|&(u, v, _)| (u, v));

        let mut offsets = vec![0usize; vertex_count + 1];
        for &(u, _, _) in &arcs {
            offsets[u + 1] += 1;
        }
        for u in 0..vertex_count {
            offsets[u + 1] += offsets[u];
        }
        let arcs = arcs
            .iter()
            .map(|&(_, v, w)| Arc {
                target: v as u32,
                weight: w,
            })
            .collect();
        Ok(Self { offsets, arcs })
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.arcs.len() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// `(neighbor, weight)` pairs of `u`, sorted by neighbor id.
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.row(u).iter().map(|a| (a.target as usize, a.weight))
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.vertex_count())
            .flat_map(move |u| self.neighbors(u).map(move |(v, w)| (u, v, w)))
            .filter(|&(u, v, _)| u < v)
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let row = self.row(u);
        row.binary_search_by_key(&v, |a| a.target as usize)
            .ok()
            .map(|i| row[i].weight)
    }

    #[inline]
    fn row(&self, u: usize) -> &[Arc] {
        &self.arcs[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Copy of the graph without the edge `{u, v}`.
    pub fn without_edge(&self, u: usize, v: usize) -> Self {
        let edges: Vec<_> = self
            .edges()
            .filter(|&(a, b, _)| !((a, b) == (u, v) || (a, b) == (v, u)))
            .collect();
        Self::from_edges(self.vertex_count(), &edges).expect("edges of a valid graph")
    }
}
