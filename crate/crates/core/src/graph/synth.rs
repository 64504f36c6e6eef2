//! Synthetic graph families used by tests, benchmarks and the CLI.

use rand::Rng;

use super::Graph;
use crate::seed::rng_from;

/// Path `0 - 1 - ... - (n-1)` with unit edges.
pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v, 1.0)).collect();
    Graph::from_edges(n, &edges).expect("valid path")
}

/// Star with root 0 and leaves `1..=leaves`, unit edges.
pub fn star_graph(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|v| (0, v, 1.0)).collect();
    Graph::from_edges(leaves + 1, &edges).expect("valid star")
}

/// Road-like grid: a `rows x cols` lattice with edge lengths drawn from
/// [0.5, 1.5) and roughly 10% of the lattice edges removed without
/// disconnecting the graph. Vertex `r * cols + c` sits at row `r`, column `c`.
pub fn road_grid(rows: usize, cols: usize, seed: u64) -> Graph {
    let mut rng = rng_from(seed);
    let n = rows * cols;
    let mut lattice = Vec::with_capacity(2 * n);
    for r in 0..rows {
        for c in 0..cols {
            let u = r * cols + c;
            if c + 1 < cols {
                lattice.push((u, u + 1));
            }
            if r + 1 < rows {
                lattice.push((u, u + cols));
            }
        }
    }
    // A random spanning tree (Kruskal over shuffled edges) is always kept.
    let mut order: Vec<usize> = (0..lattice.len()).collect();
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut dsu = Dsu::new(n);
    let mut keep = vec![false; lattice.len()];
    for &e in &order {
        let (u, v) = lattice[e];
        if dsu.union(u, v) {
            keep[e] = true;
        }
    }
    let mut edges = Vec::with_capacity(lattice.len());
    for (e, &(u, v)) in lattice.iter().enumerate() {
        let w = rng.random_range(0.5..1.5);
        if keep[e] || rng.random::<f64>() >= 0.1 {
            edges.push((u, v, w));
        }
    }
    Graph::from_edges(n, &edges).expect("valid grid")
}

/// Connected random graph with `n` vertices and about `m >= n - 1` edges:
/// a random recursive tree plus uniformly random chords. Integer weights in
/// `1..=10` keep distances exact in floating point.
pub fn random_connected(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = rng_from(seed);
    let mut edges = Vec::with_capacity(m.max(n));
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push((u, v, rng.random_range(1..=10) as f64));
    }
    if n >= 2 {
        while edges.len() < m {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v {
                edges.push((u, v, rng.random_range(1..=10) as f64));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("valid random graph")
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut u: usize) -> usize {
        while self.parent[u] != u {
            self.parent[u] = self.parent[self.parent[u]];
            u = self.parent[u];
        }
        u
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
