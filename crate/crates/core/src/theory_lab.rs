//! Hard instances for coreset lower bounds, and an exhaustive counter for the
//! distinct intersections of vertex-weighted metric balls with a probe set.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{distance_rows, Graph};

/// Vertex budget for generated instances.
pub const MAX_INSTANCE_VERTICES: usize = 5_000_000;

/// Role of a vertex in the lower-bound graph. Group and element indices are
/// 1-based; `subset` is a bitmask with bit `j - 1` set iff `j ∈ J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexRole {
    Hub,
    Left { group: usize, index: usize },
    Right { group: usize, subset: u32 },
    Shadow { group: usize, index: usize },
}

impl fmt::Display for VertexRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VertexRole::Hub => f.write_str("u0"),
            VertexRole::Left { group, index } => write!(f, "L({group};{index})"),
            VertexRole::Right { group, subset } => {
                write!(f, "R({group};{{")?;
                let members: Vec<String> = (0..32)
                    .filter(|b| subset >> b & 1 == 1)
                    .map(|b| (b + 1).to_string())
                    .collect();
                write!(f, "{}}})", members.join(" "))
            }
            VertexRole::Shadow { group, index } => write!(f, "shadow-of({group};{index})"),
        }
    }
}

/// The lower-bound graph: hub `u0`, `m` groups each with `t` left vertices
/// and `2^t` right vertices (one per subset of `[t]`), unit edges from every
/// left and right vertex to the hub, an edge `(l_j, r_J)` within a group iff
/// `j ∈ J`, and `T - 1` pendant shadow vertices on every left vertex.
#[derive(Clone, Debug)]
pub struct LowerBoundInstance {
    pub graph: Graph,
    pub roles: Vec<VertexRole>,
    pub k: usize,
    pub epsilon: f64,
    pub t: usize,
    /// Number of groups, `ceil(k / ε)`.
    pub m: usize,
    /// Shadow multiplicity: each left vertex has `T - 1` shadows.
    pub shadow_factor: usize,
}

impl LowerBoundInstance {
    pub fn hub(&self) -> usize {
        0
    }

    pub fn left(&self, group: usize, index: usize) -> usize {
        1 + (group - 1) * self.t + (index - 1)
    }

    pub fn right(&self, group: usize, subset: u32) -> usize {
        1 + self.m * self.t + (group - 1) * (1usize << self.t) + subset as usize
    }

    /// Closed-form vertex count `1 + m t T + m 2^t`.
    pub fn expected_vertex_count(&self) -> usize {
        closed_form_count(self.m, self.t, self.shadow_factor)
    }

    /// Writes the `vertex_id,role` sidecar.
    pub fn write_labels<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "vertex_id,role")?;
        for (v, role) in self.roles.iter().enumerate() {
            writeln!(out, "{v},{role}")?;
        }
        Ok(())
    }
}

fn closed_form_count(m: usize, t: usize, shadow_factor: usize) -> usize {
    1 + m * t * shadow_factor + m * (1usize << t)
}

/// `ceil(value)` tolerant of representation error in `value`.
fn ceil_tolerant(value: f64) -> usize {
    let nearest = value.round();
    if (value - nearest).abs() <= 1e-9 * value.abs().max(1.0) {
        nearest as usize
    } else {
        value.ceil() as usize
    }
}

pub fn gen_lowerbound_instance(k: usize, epsilon: f64, t: usize) -> Result<LowerBoundInstance> {
    if k == 0 || t == 0 {
        return Err(Error::invalid("k and t must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if t > 15 {
        return Err(Error::GuardExceeded(format!("t = {t} exceeds 15")));
    }
    let m = ceil_tolerant(k as f64 / epsilon);
    let shadow_factor = (m << t).div_ceil(k);
    let n = closed_form_count(m, t, shadow_factor);
    if n > MAX_INSTANCE_VERTICES {
        return Err(Error::GuardExceeded(format!(
            "instance would have {n} vertices"
        )));
    }

    let mut roles = Vec::with_capacity(n);
    roles.push(VertexRole::Hub);
    for group in 1..=m {
        for index in 1..=t {
            roles.push(VertexRole::Left { group, index });
        }
    }
    for group in 1..=m {
        for subset in 0..(1u32 << t) {
            roles.push(VertexRole::Right { group, subset });
        }
    }
    let left = |group: usize, index: usize| 1 + (group - 1) * t + (index - 1);
    let right =
        |group: usize, subset: u32| 1 + m * t + (group - 1) * (1usize << t) + subset as usize;

    let mut edges = Vec::new();
    for v in 1..roles.len() {
        edges.push((0, v, 1.0));
    }
    for group in 1..=m {
        for index in 1..=t {
            for subset in 0..(1u32 << t) {
                if subset >> (index - 1) & 1 == 1 {
                    edges.push((left(group, index), right(group, subset), 1.0));
                }
            }
        }
    }
    for group in 1..=m {
        for index in 1..=t {
            let anchor = left(group, index);
            for _ in 1..shadow_factor {
                edges.push((anchor, roles.len(), 1.0));
                roles.push(VertexRole::Shadow { group, index });
            }
        }
    }
    debug_assert_eq!(roles.len(), n);
    let graph = Graph::from_edges(n, &edges)?;
    Ok(LowerBoundInstance {
        graph,
        roles,
        k,
        epsilon,
        t,
        m,
        shadow_factor,
    })
}

/// Star with root 0 and `ceil(100 k / ε)` unit-length leaves.
pub fn gen_star_instance(k: usize, epsilon: f64) -> Result<Graph> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
        return Err(Error::invalid(format!(
            "epsilon must lie in (0, 1/3), got {epsilon}"
        )));
    }
    let leaves = ceil_tolerant(100.0 * k as f64 / epsilon);
    if leaves + 1 > MAX_INSTANCE_VERTICES {
        return Err(Error::GuardExceeded(format!(
            "star would have {leaves} leaves"
        )));
    }
    Ok(crate::graph::synth::star_graph(leaves))
}

/// Point weights `v` and a probe set `H` for counting ball intersections.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedBallQuery {
    probe: Vec<usize>,
    weights: Vec<f64>,
}

impl WeightedBallQuery {
    /// `weights[i]` is `v(probe[i])`.
    pub fn new(probe: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if probe.len() != weights.len() {
            return Err(Error::invalid("probe set and weights differ in length"));
        }
        let mut pairs: Vec<(usize, f64)> = probe.into_iter().zip(weights).collect();
        pairs.sort_by_key(|p| p.0);
        if pairs.windows(2).any(|p| p[0].0 == p[1].0) {
            return Err(Error::invalid("probe set has repeated vertices"));
        }
        if pairs.iter().any(|&(_, w)| !(w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("ball weights must be positive and finite"));
        }
        let (probe, weights) = pairs.into_iter().unzip();
        Ok(Self { probe, weights })
    }

    pub fn unit(probe: Vec<usize>) -> Result<Self> {
        let weights = vec![1.0; probe.len()];
        Self::new(probe, weights)
    }

    /// Probe vertices, sorted.
    pub fn probe(&self) -> &[usize] {
        &self.probe
    }
}

/// Exhaustive guards for [`count_ball_intersections`].
pub const BALL_MAX_VERTICES: usize = 1_000;
pub const BALL_MAX_PROBE: usize = 20;

/// Intersections of `H` with balls `B_v(x, r) = { y : v(y) d(x, y) <= r }`,
/// returned as bitmasks over the sorted probe set. For each center the probe
/// points are ordered by `v(y) d(x, y)`; every prefix that ends at a change of
/// that key is a realizable intersection. The empty set is included.
pub fn ball_intersections(g: &Graph, q: &WeightedBallQuery) -> Result<HashSet<u32>> {
    let n = g.vertex_count();
    if n > BALL_MAX_VERTICES || q.probe.len() > BALL_MAX_PROBE {
        return Err(Error::GuardExceeded(format!(
            "ball counting is limited to {BALL_MAX_VERTICES} vertices and {BALL_MAX_PROBE} probes"
        )));
    }
    let all: Vec<usize> = (0..n).collect();
    // rows[i][x] = d(probe[i], x)
    let rows = distance_rows(g, &q.probe, &all)?;
    let per_center: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut keyed: Vec<(f64, usize)> = (0..q.probe.len())
                .map(|i| (q.weights[i] * rows[i][x], i))
                .filter(|(key, _)| key.is_finite())
                .collect();
            keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut sets = Vec::with_capacity(keyed.len());
            let mut mask = 0u32;
            for (pos, &(key, i)) in keyed.iter().enumerate() {
                mask |= 1 << i;
                if keyed.get(pos + 1).is_none_or(|next| next.0 != key) {
                    sets.push(mask);
                }
            }
            sets
        })
        .collect();
    let mut distinct: HashSet<u32> = HashSet::new();
    distinct.insert(0);
    for sets in per_center {
        distinct.extend(sets);
    }
    Ok(distinct)
}

/// Number of distinct sets `H ∩ B_v(x, r)` over all centers `x` and radii
/// `r >= 0`, counting the empty set.
pub fn count_ball_intersections(g: &Graph, q: &WeightedBallQuery) -> Result<usize> {
    ball_intersections(g, q).map(|s| s.len())
}

/// Whether the bitmask set over `q.probe()` is realized by some ball.
pub fn is_realizable(g: &Graph, q: &WeightedBallQuery, members: &[usize]) -> Result<bool> {
    let mut mask = 0u32;
    for v in members {
        let i = q
            .probe
            .binary_search(v)
            .map_err(|_| Error::invalid(format!("vertex {v} is not in the probe set")))?;
        mask |= 1 << i;
    }
    Ok(ball_intersections(g, q)?.contains(&mask))
}

/// Checks every pairwise distance of the instance against the closed form:
/// 0 on the diagonal, 1 between the hub and any left or right vertex, 1
/// between `l_j` and `r_J` of the same group when `j ∈ J`, 2 between all other
/// non-shadow pairs, and for a shadow `1 +` the distance from its anchor.
pub fn verify_lowerbound_distances(inst: &LowerBoundInstance) -> bool {
    let n = inst.graph.vertex_count();
    if inst.roles.len() != n {
        return false;
    }
    let anchor = |v: usize| -> (usize, f64) {
        match inst.roles[v] {
            VertexRole::Shadow { group, index } => (inst.left(group, index), 1.0),
            _ => (v, 0.0),
        }
    };
    let base = |a: usize, b: usize| -> f64 {
        if a == b {
            return 0.0;
        }
        match (inst.roles[a], inst.roles[b]) {
            (VertexRole::Hub, _) | (_, VertexRole::Hub) => 1.0,
            (VertexRole::Left { group: g1, index }, VertexRole::Right { group: g2, subset })
            | (VertexRole::Right { group: g2, subset }, VertexRole::Left { group: g1, index })
                if g1 == g2 && subset >> (index - 1) & 1 == 1 =>
            {
                1.0
            }
            _ => 2.0,
        }
    };
    let expected = |u: usize, v: usize| -> f64 {
        if u == v {
            return 0.0;
        }
        let (au, hu) = anchor(u);
        let (av, hv) = anchor(v);
        hu + hv + base(au, av)
    };
    let all: Vec<usize> = (0..n).collect();
    all.par_chunks(64).all(|chunk| {
        let rows = match distance_rows(&inst.graph, chunk, &all) {
            Ok(rows) => rows,
            Err(_) => return false,
        };
        chunk
            .iter()
            .zip(&rows)
            .all(|(&u, row)| row.iter().enumerate().all(|(v, &d)| d == expected(u, v)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::single_source;
    use crate::graph::synth::path_graph;

    #[test]
    fn small_instance_counts() {
        let inst = gen_lowerbound_instance(1, 0.5, 2).unwrap();
        assert_eq!((inst.m, inst.shadow_factor), (2, 8));
        assert_eq!(inst.graph.vertex_count(), 41);
        assert_eq!(inst.expected_vertex_count(), 41);
        let shadows = inst
            .roles
            .iter()
            .filter(|r| matches!(r, VertexRole::Shadow { .. }))
            .count();
        assert_eq!(shadows, 4 * 7);
    }

    #[test]
    fn instance_distances() {
        let inst = gen_lowerbound_instance(1, 0.5, 2).unwrap();
        let l1 = inst.left(1, 1);
        let d = single_source(&inst.graph, l1).unwrap();
        assert_eq!(d[inst.right(1, 0b11)], 1.0);
        assert_eq!(d[inst.right(1, 0b10)], 2.0);
        for a in 0..4u32 {
            let r = inst.right(1, a);
            let d = single_source(&inst.graph, r).unwrap();
            for b in 0..4u32 {
                assert_eq!(d[inst.right(2, b)], 2.0);
            }
        }
        assert!(verify_lowerbound_distances(&inst));
    }

    #[test]
    fn broken_instance_fails_verification() {
        let mut inst = gen_lowerbound_instance(1, 0.5, 2).unwrap();
        inst.graph = inst.graph.without_edge(inst.left(1, 1), inst.hub());
        assert!(!verify_lowerbound_distances(&inst));
    }

    #[test]
    fn t1_instance_verifies() {
        let inst = gen_lowerbound_instance(1, 0.5, 1).unwrap();
        assert_eq!(inst.graph.vertex_count(), inst.expected_vertex_count());
        assert!(verify_lowerbound_distances(&inst));
    }

    #[test]
    fn instance_guards() {
        assert!(gen_lowerbound_instance(1, 0.5, 16).is_err());
        assert!(gen_lowerbound_instance(1, 1.0, 2).is_err());
        assert!(gen_lowerbound_instance(0, 0.5, 2).is_err());
    }

    #[test]
    fn labels() {
        let inst = gen_lowerbound_instance(1, 0.5, 2).unwrap();
        let mut buf = Vec::new();
        inst.write_labels(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "vertex_id,role");
        assert_eq!(lines[1], "0,u0");
        assert_eq!(lines[2], "1,L(1;1)");
        assert_eq!(
            lines[1 + inst.right(1, 0b11)],
            format!("{},R(1;{{1 2}})", inst.right(1, 0b11))
        );
        assert_eq!(
            lines[1 + inst.right(2, 0)],
            format!("{},R(2;{{}})", inst.right(2, 0))
        );
        assert!(lines.last().unwrap().ends_with("shadow-of(2;2)"));
    }

    #[test]
    fn star_sizes() {
        assert_eq!(gen_star_instance(1, 0.1).unwrap().vertex_count(), 1001);
        assert_eq!(gen_star_instance(2, 0.25).unwrap().vertex_count(), 801);
        assert!(gen_star_instance(1, 0.34).is_err());
        let g = gen_star_instance(1, 0.3).unwrap();
        let d = single_source(&g, 1).unwrap();
        assert_eq!(d[0], 1.0);
        assert!(d[2..].iter().all(|&x| x == 2.0));
    }

    #[test]
    fn path_ball_count() {
        let g = path_graph(3);
        let q = WeightedBallQuery::unit(vec![0, 1, 2]).unwrap();
        let sets = ball_intersections(&g, &q).unwrap();
        let mut expected: Vec<u32> = vec![0, 0b001, 0b010, 0b100, 0b011, 0b110, 0b111];
        let mut got: Vec<u32> = sets.into_iter().collect();
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn weighted_path_realizes_gap() {
        let g = path_graph(3);
        let q = WeightedBallQuery::new(vec![0, 1, 2], vec![1.0, 10.0, 1.0]).unwrap();
        assert!(is_realizable(&g, &q, &[0, 2]).unwrap());
        let unit = WeightedBallQuery::unit(vec![0, 1, 2]).unwrap();
        assert!(!is_realizable(&g, &unit, &[0, 2]).unwrap());
    }

    #[test]
    fn pair_probe_at_most_four() {
        let g = crate::graph::synth::random_connected(30, 60, 1);
        for (a, b) in [(0, 1), (5, 29), (3, 17)] {
            let q = WeightedBallQuery::new(vec![a, b], vec![1.0, 3.5]).unwrap();
            assert!(count_ball_intersections(&g, &q).unwrap() <= 4);
        }
    }

    #[test]
    fn ball_guards_and_validation() {
        let g = path_graph(1001);
        let q = WeightedBallQuery::unit(vec![0, 1]).unwrap();
        assert!(matches!(
            count_ball_intersections(&g, &q),
            Err(Error::GuardExceeded(_))
        ));
        assert!(WeightedBallQuery::unit(vec![1, 1]).is_err());
        assert!(WeightedBallQuery::new(vec![1], vec![0.0]).is_err());
    }
}
