//! k-median solvers over the graph metric: single-swap local search, and
//! exhaustive oracles for the optimum and for point sensitivities.

use rand::seq::index;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{self, distance_rows, Graph};
use crate::points::{CenterSet, WeightedPointSet};
use crate::seed::rng_from;

/// Above this many `candidate x point` entries the evaluators fall back to a
/// fresh multi-source Dijkstra per center set.
const TABLE_LIMIT: usize = 1 << 24;

/// Largest number of center sets the exhaustive oracles will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct LocalSearchConfig {
    /// A swap is taken only if it lowers the cost below `(1 - threshold / k)`
    /// times the current cost.
    pub threshold: f64,
    pub max_iterations: usize,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        Self {
            threshold: 1e-3,
            max_iterations: 1_000,
        }
    }
}

impl LocalSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::invalid(format!(
                "local search threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("local search needs at least one iteration"));
        }
        Ok(())
    }
}

/// Where local search may place centers.
#[derive(Clone, Debug, PartialEq)]
pub enum CandidatePool {
    AllVertices,
    Restricted(Vec<usize>),
}

impl CandidatePool {
    fn resolve(&self, g: &Graph) -> Result<Vec<usize>> {
        match self {
            CandidatePool::AllVertices => Ok((0..g.vertex_count()).collect()),
            CandidatePool::Restricted(ids) => {
                let mut ids = ids.clone();
                ids.sort_unstable();
                ids.dedup();
                if let Some(&bad) = ids.last().filter(|&&v| v >= g.vertex_count()) {
                    return Err(Error::invalid(format!("pool vertex {bad} out of range")));
                }
                Ok(ids)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct LocalSearchResult {
    pub centers: CenterSet,
    /// Exact cost of `centers`, recomputed by a multi-source Dijkstra.
    pub cost: f64,
    /// Accepted swaps.
    pub iterations: usize,
    /// Cost after initialization and after every accepted swap.
    pub cost_trace: Vec<f64>,
}

/// Cost of center sets given as indices into a candidate list.
enum Evaluator<'a> {
    /// `rows[i][j]` = distance from candidate `i` to data point `j`.
    Table {
        rows: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
    Search {
        g: &'a Graph,
        x: &'a WeightedPointSet,
        candidates: &'a [usize],
    },
}

impl<'a> Evaluator<'a> {
    fn new(g: &'a Graph, x: &'a WeightedPointSet, candidates: &'a [usize]) -> Result<Self> {
        if candidates.len().saturating_mul(x.len()) <= TABLE_LIMIT {
            let support = x.support();
            let rows = distance_rows(g, candidates, &support)?;
            let weights = x.entries().iter().map(|&(_, w)| w).collect();
            Ok(Evaluator::Table { rows, weights })
        } else {
            Ok(Evaluator::Search { g, x, candidates })
        }
    }

    fn cost(&self, chosen: &[usize]) -> f64 {
        match self {
            Evaluator::Table { rows, weights } => weights
                .iter()
                .enumerate()
                .map(|(j, w)| {
                    let d = chosen
                        .iter()
                        .map(|&i| rows[i][j])
                        .fold(f64::INFINITY, f64::min);
                    w * d
                })
                .sum(),
            Evaluator::Search { g, x, candidates } => {
                let sources: Vec<(usize, f64)> =
                    chosen.iter().map(|&i| (candidates[i], 0.0)).collect();
                let paths = graph::multi_source_dijkstra(g, &sources).expect("validated sources");
                graph::dijkstra::weighted_sum(paths.distances(), x)
            }
        }
    }

    /// Distance from each data point to `chosen`.
    fn point_distances(&self, chosen: &[usize]) -> Vec<f64> {
        match self {
            Evaluator::Table { rows, weights } => (0..weights.len())
                .map(|j| {
                    chosen
                        .iter()
                        .map(|&i| rows[i][j])
                        .fold(f64::INFINITY, f64::min)
                })
                .collect(),
            Evaluator::Search { g, x, candidates } => {
                let sources: Vec<(usize, f64)> =
                    chosen.iter().map(|&i| (candidates[i], 0.0)).collect();
                let paths = graph::multi_source_dijkstra(g, &sources).expect("validated sources");
                x.ids().map(|id| paths.distance(id)).collect()
            }
        }
    }
}

/// Per-point nearest and second-nearest chosen candidate, for O(|X|) swap
/// evaluation against a distance table.
struct NearestTwo {
    best: Vec<(f64, usize)>,
    second: Vec<f64>,
}

impl NearestTwo {
    fn new(rows: &[Vec<f64>], chosen: &[usize], points: usize) -> Self {
        let mut best = vec![(f64::INFINITY, usize::MAX); points];
        let mut second = vec![f64::INFINITY; points];
        for j in 0..points {
            for &i in chosen {
                let d = rows[i][j];
                if d < best[j].0 {
                    second[j] = best[j].0;
                    best[j] = (d, i);
                } else if d < second[j] {
                    second[j] = d;
                }
            }
        }
        Self { best, second }
    }

    fn swap_cost(&self, rows: &[Vec<f64>], weights: &[f64], out: usize, inc: usize) -> f64 {
        weights
            .iter()
            .enumerate()
            .map(|(j, w)| {
                let kept = if self.best[j].1 == out {
                    self.second[j]
                } else {
                    self.best[j].0
                };
                w * kept.min(rows[inc][j])
            })
            .sum()
    }
}

/// Single-swap local search for k-median with data `x` and centers from `pool`.
///
/// Starts from `k` pool vertices drawn uniformly under `seed`. Each round
/// evaluates every swap `(c out, c' in)` and applies the cheapest one (ties
/// broken lexicographically by `(c, c')`) while it beats the current cost by
/// the factor `1 - threshold / k`.
pub fn local_search(
    g: &Graph,
    x: &WeightedPointSet,
    k: usize,
    pool: &CandidatePool,
    cfg: &LocalSearchConfig,
    seed: u64,
) -> Result<LocalSearchResult> {
    cfg.validate()?;
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if x.is_empty() {
        return Err(Error::invalid("data set is empty"));
    }
    x.check_bounds(g.vertex_count())?;
    let candidates = pool.resolve(g)?;
    if candidates.len() < k {
        return Err(Error::invalid(format!(
            "candidate pool has {} vertices, fewer than k = {k}",
            candidates.len()
        )));
    }

    let mut rng = rng_from(seed);
    let mut chosen: Vec<usize> = index::sample(&mut rng, candidates.len(), k).into_vec();
    chosen.sort_unstable();

    let eval = Evaluator::new(g, x, &candidates)?;
    let mut current = eval.cost(&chosen);
    let mut trace = vec![current];
    let factor = 1.0 - cfg.threshold / k as f64;

    let mut iterations = 0;
    while iterations < cfg.max_iterations && candidates.len() > k {
        let swaps: Vec<(usize, usize)> = chosen
            .iter()
            .flat_map(|&out| {
                let chosen = &chosen;
                (0..candidates.len())
                    .filter(move |i| chosen.binary_search(i).is_err())
                    .map(move |inc| (out, inc))
            })
            .collect();
        let costs: Vec<f64> = match &eval {
            Evaluator::Table { rows, weights } => {
                let near = NearestTwo::new(rows, &chosen, weights.len());
                swaps
                    .par_iter()
                    .map(|&(out, inc)| near.swap_cost(rows, weights, out, inc))
                    .collect()
            }
            Evaluator::Search { .. } => swaps
                .par_iter()
                .map(|&(out, inc)| eval.cost(&swapped(&chosen, out, inc)))
                .collect(),
        };
        // Candidate indices are sorted like vertex ids, so the swap order is
        // already lexicographic and the first minimum wins.
        let mut best: Option<(f64, usize)> = None;
        for (s, &c) in costs.iter().enumerate() {
            if best.is_none_or(|(b, _)| c < b) {
                best = Some((c, s));
            }
        }
        match best {
            Some((c, s)) if c < factor * current => {
                let (out, inc) = swaps[s];
                chosen = swapped(&chosen, out, inc);
                current = c;
                trace.push(current);
                iterations += 1;
            }
            _ => break,
        }
    }

    let centers = CenterSet::from_sorted_unchecked(chosen.iter().map(|&i| candidates[i]).collect());
    let cost = graph::cost(g, x, &centers)?;
    log::debug!(
        "local search: k={k}, pool={}, swaps={iterations}, cost={cost}",
        candidates.len()
    );
    Ok(LocalSearchResult {
        centers,
        cost,
        iterations,
        cost_trace: trace,
    })
}

fn swapped(chosen: &[usize], out: usize, inc: usize) -> Vec<usize> {
    let mut next: Vec<usize> = chosen.iter().copied().filter(|&i| i != out).collect();
    let pos = next.binary_search(&inc).unwrap_err();
    next.insert(pos, inc);
    next
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > BRUTE_FORCE_LIMIT {
            return acc;
        }
    }
    acc
}

fn guard(g: &Graph, k: usize) -> Result<()> {
    let n = g.vertex_count();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} must lie in 1..={n}")));
    }
    let count = binomial(n, k);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::GuardExceeded(format!(
            "C({n}, {k}) exceeds {BRUTE_FORCE_LIMIT} center sets"
        )));
    }
    Ok(())
}

/// Advances `combo` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact k-median optimum by enumerating every k-subset of V. Ties go to the
/// lexicographically smallest center set.
pub fn brute_force_kmedian(g: &Graph, x: &WeightedPointSet, k: usize) -> Result<(CenterSet, f64)> {
    guard(g, k)?;
    x.check_bounds(g.vertex_count())?;
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    let eval = Evaluator::new(g, x, &all)?;
    let mut combo: Vec<usize> = (0..k).collect();
    let mut best = (f64::INFINITY, combo.clone());
    loop {
        let c = eval.cost(&combo);
        if c < best.0 {
            best = (c, combo.clone());
        }
        if !next_combination(&mut combo, all.len()) {
            break;
        }
    }
    let centers = CenterSet::from_sorted_unchecked(best.1);
    let cost = graph::cost(g, x, &centers)?;
    Ok((centers, cost))
}

/// Exact sensitivity of data point `p`: the maximum over k-subsets `C` with
/// finite positive `cost(X, C)` of `d(p, C) / cost(X, C)`. If no center set
/// has positive cost the value is defined as 1.
pub fn brute_force_sensitivity(g: &Graph, x: &WeightedPointSet, k: usize, p: usize) -> Result<f64> {
    guard(g, k)?;
    x.check_bounds(g.vertex_count())?;
    let slot = x
        .entries()
        .binary_search_by_key(&p, |&(id, _)| id)
        .map_err(|_| Error::invalid(format!("vertex {p} is not a data point")))?;
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    let eval = Evaluator::new(g, x, &all)?;
    let mut combo: Vec<usize> = (0..k).collect();
    let mut best: Option<f64> = None;
    loop {
        let dists = eval.point_distances(&combo);
        let total: f64 = dists
            .iter()
            .zip(x.entries())
            .map(|(d, &(_, w))| w * d)
            .sum();
        if total > 0.0 && total.is_finite() {
            let ratio = dists[slot] / total;
            best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
        }
        if !next_combination(&mut combo, all.len()) {
            break;
        }
    }
    Ok(best.unwrap_or(1.0))
}
