//! Empirical evaluation of coresets.
//!
//! A coreset `D` is scored against a center set `C` by the relative error
//! `|cost(D, C) / cost(X, C) - 1|`, and against a stream of random center
//! sets by the maximum of that error. Benchmarks compare construction methods
//! over a grid of sizes using one shared center-set stream.

use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coreset::{build_coreset, BicriteriaConfig, Coreset};
use crate::error::{Error, Result};
use crate::graph::dijkstra::{from_centers, weighted_sum};
use crate::graph::{multi_source_dijkstra, Graph};
use crate::points::{CenterSet, WeightedPointSet};
use crate::seed::{derive_path, derive_seed, rng_from};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorTrialConfig {
    /// Random center sets per evaluation.
    pub center_sets: usize,
    pub k: usize,
    /// Independent constructions per (method, size).
    pub repetitions: usize,
    pub seed: u64,
}

impl ErrorTrialConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            center_sets: 2000,
            k,
            repetitions: 10,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.center_sets == 0 || self.k == 0 || self.repetitions == 0 {
            return Err(Error::invalid("trial counts and k must be at least 1"));
        }
        Ok(())
    }
}

/// Center set number `i` of the stream keyed by `seed`: `k` distinct
/// vertices drawn uniformly from V. Each set depends only on `(seed, i)`, so
/// shorter streams are prefixes of longer ones.
pub fn center_set(vertex_count: usize, k: usize, seed: u64, i: usize) -> Result<CenterSet> {
    if k == 0 || k > vertex_count {
        return Err(Error::invalid(format!(
            "cannot draw {k} distinct centers from {vertex_count} vertices"
        )));
    }
    let mut rng = rng_from(derive_seed(seed, i as u64));
    CenterSet::new(index::sample(&mut rng, vertex_count, k).into_vec())
}

pub fn center_sets(
    vertex_count: usize,
    k: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<CenterSet>> {
    (0..count)
        .map(|i| center_set(vertex_count, k, seed, i))
        .collect()
}

/// Reference and coreset costs read off one distance field.
fn relative_error(dist: &[f64], x: &WeightedPointSet, d: &WeightedPointSet) -> Result<f64> {
    let cx = weighted_sum(dist, x);
    if cx.is_infinite() {
        let vertex = x.ids().find(|&v| dist[v].is_infinite()).unwrap_or_default();
        return Err(Error::Unreachable { vertex });
    }
    if cx == 0.0 {
        return Err(Error::UndefinedError);
    }
    let cd = weighted_sum(dist, d);
    if cd.is_infinite() {
        let vertex = d.ids().find(|&v| dist[v].is_infinite()).unwrap_or_default();
        return Err(Error::Unreachable { vertex });
    }
    Ok((cd / cx - 1.0).abs())
}

/// `|cost(D, C) / cost(X, C) - 1|`.
pub fn empirical_error(g: &Graph, x: &WeightedPointSet, d: &Coreset, c: &CenterSet) -> Result<f64> {
    x.check_bounds(g.vertex_count())?;
    d.points.check_bounds(g.vertex_count())?;
    let paths = from_centers(g, c)?;
    relative_error(paths.distances(), x, &d.points)
}

/// Maximum empirical error over `cfg.center_sets` random center sets.
pub fn max_error_trial(
    g: &Graph,
    x: &WeightedPointSet,
    d: &Coreset,
    cfg: &ErrorTrialConfig,
) -> Result<f64> {
    cfg.validate()?;
    let sets = center_sets(g.vertex_count(), cfg.k, cfg.center_sets, cfg.seed)?;
    let errors: Vec<f64> = sets
        .par_iter()
        .map(|c| empirical_error(g, x, d, c))
        .collect::<Result<_>>()?;
    Ok(errors.into_iter().fold(0.0, f64::max))
}

/// Per-set errors for a fixed list of center sets.
pub fn errors_against(
    g: &Graph,
    x: &WeightedPointSet,
    d: &Coreset,
    sets: &[CenterSet],
) -> Result<Vec<f64>> {
    sets.par_iter()
        .map(|c| empirical_error(g, x, d, c))
        .collect()
}

/// `size` draws from `x`, each carrying weight `total(X) / size`.
///
/// Draws are uniform over the multiset that `x` represents. With integral
/// weights and `size <= total(X)` they are taken without replacement (so
/// `size = |X|` on unit weights returns `X` itself); otherwise they are i.i.d.
/// and weight-proportional. Repeated draws are coalesced.
pub fn uniform_baseline(x: &WeightedPointSet, size: usize, seed: u64) -> Result<Coreset> {
    if size == 0 {
        return Err(Error::invalid("baseline size must be at least 1"));
    }
    if x.is_empty() {
        return Err(Error::invalid("data set is empty"));
    }
    let total = x.total_weight();
    let entries = x.entries();
    let mut rng = rng_from(seed);
    let mut counts = vec![0u64; entries.len()];
    let integral = entries.iter().all(|&(_, w)| w.fract() == 0.0);
    if integral && (size as f64) <= total && total <= u32::MAX as f64 {
        let mut cumulative = Vec::with_capacity(entries.len());
        let mut acc = 0usize;
        for &(_, w) in entries {
            acc += w as usize;
            cumulative.push(acc);
        }
        for item in index::sample(&mut rng, acc, size) {
            let slot = cumulative.partition_point(|&c| c <= item);
            counts[slot] += 1;
        }
    } else {
        let dist = WeightedIndex::new(entries.iter().map(|&(_, w)| w))
            .map_err(|e| Error::invalid(format!("invalid weights: {e}")))?;
        for _ in 0..size {
            counts[dist.sample(&mut rng)] += 1;
        }
    }
    let points = entries
        .iter()
        .zip(&counts)
        .filter(|&(_, &c)| c > 0)
        .map(|(&(id, _), &c)| (id, c as f64 * total / size as f64))
        .collect();
    Ok(Coreset::new(WeightedPointSet::new(points)?, None))
}

/// A coreset construction compared by [`run_benchmark`].
pub trait CoresetMethod: Sync {
    fn name(&self) -> &str;
    fn build(
        &self,
        g: &Graph,
        x: &WeightedPointSet,
        size: usize,
        k: usize,
        seed: u64,
    ) -> Result<Coreset>;
}

/// Importance sampling by sensitivity.
#[derive(Clone, Debug)]
pub struct SensitivityMethod {
    pub bicriteria: BicriteriaConfig,
    pub rho: f64,
}

impl Default for SensitivityMethod {
    fn default() -> Self {
        Self {
            bicriteria: BicriteriaConfig::default(),
            rho: 5.0,
        }
    }
}

impl CoresetMethod for SensitivityMethod {
    fn name(&self) -> &str {
        "coreset"
    }

    fn build(
        &self,
        g: &Graph,
        x: &WeightedPointSet,
        size: usize,
        k: usize,
        seed: u64,
    ) -> Result<Coreset> {
        build_coreset(g, x, k, size, &self.bicriteria, self.rho, seed)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct UniformMethod;

impl CoresetMethod for UniformMethod {
    fn name(&self) -> &str {
        "uniform"
    }

    fn build(
        &self,
        _g: &Graph,
        x: &WeightedPointSet,
        size: usize,
        _k: usize,
        seed: u64,
    ) -> Result<Coreset> {
        uniform_baseline(x, size, seed)
    }
}

/// Returns the data set unchanged; a control whose error is always zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityMethod;

impl CoresetMethod for IdentityMethod {
    fn name(&self) -> &str {
        "identity"
    }

    fn build(
        &self,
        _g: &Graph,
        x: &WeightedPointSet,
        _size: usize,
        _k: usize,
        _seed: u64,
    ) -> Result<Coreset> {
        Ok(Coreset::new(x.clone(), None))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub size: usize,
    /// Mean over repetitions of the maximum empirical error.
    pub mean_max_err: f64,
    /// Mean construction wall-clock time per repetition.
    pub t_construct_ms: f64,
    /// Mean evaluation time per repetition. Shortest-path work shared by all
    /// coresets is apportioned equally among them.
    pub t_eval_ms: f64,
    pub max_errors: Vec<f64>,
    /// Distinct points per built coreset.
    pub supports: Vec<usize>,
    pub construct_ms: Vec<f64>,
    pub eval_ms: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub k: usize,
    pub center_sets: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

impl BenchmarkReport {
    pub fn row(&self, method: &str, size: usize) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.size == size)
    }

    /// Copy with every timing set to zero, for byte-reproducible output.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            row.t_construct_ms = 0.0;
            row.t_eval_ms = 0.0;
            row.construct_ms.iter_mut().for_each(|t| *t = 0.0);
            row.eval_ms.iter_mut().for_each(|t| *t = 0.0);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("method,size,mean_max_err,t_construct_ms,t_eval_ms\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.method, r.size, r.mean_max_err, r.t_construct_ms, r.t_eval_ms
            ));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn name_label(name: &str) -> u64 {
    // FNV-1a, so a method's seeds do not depend on which other methods run.
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Builds `cfg.repetitions` coresets per (method, size) and scores each by its
/// maximum empirical error over one shared stream of `cfg.center_sets`
/// random center sets. Rows are ordered by method, then size.
pub fn run_benchmark(
    g: &Graph,
    x: &WeightedPointSet,
    sizes: &[usize],
    methods: &[&dyn CoresetMethod],
    cfg: &ErrorTrialConfig,
) -> Result<BenchmarkReport> {
    cfg.validate()?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::invalid(
            "size grid must be nonempty with positive sizes",
        ));
    }
    if methods.is_empty() {
        return Err(Error::invalid("no construction methods given"));
    }
    x.check_bounds(g.vertex_count())?;

    let jobs: Vec<(usize, usize, usize)> = (0..methods.len())
        .flat_map(|m| {
            (0..sizes.len()).flat_map(move |s| (0..cfg.repetitions).map(move |r| (m, s, r)))
        })
        .collect();
    let built: Vec<(Coreset, f64)> = jobs
        .par_iter()
        .map(|&(m, s, r)| {
            let method = methods[m];
            let seed = derive_path(
                cfg.seed,
                &[name_label(method.name()), sizes[s] as u64, r as u64],
            );
            let start = Instant::now();
            let d = method.build(g, x, sizes[s], cfg.k, seed)?;
            Ok((d, millis(start)))
        })
        .collect::<Result<_>>()?;

    let stream_seed = derive_seed(cfg.seed, name_label("center-sets"));
    let sets = center_sets(g.vertex_count(), cfg.k, cfg.center_sets, stream_seed)?;
    // per_set[i][j]: (error, seconds) of coreset j against center set i.
    let per_set: Vec<Vec<(f64, f64)>> = sets
        .par_iter()
        .map(|c| {
            let start = Instant::now();
            let paths = from_centers(g, c)?;
            let shared = start.elapsed().as_secs_f64() / built.len() as f64;
            built
                .iter()
                .map(|(d, _)| {
                    let t = Instant::now();
                    let e = relative_error(paths.distances(), x, &d.points)?;
                    Ok((e, shared + t.elapsed().as_secs_f64()))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(methods.len() * sizes.len());
    for (m, method) in methods.iter().enumerate() {
        for (s, &size) in sizes.iter().enumerate() {
            let mut row = ReportRow {
                method: method.name().to_string(),
                size,
                mean_max_err: 0.0,
                t_construct_ms: 0.0,
                t_eval_ms: 0.0,
                max_errors: Vec::new(),
                supports: Vec::new(),
                construct_ms: Vec::new(),
                eval_ms: Vec::new(),
            };
            for r in 0..cfg.repetitions {
                let j = (m * sizes.len() + s) * cfg.repetitions + r;
                let max = per_set.iter().map(|v| v[j].0).fold(0.0, f64::max);
                let secs: f64 = per_set.iter().map(|v| v[j].1).sum();
                row.max_errors.push(max);
                row.supports.push(built[j].0.len());
                row.construct_ms.push(built[j].1);
                row.eval_ms.push(secs * 1e3);
            }
            let reps = cfg.repetitions as f64;
            row.mean_max_err = row.max_errors.iter().sum::<f64>() / reps;
            row.t_construct_ms = row.construct_ms.iter().sum::<f64>() / reps;
            row.t_eval_ms = row.eval_ms.iter().sum::<f64>() / reps;
            rows.push(row);
        }
    }
    Ok(BenchmarkReport {
        k: cfg.k,
        center_sets: cfg.center_sets,
        repetitions: cfg.repetitions,
        seed: cfg.seed,
        rows,
    })
}

/// How synthetic data points are placed on the graph.
#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    Uniform,
    /// `fraction` of the points fall in `region`, the rest uniformly outside it.
    Concentrated {
        region: Vec<usize>,
        fraction: f64,
    },
}

/// Draws `amount` vertices from `pool`: distinct when the pool is large
/// enough, otherwise with replacement.
fn draw_from<R: Rng>(rng: &mut R, pool: &[usize], amount: usize, out: &mut Vec<usize>) {
    if amount <= pool.len() {
        out.extend(
            index::sample(rng, pool.len(), amount)
                .into_iter()
                .map(|i| pool[i]),
        );
    } else {
        out.extend((0..amount).map(|_| pool[rng.random_range(0..pool.len())]));
    }
}

/// Synthetic data set of `count` unit points. When a part of the request
/// exceeds the vertices available to it, points repeat and are coalesced
/// into integer multiplicities; total weight is always `count`.
pub fn gen_dataset(
    g: &Graph,
    scenario: &Scenario,
    count: usize,
    seed: u64,
) -> Result<WeightedPointSet> {
    let n = g.vertex_count();
    if count == 0 || n == 0 {
        return Err(Error::invalid(
            "dataset needs a positive count and a nonempty graph",
        ));
    }
    let mut rng = rng_from(seed);
    let mut ids = Vec::with_capacity(count);
    match scenario {
        Scenario::Uniform => {
            let all: Vec<usize> = (0..n).collect();
            draw_from(&mut rng, &all, count, &mut ids);
        }
        Scenario::Concentrated { region, fraction } => {
            if region.is_empty() {
                return Err(Error::invalid("concentration region is empty"));
            }
            if !(0.0..=1.0).contains(fraction) {
                return Err(Error::invalid(format!(
                    "fraction {fraction} outside [0, 1]"
                )));
            }
            let mut inside = region.clone();
            inside.sort_unstable();
            inside.dedup();
            if let Some(&bad) = inside.last().filter(|&&v| v >= n) {
                return Err(Error::invalid(format!("region vertex {bad} out of range")));
            }
            let outside: Vec<usize> = (0..n)
                .filter(|v| inside.binary_search(v).is_err())
                .collect();
            let in_count = (fraction * count as f64).round() as usize;
            let out_count = count - in_count;
            if out_count > 0 && outside.is_empty() {
                return Err(Error::invalid("region covers the whole graph"));
            }
            draw_from(&mut rng, &inside, in_count, &mut ids);
            draw_from(&mut rng, &outside, out_count, &mut ids);
        }
    }
    Ok(WeightedPointSet::from_multiset(ids))
}

/// The `size` vertices closest to `center` (ties by id), as a compact region.
pub fn ball_region(g: &Graph, center: usize, size: usize) -> Result<Vec<usize>> {
    let paths = multi_source_dijkstra(g, &[(center, 0.0)])?;
    let mut order: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| paths.distance(v).is_finite())
        .collect();
    order.sort_by(|&a, &b| {
        paths
            .distance(a)
            .total_cmp(&paths.distance(b))
            .then(a.cmp(&b))
    });
    order.truncate(size);
    order.sort_unstable();
    Ok(order)
}
