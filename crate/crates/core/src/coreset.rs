//! Sensitivity-sampling coresets.
//!
//! Construction runs in three stages:
//!
//! 1. [`iterated_thorup`] shrinks the data to a small weighted bicriteria
//!    solution by repeatedly oversampling candidate centers
//!    ([`tho_sample_best`]) and projecting the data onto them.
//! 2. Local search on that weighted candidate set yields an approximate
//!    k-median solution `C*`, from which [`sensitivities`] derives per-point
//!    importances `σ_x = ρ (d(x, C*) / cost(X, C*) + 1 / |C*(x)|)`.
//! 3. `N` points are drawn i.i.d. proportionally to importance and weighted
//!    by `w(x) / (N p_x)`, so that `cost(D, C)` is an unbiased estimate of
//!    `cost(X, C)` for every center set `C`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{local_search, CandidatePool, LocalSearchConfig};
use crate::error::{Error, Result};
use crate::graph::dijkstra::{relax_from, weighted_sum};
use crate::graph::{assign, Graph};
use crate::points::{CenterSet, WeightedPointSet};
use crate::seed::{self, derive_seed, rng_from};

/// Parameters of the iterated bicriteria sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BicriteriaConfig {
    /// Projection rounds of the outer loop.
    pub outer_iterations: usize,
    /// Independent sampler runs per round; the cheapest one is kept.
    pub repetitions: usize,
    /// Oversampling rounds per sampler run. `None` means
    /// `ceil(log2 |support|)` of the current input.
    pub rounds: Option<usize>,
    /// Points drawn per oversampling round. `None` means `k`.
    pub per_round: Option<usize>,
}

impl Default for BicriteriaConfig {
    fn default() -> Self {
        Self {
            outer_iterations: 3,
            repetitions: 5,
            rounds: None,
            per_round: None,
        }
    }
}

impl BicriteriaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.outer_iterations == 0 || self.repetitions == 0 {
            return Err(Error::invalid(
                "bicriteria iteration counts must be at least 1",
            ));
        }
        if self.rounds == Some(0) || self.per_round == Some(0) {
            return Err(Error::invalid(
                "sampler rounds and per-round count must be at least 1",
            ));
        }
        Ok(())
    }

    fn rounds_for(&self, support: usize) -> usize {
        self.rounds.unwrap_or_else(|| ceil_log2(support).max(1))
    }

    fn per_round_for(&self, k: usize) -> usize {
        self.per_round.unwrap_or(k).max(1)
    }
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Distance-proportional oversampler standing in for a bicriteria
/// approximation: the first round draws `per_round` distinct points
/// proportionally to weight, each later round draws `per_round` distinct new
/// points proportionally to `w(y) d(y, F)`. Returns the sampled set with unit
/// weights together with `cost(x, F)`.
fn sample_candidates(
    g: &Graph,
    x: &WeightedPointSet,
    rounds: usize,
    per_round: usize,
    seed: u64,
) -> Result<(WeightedPointSet, f64)> {
    if x.is_empty() {
        return Err(Error::invalid("cannot sample from an empty data set"));
    }
    x.check_bounds(g.vertex_count())?;
    let entries = x.entries();
    let mut rng = rng_from(seed);
    let mut dist = vec![f64::INFINITY; g.vertex_count()];
    let mut picked: Vec<usize> = Vec::new();

    let first = draw_distinct(&mut rng, entries.len(), per_round, |i| entries[i].1)?;
    let new: Vec<usize> = first.iter().map(|&i| entries[i].0).collect();
    relax_from(g, &mut dist, &new);
    picked.extend(new);

    for _ in 1..rounds {
        let unreachable = entries.iter().any(|&(id, _)| dist[id].is_infinite());
        let score = |i: usize| {
            let (id, w) = entries[i];
            match (unreachable, dist[id].is_infinite()) {
                (true, true) => w,
                (true, false) => 0.0,
                _ => w * dist[id],
            }
        };
        let positive = (0..entries.len()).filter(|&i| score(i) > 0.0).count();
        if positive == 0 {
            break;
        }
        let drawn = draw_distinct(&mut rng, entries.len(), per_round.min(positive), score)?;
        let new: Vec<usize> = drawn.iter().map(|&i| entries[i].0).collect();
        relax_from(g, &mut dist, &new);
        picked.extend(new);
    }

    picked.sort_unstable();
    picked.dedup();
    let cost = weighted_sum(&dist, x);
    let f =
        WeightedPointSet::from_sorted_unchecked(picked.into_iter().map(|id| (id, 1.0)).collect());
    Ok((f, cost))
}

/// Weighted sampling without replacement of `min(amount, #positive)` indices.
fn draw_distinct(
    rng: &mut seed::SeededRng,
    len: usize,
    amount: usize,
    weight: impl Fn(usize) -> f64,
) -> Result<Vec<usize>> {
    let positive = (0..len).filter(|&i| weight(i) > 0.0).count();
    let amount = amount.min(positive);
    if amount == 0 {
        return Ok(Vec::new());
    }
    let mut drawn = index::sample_weighted(rng, len, weight, amount)
        .map_err(|e| Error::invalid(format!("weighted sampling failed: {e}")))?
        .into_vec();
    drawn.sort_unstable();
    Ok(drawn)
}

/// One run of the oversampler with `rounds` rounds of `per_round` draws.
/// The result is a subset of `support(x)` with unit weights.
pub fn tho_sample(
    g: &Graph,
    x: &WeightedPointSet,
    k: usize,
    rounds: usize,
    per_round: usize,
    seed: u64,
) -> Result<WeightedPointSet> {
    if k == 0 || rounds == 0 || per_round == 0 {
        return Err(Error::invalid(
            "k, rounds and per-round count must be at least 1",
        ));
    }
    sample_candidates(g, x, rounds, per_round, seed).map(|(f, _)| f)
}

/// Best of `m` sampler runs by `cost(x, F)`, earliest run on ties. Run `i`
/// uses seed `derive_seed(seed, i)`.
pub fn tho_sample_best(
    g: &Graph,
    x: &WeightedPointSet,
    k: usize,
    m: usize,
    cfg: &BicriteriaConfig,
    seed: u64,
) -> Result<WeightedPointSet> {
    if m == 0 || k == 0 {
        return Err(Error::invalid(
            "k and the repetition count must be at least 1",
        ));
    }
    cfg.validate()?;
    let rounds = cfg.rounds_for(x.len());
    let per_round = cfg.per_round_for(k);
    let trials: Vec<(WeightedPointSet, f64)> = (0..m as u64)
        .into_par_iter()
        .map(|i| sample_candidates(g, x, rounds, per_round, derive_seed(seed, i)))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, (_, c)) in trials.iter().enumerate() {
        if *c < trials[best].1 {
            best = i;
        }
    }
    Ok(trials.into_iter().nth(best).expect("m >= 1").0)
}

/// Iterated bicriteria sampling with projection.
///
/// Round `i` samples `F_i` from the weighted set `X_{i-1}` (weight-proportional
/// sampling stands in for expanding it into a multiset) and then projects the
/// original data onto `F_i`: `X_i = F_i` with `w(u)` the total weight of the
/// data points whose nearest member of `F_i` is `u`. Returns `X_n`.
pub fn iterated_thorup(
    g: &Graph,
    x: &WeightedPointSet,
    k: usize,
    cfg: &BicriteriaConfig,
    seed: u64,
) -> Result<WeightedPointSet> {
    cfg.validate()?;
    let mut current = x.clone();
    for round in 1..=cfg.outer_iterations {
        let f = tho_sample_best(
            g,
            &current,
            k,
            cfg.repetitions,
            cfg,
            derive_seed(seed, round as u64),
        )?;
        current = project(g, x, &f)?;
        log::debug!("bicriteria round {round}: |F| = {}", current.len());
    }
    Ok(current)
}

/// `f` reweighted by the mass of `x` it attracts. Members that attract no
/// mass (possible only with zero-length edges) are dropped.
fn project(g: &Graph, x: &WeightedPointSet, f: &WeightedPointSet) -> Result<WeightedPointSet> {
    let centers = CenterSet::from_sorted_unchecked(f.support());
    let stats = assign(g, x, &centers)?;
    Ok(WeightedPointSet::from_sorted_unchecked(
        centers
            .as_slice()
            .iter()
            .copied()
            .zip(stats.cluster_weights)
            .filter(|&(_, w)| w > 0.0)
            .collect(),
    ))
}

/// Importances of the data points relative to an approximate solution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SensitivityVector {
    /// Data point ids, in data order.
    pub points: Vec<usize>,
    /// Data point weights, aligned with `points`.
    pub weights: Vec<f64>,
    /// Per-unit importance `σ_x`.
    pub sigma: Vec<f64>,
    /// Total importance `Σ w(x) σ_x`.
    pub total: f64,
    /// Sampling probabilities `w(x) σ_x / total`.
    pub probabilities: Vec<f64>,
    pub rho: f64,
    /// Clusters of `C*` that contain at least one data point.
    pub nonempty_clusters: usize,
}

/// `σ_x = ρ (d(x, C*) / cost(X, C*) + 1 / W(C*(x)))`, where `W(C*(x))` is
/// the weight of the cluster containing `x`. When `cost(X, C*) = 0` the first
/// term is taken as zero.
pub fn sensitivities(
    g: &Graph,
    x: &WeightedPointSet,
    cstar: &CenterSet,
    rho: f64,
) -> Result<SensitivityVector> {
    if !(rho >= 1.0 && rho.is_finite()) {
        return Err(Error::invalid(format!(
            "rho must be a finite value >= 1, got {rho}"
        )));
    }
    if x.is_empty() {
        return Err(Error::invalid("data set is empty"));
    }
    let stats = assign(g, x, cstar)?;
    let cost = stats.cost;
    let sigma: Vec<f64> = stats
        .assignments
        .iter()
        .map(|a| {
            let cluster = stats.cluster_weight_of(a.center);
            let spread = if cost > 0.0 { a.distance / cost } else { 0.0 };
            rho * (spread + 1.0 / cluster)
        })
        .collect();
    let weights: Vec<f64> = x.entries().iter().map(|&(_, w)| w).collect();
    let total: f64 = weights.iter().zip(&sigma).map(|(w, s)| w * s).sum();
    let probabilities = weights
        .iter()
        .zip(&sigma)
        .map(|(w, s)| w * s / total)
        .collect();
    Ok(SensitivityVector {
        points: x.support(),
        weights,
        sigma,
        total,
        probabilities,
        rho,
        nonempty_clusters: stats.nonempty_clusters(),
    })
}

/// Provenance of a coreset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoresetMeta {
    pub seed: u64,
    pub samples: usize,
    pub k: usize,
    pub rho: f64,
    pub sigma_total: f64,
}

impl CoresetMeta {
    /// `key=value` lines.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "N={}", self.samples);
        let _ = writeln!(s, "k={}", self.k);
        let _ = writeln!(s, "rho={}", self.rho);
        let _ = writeln!(s, "sigma_X={}", self.sigma_total);
        s
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, "expected key=value"))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        fn field<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T> {
            map.get(key)
                .ok_or_else(|| Error::invalid(format!("metadata is missing '{key}'")))?
                .parse()
                .map_err(|_| Error::invalid(format!("metadata field '{key}' is malformed")))
        }
        Ok(Self {
            seed: field(&map, "seed")?,
            samples: field(&map, "N")?,
            k: field(&map, "k")?,
            rho: field(&map, "rho")?,
            sigma_total: field(&map, "sigma_X")?,
        })
    }
}

/// A weighted subset of vertices standing in for the data set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coreset {
    pub points: WeightedPointSet,
    pub meta: Option<CoresetMeta>,
}

impl Coreset {
    pub fn new(points: WeightedPointSet, meta: Option<CoresetMeta>) -> Self {
        Self { points, meta }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        crate::points::write_points_csv(&self.points, out)
    }
}

/// An approximate solution and the importances derived from it, ready to be
/// sampled any number of times.
#[derive(Clone, Debug)]
pub struct ImportanceSampler {
    pub cstar: CenterSet,
    pub sensitivities: SensitivityVector,
    k: usize,
    seed: u64,
}

impl ImportanceSampler {
    /// Runs the bicriteria stage and local search to find `C*`, then computes
    /// importances of `x` against it.
    pub fn prepare(
        g: &Graph,
        x: &WeightedPointSet,
        k: usize,
        cfg: &BicriteriaConfig,
        rho: f64,
        seed: u64,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if x.is_empty() {
            return Err(Error::invalid("data set is empty"));
        }
        let f = iterated_thorup(g, x, k, cfg, derive_seed(seed, seed::STREAM_BICRITERIA))?;
        let pool = f.support();
        let cstar = if pool.len() <= k {
            CenterSet::from_sorted_unchecked(pool)
        } else {
            local_search(
                g,
                &f,
                k,
                &CandidatePool::Restricted(pool),
                &LocalSearchConfig::default(),
                derive_seed(seed, seed::STREAM_LOCAL_SEARCH),
            )?
            .centers
        };
        let sensitivities = sensitivities(g, x, &cstar, rho)?;
        Ok(Self {
            cstar,
            sensitivities,
            k,
            seed,
        })
    }

    /// Draws `n` i.i.d. samples and coalesces repeats.
    pub fn sample(&self, n: usize) -> Result<Coreset> {
        if n == 0 {
            return Err(Error::invalid("coreset size must be at least 1"));
        }
        let sens = &self.sensitivities;
        let dist = WeightedIndex::new(&sens.probabilities)
            .map_err(|e| Error::invalid(format!("invalid sampling distribution: {e}")))?;
        let mut rng = rng_from(derive_seed(self.seed, seed::STREAM_IMPORTANCE));
        let mut counts = vec![0u64; sens.points.len()];
        for _ in 0..n {
            counts[dist.sample(&mut rng)] += 1;
        }
        let entries = counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(i, &c)| {
                let w = (c as f64 * sens.weights[i]) / (n as f64 * sens.probabilities[i]);
                (sens.points[i], w)
            })
            .collect();
        Ok(Coreset {
            points: WeightedPointSet::new(entries)?,
            meta: Some(CoresetMeta {
                seed: self.seed,
                samples: n,
                k: self.k,
                rho: sens.rho,
                sigma_total: sens.total,
            }),
        })
    }
}

/// Full construction: bicriteria stage, local search, importances, and `n`
/// importance samples.
pub fn build_coreset(
    g: &Graph,
    x: &WeightedPointSet,
    k: usize,
    n: usize,
    cfg: &BicriteriaConfig,
    rho: f64,
    seed: u64,
) -> Result<Coreset> {
    if n == 0 {
        return Err(Error::invalid("coreset size must be at least 1"));
    }
    ImportanceSampler::prepare(g, x, k, cfg, rho, seed)?.sample(n)
}

/// Advisory sample count `ceil(c0 (σ_X / ε)^2 (k sdim + ln(1/δ)))`.
pub fn coreset_size_bound(
    epsilon: f64,
    delta: f64,
    k: usize,
    sdim_max: usize,
    sigma_total: f64,
    c0: f64,
) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("epsilon and delta must lie in (0, 1)"));
    }
    if k == 0
        || sdim_max == 0
        || sigma_total.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
        || c0.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
    {
        return Err(Error::invalid(
            "k, sdim_max, sigma_X and c0 must be positive",
        ));
    }
    let raw = size_bound_raw(epsilon, delta, k, sdim_max, sigma_total, c0);
    // Absorb rounding noise so exact integers do not round up.
    let n = (raw * (1.0 - 1e-12)).ceil();
    if !(n.is_finite() && n < usize::MAX as f64) {
        return Err(Error::invalid("size bound overflows"));
    }
    Ok((n as usize).max(1))
}

pub(crate) fn size_bound_raw(
    epsilon: f64,
    delta: f64,
    k: usize,
    sdim_max: usize,
    sigma_total: f64,
    c0: f64,
) -> f64 {
    let ratio = sigma_total / epsilon;
    c0 * ratio * ratio * ((k * sdim_max) as f64 + (1.0 / delta).ln())
}
