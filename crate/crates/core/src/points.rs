//! Weighted data sets and center sets over graph vertices.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex ids with positive weights, kept sorted by id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPointSet {
    entries: Vec<(usize, f64)>,
}

impl WeightedPointSet {
    /// Validates and sorts `entries`. Ids must be distinct and weights
    /// positive and finite.
    pub fn new(mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|&(id, _)| id);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::invalid(format!("duplicate vertex id {}", pair[0].0)));
            }
        }
        for &(id, w) in &entries {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!(
                    "weight of vertex {id} must be positive and finite, got {w}"
                )));
            }
        }
        let total: f64 = entries.iter().map(|&(_, w)| w).sum();
        if !total.is_finite() {
            return Err(Error::invalid("total weight overflows"));
        }
        Ok(Self { entries })
    }

    /// Unit weights on distinct ids.
    pub fn unit(ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::new(ids.into_iter().map(|id| (id, 1.0)).collect())
    }

    /// Coalesces a multiset of ids into integer multiplicities.
    pub fn from_multiset(ids: impl IntoIterator<Item = usize>) -> Self {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for id in ids {
            *counts.entry(id).or_insert(0.0) += 1.0;
        }
        Self {
            entries: counts.into_iter().collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(entries: Vec<(usize, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|p| p[0].0 < p[1].0));
        debug_assert!(entries.iter().all(|&(_, w)| w > 0.0));
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(id, _)| id)
    }

    pub fn support(&self) -> Vec<usize> {
        self.ids().collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }

    pub fn weight_of(&self, id: usize) -> Option<f64> {
        self.entries
            .binary_search_by_key(&id, |&(v, _)| v)
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// Copy with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.entries
                .iter()
                .map(|&(id, w)| (id, w * factor))
                .collect(),
        )
    }

    pub(crate) fn check_bounds(&self, vertex_count: usize) -> Result<()> {
        match self.entries.last() {
            Some(&(id, _)) if id >= vertex_count => Err(Error::invalid(format!(
                "data point {id} out of range for a graph with {vertex_count} vertices"
            ))),
            _ => Ok(()),
        }
    }
}

/// A set of distinct center vertices, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CenterSet {
    centers: Vec<usize>,
}

impl CenterSet {
    pub fn new(mut centers: Vec<usize>) -> Result<Self> {
        centers.sort_unstable();
        if let Some(pair) = centers.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::invalid(format!("duplicate center {}", pair[0])));
        }
        Ok(Self { centers })
    }

    pub(crate) fn from_sorted_unchecked(centers: Vec<usize>) -> Self {
        debug_assert!(centers.windows(2).all(|p| p[0] < p[1]));
        Self { centers }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.centers.binary_search(&v).is_ok()
    }

    /// Position of `v` in the sorted center list.
    pub fn index_of(&self, v: usize) -> Option<usize> {
        self.centers.binary_search(&v).ok()
    }

    /// The set with `out` replaced by `inc`.
    pub fn swapped(&self, out: usize, inc: usize) -> Self {
        let mut centers: Vec<usize> = self.centers.iter().copied().filter(|&c| c != out).collect();
        if let Err(pos) = centers.binary_search(&inc) {
            centers.insert(pos, inc);
        }
        Self { centers }
    }

    pub(crate) fn check_bounds(&self, vertex_count: usize) -> Result<()> {
        match self.centers.last() {
            Some(&c) if c >= vertex_count => Err(Error::invalid(format!(
                "center {c} out of range for a graph with {vertex_count} vertices"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for CenterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.centers {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        Ok(())
    }
}

/// Writes `vertex_id,weight` rows with 17 significant digits.
pub fn write_points_csv<W: Write>(points: &WeightedPointSet, mut out: W) -> std::io::Result<()> {
    writeln!(out, "vertex_id,weight")?;
    for &(id, w) in points.entries() {
        writeln!(out, "{id},{w:.16e}")?;
    }
    Ok(())
}

/// Parses the `vertex_id,weight` format written by [`write_points_csv`].
pub fn parse_points_csv(text: &str) -> Result<WeightedPointSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim() == "vertex_id,weight" => {}
        Some((i, _)) => return Err(Error::parse(i + 1, "expected header 'vertex_id,weight'")),
        None => return Err(Error::parse(1, "missing header")),
    }
    let mut entries = Vec::new();
    for (i, line) in lines {
        let (id, w) = line
            .trim()
            .split_once(',')
            .ok_or_else(|| Error::parse(i + 1, "expected 'vertex_id,weight'"))?;
        let id: usize = id
            .trim()
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("invalid vertex id '{id}'")))?;
        let w: f64 = w
            .trim()
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("invalid weight '{w}'")))?;
        entries.push((id, w));
    }
    WeightedPointSet::new(entries)
}

pub fn load_points_csv(path: impl AsRef<Path>) -> Result<WeightedPointSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_points_csv(&text)
}
