//! Total-distance objective: pairwise distances, exact evaluation and the
//! nearest/second-nearest cache used to price add and swap moves.
//!
//! All sums run over shots in ascending index order so that every route to a
//! value performs the same floating-point operations.

use crate::error::{Error, Result};
use crate::instance::{Instance, Solution};

/// Dense symmetric matrix of shot-to-shot distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(instance: &Instance) -> Self {
        let n = instance.len();
        let metric = instance.metric();
        let shots = instance.shots();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = metric.distance(&shots[i].features, &shots[j].features);
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        DistanceMatrix { n, entries }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Distances from shot `j` to every shot (row `j`, equal to column `j`).
    #[inline]
    pub fn row(&self, j: usize) -> &[f64] {
        &self.entries[j * self.n..(j + 1) * self.n]
    }
}

/// Convenience for `DistanceMatrix::new`.
pub fn distance_matrix(instance: &Instance) -> DistanceMatrix {
    DistanceMatrix::new(instance)
}

/// Sum over all shots of the distance to the nearest selected shot.
pub fn total_distance(dm: &DistanceMatrix, sol: &Solution) -> f64 {
    total_distance_of(dm, sol.selected())
}

/// [`total_distance`] for a raw index set. Panics on an empty set.
pub fn total_distance_of(dm: &DistanceMatrix, selected: &[usize]) -> f64 {
    assert!(!selected.is_empty(), "total distance of an empty selection");
    (0..dm.len())
        .map(|i| {
            let row = dm.row(i);
            selected
                .iter()
                .map(|&s| row[s])
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Per-shot nearest and second-nearest selected shots.
///
/// `second` is `None` and `d2` is infinite while only one shot is selected.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestCache {
    selected: Vec<usize>,
    in_set: Vec<bool>,
    nearest1: Vec<usize>,
    d1: Vec<f64>,
    nearest2: Vec<Option<usize>>,
    d2: Vec<f64>,
}

impl NearestCache {
    pub fn new(dm: &DistanceMatrix, sol: &Solution) -> Self {
        Self::from_selected(dm, sol.selected().to_vec())
    }

    fn from_selected(dm: &DistanceMatrix, selected: Vec<usize>) -> Self {
        let n = dm.len();
        let mut in_set = vec![false; n];
        for &s in &selected {
            in_set[s] = true;
        }
        let mut cache = NearestCache {
            selected,
            in_set,
            nearest1: vec![0; n],
            d1: vec![f64::INFINITY; n],
            nearest2: vec![None; n],
            d2: vec![f64::INFINITY; n],
        };
        for i in 0..n {
            cache.rescan(dm, i);
        }
        cache
    }

    fn rescan(&mut self, dm: &DistanceMatrix, i: usize) {
        let row = dm.row(i);
        let (mut n1, mut d1) = (usize::MAX, f64::INFINITY);
        let (mut n2, mut d2) = (None, f64::INFINITY);
        for &s in &self.selected {
            let d = row[s];
            if d < d1 {
                if n1 != usize::MAX {
                    n2 = Some(n1);
                    d2 = d1;
                }
                n1 = s;
                d1 = d;
            } else if d < d2 || n2.is_none() {
                n2 = Some(s);
                d2 = d;
            }
        }
        self.nearest1[i] = n1;
        self.d1[i] = d1;
        self.nearest2[i] = n2;
        self.d2[i] = d2;
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn contains(&self, j: usize) -> bool {
        self.in_set.get(j).copied().unwrap_or(false)
    }

    pub fn nearest1(&self) -> &[usize] {
        &self.nearest1
    }

    pub fn d1(&self) -> &[f64] {
        &self.d1
    }

    pub fn nearest2(&self) -> &[Option<usize>] {
        &self.nearest2
    }

    pub fn d2(&self) -> &[f64] {
        &self.d2
    }

    /// Total distance of the cached selection.
    pub fn total(&self) -> f64 {
        self.d1.iter().sum()
    }

    fn check_incoming(&self, j: usize) -> Result<()> {
        if j >= self.in_set.len() {
            return Err(Error::InvalidMove(format!("shot {j} out of range")));
        }
        if self.in_set[j] {
            return Err(Error::InvalidMove(format!("shot {j} is already selected")));
        }
        Ok(())
    }

    /// Adds `j` to the cached selection.
    pub fn apply_add(&mut self, dm: &DistanceMatrix, j: usize) -> Result<()> {
        self.check_incoming(j)?;
        let pos = self.selected.binary_search(&j).unwrap_err();
        self.selected.insert(pos, j);
        self.in_set[j] = true;
        let row = dm.row(j);
        for (i, &d) in row.iter().enumerate() {
            if d < self.d1[i] {
                self.nearest2[i] = Some(self.nearest1[i]);
                self.d2[i] = self.d1[i];
                self.nearest1[i] = j;
                self.d1[i] = d;
            } else if d < self.d2[i] || self.nearest2[i].is_none() {
                self.nearest2[i] = Some(j);
                self.d2[i] = d;
            }
        }
        Ok(())
    }

    /// Replaces selected shot `out` by unselected shot `inp`.
    pub fn apply_swap(&mut self, dm: &DistanceMatrix, out: usize, inp: usize) -> Result<()> {
        self.check_incoming(inp)?;
        let pos = self
            .selected
            .binary_search(&out)
            .map_err(|_| Error::InvalidMove(format!("shot {out} is not selected")))?;
        self.selected.remove(pos);
        self.in_set[out] = false;
        for i in 0..self.d1.len() {
            if self.nearest1[i] == out || self.nearest2[i] == Some(out) {
                self.rescan(dm, i);
            }
        }
        self.apply_add(dm, inp)
    }
}

pub fn build_cache(dm: &DistanceMatrix, sol: &Solution) -> NearestCache {
    NearestCache::new(dm, sol)
}

/// `TD(S + j) - TD(S)`; never positive.
pub fn delta_add(dm: &DistanceMatrix, cache: &NearestCache, j: usize) -> Result<f64> {
    cache.check_incoming(j)?;
    Ok(add_gain(dm.row(j), &cache.d1))
}

#[inline]
pub(crate) fn add_gain(row_in: &[f64], d1: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&d, &near) in row_in.iter().zip(d1) {
        if d < near {
            acc += d - near;
        }
    }
    acc
}

/// Loss correction for removing each selected shot while `row_in` enters,
/// accumulated into `corr[facility]` (entries for selected shots must start
/// at zero).
#[inline]
pub(crate) fn swap_corrections(row_in: &[f64], cache: &NearestCache, corr: &mut [f64]) {
    for (i, &d) in row_in.iter().enumerate() {
        corr[cache.nearest1[i]] += cache.d2[i].min(d) - cache.d1[i].min(d);
    }
}

/// `TD(S - out + inp) - TD(S)`.
pub fn delta_swap(dm: &DistanceMatrix, cache: &NearestCache, out: usize, inp: usize) -> Result<f64> {
    cache.check_incoming(inp)?;
    if !cache.contains(out) {
        return Err(Error::InvalidMove(format!("shot {out} is not selected")));
    }
    let row = dm.row(inp);
    let gain = add_gain(row, &cache.d1);
    let mut corr = 0.0;
    for (i, &d) in row.iter().enumerate() {
        if cache.nearest1[i] == out {
            corr += cache.d2[i].min(d) - cache.d1[i].min(d);
        }
    }
    Ok(gain + corr)
}
