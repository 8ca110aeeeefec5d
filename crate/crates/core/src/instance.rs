//! Knapsack-median instances: shots, budgets, solutions and the on-disk
//! instance format.
//!
//! Durations are summed in ascending index order everywhere. That sum is the
//! one the budget is checked against, so feasibility never depends on the
//! order in which a solver happened to build a set.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance used between shot feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    #[default]
    Euclidean,
    #[serde(rename = "sqeuclidean")]
    SquaredEuclidean,
    Manhattan,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::SquaredEuclidean => "sqeuclidean",
            MetricKind::Manhattan => "manhattan",
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            MetricKind::Euclidean => squared_l2(a, b).sqrt(),
            MetricKind::SquaredEuclidean => squared_l2(a, b),
            MetricKind::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }
}

fn squared_l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(MetricKind::Euclidean),
            "sqeuclidean" => Ok(MetricKind::SquaredEuclidean),
            "manhattan" => Ok(MetricKind::Manhattan),
            other => Err(Error::Parse(format!("unknown metric '{other}'"))),
        }
    }
}

/// One video shot: a label, its duration in seconds and the feature vector of
/// its representative frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shot {
    pub id: String,
    #[serde(rename = "duration_seconds")]
    pub duration_s: f64,
    pub features: Vec<f64>,
}

impl Shot {
    pub fn new(id: impl Into<String>, duration_s: f64, features: Vec<f64>) -> Self {
        Shot {
            id: id.into(),
            duration_s,
            features,
        }
    }
}

/// A validated instance. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    shots: Vec<Shot>,
    budget_s: f64,
    metric: MetricKind,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        shots: Vec<Shot>,
        budget_s: f64,
        metric: MetricKind,
    ) -> Result<Self> {
        let first = shots.first().ok_or(Error::EmptyInstance)?;
        let dim = first.features.len();
        for (index, shot) in shots.iter().enumerate() {
            if shot.features.is_empty() {
                return Err(Error::EmptyFeatures {
                    index,
                    id: shot.id.clone(),
                });
            }
            if shot.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    id: shot.id.clone(),
                    expected: dim,
                    found: shot.features.len(),
                });
            }
            if shot.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature {
                    index,
                    id: shot.id.clone(),
                });
            }
            // `!(d > 0)` also rejects NaN.
            if !(shot.duration_s.is_finite() && shot.duration_s > 0.0) {
                return Err(Error::NonPositiveDuration {
                    index,
                    id: shot.id.clone(),
                    duration: shot.duration_s,
                });
            }
        }
        if !(budget_s.is_finite() && budget_s > 0.0) {
            return Err(Error::InvalidBudget(budget_s));
        }
        let shortest = shots
            .iter()
            .map(|s| s.duration_s)
            .fold(f64::INFINITY, f64::min);
        if shortest > budget_s {
            return Err(Error::Infeasible {
                budget: budget_s,
                shortest,
            });
        }
        Ok(Instance {
            name: name.into(),
            shots,
            budget_s,
            metric,
        })
    }

    /// Same shots and metric, different budget.
    pub fn with_budget(&self, budget_s: f64) -> Result<Self> {
        Instance::new(self.name.clone(), self.shots.clone(), budget_s, self.metric)
    }

    pub fn with_metric(&self, metric: MetricKind) -> Self {
        Instance {
            metric,
            ..self.clone()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shots(&self) -> &[Shot] {
        &self.shots
    }

    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    /// Feature dimension shared by every shot.
    pub fn dim(&self) -> usize {
        self.shots[0].features.len()
    }

    pub fn budget_s(&self) -> f64 {
        self.budget_s
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    #[inline]
    pub fn duration(&self, index: usize) -> f64 {
        self.shots[index].duration_s
    }

    pub fn total_duration(&self) -> f64 {
        self.shots.iter().map(|s| s.duration_s).sum()
    }

    /// Duration of a set of shots, summed in the order given. Pass indices in
    /// ascending order to get the canonical sum.
    pub fn duration_of<I: IntoIterator<Item = usize>>(&self, indices: I) -> f64 {
        indices.into_iter().map(|i| self.duration(i)).sum()
    }

    /// Budget test for a set whose canonical duration is close to `approx`.
    ///
    /// `approx` may carry rounding error from incremental updates; when it is
    /// too close to the budget to decide, `exact` is called for the canonical
    /// sum.
    #[inline]
    pub fn fits_approx(&self, approx: f64, exact: impl FnOnce() -> f64) -> bool {
        let margin = 1e-9 * (approx.abs() + self.budget_s);
        if approx < self.budget_s - margin {
            true
        } else if approx > self.budget_s + margin {
            false
        } else {
            exact() <= self.budget_s
        }
    }

    /// Index of the shortest shot, lowest index on ties.
    pub fn shortest_shot(&self) -> usize {
        let mut best = 0;
        for (i, shot) in self.shots.iter().enumerate().skip(1) {
            if shot.duration_s < self.shots[best].duration_s {
                best = i;
            }
        }
        best
    }
}

/// How the summary budget is derived from the video length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetRule {
    /// A fixed fraction of the video length.
    Ratio(f64),
    /// The smaller of an absolute cap and a fraction of the video length.
    CapAndRatio { cap_s: f64, ratio: f64 },
}

pub fn derive_budget(total_video_s: f64, rule: BudgetRule) -> Result<f64> {
    if !(total_video_s.is_finite() && total_video_s > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "video length must be positive, got {total_video_s}"
        )));
    }
    let check_ratio = |r: f64| {
        if r > 0.0 && r < 1.0 {
            Ok(r)
        } else {
            Err(Error::InvalidArgument(format!(
                "budget ratio must lie in (0, 1), got {r}"
            )))
        }
    };
    match rule {
        BudgetRule::Ratio(r) => Ok(check_ratio(r)? * total_video_s),
        BudgetRule::CapAndRatio { cap_s, ratio } => {
            if !(cap_s.is_finite() && cap_s > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "budget cap must be positive, got {cap_s}"
                )));
            }
            Ok(cap_s.min(check_ratio(ratio)? * total_video_s))
        }
    }
}

/// A feasible, non-empty selection of shots.
///
/// Indices are kept sorted ascending; `duration_used_s` is their canonical
/// duration sum and never exceeds the instance budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    selected: Vec<usize>,
    duration_used_s: f64,
}

impl Solution {
    pub fn new(instance: &Instance, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut selected: Vec<usize> = indices.into_iter().collect();
        if selected.is_empty() {
            return Err(Error::InvalidSolution("empty selection".into()));
        }
        selected.sort_unstable();
        if selected.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSolution("duplicate shot index".into()));
        }
        if let Some(&bad) = selected.iter().find(|&&i| i >= instance.len()) {
            return Err(Error::InvalidSolution(format!(
                "shot index {bad} out of range for {} shots",
                instance.len()
            )));
        }
        let duration_used_s = instance.duration_of(selected.iter().copied());
        if duration_used_s > instance.budget_s() {
            return Err(Error::InvalidSolution(format!(
                "duration {duration_used_s}s exceeds budget {}s",
                instance.budget_s()
            )));
        }
        Ok(Solution {
            selected,
            duration_used_s,
        })
    }

    /// Solution from indices already known to be sorted, unique and in
    /// range. Feasibility is still checked.
    pub(crate) fn from_sorted(instance: &Instance, selected: Vec<usize>) -> Option<Self> {
        debug_assert!(!selected.is_empty());
        debug_assert!(selected.windows(2).all(|w| w[0] < w[1]));
        let duration_used_s = instance.duration_of(selected.iter().copied());
        (duration_used_s <= instance.budget_s()).then_some(Solution {
            selected,
            duration_used_s,
        })
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn duration_used_s(&self) -> f64 {
        self.duration_used_s
    }

    pub fn contains(&self, index: usize) -> bool {
        self.selected.binary_search(&index).is_ok()
    }

    /// Canonical sorted index set after replacing `out` by `inp` (either may
    /// be absent).
    pub(crate) fn indices_after(&self, out: Option<usize>, inp: Option<usize>) -> Vec<usize> {
        let mut next: Vec<usize> = self
            .selected
            .iter()
            .copied()
            .filter(|&i| Some(i) != out)
            .collect();
        if let Some(j) = inp {
            let pos = next.binary_search(&j).unwrap_or_else(|p| p);
            next.insert(pos, j);
        }
        next
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    name: String,
    budget_seconds: f64,
    #[serde(default)]
    metric: Option<MetricKind>,
    shots: Vec<Shot>,
}

/// Parses the canonical JSON instance document.
pub fn parse_instance_json(text: &str) -> Result<Instance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Instance::new(
        file.name,
        file.shots,
        file.budget_seconds,
        file.metric.unwrap_or_default(),
    )
}

pub fn instance_to_json(instance: &Instance) -> String {
    let file = InstanceFile {
        name: instance.name.clone(),
        budget_seconds: instance.budget_s,
        metric: Some(instance.metric),
        shots: instance.shots.clone(),
    };
    serde_json::to_string_pretty(&file).expect("instance serializes")
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Loads a JSON instance file. CSV files carry no budget; use
/// [`load_instance_csv`] for them.
pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    if is_csv(path) {
        return Err(Error::Parse(format!(
            "{} is a CSV instance; a budget must be supplied",
            path.display()
        )));
    }
    parse_instance_json(&read(path)?)
}

/// Loads an instance file of either format. The budget, when given,
/// overrides the one stored in a JSON file and is required for CSV.
pub fn load_instance_any(
    path: impl AsRef<Path>,
    budget_s: Option<f64>,
    metric: Option<MetricKind>,
) -> Result<Instance> {
    let path = path.as_ref();
    let instance = if is_csv(path) {
        let budget = budget_s.ok_or_else(|| {
            Error::InvalidArgument(format!("{} is a CSV instance; pass a budget", path.display()))
        })?;
        load_instance_csv(path, budget, metric.unwrap_or_default())?
    } else {
        let loaded = load_instance(path)?;
        match budget_s {
            Some(b) => loaded.with_budget(b)?,
            None => loaded,
        }
    };
    Ok(match metric {
        Some(m) => instance.with_metric(m),
        None => instance,
    })
}

/// Loads `id,duration_seconds,f0,f1,...` rows. A header row is allowed and
/// recognised by a non-numeric duration field.
pub fn load_instance_csv(
    path: impl AsRef<Path>,
    budget_s: f64,
    metric: MetricKind,
) -> Result<Instance> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance")
        .to_string();
    parse_instance_csv(&read(path)?, name, budget_s, metric)
}

pub fn parse_instance_csv(
    text: &str,
    name: impl Into<String>,
    budget_s: f64,
    metric: MetricKind,
) -> Result<Instance> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut shots = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.len() < 3 {
            return Err(Error::Parse(format!(
                "line {}: expected id, duration and at least one feature",
                line + 1
            )));
        }
        let duration = match record[1].parse::<f64>() {
            Ok(d) => d,
            Err(_) if line == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("line {}: {e}", line + 1))),
        };
        let features = record
            .iter()
            .skip(2)
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", line + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        shots.push(Shot::new(&record[0], duration, features));
    }
    Instance::new(name, shots, budget_s, metric)
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, instance_to_json(instance)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
