//! Exact reference solvers, the restart baseline and optimality scoring.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::instance::{Instance, Solution};
use crate::local_search::{init_solution, local_search, LocalSearchParams};
use crate::objective::{total_distance, total_distance_of, DistanceMatrix};

/// Largest instance accepted by [`enumerate_optimal`].
pub const ENUMERATION_MAX_SHOTS: usize = 20;

/// Node and wall-clock caps for [`exact_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OracleLimits {
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub solution: Solution,
    pub td_optimal: f64,
    pub nodes_explored: u64,
    /// True iff the search finished within its caps.
    pub proved_optimal: bool,
    /// `(nodes_explored, incumbent)` each time the incumbent improved.
    pub incumbent_history: Vec<(u64, f64)>,
}

struct BranchAndBound<'a> {
    dm: &'a DistanceMatrix,
    instance: &'a Instance,
    limits: OracleLimits,
    started: Instant,
    /// Shots in ascending (duration, index) order.
    order: Vec<usize>,
    /// `suffix_min[pos * n + i]`: distance from `i` to the closest of `order[pos..]`.
    suffix_min: Vec<f64>,
    /// Duration of `order[pos..]`.
    suffix_duration: Vec<f64>,
    selected: Vec<usize>,
    sel_min: Vec<f64>,
    used: f64,
    best: Vec<usize>,
    best_td: f64,
    nodes: u64,
    aborted: bool,
    history: Vec<(u64, f64)>,
}

impl BranchAndBound<'_> {
    fn out_of_budget(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if self.limits.max_nodes.is_some_and(|cap| self.nodes >= cap) {
            self.aborted = true;
        } else if let Some(limit) = self.limits.time_limit {
            if self.nodes.is_multiple_of(1024) && self.started.elapsed() >= limit {
                self.aborted = true;
            }
        }
        self.aborted
    }

    fn sorted_with(&self, extra: &[usize]) -> Vec<usize> {
        let mut set: Vec<usize> = self.selected.iter().chain(extra).copied().collect();
        set.sort_unstable();
        set
    }

    fn offer(&mut self, set: Vec<usize>, td: f64) {
        if td < self.best_td {
            self.best_td = td;
            self.best = set;
            self.history.push((self.nodes, td));
        }
    }

    fn search(&mut self, pos: usize) {
        if self.out_of_budget() {
            return;
        }
        self.nodes += 1;
        let n = self.order.len();
        if pos == n {
            if !self.selected.is_empty() {
                let td = self.sel_min.iter().sum();
                let set = self.sorted_with(&[]);
                self.offer(set, td);
            }
            return;
        }
        let suffix = &self.suffix_min[pos * n..(pos + 1) * n];
        let bound: f64 = self.sel_min.iter().zip(suffix).map(|(&a, &b)| a.min(b)).sum();
        if bound >= self.best_td {
            return;
        }
        // Taking every remaining shot is optimal for this subtree when it fits.
        let rest = &self.order[pos..];
        if self.instance.fits_approx(self.used + self.suffix_duration[pos], || {
            self.instance.duration_of(self.sorted_with(rest))
        }) {
            let set = self.sorted_with(rest);
            let td = total_distance_of(self.dm, &set);
            self.offer(set, td);
            return;
        }

        let item = self.order[pos];
        let fits = self.instance.fits_approx(self.used + self.instance.duration(item), || {
            self.instance.duration_of(self.sorted_with(&[item]))
        });
        if fits {
            let saved = self.sel_min.clone();
            for (m, &d) in self.sel_min.iter_mut().zip(self.dm.row(item)) {
                if d < *m {
                    *m = d;
                }
            }
            self.selected.push(item);
            let used = self.used;
            self.used += self.instance.duration(item);
            self.search(pos + 1);
            self.used = used;
            self.selected.pop();
            self.sel_min = saved;
        }
        self.search(pos + 1);
    }
}

/// Branch-and-bound over include/exclude decisions, shortest shots first.
///
/// The bound at a node is the total distance to the union of selected and
/// undecided shots. Results carry `proved_optimal = false` when a cap cut
/// the search short.
pub fn exact_solve(dm: &DistanceMatrix, instance: &Instance, limits: OracleLimits) -> OracleResult {
    let n = instance.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        instance
            .duration(a)
            .total_cmp(&instance.duration(b))
            .then(a.cmp(&b))
    });
    let mut suffix_min = vec![f64::INFINITY; (n + 1) * n];
    let mut suffix_duration = vec![0.0; n + 1];
    for pos in (0..n).rev() {
        let row = dm.row(order[pos]);
        for i in 0..n {
            suffix_min[pos * n + i] = row[i].min(suffix_min[(pos + 1) * n + i]);
        }
        suffix_duration[pos] = suffix_duration[pos + 1] + instance.duration(order[pos]);
    }
    let start = init_solution(instance);
    let mut bb = BranchAndBound {
        dm,
        instance,
        limits,
        started: Instant::now(),
        order,
        suffix_min,
        suffix_duration,
        selected: Vec::with_capacity(n),
        sel_min: vec![f64::INFINITY; n],
        used: 0.0,
        best_td: total_distance(dm, &start),
        best: start.selected().to_vec(),
        nodes: 0,
        aborted: false,
        history: Vec::new(),
    };
    bb.history.push((0, bb.best_td));
    bb.search(0);
    let solution = Solution::new(instance, bb.best.iter().copied()).expect("incumbent is feasible");
    OracleResult {
        solution,
        td_optimal: bb.best_td,
        nodes_explored: bb.nodes,
        proved_optimal: !bb.aborted,
        incumbent_history: bb.history,
    }
}

/// Checks every non-empty subset. Lowest bitmask wins ties.
pub fn enumerate_optimal(dm: &DistanceMatrix, instance: &Instance) -> Result<(Solution, f64)> {
    let n = instance.len();
    if n > ENUMERATION_MAX_SHOTS {
        return Err(Error::InvalidArgument(format!(
            "enumeration is limited to {ENUMERATION_MAX_SHOTS} shots, instance has {n}"
        )));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut set = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        set.clear();
        set.extend((0..n).filter(|&i| mask & (1 << i) != 0));
        if instance.duration_of(set.iter().copied()) > instance.budget_s() {
            continue;
        }
        let td = total_distance_of(dm, &set);
        if best.as_ref().is_none_or(|(_, b)| td < *b) {
            best = Some((set.clone(), td));
        }
    }
    let (set, td) = best.expect("the shortest shot alone is feasible");
    Ok((Solution::new(instance, set)?, td))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub solution: Solution,
    pub total_distance: f64,
    pub starts_completed: usize,
    pub local_search_steps: usize,
}

/// Local search from every single-shot start in index order, keeping the
/// best result (earliest start on ties). Stops early once `time_budget` has
/// elapsed; the first start always runs.
pub fn restart_summ(
    dm: &DistanceMatrix,
    instance: &Instance,
    params: &LocalSearchParams,
    time_budget: Duration,
) -> RestartOutcome {
    let started = Instant::now();
    let mut best: Option<(Solution, f64)> = None;
    let mut starts_completed = 0;
    let mut local_search_steps = 0;
    for s in 0..instance.len() {
        if starts_completed > 0 && started.elapsed() >= time_budget {
            break;
        }
        let Ok(start) = Solution::new(instance, [s]) else {
            continue;
        };
        let found = local_search(dm, instance, &start, params);
        starts_completed += 1;
        local_search_steps += found.steps_taken;
        if best.as_ref().is_none_or(|(_, b)| found.total_distance < *b) {
            best = Some((found.solution, found.total_distance));
        }
    }
    let (solution, total_distance) = best.expect("at least one shot fits the budget");
    RestartOutcome {
        solution,
        total_distance,
        starts_completed,
        local_search_steps,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityReport {
    pub td_achieved: f64,
    pub td_optimal: f64,
    pub optimality_percent: f64,
}

impl OptimalityReport {
    pub fn new(td_achieved: f64, td_optimal: f64) -> Result<Self> {
        Ok(OptimalityReport {
            td_achieved,
            td_optimal,
            optimality_percent: optimality_percentage(td_achieved, td_optimal)?,
        })
    }
}

/// `100 * optimal / achieved`, with `0 / 0` scored as 100.
pub fn optimality_percentage(td_achieved: f64, td_optimal: f64) -> Result<f64> {
    if td_optimal.is_nan() || td_optimal < 0.0 || !td_achieved.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "total distances must be finite and non-negative, got {td_achieved} and {td_optimal}"
        )));
    }
    if td_achieved < td_optimal {
        return Err(Error::BelowOptimum {
            achieved: td_achieved,
            optimal: td_optimal,
        });
    }
    if td_achieved == 0.0 {
        return Ok(100.0);
    }
    Ok(100.0 * td_optimal / td_achieved)
}

/// Arithmetic mean of per-instance percentages; `None` for an empty slice.
pub fn mean_percentage(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}
