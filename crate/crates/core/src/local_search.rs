//! Steepest-descent local search over feasible add and swap moves.

use crate::instance::{Instance, Solution};
use crate::objective::{add_gain, swap_corrections, DistanceMatrix, NearestCache};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalSearchParams {
    pub max_trials: usize,
    /// Look at swaps only when no add move improves the objective.
    pub add_first: bool,
}

impl Default for LocalSearchParams {
    fn default() -> Self {
        LocalSearchParams {
            max_trials: 10_000,
            add_first: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Add(usize),
    Swap { out: usize, inp: usize },
}

impl Move {
    pub fn incoming(self) -> usize {
        match self {
            Move::Add(j) | Move::Swap { inp: j, .. } => j,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchOutcome {
    pub solution: Solution,
    pub total_distance: f64,
    pub steps_taken: usize,
    /// True iff the search stopped because no improving neighbor exists.
    pub converged: bool,
}

/// The single shortest shot, lowest index on ties.
pub fn init_solution(instance: &Instance) -> Solution {
    Solution::new(instance, [instance.shortest_shot()])
        .expect("instances guarantee the shortest shot fits the budget")
}

/// Best improving move from `sol`, or `None` at a local minimum.
pub fn best_neighbor(
    dm: &DistanceMatrix,
    instance: &Instance,
    sol: &Solution,
    add_first: bool,
) -> Option<(Move, f64)> {
    let cache = NearestCache::new(dm, sol);
    Scanner::new(dm.len()).best(dm, instance, sol, &cache, add_first)
}

/// Reusable scratch space for neighborhood scans.
pub(crate) struct Scanner {
    corr: Vec<f64>,
}

impl Scanner {
    pub(crate) fn new(n: usize) -> Self {
        Scanner { corr: vec![0.0; n] }
    }

    fn best_add(
        &self,
        dm: &DistanceMatrix,
        instance: &Instance,
        sol: &Solution,
        cache: &NearestCache,
    ) -> Option<(Move, f64)> {
        let used = sol.duration_used_s();
        let mut best: Option<(Move, f64)> = None;
        for j in (0..instance.len()).filter(|&j| !cache.contains(j)) {
            let fits = instance.fits_approx(used + instance.duration(j), || {
                instance.duration_of(sol.indices_after(None, Some(j)))
            });
            if !fits {
                continue;
            }
            let delta = add_gain(dm.row(j), cache.d1());
            if best.is_none_or(|(_, b)| delta < b) {
                best = Some((Move::Add(j), delta));
            }
        }
        best
    }

    fn best_swap(
        &mut self,
        dm: &DistanceMatrix,
        instance: &Instance,
        sol: &Solution,
        cache: &NearestCache,
        mut best: Option<(Move, f64)>,
    ) -> Option<(Move, f64)> {
        let used = sol.duration_used_s();
        let selected = sol.selected();
        let mut feasible_outs = Vec::with_capacity(selected.len());
        for inp in (0..instance.len()).filter(|&j| !cache.contains(j)) {
            feasible_outs.clear();
            for &out in selected {
                let approx = used - instance.duration(out) + instance.duration(inp);
                if instance.fits_approx(approx, || {
                    instance.duration_of(sol.indices_after(Some(out), Some(inp)))
                }) {
                    feasible_outs.push(out);
                }
            }
            if feasible_outs.is_empty() {
                continue;
            }
            let row = dm.row(inp);
            let gain = add_gain(row, cache.d1());
            for &out in selected {
                self.corr[out] = 0.0;
            }
            swap_corrections(row, cache, &mut self.corr);
            for &out in &feasible_outs {
                let delta = gain + self.corr[out];
                let better = match best {
                    None => true,
                    Some((mv, b)) => delta < b || (delta == b && inp < mv.incoming()),
                };
                if better {
                    best = Some((Move::Swap { out, inp }, delta));
                }
            }
        }
        best
    }

    pub(crate) fn best(
        &mut self,
        dm: &DistanceMatrix,
        instance: &Instance,
        sol: &Solution,
        cache: &NearestCache,
        add_first: bool,
    ) -> Option<(Move, f64)> {
        let add = self.best_add(dm, instance, sol, cache);
        let improving = |m: Option<(Move, f64)>| m.filter(|&(_, d)| d < 0.0);
        if add_first {
            if let Some(found) = improving(add) {
                return Some(found);
            }
            improving(self.best_swap(dm, instance, sol, cache, None))
        } else {
            // Full neighborhood; an add wins ties against swaps with the
            // same incoming shot.
            improving(self.best_swap(dm, instance, sol, cache, add))
        }
    }
}

/// Runs steepest descent from `start` until no improving neighbor exists or
/// `max_trials` moves have been made.
pub fn local_search(
    dm: &DistanceMatrix,
    instance: &Instance,
    start: &Solution,
    params: &LocalSearchParams,
) -> LocalSearchOutcome {
    let mut scanner = Scanner::new(instance.len());
    let mut cache = NearestCache::new(dm, start);
    let mut solution = start.clone();
    let mut td = cache.total();
    let mut steps_taken = 0;
    let mut converged = false;
    while steps_taken < params.max_trials {
        let Some((mv, _)) = scanner.best(dm, instance, &solution, &cache, params.add_first) else {
            converged = true;
            break;
        };
        let mut next_cache = cache.clone();
        let next_indices = match mv {
            Move::Add(j) => {
                next_cache.apply_add(dm, j).expect("scanned add is valid");
                solution.indices_after(None, Some(j))
            }
            Move::Swap { out, inp } => {
                next_cache
                    .apply_swap(dm, out, inp)
                    .expect("scanned swap is valid");
                solution.indices_after(Some(out), Some(inp))
            }
        };
        let next_td = next_cache.total();
        // A move priced below zero by rounding alone is not an improvement.
        if next_td >= td {
            converged = true;
            break;
        }
        solution = Solution::from_sorted(instance, next_indices).expect("scanned move is feasible");
        cache = next_cache;
        td = next_td;
        steps_taken += 1;
    }
    LocalSearchOutcome {
        solution,
        total_distance: td,
        steps_taken,
        converged,
    }
}
