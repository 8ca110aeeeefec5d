//! Iterated local search with a deterministic, duration-greedy perturbation
//! and best-so-far acceptance.

use std::time::{Duration, Instant};

use crate::instance::{Instance, Solution};
use crate::local_search::{init_solution, local_search, LocalSearchParams};
use crate::objective::{total_distance, DistanceMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IlsParams {
    /// Largest perturbation strength tried before giving up.
    pub m_max: usize,
    pub local_search: LocalSearchParams,
}

impl Default for IlsParams {
    fn default() -> Self {
        IlsParams {
            m_max: 5,
            local_search: LocalSearchParams::default(),
        }
    }
}

/// One perturb / descend / accept round.
#[derive(Debug, Clone, PartialEq)]
pub struct IlsIteration {
    pub strength: usize,
    /// False when the perturbation fell back to its input.
    pub perturbed: bool,
    pub total_distance: f64,
    pub local_search_steps: usize,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IlsTrace {
    pub initial_total_distance: f64,
    pub initial_local_search_steps: usize,
    pub iterations: Vec<IlsIteration>,
    pub perturbations: usize,
    pub local_search_steps: usize,
    pub wall_time: Duration,
}

impl IlsTrace {
    pub fn improvements(&self) -> usize {
        self.iterations.iter().filter(|it| it.accepted).count()
    }
}

/// Exchanges the `strength` longest selected shots for the shortest
/// unselected ones, one pair at a time.
///
/// Each exchange adds the shortest shot outside the working set, then drops
/// the longest shot of the working set other than the one just added (lowest
/// index on ties). The input is returned unchanged when there are fewer than
/// `strength` unselected shots or the result exceeds the budget.
pub fn perturb(instance: &Instance, sol: &Solution, strength: usize) -> Solution {
    let n = instance.len();
    if strength == 0 || n - sol.len() < strength {
        return sol.clone();
    }
    let mut in_set = vec![false; n];
    for &i in sol.selected() {
        in_set[i] = true;
    }
    let argmin_outside = |in_set: &[bool]| {
        (0..n)
            .filter(|&i| !in_set[i])
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if instance.duration(b) <= instance.duration(i) => Some(b),
                _ => Some(i),
            })
    };
    for _ in 0..strength {
        let Some(added) = argmin_outside(&in_set) else {
            return sol.clone();
        };
        in_set[added] = true;
        let removed = (0..n)
            .filter(|&i| in_set[i] && i != added)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if instance.duration(b) >= instance.duration(i) => Some(b),
                _ => Some(i),
            })
            .expect("working set keeps at least the original shots");
        in_set[removed] = false;
    }
    let indices: Vec<usize> = (0..n).filter(|&i| in_set[i]).collect();
    Solution::from_sorted(instance, indices).unwrap_or_else(|| sol.clone())
}

/// Runs local search from the shortest shot, then perturbs the best local
/// minimum with strength 1, 2, ... up to `m_max`, resetting to 1 whenever a
/// strictly better local minimum appears.
pub fn ils_summ(dm: &DistanceMatrix, instance: &Instance, params: &IlsParams) -> (Solution, IlsTrace) {
    let started = Instant::now();
    let first = local_search(dm, instance, &init_solution(instance), &params.local_search);
    let mut trace = IlsTrace {
        initial_total_distance: first.total_distance,
        initial_local_search_steps: first.steps_taken,
        local_search_steps: first.steps_taken,
        ..Default::default()
    };
    let mut best = first.solution;
    let mut best_td = total_distance(dm, &best);
    let mut strength = 1;
    while strength <= params.m_max {
        let start = perturb(instance, &best, strength);
        trace.perturbations += 1;
        let perturbed = start != best;
        let found = local_search(dm, instance, &start, &params.local_search);
        trace.local_search_steps += found.steps_taken;
        let td = total_distance(dm, &found.solution);
        let accepted = td < best_td;
        trace.iterations.push(IlsIteration {
            strength,
            perturbed,
            total_distance: td,
            local_search_steps: found.steps_taken,
            accepted,
        });
        if accepted {
            best = found.solution;
            best_td = td;
            strength = 1;
        } else {
            strength += 1;
        }
    }
    trace.wall_time = started.elapsed();
    (best, trace)
}
