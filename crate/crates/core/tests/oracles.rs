//! Worked examples checked against brute-force references that share no code
//! with the solvers beyond instance construction.

use ils_summ::{
    best_neighbor, distance_matrix, enumerate_optimal, exact_solve, ils_summ, init_solution,
    local_search, perturb, restart_summ, total_distance, IlsParams, Instance, LocalSearchParams,
    MetricKind, Move, OracleLimits, Shot, Solution,
};
use std::time::Duration;

fn instance_a() -> Instance {
    let shots = [(2.0, 0.0), (3.0, 1.0), (2.0, 4.0), (3.0, 5.0)]
        .iter()
        .enumerate()
        .map(|(i, &(d, x))| Shot::new(format!("s{i}"), d, vec![x]))
        .collect();
    Instance::new("A", shots, 5.0, MetricKind::Euclidean).unwrap()
}

/// Total distance straight from the 1-D coordinates of instance A.
fn td_1d(xs: &[f64], selected: &[usize]) -> f64 {
    xs.iter()
        .map(|x| {
            selected
                .iter()
                .map(|&s| (x - xs[s]).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

const XS: [f64; 4] = [0.0, 1.0, 4.0, 5.0];
const DUR: [f64; 4] = [2.0, 3.0, 2.0, 3.0];

fn fits(selected: &[usize]) -> bool {
    selected.iter().map(|&i| DUR[i]).sum::<f64>() <= 5.0
}

type Adds = Vec<(usize, f64)>;
type Swaps = Vec<(usize, usize, f64)>;

/// Every feasible add and swap from `selected` with its objective change.
fn neighborhood(selected: &[usize]) -> (Adds, Swaps) {
    let base = td_1d(&XS, selected);
    let outside: Vec<usize> = (0..4).filter(|i| !selected.contains(i)).collect();
    let mut adds = vec![];
    let mut swaps = vec![];
    for &j in &outside {
        let mut s = selected.to_vec();
        s.push(j);
        if fits(&s) {
            adds.push((j, td_1d(&XS, &s) - base));
        }
        for &o in selected {
            let mut s: Vec<usize> = selected.iter().copied().filter(|&x| x != o).collect();
            s.push(j);
            if fits(&s) {
                swaps.push((o, j, td_1d(&XS, &s) - base));
            }
        }
    }
    (adds, swaps)
}

#[test]
fn neighborhood_of_single_shot() {
    let (adds, _) = neighborhood(&[0]);
    assert_eq!(adds, vec![(1, -3.0), (2, -8.0), (3, -8.0)]);

    let inst = instance_a();
    let dm = distance_matrix(&inst);
    let sol = Solution::new(&inst, [0]).unwrap();
    // tie between 2 and 3 goes to the lower index
    assert_eq!(best_neighbor(&dm, &inst, &sol, true), Some((Move::Add(2), -8.0)));
}

#[test]
fn neighborhood_of_local_minimum() {
    let (adds, swaps) = neighborhood(&[0, 2]);
    assert!(adds.is_empty());
    assert!(!swaps.is_empty());
    assert!(swaps.iter().all(|&(_, _, d)| d >= 0.0));

    let inst = instance_a();
    let dm = distance_matrix(&inst);
    assert_eq!(best_neighbor(&dm, &inst, &Solution::new(&inst, [0, 2]).unwrap(), true), None);
}

#[test]
fn swap_delta_against_recompute() {
    assert_eq!(td_1d(&XS, &[0, 2]) - td_1d(&XS, &[0, 1]), -5.0);
    let inst = instance_a().with_budget(100.0).unwrap();
    let dm = distance_matrix(&inst);
    let cache = ils_summ::build_cache(&dm, &Solution::new(&inst, [0, 1]).unwrap());
    assert_eq!(ils_summ::delta_swap(&dm, &cache, 1, 2).unwrap(), -5.0);
}

#[test]
fn local_search_hand_trace() {
    let inst = instance_a();
    let dm = distance_matrix(&inst);
    let out = local_search(&dm, &inst, &init_solution(&inst), &LocalSearchParams::default());
    assert_eq!(out.solution.selected(), &[0, 2]);
    assert_eq!(out.total_distance, td_1d(&XS, &[0, 2]));
    assert!(out.converged);
}

#[test]
fn optimum_by_enumeration() {
    let mut best = f64::INFINITY;
    let mut argmins = vec![];
    for mask in 1u32..16 {
        let s: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
        if !fits(&s) {
            continue;
        }
        let td = td_1d(&XS, &s);
        if td < best {
            best = td;
            argmins.clear();
        }
        if td == best {
            argmins.push(s);
        }
    }
    assert_eq!(best, 2.0);
    // {1,3} also reaches 2.0 but needs 6 s
    assert_eq!(argmins, vec![vec![0, 2], vec![1, 2], vec![0, 3]]);

    let inst = instance_a();
    let dm = distance_matrix(&inst);
    assert_eq!(exact_solve(&dm, &inst, OracleLimits::default()).td_optimal, best);
    assert_eq!(enumerate_optimal(&dm, &inst).unwrap().1, best);
}

#[test]
fn ils_hand_trace() {
    let inst = instance_a();
    let dm = distance_matrix(&inst);
    // M=1 from {0,2}: shot 1 in, shot 0 out
    assert_eq!(perturb(&inst, &Solution::new(&inst, [0, 2]).unwrap(), 1).selected(), &[1, 2]);
    let (sol, trace) = ils_summ(&dm, &inst, &IlsParams::default());
    assert_eq!(total_distance(&dm, &sol), 2.0);
    assert_eq!(trace.iterations.len(), 5);
    assert!(trace.iterations.iter().all(|it| !it.accepted && it.total_distance >= 2.0));
}

#[test]
fn restart_over_all_starts() {
    let inst = instance_a();
    let dm = distance_matrix(&inst);
    let per_start: Vec<f64> = (0..4)
        .map(|s| {
            local_search(&dm, &inst, &Solution::new(&inst, [s]).unwrap(), &LocalSearchParams::default())
                .total_distance
        })
        .collect();
    let best = per_start.iter().copied().fold(f64::INFINITY, f64::min);
    assert_eq!(best, 2.0);
    let out = restart_summ(&dm, &inst, &LocalSearchParams::default(), Duration::from_secs(30));
    assert_eq!(out.total_distance, best);
}

#[test]
fn single_shot_instance() {
    let inst = Instance::new("one", vec![Shot::new("x", 2.0, vec![1.0, 2.0])], 2.0, MetricKind::Euclidean)
        .unwrap();
    let dm = distance_matrix(&inst);
    let (sol, _) = ils_summ(&dm, &inst, &IlsParams::default());
    assert_eq!(sol.selected(), &[0]);
    let r = restart_summ(&dm, &inst, &LocalSearchParams::default(), Duration::from_secs(1));
    assert_eq!(r.solution.selected(), &[0]);
    assert_eq!(exact_solve(&dm, &inst, OracleLimits::default()).td_optimal, total_distance(&dm, &sol));
}
