use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use ils_summ::features::read_manifest;
use ils_summ::{
    distance_matrix, exact_solve, ils_summ, init_solution, local_search, mean_percentage,
    optimality_percentage, restart_summ, DistanceMatrix, HistogramConfig, IlsParams, Instance,
    LocalSearchParams, OracleLimits, OracleResult,
};

use crate::args::{BenchArgs, ExactArgs, FeaturesArgs, InstanceArgs, OracleArgs, SolveArgs, SolverArgs};
use crate::error::CliError;
use crate::report::{runtime_pct, write_bench_csv, BenchRow, Counters, Method, SolveReport};

pub fn load(input: &InstanceArgs) -> Result<Instance, CliError> {
    let path = &input.instance;
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let has_budget = input.budget.budget_seconds.is_some() || input.budget.budget_ratio.is_some();
    if is_csv && !has_budget {
        return Err(CliError::Usage(format!(
            "{} is a CSV instance; pass --budget-seconds or --budget-ratio",
            path.display()
        )));
    }
    // Load under an unconstraining budget first so ratio budgets can see the
    // shot durations.
    let loaded = ils_summ::load_instance_any(path, is_csv.then_some(f64::MAX), input.metric)?;
    let video_s = || input.video_duration_seconds.unwrap_or_else(|| loaded.total_duration());
    match input.budget.resolve(video_s)? {
        Some(budget) => Ok(loaded.with_budget(budget)?),
        None => Ok(loaded),
    }
}

fn ils_params(solver: &SolverArgs) -> Result<IlsParams, CliError> {
    if solver.m_max == 0 {
        return Err(CliError::Usage("--m-max must be at least 1".into()));
    }
    if solver.max_trials == 0 {
        return Err(CliError::Usage("--max-trials must be at least 1".into()));
    }
    Ok(IlsParams {
        m_max: solver.m_max,
        local_search: LocalSearchParams {
            max_trials: solver.max_trials,
            add_first: !solver.full_neighborhood,
        },
    })
}

fn oracle_limits(oracle: &OracleArgs) -> Result<OracleLimits, CliError> {
    let time_limit = match oracle.time_limit_seconds {
        Some(s) if !(s.is_finite() && s > 0.0) => {
            return Err(CliError::Usage("--time-limit-seconds must be positive".into()))
        }
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    Ok(OracleLimits {
        max_nodes: oracle.node_limit,
        time_limit,
    })
}

fn run_oracle(
    dm: &DistanceMatrix,
    instance: &Instance,
    oracle: &OracleArgs,
) -> Result<OracleResult, CliError> {
    if instance.len() > oracle.max_shots && !oracle.force {
        return Err(CliError::CapRefusal {
            shots: instance.len(),
            cap: oracle.max_shots,
        });
    }
    Ok(exact_solve(dm, instance, oracle_limits(oracle)?))
}

fn restart_budget(solver: &SolverArgs, video_s: Option<f64>, instance: &Instance) -> Result<Duration, CliError> {
    let secs = solver
        .time_budget_seconds
        .or(video_s)
        .unwrap_or_else(|| instance.total_duration());
    if !(secs.is_finite() && secs > 0.0) {
        return Err(CliError::Usage("restart time budget must be positive".into()));
    }
    Ok(Duration::from_secs_f64(secs))
}

/// One method on one loaded instance; the report's optimality fields are
/// left for the caller.
fn solve_with(
    instance: &Instance,
    dm: &DistanceMatrix,
    method: Method,
    solver: &SolverArgs,
    oracle: &OracleArgs,
    video_s: Option<f64>,
) -> Result<SolveReport, CliError> {
    let params = ils_params(solver)?;
    let started = Instant::now();
    let mut report = match method {
        Method::Ils => {
            let (sol, trace) = ils_summ(dm, instance, &params);
            let counters = Counters {
                local_search_steps: trace.local_search_steps as u64,
                perturbations: trace.perturbations as u64,
                ..Default::default()
            };
            let td = ils_summ::total_distance(dm, &sol);
            SolveReport::audited(instance, dm, method, &sol, td, counters)?
        }
        Method::Local => {
            let out = local_search(dm, instance, &init_solution(instance), &params.local_search);
            let counters = Counters {
                local_search_steps: out.steps_taken as u64,
                ..Default::default()
            };
            SolveReport::audited(instance, dm, method, &out.solution, out.total_distance, counters)?
        }
        Method::Restart => {
            let budget = restart_budget(solver, video_s, instance)?;
            let out = restart_summ(dm, instance, &params.local_search, budget);
            let counters = Counters {
                local_search_steps: out.local_search_steps as u64,
                restarts: out.starts_completed as u64,
                ..Default::default()
            };
            SolveReport::audited(instance, dm, method, &out.solution, out.total_distance, counters)?
        }
        Method::Exact => {
            let res = run_oracle(dm, instance, oracle)?;
            let counters = Counters {
                oracle_nodes: res.nodes_explored,
                ..Default::default()
            };
            let mut report = SolveReport::audited(instance, dm, method, &res.solution, res.td_optimal, counters)?;
            report.proved_optimal = Some(res.proved_optimal);
            if res.proved_optimal {
                report.optimal_total_distance = Some(res.td_optimal);
                report.optimality_percent = Some(100.0);
            }
            report
        }
    };
    report.wall_time_ms = started.elapsed().as_secs_f64() * 1000.0;
    report.runtime_pct_of_video = runtime_pct(report.wall_time_ms, video_s);
    Ok(report)
}

fn attach_optimum(report: &mut SolveReport, optimum: &OracleResult) -> Result<(), CliError> {
    if !optimum.proved_optimal {
        return Ok(());
    }
    let pct = optimality_percentage(report.total_distance, optimum.td_optimal)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    report.optimal_total_distance = Some(optimum.td_optimal);
    report.optimality_percent = Some(pct);
    Ok(())
}

pub fn solve(args: &SolveArgs) -> Result<SolveReport, CliError> {
    let instance = load(&args.input)?;
    let dm = distance_matrix(&instance);
    let mut report = solve_with(
        &instance,
        &dm,
        args.method,
        &args.solver,
        &args.oracle,
        args.input.video_duration_seconds,
    )?;
    if args.with_optimum && args.method != Method::Exact {
        let optimum = run_oracle(&dm, &instance, &args.oracle)?;
        attach_optimum(&mut report, &optimum)?;
    }
    Ok(report)
}

pub fn exact(args: &ExactArgs) -> Result<SolveReport, CliError> {
    let instance = load(&args.input)?;
    let dm = distance_matrix(&instance);
    let solver = SolverArgs {
        m_max: 1,
        max_trials: 1,
        full_neighborhood: false,
        time_budget_seconds: None,
    };
    solve_with(
        &instance,
        &dm,
        Method::Exact,
        &solver,
        &args.oracle,
        args.input.video_duration_seconds,
    )
}

pub fn write_output(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn instance_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::Output(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn error_row(name: String) -> BenchRow {
    BenchRow {
        instance: name,
        method: "error".into(),
        td: None,
        optimality_percent: None,
        wall_time_ms: None,
        runtime_pct_of_video: None,
    }
}

fn bench_instance(path: &Path, args: &BenchArgs) -> (String, Vec<BenchRow>) {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("?")
        .to_string();
    let instance = match ils_summ::load_instance(path) {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("warning: {}: {e}", path.display());
            return (stem.clone(), vec![error_row(stem)]);
        }
    };
    let name = instance.name().to_string();
    let dm = distance_matrix(&instance);
    let video_s = args.shots_cover_video.then(|| instance.total_duration());
    let oracle = OracleArgs {
        max_shots: args.exact_max_shots,
        force: false,
        node_limit: None,
        time_limit_seconds: None,
    };
    let optimum = (instance.len() <= args.exact_max_shots)
        .then(|| exact_solve(&dm, &instance, OracleLimits::default()));
    let mut rows = Vec::with_capacity(args.methods.len());
    for &method in &args.methods {
        let result = solve_with(&instance, &dm, method, &args.solver, &oracle, video_s).and_then(|mut r| {
            if let Some(opt) = &optimum {
                attach_optimum(&mut r, opt)?;
            }
            Ok(r)
        });
        match result {
            Ok(r) => rows.push(BenchRow {
                instance: name.clone(),
                method: method.as_str().into(),
                td: Some(r.total_distance),
                optimality_percent: r.optimality_percent,
                wall_time_ms: Some(r.wall_time_ms),
                runtime_pct_of_video: r.runtime_pct_of_video,
            }),
            Err(e) => {
                eprintln!("warning: {name} ({}): {e}", method.as_str());
                rows.push(BenchRow {
                    method: format!("{}:error", method.as_str()),
                    ..error_row(name.clone())
                });
            }
        }
    }
    (name, rows)
}

fn mean_of(rows: &[&BenchRow], field: impl Fn(&BenchRow) -> Option<f64>) -> Option<f64> {
    let values: Vec<f64> = rows.iter().filter_map(|r| field(r)).collect();
    mean_percentage(&values)
}

/// Runs every method on every `*.json` instance in the directory. Rows are
/// ordered by instance name, then by method as listed, followed by one
/// `mean` row per method.
pub fn bench(args: &BenchArgs) -> Result<Vec<BenchRow>, CliError> {
    if args.methods.is_empty() {
        return Err(CliError::Usage("--methods must name at least one method".into()));
    }
    ils_params(&args.solver)?;
    let files = instance_files(&args.dir)?;
    if files.is_empty() {
        eprintln!("warning: no instance files in {}", args.dir.display());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let mut groups: Vec<(String, Vec<BenchRow>)> =
        pool.install(|| files.par_iter().map(|p| bench_instance(p, args)).collect());
    groups.sort_by(|a, b| a.0.cmp(&b.0));
    let mut rows: Vec<BenchRow> = groups.into_iter().flat_map(|(_, r)| r).collect();

    let mut means = Vec::new();
    for method in &args.methods {
        let of_method: Vec<&BenchRow> = rows.iter().filter(|r| r.method == method.as_str()).collect();
        if of_method.is_empty() {
            continue;
        }
        means.push(BenchRow {
            instance: "mean".into(),
            method: method.as_str().into(),
            td: mean_of(&of_method, |r| r.td),
            optimality_percent: mean_of(&of_method, |r| r.optimality_percent),
            wall_time_ms: mean_of(&of_method, |r| r.wall_time_ms),
            runtime_pct_of_video: mean_of(&of_method, |r| r.runtime_pct_of_video),
        });
    }
    rows.extend(means);
    Ok(rows)
}

pub fn bench_to_output(args: &BenchArgs) -> Result<Vec<BenchRow>, CliError> {
    let rows = bench(args)?;
    let mut buf = Vec::new();
    write_bench_csv(&rows, &mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
    write_output(&String::from_utf8(buf).expect("csv is utf-8"), args.out.as_deref())?;
    Ok(rows)
}

pub fn features(args: &FeaturesArgs) -> Result<Instance, CliError> {
    let cfg = HistogramConfig {
        bins_per_channel: args.bins,
        normalize: !args.raw_counts,
    };
    cfg.validate()?;
    if args.budget.budget_seconds.is_none() && args.budget.budget_ratio.is_none() {
        return Err(CliError::Usage("pass --budget-seconds or --budget-ratio".into()));
    }
    let total = if args.budget.budget_ratio.is_some() {
        read_manifest(&args.manifest)?.iter().map(|(_, d)| d).sum()
    } else {
        0.0
    };
    let budget = args.budget.resolve(|| total)?.expect("a budget flag is present");
    let instance = ils_summ::build_instance(&args.frames_dir, &args.manifest, budget, &cfg, args.metric)?;
    ils_summ::save_instance(&instance, &args.out)?;
    Ok(instance)
}
