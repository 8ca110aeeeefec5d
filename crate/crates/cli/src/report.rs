use serde::{Deserialize, Serialize};

use ils_summ::{total_distance_of, DistanceMatrix, Instance, Solution};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ils,
    Local,
    Restart,
    Exact,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ils => "ils",
            Method::Local => "local",
            Method::Restart => "restart",
            Method::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Counters {
    pub local_search_steps: u64,
    pub perturbations: u64,
    pub restarts: u64,
    pub oracle_nodes: u64,
}

/// Result of one solver run, written as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub instance: String,
    pub method: Method,
    pub metric: String,
    pub num_shots: usize,
    pub selected_ids: Vec<String>,
    pub selected_indices: Vec<usize>,
    pub total_distance: f64,
    pub duration_used_seconds: f64,
    pub budget_seconds: f64,
    pub counters: Counters,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proved_optimal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_total_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimality_percent: Option<f64>,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_pct_of_video: Option<f64>,
}

/// Fields that legitimately differ between identical runs.
pub const TIMING_FIELDS: &[&str] = &["wall_time_ms", "runtime_pct_of_video"];

impl SolveReport {
    /// Builds a report, re-deriving the total distance from the selected
    /// indices and refusing to continue if it disagrees with the solver.
    pub fn audited(
        instance: &Instance,
        dm: &DistanceMatrix,
        method: Method,
        solution: &Solution,
        solver_td: f64,
        counters: Counters,
    ) -> Result<Self, CliError> {
        let recomputed = total_distance_of(dm, solution.selected());
        let scale = recomputed.abs().max(solver_td.abs()).max(f64::MIN_POSITIVE);
        if (recomputed - solver_td).abs() > 1e-9 * scale {
            return Err(CliError::Internal(format!(
                "{} reported total distance {solver_td} but the selection evaluates to {recomputed}",
                method.as_str()
            )));
        }
        Ok(SolveReport {
            instance: instance.name().to_string(),
            method,
            metric: instance.metric().to_string(),
            num_shots: instance.len(),
            selected_ids: solution
                .selected()
                .iter()
                .map(|&i| instance.shots()[i].id.clone())
                .collect(),
            selected_indices: solution.selected().to_vec(),
            total_distance: recomputed,
            duration_used_seconds: solution.duration_used_s(),
            budget_seconds: instance.budget_s(),
            counters,
            proved_optimal: None,
            optimal_total_distance: None,
            optimality_percent: None,
            wall_time_ms: 0.0,
            runtime_pct_of_video: None,
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// Report JSON with the timing fields removed, for run-to-run comparison.
pub fn strip_timing(report_json: &str) -> Result<String, serde_json::Error> {
    let mut value: serde_json::Value = serde_json::from_str(report_json)?;
    if let Some(obj) = value.as_object_mut() {
        for field in TIMING_FIELDS {
            obj.remove(*field);
        }
    }
    serde_json::to_string(&value)
}

pub fn runtime_pct(wall_time_ms: f64, video_duration_s: Option<f64>) -> Option<f64> {
    video_duration_s.map(|v| 100.0 * (wall_time_ms / 1000.0) / v)
}

/// One line of the benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub method: String,
    pub td: Option<f64>,
    pub optimality_percent: Option<f64>,
    pub wall_time_ms: Option<f64>,
    pub runtime_pct_of_video: Option<f64>,
}

pub const BENCH_COLUMNS: [&str; 6] = [
    "instance",
    "method",
    "td",
    "optimality_percent",
    "wall_time_ms",
    "runtime_pct_of_video",
];

pub fn write_bench_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(BENCH_COLUMNS)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
