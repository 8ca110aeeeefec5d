//! Shot selection for video summaries as a knapsack-median problem.
//!
//! Pick a subset of shots whose total duration fits a budget so that every
//! shot is close to its nearest selected shot. The main solver is an
//! iterated local search ([`ils_summ`]); [`local_search`] and
//! [`restart_summ`] are the baselines and [`exact_solve`] provides ground
//! truth for small instances.
//!
//! ```
//! use ils_summ::{distance_matrix, ils_summ, total_distance, IlsParams, Instance, MetricKind, Shot};
//!
//! let shots = [(2.0, 0.0), (3.0, 1.0), (2.0, 4.0), (3.0, 5.0)]
//!     .iter()
//!     .enumerate()
//!     .map(|(i, &(d, x))| Shot::new(format!("s{i}"), d, vec![x]))
//!     .collect();
//! let instance = Instance::new("demo", shots, 5.0, MetricKind::Euclidean).unwrap();
//! let dm = distance_matrix(&instance);
//! let (summary, _trace) = ils_summ(&dm, &instance, &IlsParams::default());
//! assert_eq!(total_distance(&dm, &summary), 2.0);
//! ```

pub mod error;
pub mod features;
pub mod generate;
pub mod ils;
pub mod instance;
pub mod local_search;
pub mod objective;
pub mod oracle;

pub use error::{Error, Result};
pub use features::{build_instance, compute_histogram, FrameImage, HistogramConfig};
pub use generate::InstanceFamily;
pub use ils::{ils_summ, perturb, IlsIteration, IlsParams, IlsTrace};
pub use instance::{
    derive_budget, load_instance, load_instance_any, load_instance_csv, save_instance, BudgetRule,
    Instance, MetricKind, Shot, Solution,
};
pub use local_search::{
    best_neighbor, init_solution, local_search, LocalSearchOutcome, LocalSearchParams, Move,
};
pub use objective::{
    build_cache, delta_add, delta_swap, distance_matrix, total_distance, total_distance_of,
    DistanceMatrix, NearestCache,
};
pub use oracle::{
    enumerate_optimal, exact_solve, mean_percentage, optimality_percentage, restart_summ,
    OptimalityReport, OracleLimits, OracleResult, RestartOutcome,
};
