//! Seeded random instance families for tests and benchmarks.

use std::ops::RangeInclusive;

use rand::Rng;

use crate::error::Result;
use crate::instance::{derive_budget, BudgetRule, Instance, MetricKind, Shot};

/// Distribution of synthetic instances: uniform shot count and dimension,
/// i.i.d. uniform `[0, 1)` features and uniform durations.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFamily {
    pub shots: RangeInclusive<usize>,
    pub dim: RangeInclusive<usize>,
    pub duration_s: RangeInclusive<f64>,
    pub budget: BudgetRule,
    pub metric: MetricKind,
}

impl InstanceFamily {
    /// Small instances that the exact solvers handle in milliseconds.
    pub fn small() -> Self {
        InstanceFamily {
            shots: 6..=14,
            dim: 2..=8,
            duration_s: 1.0..=5.0,
            budget: BudgetRule::Ratio(0.4),
            metric: MetricKind::Euclidean,
        }
    }

    /// `n` shots with 96-dimensional features (the size of a 32-bin RGB
    /// histogram) under the long-video budget rule.
    pub fn video_like(n: usize) -> Self {
        InstanceFamily {
            shots: n..=n,
            dim: 96..=96,
            duration_s: 1.0..=5.0,
            budget: BudgetRule::CapAndRatio {
                cap_s: 240.0,
                ratio: 0.10,
            },
            metric: MetricKind::Euclidean,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, name: impl Into<String>) -> Result<Instance> {
        let n = rng.random_range(self.shots.clone());
        let dim = rng.random_range(self.dim.clone());
        let shots: Vec<Shot> = (0..n)
            .map(|i| {
                let duration = rng.random_range(self.duration_s.clone());
                let features = (0..dim).map(|_| rng.random::<f64>()).collect();
                Shot::new(format!("shot{i:04}"), duration, features)
            })
            .collect();
        let total: f64 = shots.iter().map(|s| s.duration_s).sum();
        let shortest = shots.iter().map(|s| s.duration_s).fold(f64::INFINITY, f64::min);
        // Tiny samples under small ratios would otherwise be infeasible.
        let budget = derive_budget(total, self.budget)?.max(shortest);
        Instance::new(name, shots, budget, self.metric)
    }
}
