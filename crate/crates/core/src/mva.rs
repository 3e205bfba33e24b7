//! Exact mean value analysis for a closed cyclic network of single-server
//! FCFS stations, optionally closed through a think-time delay stage.
//!
//! For `n = 1..=N`:
//!
//! ```text
//! W_i(n) = s_i * (1 + Q_i(n-1))
//! X(n)   = n / (Z + sum_i W_i(n))
//! Q_i(n) = X(n) * W_i(n)
//! ```
//!
//! Exact for product-form networks (exponential FCFS service). The full trace
//! over all populations is retained.

use crate::error::{invalid, Error, Result};
use crate::model::ServiceProfile;

/// Per-population results.
#[derive(Debug, Clone, PartialEq)]
pub struct MvaStep {
    pub population: usize,
    /// Mean residence time per visit at each server, seconds.
    pub waits: Vec<f64>,
    /// Mean number of requests at each server.
    pub queues: Vec<f64>,
    /// System throughput, requests/second.
    pub throughput: f64,
    /// Sum of the residence times, seconds.
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MvaSolution {
    pub think_time: f64,
    /// `steps[n - 1]` holds population `n`.
    pub steps: Vec<MvaStep>,
}

impl MvaSolution {
    pub fn max_population(&self) -> usize {
        self.steps.len()
    }

    pub fn step(&self, n: usize) -> Result<&MvaStep> {
        if n == 0 || n > self.steps.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.steps.len(),
            });
        }
        Ok(&self.steps[n - 1])
    }

    pub fn elapsed(&self, n: usize) -> Result<f64> {
        self.step(n).map(|s| s.elapsed)
    }

    pub fn throughput(&self, n: usize) -> Result<f64> {
        self.step(n).map(|s| s.throughput)
    }

    pub fn throughput_curve(&self) -> Vec<(usize, f64)> {
        self.steps
            .iter()
            .map(|s| (s.population, s.throughput))
            .collect()
    }
}

pub fn solve_mva(
    profile: &ServiceProfile,
    max_population: usize,
    think_time: f64,
) -> Result<MvaSolution> {
    if max_population < 1 {
        return Err(invalid("max population must be >= 1"));
    }
    if !(think_time.is_finite() && think_time >= 0.0) {
        return Err(invalid(format!(
            "think time must be >= 0, got {think_time}"
        )));
    }
    let times = profile.times();
    let mut queues = vec![0.0; times.len()];
    let mut steps = Vec::with_capacity(max_population);
    for n in 1..=max_population {
        let waits: Vec<f64> = times
            .iter()
            .zip(&queues)
            .map(|(s, q)| s * (1.0 + q))
            .collect();
        let elapsed: f64 = waits.iter().sum();
        let throughput = n as f64 / (think_time + elapsed);
        queues = waits.iter().map(|w| throughput * w).collect();
        steps.push(MvaStep {
            population: n,
            waits,
            queues: queues.clone(),
            throughput,
            elapsed,
        });
    }
    Ok(MvaSolution { think_time, steps })
}

pub fn elapsed_exact(solution: &MvaSolution, n: usize) -> Result<f64> {
    solution.elapsed(n)
}

/// `(n, X(n))` for `n = 1..=max_population`.
pub fn throughput_curve(
    profile: &ServiceProfile,
    max_population: usize,
    think_time: f64,
) -> Result<Vec<(usize, f64)>> {
    Ok(solve_mva(profile, max_population, think_time)?.throughput_curve())
}
