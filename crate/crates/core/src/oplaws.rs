//! Operational laws and the closed-form responsiveness model.
//!
//! Responsiveness is the ratio of the total service ability `sigma` to the
//! same quantity augmented by the elapsed time `E(N)`:
//!
//! ```text
//! R = sigma / (sigma + E(N))
//! ```
//!
//! The closed form replaces `E(N)` with the asymptotic `N * s_max`, obtained
//! from Little's law at the bottleneck-limited throughput `1/s_max`.

use crate::error::{invalid, Result};
use crate::model::SystemSummary;

/// Where the elapsed time behind a [`ResponsivenessPoint`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    /// `E(N) = N * s_max`.
    Approximate,
    /// `E(N)` from exact mean value analysis (or any caller-supplied measurement).
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponsivenessPoint {
    pub window_n: u64,
    /// Elapsed time used, seconds.
    pub elapsed: f64,
    /// Fraction in `(0, 1]`.
    pub responsiveness: f64,
    pub source: Source,
}

impl ResponsivenessPoint {
    pub fn percent(&self) -> f64 {
        100.0 * self.responsiveness
    }
}

/// Internal (`N*`) and external (`M*`) congestion points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriticalPoints {
    pub n_star: u64,
    pub m_star: u64,
}

// Ratios such as 0.6/0.3 land a few ulps above an integer; those must not
// round up to the next one.
const CEIL_SNAP: f64 = 1e-12;

pub(crate) fn ceil_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= CEIL_SNAP * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// Utilization law, `rho = gamma * s`. Values above 1 are returned unclamped.
pub fn utilization(throughput: f64, service_time: f64) -> Result<f64> {
    non_negative("throughput", throughput)?;
    non_negative("service time", service_time)?;
    Ok(throughput * service_time)
}

/// `(1/sigma, 1/s_max)`: throughput at `N = 1` and the bottleneck ceiling.
pub fn throughput_bounds(summary: &SystemSummary) -> (f64, f64) {
    (1.0 / summary.sigma, 1.0 / summary.s_max)
}

/// Asymptotic elapsed time `N * s_max`.
pub fn elapsed_asymptotic(summary: &SystemSummary, window_n: u64) -> f64 {
    window_n as f64 * summary.s_max
}

/// Responsiveness for a measured or exactly computed elapsed time.
pub fn responsiveness_exact(
    summary: &SystemSummary,
    window_n: u64,
    elapsed: f64,
) -> Result<ResponsivenessPoint> {
    non_negative("elapsed time", elapsed)?;
    Ok(ResponsivenessPoint {
        window_n,
        elapsed,
        responsiveness: summary.sigma / (summary.sigma + elapsed),
        source: Source::Exact,
    })
}

/// Closed-form responsiveness `sigma / (sigma + N * s_max)`.
pub fn responsiveness_approx(summary: &SystemSummary, window_n: u64) -> ResponsivenessPoint {
    let elapsed = elapsed_asymptotic(summary, window_n);
    ResponsivenessPoint {
        window_n,
        elapsed,
        responsiveness: summary.sigma / (summary.sigma + elapsed),
        source: Source::Approximate,
    }
}

/// One closed-form point per `N` in `n_from..=n_to`.
pub fn responsiveness_table(
    summary: &SystemSummary,
    n_from: u64,
    n_to: u64,
) -> Result<Vec<ResponsivenessPoint>> {
    if n_from > n_to {
        return Err(invalid(format!("inverted range {n_from}..{n_to}")));
    }
    Ok((n_from..=n_to)
        .map(|n| responsiveness_approx(summary, n))
        .collect())
}

/// `N* = ceil(sigma / s_max) * n`. The ceiling applies to the ratio before
/// multiplying by the transactions per session.
pub fn critical_request_count(summary: &SystemSummary, transactions: u64) -> Result<u64> {
    if transactions < 1 {
        return Err(invalid("transactions per session must be >= 1"));
    }
    Ok(ceil_snapped(summary.sigma / summary.s_max) as u64 * transactions)
}

/// `M* = N* + ceil(T(u) * n / s_max)`.
pub fn critical_user_count(
    n_star: u64,
    think_time: f64,
    transactions: u64,
    s_max: f64,
) -> Result<u64> {
    non_negative("think time", think_time)?;
    if !(s_max.is_finite() && s_max > 0.0) {
        return Err(invalid(format!("s_max must be > 0, got {s_max}")));
    }
    if transactions < 1 {
        return Err(invalid("transactions per session must be >= 1"));
    }
    Ok(n_star + ceil_snapped(think_time * transactions as f64 / s_max) as u64)
}

pub fn critical_points(
    summary: &SystemSummary,
    think_time: f64,
    transactions: u64,
) -> Result<CriticalPoints> {
    let n_star = critical_request_count(summary, transactions)?;
    let m_star = critical_user_count(n_star, think_time, transactions, summary.s_max)?;
    Ok(CriticalPoints { n_star, m_star })
}

/// Mean input rate `(M - N) / (T(u) * n)` generated by the thinking users.
pub fn input_rate(
    workstations_m: u64,
    window_n: u64,
    think_time: f64,
    transactions: u64,
) -> Result<f64> {
    if !(think_time.is_finite() && think_time > 0.0) {
        return Err(invalid(format!("think time must be > 0, got {think_time}")));
    }
    if transactions < 1 {
        return Err(invalid("transactions per session must be >= 1"));
    }
    if workstations_m < window_n {
        return Err(invalid(format!(
            "workstations M={workstations_m} fewer than window N={window_n}"
        )));
    }
    Ok((workstations_m - window_n) as f64 / (think_time * transactions as f64))
}
