//! Decomposition of the cycle into the host and a flow-equivalent server
//! (FES) that stands in for the remaining `K - 1` relaying servers.
//!
//! The FES is a load-dependent station whose completion rate with `j`
//! requests present equals the throughput of the isolated subnetwork holding
//! `j` requests. For product-form networks the two-station system `{FES, host}`
//! reproduces the throughput of the full network exactly.

use crate::error::{invalid, Error, Result};
use crate::model::ServiceProfile;
use crate::mva::solve_mva;

/// The `K - 1` profile with `host_index` (1-based) removed, order preserved.
pub fn subnetwork(profile: &ServiceProfile, host_index: usize) -> Result<ServiceProfile> {
    if profile.len() < 2 {
        return Err(Error::DegenerateDecomposition);
    }
    profile.check_index(host_index)?;
    let rest: Vec<f64> = profile
        .times()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i + 1 != host_index)
        .map(|(_, &s)| s)
        .collect();
    ServiceProfile::new(rest)
}

/// Maps a 1-based subnetwork index back to the numbering of the full cycle.
pub fn original_index(sub_index: usize, host_index: usize) -> usize {
    if sub_index < host_index {
        sub_index
    } else {
        sub_index + 1
    }
}

/// Asymptotic FES rate, `1 / s_max` of the subnetwork.
pub fn fes_max_throughput(subprofile: &ServiceProfile) -> f64 {
    1.0 / subprofile.bottleneck().1
}

/// Population-indexed completion rates of a flow-equivalent server.
#[derive(Debug, Clone, PartialEq)]
pub struct FesCurve {
    /// `rates[j - 1]` is the subnetwork throughput with `j` requests.
    pub rates: Vec<f64>,
    /// Asymptotic ceiling of the rates.
    pub gamma_star: f64,
}

impl FesCurve {
    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    /// Rate with `j >= 1` requests present.
    pub fn rate(&self, j: usize) -> Option<f64> {
        j.checked_sub(1).and_then(|i| self.rates.get(i).copied())
    }
}

pub fn fes_curve(subprofile: &ServiceProfile, max_population: usize) -> Result<FesCurve> {
    let sol = solve_mva(subprofile, max_population, 0.0)?;
    Ok(FesCurve {
        rates: sol.steps.iter().map(|s| s.throughput).collect(),
        gamma_star: fes_max_throughput(subprofile),
    })
}

/// Host utilization once its arrival rate is held to a fraction of the FES ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HostBalance {
    pub gamma_e_star: f64,
    /// Assumed ratio of the mean FES throughput to its ceiling, in `(0, 1]`.
    pub assumed_fraction: f64,
    /// Arrival rate at the host, requests/second.
    pub lambda_k: f64,
    pub host_service: f64,
    pub rho_k_new: f64,
}

impl HostBalance {
    pub fn steady_state(&self) -> bool {
        self.rho_k_new < 1.0
    }
}

pub fn balanced_host_utilization(
    gamma_e_star: f64,
    fraction: f64,
    host_service: f64,
) -> Result<HostBalance> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(invalid(format!(
            "fraction must lie in (0, 1], got {fraction}"
        )));
    }
    if !(host_service.is_finite() && host_service > 0.0) {
        return Err(invalid(format!(
            "host service time must be > 0, got {host_service}"
        )));
    }
    if !(gamma_e_star.is_finite() && gamma_e_star >= 0.0) {
        return Err(invalid(format!("rate must be >= 0, got {gamma_e_star}")));
    }
    let lambda_k = fraction * gamma_e_star;
    Ok(HostBalance {
        gamma_e_star,
        assumed_fraction: fraction,
        lambda_k,
        host_service,
        rho_k_new: lambda_k * host_service,
    })
}

/// Heuristic flow-balance analysis for one host choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowBalanceReport {
    pub host_index: usize,
    pub host_service: f64,
    /// Slowest relaying server, numbered in the full cycle.
    pub subnet_bottleneck_index: usize,
    pub subnet_bottleneck: f64,
    /// Host utilization at the full network's asymptotic throughput `1/s_max`.
    pub rho_k_before: f64,
    pub balance: HostBalance,
}

pub fn flow_balance(
    profile: &ServiceProfile,
    host_index: usize,
    fraction: f64,
) -> Result<FlowBalanceReport> {
    let sub = subnetwork(profile, host_index)?;
    let (sub_idx, sub_max) = sub.bottleneck();
    let host_service = profile.service_time(host_index)?;
    let balance = balanced_host_utilization(fes_max_throughput(&sub), fraction, host_service)?;
    Ok(FlowBalanceReport {
        host_index,
        host_service,
        subnet_bottleneck_index: original_index(sub_idx, host_index),
        subnet_bottleneck: sub_max,
        rho_k_before: host_service / profile.summarize().s_max,
        balance,
    })
}

/// Two-station solution at one population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NortonPoint {
    pub population: usize,
    pub throughput: f64,
    /// Cycle time through FES and host, seconds.
    pub elapsed: f64,
    /// Mean residence time at the FES.
    pub fes_wait: f64,
    pub host_wait: f64,
}

/// Exact load-dependent MVA on `{FES, host}` for populations `1..=population`.
///
/// The FES keeps marginal queue-length probabilities `p(j | n)`:
///
/// ```text
/// W_fes(n)  = sum_{j=1..n} j / rate(j) * p(j-1 | n-1)
/// W_host(n) = s_K * (1 + Q_host(n-1))
/// X(n)      = n / (W_fes(n) + W_host(n))
/// p(j | n)  = X(n) / rate(j) * p(j-1 | n-1),  p(0 | n) = 1 - sum_{j>=1} p(j | n)
/// ```
pub fn norton_trace(
    curve: &FesCurve,
    host_service: f64,
    population: usize,
) -> Result<Vec<NortonPoint>> {
    if population < 1 {
        return Err(invalid("population must be >= 1"));
    }
    if curve.len() < population {
        return Err(Error::CurveTooShort {
            available: curve.len(),
            requested: population,
        });
    }
    if !(host_service.is_finite() && host_service > 0.0) {
        return Err(invalid(format!(
            "host service time must be > 0, got {host_service}"
        )));
    }
    let mut marginal = vec![0.0; population + 1];
    marginal[0] = 1.0;
    let mut host_queue = 0.0;
    let mut out = Vec::with_capacity(population);
    for n in 1..=population {
        let fes_wait: f64 = (1..=n)
            .map(|j| j as f64 / curve.rates[j - 1] * marginal[j - 1])
            .sum();
        let host_wait = host_service * (1.0 + host_queue);
        let elapsed = fes_wait + host_wait;
        let throughput = n as f64 / elapsed;
        // descend so marginal[j - 1] still holds the n-1 value
        let mut tail = 0.0;
        for j in (1..=n).rev() {
            marginal[j] = throughput / curve.rates[j - 1] * marginal[j - 1];
            tail += marginal[j];
        }
        marginal[0] = 1.0 - tail;
        host_queue = throughput * host_wait;
        out.push(NortonPoint {
            population: n,
            throughput,
            elapsed,
            fes_wait,
            host_wait,
        });
    }
    Ok(out)
}

/// `(throughput, elapsed)` of the two-station system at `population`.
pub fn norton_solve(curve: &FesCurve, host_service: f64, population: usize) -> Result<(f64, f64)> {
    let trace = norton_trace(curve, host_service, population)?;
    let last = trace[population - 1];
    Ok((last.throughput, last.elapsed))
}

/// Flow-balance test between host arrivals and FES throughput: `|lambda_k - gamma_e| <= tolerance * max(lambda_k, gamma_e, eps)`.
pub fn flow_balance_check(lambda_k: f64, gamma_e: f64, tolerance: f64) -> bool {
    let scale = lambda_k.max(gamma_e).max(f64::EPSILON);
    (lambda_k - gamma_e).abs() <= tolerance * scale
}
