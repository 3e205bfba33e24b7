//! Domain types for the cyclic network: the per-server service profile, its
//! structural summary, and the user-side workload parameters.
//!
//! Servers are numbered `1..=K` on every public surface; server `K` is the
//! knowledge-base host at the end of the relay chain.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Mean service times (seconds) of the `K` servers, in routing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ServiceProfile(Vec<f64>);

impl ServiceProfile {
    /// Validates raw service times. Every entry must be strictly positive and finite.
    pub fn new(raw_times: impl Into<Vec<f64>>) -> Result<Self> {
        let times = raw_times.into();
        if times.is_empty() {
            return Err(Error::EmptyProfile);
        }
        if let Some(pos) = times.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidServiceTime(pos + 1));
        }
        Ok(ServiceProfile(times))
    }

    /// Number of servers, `K`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    // A validated profile is never empty; kept for clippy's len_without_is_empty.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    /// Service time of server `index` (1-based).
    pub fn service_time(&self, index: usize) -> Result<f64> {
        self.check_index(index)?;
        Ok(self.0[index - 1])
    }

    pub fn sigma(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Largest service time and its 1-based index; ties go to the smallest index.
    pub fn bottleneck(&self) -> (usize, f64) {
        let mut best = (1, self.0[0]);
        for (i, &s) in self.0.iter().enumerate().skip(1) {
            if s > best.1 {
                best = (i + 1, s);
            }
        }
        best
    }

    pub fn summarize(&self) -> SystemSummary {
        let sigma = self.sigma();
        let (bottleneck_index, s_max) = self.bottleneck();
        SystemSummary {
            sigma,
            s_max,
            bottleneck_index,
            gamma_min: 1.0 / sigma,
            gamma_max: 1.0 / s_max,
        }
    }

    /// Returns a copy with servers `i` and `j` (1-based) exchanged.
    pub fn swap_servers(&self, i: usize, j: usize) -> Result<ServiceProfile> {
        self.check_index(i)?;
        self.check_index(j)?;
        let mut times = self.0.clone();
        times.swap(i - 1, j - 1);
        Ok(ServiceProfile(times))
    }

    /// `(index, service_time)` pairs, slowest first, ties by ascending index.
    pub fn ranked_servers(&self) -> Vec<(usize, f64)> {
        let mut ranked: Vec<(usize, f64)> = self
            .0
            .iter()
            .enumerate()
            .map(|(i, &s)| (i + 1, s))
            .collect();
        // stable sort keeps ascending index among equal times
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
        ranked
    }

    /// Multiplies every service time by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<ServiceProfile> {
        ServiceProfile::new(self.0.iter().map(|s| s * factor).collect::<Vec<_>>())
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.0.len() {
            Err(Error::IndexOutOfRange {
                index,
                len: self.0.len(),
            })
        } else {
            Ok(())
        }
    }
}

impl<'de> Deserialize<'de> for ServiceProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<f64>::deserialize(d)?;
        ServiceProfile::new(raw).map_err(serde::de::Error::custom)
    }
}

/// Aggregates derived from a [`ServiceProfile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSummary {
    /// Total service ability: the sum of all service times, seconds.
    pub sigma: f64,
    /// Bottleneck service time, seconds.
    pub s_max: f64,
    /// 1-based index of the bottleneck server.
    pub bottleneck_index: usize,
    /// Throughput with a single request in the system, `1/sigma`.
    pub gamma_min: f64,
    /// Asymptotic throughput ceiling, `1/s_max`.
    pub gamma_max: f64,
}

pub fn summarize(profile: &ServiceProfile) -> SystemSummary {
    profile.summarize()
}

/// User-side parameters of the interactive system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkloadSpec {
    /// Window size `N`: requests held inside the network.
    pub window_n: Option<u64>,
    /// Total connected users `M`.
    pub workstations_m: Option<u64>,
    /// Mean think time, seconds.
    pub think_time: f64,
    /// Transactions per session.
    pub transactions: u64,
}

impl WorkloadSpec {
    pub fn new(
        window_n: Option<u64>,
        workstations_m: Option<u64>,
        think_time: f64,
        transactions: u64,
    ) -> Result<Self> {
        if !(think_time.is_finite() && think_time >= 0.0) {
            return Err(invalid(format!(
                "think time must be >= 0, got {think_time}"
            )));
        }
        if transactions < 1 {
            return Err(invalid("transactions per session must be >= 1"));
        }
        if let (Some(n), Some(m)) = (window_n, workstations_m) {
            if n > m {
                return Err(invalid(format!("window N={n} exceeds workstations M={m}")));
            }
        }
        Ok(WorkloadSpec {
            window_n,
            workstations_m,
            think_time,
            transactions,
        })
    }
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        WorkloadSpec {
            window_n: None,
            workstations_m: None,
            think_time: 0.0,
            transactions: 1,
        }
    }
}

/// Service times of the fifteen-server worked example, seconds.
pub const TABLE1_TIMES: [f64; 15] = [
    0.546, 0.467, 0.847, 0.325, 0.645, 0.835, 0.965, 0.628, 0.617, 0.564, 0.873, 0.674, 0.694,
    0.726, 0.734,
];

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table1() -> ServiceProfile {
        ServiceProfile::new(TABLE1_TIMES).unwrap()
    }

    #[test]
    fn validates_entries() {
        assert_eq!(ServiceProfile::new(vec![0.5, 1.0]).unwrap().len(), 2);
        assert_eq!(table1().len(), 15);
        assert_eq!(
            ServiceProfile::new(vec![0.5, 0.0]),
            Err(Error::InvalidServiceTime(2))
        );
        assert_eq!(
            ServiceProfile::new(Vec::<f64>::new()),
            Err(Error::EmptyProfile)
        );
        assert_eq!(
            ServiceProfile::new(vec![f64::NAN]),
            Err(Error::InvalidServiceTime(1))
        );
        assert_eq!(
            ServiceProfile::new(vec![1.0, f64::INFINITY]),
            Err(Error::InvalidServiceTime(2))
        );
        assert_eq!(
            ServiceProfile::new(vec![-1.0]),
            Err(Error::InvalidServiceTime(1))
        );
        // no upper bound on the range
        assert!(ServiceProfile::new(vec![12.5]).is_ok());
    }

    #[test]
    fn table1_summary() {
        let s = table1().summarize();
        assert!((s.sigma - 10.140).abs() < 5e-4);
        assert_eq!(s.s_max, 0.965);
        assert_eq!(s.bottleneck_index, 7);
        assert_eq!(format!("{:.3}", s.gamma_max), "1.036");
    }

    #[test]
    fn single_server_summary() {
        let s = ServiceProfile::new(vec![1.0]).unwrap().summarize();
        assert_eq!(s.sigma, 1.0);
        assert_eq!(s.s_max, 1.0);
        assert_eq!(s.gamma_min, 1.0);
        assert_eq!(s.gamma_max, 1.0);
    }

    #[test]
    fn bottleneck_ties_go_to_lowest_index() {
        let p = ServiceProfile::new(vec![0.2, 0.9, 0.9, 0.1]).unwrap();
        assert_eq!(p.bottleneck(), (2, 0.9));
    }

    #[test]
    fn swap() {
        let p = table1().swap_servers(7, 15).unwrap();
        assert_eq!(p.service_time(7).unwrap(), 0.734);
        assert_eq!(p.service_time(15).unwrap(), 0.965);
        assert_eq!(table1().service_time(7).unwrap(), 0.965);
        assert_eq!(table1().swap_servers(4, 4).unwrap(), table1());
        let two = ServiceProfile::new(vec![0.5, 1.0]).unwrap();
        assert_eq!(
            two.swap_servers(1, 3),
            Err(Error::IndexOutOfRange { index: 3, len: 2 })
        );
        assert!(two.swap_servers(0, 1).is_err());
    }

    #[test]
    fn ranking() {
        let idx: Vec<usize> = table1()
            .ranked_servers()
            .iter()
            .take(5)
            .map(|r| r.0)
            .collect();
        assert_eq!(idx, vec![7, 11, 3, 6, 15]);
        assert_eq!(
            ServiceProfile::new(vec![1.0]).unwrap().ranked_servers(),
            vec![(1, 1.0)]
        );
        assert_eq!(
            ServiceProfile::new(vec![0.4, 0.4])
                .unwrap()
                .ranked_servers(),
            vec![(1, 0.4), (2, 0.4)]
        );
    }

    #[test]
    fn workload_checks() {
        assert!(WorkloadSpec::new(Some(5), Some(4), 1.0, 1).is_err());
        assert!(WorkloadSpec::new(Some(4), Some(4), 1.0, 1).is_ok());
        assert!(WorkloadSpec::new(None, None, 0.0, 0).is_err());
        assert!(WorkloadSpec::new(None, None, -1.0, 1).is_err());
    }

    fn profile_strategy() -> impl Strategy<Value = ServiceProfile> {
        prop::collection::vec(0.001f64..10.0, 1..20).prop_map(|v| ServiceProfile::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn summary_matches_entries(p in profile_strategy()) {
            let s = p.summarize();
            let true_max = p.times().iter().cloned().fold(f64::MIN, f64::max);
            prop_assert_eq!(s.s_max, true_max);
            prop_assert_eq!(p.times()[s.bottleneck_index - 1], s.s_max);
            let naive: f64 = p.times().iter().sum();
            prop_assert!((s.sigma - naive).abs() <= f64::EPSILON * naive);
            prop_assert!(s.s_max <= s.sigma);
            prop_assert!(s.gamma_min <= s.gamma_max);
            prop_assert_eq!(s.gamma_min == s.gamma_max, p.len() == 1);
        }

        #[test]
        fn ranking_is_permutation_led_by_bottleneck(p in profile_strategy()) {
            let ranked = p.ranked_servers();
            let mut idx: Vec<usize> = ranked.iter().map(|r| r.0).collect();
            prop_assert_eq!(idx[0], p.summarize().bottleneck_index);
            idx.sort_unstable();
            prop_assert_eq!(idx, (1..=p.len()).collect::<Vec<_>>());
            prop_assert!(ranked.windows(2).all(|w| w[0].1 >= w[1].1));
        }

        #[test]
        fn swap_is_involution(p in profile_strategy(), a in 0usize..20, b in 0usize..20) {
            let i = a % p.len() + 1;
            let j = b % p.len() + 1;
            let twice = p.swap_servers(i, j).unwrap().swap_servers(i, j).unwrap();
            prop_assert_eq!(twice, p);
        }
    }
}
