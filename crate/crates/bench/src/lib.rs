//! Shared fixtures for the criterion benchmarks.

use cyclenet::ServiceProfile;

/// Deterministic profile of `k` servers with times spread over `(0.1, 1.0]`.
pub fn spread_profile(k: usize) -> ServiceProfile {
    let times: Vec<f64> = (0..k)
        .map(|i| 0.1 + 0.9 * (((i * 7919) % 1000) as f64 + 1.0) / 1000.0)
        .collect();
    ServiceProfile::new(times).expect("positive times")
}
