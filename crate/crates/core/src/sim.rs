//! Discrete-event simulation of the closed cycle: `N` requests circulate
//! FCFS through servers `1..=K`, optionally passing through a think-time
//! delay stage after the host before re-entering server 1.
//!
//! Replications draw from independent ChaCha streams keyed by
//! `(seed, replication index)`, so results do not depend on the order in
//! which replications run.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{invalid, Error, Result};
use crate::model::ServiceProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ServiceDistribution {
    Exponential,
    Deterministic,
}

impl std::str::FromStr for ServiceDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp" | "exponential" => Ok(ServiceDistribution::Exponential),
            "det" | "deterministic" => Ok(ServiceDistribution::Deterministic),
            other => Err(invalid(format!(
                "unknown distribution `{other}` (expected exp|det)"
            ))),
        }
    }
}

impl std::fmt::Display for ServiceDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ServiceDistribution::Exponential => "exp",
            ServiceDistribution::Deterministic => "det",
        })
    }
}

/// Default simulated horizon, seconds.
pub const DEFAULT_HORIZON: f64 = 10_000.0;
pub const DEFAULT_REPLICATIONS: usize = 30;
/// Share of the horizon discarded as warmup unless overridden.
pub const WARMUP_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub profile: ServiceProfile,
    pub window_n: usize,
    pub think_time: f64,
    pub distribution: ServiceDistribution,
    pub horizon: f64,
    pub warmup: f64,
    pub replications: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(profile: ServiceProfile, window_n: usize) -> Self {
        SimConfig {
            profile,
            window_n,
            think_time: 0.0,
            distribution: ServiceDistribution::Exponential,
            horizon: DEFAULT_HORIZON,
            warmup: WARMUP_FRACTION * DEFAULT_HORIZON,
            replications: DEFAULT_REPLICATIONS,
            seed: 0,
        }
    }

    /// Sets the horizon and resets warmup to its default share of it.
    pub fn horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self.warmup = WARMUP_FRACTION * horizon;
        self
    }

    pub fn warmup(mut self, warmup: f64) -> Self {
        self.warmup = warmup;
        self
    }

    pub fn think_time(mut self, think_time: f64) -> Self {
        self.think_time = think_time;
        self
    }

    pub fn distribution(mut self, distribution: ServiceDistribution) -> Self {
        self.distribution = distribution;
        self
    }

    pub fn replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.warmup >= 0.0 && self.horizon.is_finite() && self.horizon > self.warmup) {
            return Err(Error::InvalidHorizon {
                horizon: self.horizon,
                warmup: self.warmup,
            });
        }
        if self.replications < 1 {
            return Err(invalid("replications must be >= 1"));
        }
        if self.window_n < 1 {
            return Err(invalid("window N must be >= 1"));
        }
        if !(self.think_time.is_finite() && self.think_time >= 0.0) {
            return Err(invalid(format!(
                "think time must be >= 0, got {}",
                self.think_time
            )));
        }
        Ok(())
    }
}

/// Sample mean with a 95% Student-t half-width (NaN for a single replication).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Estimate {
        let r = samples.len();
        let mean = samples.iter().sum::<f64>() / r as f64;
        if r < 2 {
            return Estimate {
                mean,
                half_width: f64::NAN,
            };
        }
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
        let t = StudentsT::new(0.0, 1.0, (r - 1) as f64)
            .expect("degrees of freedom are positive")
            .inverse_cdf(0.975);
        Estimate {
            mean,
            half_width: t * (var / r as f64).sqrt(),
        }
    }

    pub fn covers(&self, value: f64) -> bool {
        (value - self.mean).abs() <= self.half_width
    }
}

/// Observations from one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationStats {
    /// Completions per server over the whole run, warmup included.
    pub completions: Vec<u64>,
    /// Completions per server after warmup.
    pub window_completions: Vec<u64>,
    /// Host departures per second after warmup.
    pub throughput: f64,
    /// Mean time from arrival at server 1 to departure from server K, seconds.
    pub elapsed: f64,
    pub utilizations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub window_n: usize,
    pub throughput: Estimate,
    pub elapsed: Estimate,
    pub utilizations: Vec<Estimate>,
    pub replications: Vec<ReplicationStats>,
}

#[derive(Debug, Clone, Copy)]
enum EventKind {
    ServiceDone(usize),
    ThinkDone(usize),
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed so the max-heap pops the earliest event; seq breaks ties FIFO.
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Sampler {
    dist: ServiceDistribution,
    exps: Vec<Option<Exp<f64>>>,
}

impl Sampler {
    fn new(dist: ServiceDistribution, means: &[f64]) -> Sampler {
        let exps = means
            .iter()
            .map(|&m| (m > 0.0).then(|| Exp::new(1.0 / m).expect("positive rate")))
            .collect();
        Sampler { dist, exps }
    }

    fn draw(&self, stage: usize, mean: f64, rng: &mut ChaCha8Rng) -> f64 {
        match (self.dist, &self.exps[stage]) {
            (ServiceDistribution::Exponential, Some(e)) => e.sample(rng),
            _ => mean,
        }
    }
}

struct Replication<'a> {
    cfg: &'a SimConfig,
    rng: ChaCha8Rng,
    sampler: Sampler,
    heap: BinaryHeap<Event>,
    seq: u64,
    queues: Vec<VecDeque<usize>>,
    cycle_start: Vec<f64>,
    busy: Vec<f64>,
    completions: Vec<u64>,
    window_completions: Vec<u64>,
    elapsed_sum: f64,
    elapsed_count: u64,
}

impl<'a> Replication<'a> {
    fn new(cfg: &'a SimConfig, index: usize) -> Self {
        let k = cfg.profile.len();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(index as u64);
        // stage K is the think delay
        let mut means = cfg.profile.times().to_vec();
        means.push(cfg.think_time);
        Replication {
            cfg,
            rng,
            sampler: Sampler::new(cfg.distribution, &means),
            heap: BinaryHeap::new(),
            seq: 0,
            queues: vec![VecDeque::new(); k],
            cycle_start: vec![0.0; cfg.window_n],
            busy: vec![0.0; k],
            completions: vec![0; k],
            window_completions: vec![0; k],
            elapsed_sum: 0.0,
            elapsed_count: 0,
        }
    }

    fn schedule(&mut self, time: f64, kind: EventKind) {
        self.heap.push(Event {
            time,
            seq: self.seq,
            kind,
        });
        self.seq += 1;
    }

    fn start_service(&mut self, station: usize, now: f64) {
        let mean = self.cfg.profile.times()[station];
        let end = now + self.sampler.draw(station, mean, &mut self.rng);
        let lo = now.max(self.cfg.warmup);
        let hi = end.min(self.cfg.horizon);
        if hi > lo {
            self.busy[station] += hi - lo;
        }
        self.schedule(end, EventKind::ServiceDone(station));
    }

    fn arrive(&mut self, station: usize, job: usize, now: f64) {
        if station == 0 {
            self.cycle_start[job] = now;
        }
        self.queues[station].push_back(job);
        if self.queues[station].len() == 1 {
            self.start_service(station, now);
        }
    }

    fn run(mut self) -> ReplicationStats {
        let k = self.cfg.profile.len();
        let (warmup, horizon) = (self.cfg.warmup, self.cfg.horizon);
        for job in 0..self.cfg.window_n {
            self.arrive(0, job, 0.0);
        }
        while let Some(ev) = self.heap.pop() {
            let now = ev.time;
            if now > horizon {
                break;
            }
            match ev.kind {
                EventKind::ThinkDone(job) => self.arrive(0, job, now),
                EventKind::ServiceDone(st) => {
                    let job = self.queues[st]
                        .pop_front()
                        .expect("completion at busy server");
                    self.completions[st] += 1;
                    if now > warmup {
                        self.window_completions[st] += 1;
                    }
                    if !self.queues[st].is_empty() {
                        self.start_service(st, now);
                    }
                    if st + 1 < k {
                        self.arrive(st + 1, job, now);
                        continue;
                    }
                    if now > warmup {
                        self.elapsed_sum += now - self.cycle_start[job];
                        self.elapsed_count += 1;
                    }
                    if self.cfg.think_time > 0.0 {
                        let delay = self.sampler.draw(k, self.cfg.think_time, &mut self.rng);
                        self.schedule(now + delay, EventKind::ThinkDone(job));
                    } else {
                        self.arrive(0, job, now);
                    }
                }
            }
        }
        let window = horizon - warmup;
        ReplicationStats {
            throughput: self.window_completions[k - 1] as f64 / window,
            elapsed: if self.elapsed_count > 0 {
                self.elapsed_sum / self.elapsed_count as f64
            } else {
                f64::NAN
            },
            utilizations: self.busy.iter().map(|b| b / window).collect(),
            completions: self.completions,
            window_completions: self.window_completions,
        }
    }
}

pub fn simulate(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let reps: Vec<ReplicationStats> = (0..config.replications)
        .into_par_iter()
        .map(|i| Replication::new(config, i).run())
        .collect();
    let collect = |f: &dyn Fn(&ReplicationStats) -> f64| -> Estimate {
        Estimate::from_samples(&reps.iter().map(f).collect::<Vec<_>>())
    };
    let throughput = collect(&|r| r.throughput);
    let elapsed = collect(&|r| r.elapsed);
    let utilizations = (0..config.profile.len())
        .map(|i| collect(&|r| r.utilizations[i]))
        .collect();
    Ok(SimResult {
        window_n: config.window_n,
        throughput,
        elapsed,
        utilizations,
        replications: reps,
    })
}
