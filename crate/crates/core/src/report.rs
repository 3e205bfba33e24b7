//! Report assembly and rendering for the command-line front end.
//!
//! Every report has a human view (fixed decimals, rounded half away from
//! zero) and a CSV view carrying full-precision values. Floats in CSV use
//! the shortest representation that parses back to the identical `f64`.

use std::fmt::Write as _;

use crate::decomp::{self, FesCurve, FlowBalanceReport, NortonPoint};
use crate::error::{invalid, Error, Result};
use crate::model::SystemSummary;
use crate::modelfile::Model;
use crate::mva::solve_mva;
use crate::oplaws::{self, CriticalPoints, ResponsivenessPoint, Source};
use crate::sim::{simulate, ServiceDistribution, SimConfig, SimResult};

/// Label of the bundled fifteen-server worked example.
pub const TABLE1_LABEL: &str = "table1";
/// Tolerance of the exact-mode flow-balance check in `decompose`.
pub const BALANCE_TOLERANCE: f64 = 1e-9;
/// Population used by `decompose` when none is given.
pub const DEFAULT_DECOMPOSE_POPULATION: usize = 20;

/// Rounds half away from zero and prints exactly `decimals` digits.
pub fn fixed(x: f64, decimals: usize) -> String {
    if !x.is_finite() {
        return "n/a".to_string();
    }
    let scale = 10f64.powi(decimals as i32);
    let r = (x * scale).round() / scale;
    // avoid "-0.0"
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.decimals$}")
}

fn full(x: f64) -> String {
    format!("{x}")
}

/// Header plus rows of string cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn from_csv(text: &str) -> Result<CsvTable> {
        let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let parse_err = |e: csv::Error| Error::ParseError {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        };
        let header = r
            .headers()
            .map_err(parse_err)?
            .iter()
            .map(String::from)
            .collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()
            .map_err(parse_err)?;
        Ok(CsvTable { header, rows })
    }

    /// Cell `column` of every row parsed as `f64`; empty cells become `None`.
    pub fn column_f64(&self, column: &str) -> Result<Vec<Option<f64>>> {
        let idx = self
            .header
            .iter()
            .position(|h| h == column)
            .ok_or_else(|| invalid(format!("no column `{column}`")))?;
        self.rows
            .iter()
            .map(|row| {
                let cell = row[idx].as_str();
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse()
                        .map(Some)
                        .map_err(|_| invalid(format!("`{cell}` is not a number")))
                }
            })
            .collect()
    }
}

pub trait Report {
    /// Human-readable view.
    fn render(&self) -> String;
    /// Full-precision tabular view.
    fn table(&self) -> CsvTable;
}

pub fn emit_csv(report: &dyn Report) -> String {
    report.table().to_csv()
}

fn saturation_flag(rho: f64) -> &'static str {
    if rho > 1.0 {
        " [infeasible]"
    } else if rho >= 1.0 {
        " [saturated]"
    } else {
        ""
    }
}

fn check_range(n_from: u64, n_to: u64) -> Result<()> {
    if n_from > n_to {
        Err(invalid(format!("inverted range {n_from}..{n_to}")))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactPoint {
    pub responsiveness: f64,
    pub elapsed: f64,
    pub throughput: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeRow {
    pub approx: ResponsivenessPoint,
    pub exact: Option<ExactPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeReport {
    pub label: String,
    pub servers: usize,
    pub summary: SystemSummary,
    pub host_index: usize,
    /// Host utilization at the asymptotic throughput `1/s_max`.
    pub host_rho: f64,
    pub think_time: f64,
    pub transactions: u64,
    pub critical: CriticalPoints,
    pub rows: Vec<AnalyzeRow>,
    pub notes: Vec<String>,
}

pub fn analyze(model: &Model, n_from: u64, n_to: u64, exact: bool) -> Result<AnalyzeReport> {
    check_range(n_from, n_to)?;
    let summary = model.profile.summarize();
    let think_time = model.workload.think_time;
    let transactions = model.workload.transactions;
    let critical = oplaws::critical_points(&summary, think_time, transactions)?;
    let host_service = model.profile.service_time(model.host_index)?;
    let host_rho = oplaws::utilization(summary.gamma_max, host_service)?;
    let mva = if exact && n_to >= 1 {
        Some(solve_mva(&model.profile, n_to as usize, 0.0)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for point in oplaws::responsiveness_table(&summary, n_from, n_to)? {
        let exact = match &mva {
            Some(sol) if point.window_n >= 1 => {
                let st = sol.step(point.window_n as usize)?;
                Some(ExactPoint {
                    responsiveness: oplaws::responsiveness_exact(
                        &summary,
                        point.window_n,
                        st.elapsed,
                    )?
                    .responsiveness,
                    elapsed: st.elapsed,
                    throughput: st.throughput,
                })
            }
            Some(_) => Some(ExactPoint {
                responsiveness: 1.0,
                elapsed: 0.0,
                throughput: 0.0,
            }),
            None => None,
        };
        rows.push(AnalyzeRow {
            approx: point,
            exact,
        });
    }
    let mut notes = Vec::new();
    if model.label == TABLE1_LABEL {
        notes.push(format!(
            "M* = {} from N* + ceil(T(u)*n/s_max) = {} + ceil({}); the published worked example lists 270, which no rounding convention reproduces",
            critical.m_star,
            critical.n_star,
            fixed(think_time * transactions as f64 / summary.s_max, 2),
        ));
        notes.push(format!(
            "host utilization at 1/s_max is {} / {} = {} ({} with the rate rounded to {}); the published worked example lists 0.769",
            fixed(host_service, 3),
            fixed(summary.s_max, 3),
            fixed(host_rho, 3),
            fixed(host_service * (summary.gamma_max * 1000.0).round() / 1000.0, 3),
            fixed(summary.gamma_max, 3),
        ));
        let r_star = oplaws::responsiveness_approx(&summary, critical.n_star);
        notes.push(format!(
            "R(N*) = R({}) = {}%; the published worked example lists 8.75%",
            critical.n_star,
            fixed(r_star.percent(), 2),
        ));
    }
    Ok(AnalyzeReport {
        label: model.label.clone(),
        servers: model.profile.len(),
        summary,
        host_index: model.host_index,
        host_rho,
        think_time,
        transactions,
        critical,
        rows,
        notes,
    })
}

fn approx_throughput(p: &ResponsivenessPoint) -> f64 {
    if p.window_n == 0 {
        0.0
    } else {
        p.window_n as f64 / p.elapsed
    }
}

impl Report for AnalyzeReport {
    fn render(&self) -> String {
        let s = &self.summary;
        let mut o = String::new();
        let _ = writeln!(o, "model: {} (K = {})", self.label, self.servers);
        let _ = writeln!(o, "total service ability sigma = {} s", fixed(s.sigma, 3));
        let _ = writeln!(
            o,
            "bottleneck s_max = {} s at server {}",
            fixed(s.s_max, 3),
            s.bottleneck_index
        );
        let _ = writeln!(
            o,
            "throughput bounds: {} <= X(N) <= {} req/s",
            fixed(s.gamma_min, 3),
            fixed(s.gamma_max, 3)
        );
        let _ = writeln!(
            o,
            "host S_{} utilization at 1/s_max: {}{}",
            self.host_index,
            fixed(self.host_rho, 3),
            saturation_flag(self.host_rho)
        );
        let _ = writeln!(
            o,
            "critical points: N* = {}, M* = {} (n = {}, T(u) = {} s)",
            self.critical.n_star,
            self.critical.m_star,
            self.transactions,
            fixed(self.think_time, 3)
        );
        let with_exact = self.rows.iter().any(|r| r.exact.is_some());
        let _ = writeln!(o);
        if with_exact {
            let _ = writeln!(
                o,
                "{:>6} {:>8} {:>10} {:>9} {:>10} {:>8}",
                "N", "R(s) %", "E(N) s", "exact R %", "exact E s", "exact X"
            );
        } else {
            let _ = writeln!(o, "{:>6} {:>8} {:>10}", "N", "R(s) %", "E(N) s");
        }
        for row in &self.rows {
            let a = &row.approx;
            let _ = write!(
                o,
                "{:>6} {:>8} {:>10}",
                a.window_n,
                fixed(a.percent(), 1),
                fixed(a.elapsed, 3)
            );
            if let Some(e) = &row.exact {
                let _ = write!(
                    o,
                    " {:>9} {:>10} {:>8}",
                    fixed(100.0 * e.responsiveness, 1),
                    fixed(e.elapsed, 3),
                    fixed(e.throughput, 3)
                );
            }
            let _ = writeln!(o);
        }
        if !self.notes.is_empty() {
            let _ = writeln!(o, "\nadvisory:");
            for n in &self.notes {
                let _ = writeln!(o, "  - {n}");
            }
        }
        o
    }

    fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["n", "source", "responsiveness", "elapsed", "throughput"]);
        for row in &self.rows {
            let a = &row.approx;
            t.push(vec![
                a.window_n.to_string(),
                source_name(a.source).into(),
                full(a.responsiveness),
                full(a.elapsed),
                full(approx_throughput(a)),
            ]);
        }
        for row in &self.rows {
            if let Some(e) = &row.exact {
                t.push(vec![
                    row.approx.window_n.to_string(),
                    source_name(Source::Exact).into(),
                    full(e.responsiveness),
                    full(e.elapsed),
                    full(e.throughput),
                ]);
            }
        }
        t
    }
}

fn source_name(s: Source) -> &'static str {
    match s {
        Source::Approximate => "approximate",
        Source::Exact => "exact",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecomposeReport {
    pub label: String,
    pub servers: usize,
    pub flow: FlowBalanceReport,
    pub population: usize,
    pub curve: FesCurve,
    pub norton: Vec<NortonPoint>,
    /// Full-network MVA throughput per population.
    pub full_throughput: Vec<f64>,
    pub max_rel_diff: f64,
    /// Arrival rate at the host from the full network at `population`.
    pub exact_lambda_k: f64,
    /// FES throughput in the two-station model at `population`.
    pub exact_gamma_e: f64,
    pub exact_rho_k: f64,
    pub balanced: bool,
}

pub fn decompose(
    model: &Model,
    host_index: usize,
    fraction: f64,
    population: usize,
) -> Result<DecomposeReport> {
    if population < 1 {
        return Err(invalid("population must be >= 1"));
    }
    let flow = decomp::flow_balance(&model.profile, host_index, fraction)?;
    let sub = decomp::subnetwork(&model.profile, host_index)?;
    let curve = decomp::fes_curve(&sub, population)?;
    let norton = decomp::norton_trace(&curve, flow.host_service, population)?;
    let full = solve_mva(&model.profile, population, 0.0)?;
    let full_throughput: Vec<f64> = full.steps.iter().map(|s| s.throughput).collect();
    let max_rel_diff = norton
        .iter()
        .zip(&full_throughput)
        .map(|(p, x)| (p.throughput - x).abs() / x)
        .fold(0.0, f64::max);
    let exact_lambda_k = full_throughput[population - 1];
    let exact_gamma_e = norton[population - 1].throughput;
    Ok(DecomposeReport {
        label: model.label.clone(),
        servers: model.profile.len(),
        flow,
        population,
        curve,
        norton,
        full_throughput,
        max_rel_diff,
        exact_lambda_k,
        exact_gamma_e,
        exact_rho_k: exact_lambda_k * flow.host_service,
        balanced: decomp::flow_balance_check(exact_lambda_k, exact_gamma_e, BALANCE_TOLERANCE),
    })
}

impl Report for DecomposeReport {
    fn render(&self) -> String {
        let f = &self.flow;
        let b = &f.balance;
        let mut o = String::new();
        let _ = writeln!(
            o,
            "model: {} (K = {}), host S_{} (s_K = {} s)",
            self.label,
            self.servers,
            f.host_index,
            fixed(f.host_service, 3)
        );
        let _ = writeln!(
            o,
            "host utilization at 1/s_max: {}{}",
            fixed(f.rho_k_before, 3),
            saturation_flag(f.rho_k_before)
        );
        let _ = writeln!(
            o,
            "relaying subnetwork: {} servers, bottleneck S_{} ({} s)",
            self.servers - 1,
            f.subnet_bottleneck_index,
            fixed(f.subnet_bottleneck, 3)
        );
        let _ = writeln!(
            o,
            "FES ceiling gamma_e* = {} req/s",
            fixed(b.gamma_e_star, 3)
        );
        let _ = writeln!(
            o,
            "fraction phi = {}: lambda_K = {} req/s",
            fixed(b.assumed_fraction, 3),
            fixed(b.lambda_k, 3)
        );
        let _ = writeln!(
            o,
            "rho_K(new) = lambda_K * s_K = {} ({}){}",
            fixed(b.rho_k_new, 3),
            if b.steady_state() {
                "steady state"
            } else {
                "not steady state"
            },
            saturation_flag(b.rho_k_new)
        );
        let _ = writeln!(o, "\nflow-equivalent check, N = 1..{}:", self.population);
        let _ = writeln!(
            o,
            "{:>6} {:>10} {:>12} {:>10}",
            "N", "gamma_e(N)", "X two-stage", "X full"
        );
        for (p, x) in self.norton.iter().zip(&self.full_throughput) {
            let _ = writeln!(
                o,
                "{:>6} {:>10} {:>12} {:>10}",
                p.population,
                fixed(self.curve.rates[p.population - 1], 3),
                fixed(p.throughput, 3),
                fixed(*x, 3)
            );
        }
        let _ = writeln!(o, "max relative difference: {:.3e}", self.max_rel_diff);
        let _ = writeln!(
            o,
            "flow balance at N = {}: lambda_K = {} vs gamma_e = {} -> {} (host utilization {})",
            self.population,
            fixed(self.exact_lambda_k, 3),
            fixed(self.exact_gamma_e, 3),
            if self.balanced {
                "balanced"
            } else {
                "unbalanced"
            },
            fixed(self.exact_rho_k, 3)
        );
        o
    }

    fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["j", "fes_rate", "two_station_throughput", "full_throughput"]);
        for (p, x) in self.norton.iter().zip(&self.full_throughput) {
            t.push(vec![
                p.population.to_string(),
                full(self.curve.rates[p.population - 1]),
                full(p.throughput),
                full(*x),
            ]);
        }
        t
    }
}

/// Exact MVA values used for side-by-side comparison with a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct MvaReference {
    pub throughput: f64,
    pub elapsed: f64,
    pub utilizations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateReport {
    pub label: String,
    pub config: SimConfig,
    pub result: SimResult,
    pub mva: Option<MvaReference>,
}

pub fn simulate_report(model: &Model, config: SimConfig) -> Result<SimulateReport> {
    let result = simulate(&config)?;
    let mva = if config.distribution == ServiceDistribution::Exponential {
        let sol = solve_mva(&config.profile, config.window_n, config.think_time)?;
        let st = sol.step(config.window_n)?;
        Some(MvaReference {
            throughput: st.throughput,
            elapsed: st.elapsed,
            utilizations: config
                .profile
                .times()
                .iter()
                .map(|s| st.throughput * s)
                .collect(),
        })
    } else {
        None
    };
    Ok(SimulateReport {
        label: model.label.clone(),
        config,
        result,
        mva,
    })
}

impl Report for SimulateReport {
    fn render(&self) -> String {
        let c = &self.config;
        let r = &self.result;
        let mut o = String::new();
        let _ = writeln!(
            o,
            "model: {} (K = {}), N = {}, T(u) = {} s, dist = {}",
            self.label,
            c.profile.len(),
            c.window_n,
            fixed(c.think_time, 3),
            c.distribution
        );
        let _ = writeln!(
            o,
            "horizon = {} s, warmup = {} s, replications = {}, seed = {}",
            fixed(c.horizon, 1),
            fixed(c.warmup, 1),
            c.replications,
            c.seed
        );
        let est = |e: &crate::sim::Estimate| {
            format!("{} +/- {}", fixed(e.mean, 4), fixed(e.half_width, 4))
        };
        let mva = self.mva.as_ref();
        let _ = writeln!(
            o,
            "throughput: {} req/s{}",
            est(&r.throughput),
            mva.map_or(String::new(), |m| format!(
                "  (MVA {})",
                fixed(m.throughput, 4)
            ))
        );
        let _ = writeln!(
            o,
            "elapsed:    {} s{}",
            est(&r.elapsed),
            mva.map_or(String::new(), |m| format!(
                "  (MVA {})",
                fixed(m.elapsed, 4)
            ))
        );
        let _ = writeln!(
            o,
            "\n{:>6} {:>8} {:>20} {:>8}",
            "server", "s_i", "utilization", "MVA"
        );
        for (i, u) in r.utilizations.iter().enumerate() {
            let _ = writeln!(
                o,
                "{:>6} {:>8} {:>20} {:>8}",
                i + 1,
                fixed(c.profile.times()[i], 3),
                est(u),
                mva.map_or("-".to_string(), |m| fixed(m.utilizations[i], 4))
            );
        }
        o
    }

    fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["metric", "server", "mean", "half_width", "mva"]);
        let mva = self.mva.as_ref();
        let opt = |v: Option<f64>| v.map_or(String::new(), full);
        let r = &self.result;
        t.push(vec![
            "throughput".into(),
            String::new(),
            full(r.throughput.mean),
            full(r.throughput.half_width),
            opt(mva.map(|m| m.throughput)),
        ]);
        t.push(vec![
            "elapsed".into(),
            String::new(),
            full(r.elapsed.mean),
            full(r.elapsed.half_width),
            opt(mva.map(|m| m.elapsed)),
        ]);
        for (i, u) in r.utilizations.iter().enumerate() {
            t.push(vec![
                "utilization".into(),
                (i + 1).to_string(),
                full(u.mean),
                full(u.half_width),
                opt(mva.map(|m| m.utilizations[i])),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub r_approx: f64,
    pub r_exact: f64,
    pub e_approx: f64,
    pub e_exact: f64,
    pub x_exact: f64,
    /// `min(N / sigma, 1 / s_max)`.
    pub x_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub label: String,
    pub rows: Vec<SweepRow>,
}

/// Closed-form versus exact responsiveness, elapsed time, and throughput across a range of `N`.
pub fn sweep(model: &Model, n_from: u64, n_to: u64) -> Result<SweepReport> {
    check_range(n_from, n_to)?;
    let summary = model.profile.summarize();
    let sol = if n_to >= 1 {
        Some(solve_mva(&model.profile, n_to as usize, 0.0)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for n in n_from..=n_to {
        let approx = oplaws::responsiveness_approx(&summary, n);
        let (e_exact, x_exact) = match (&sol, n) {
            (Some(s), 1..) => {
                let st = s.step(n as usize)?;
                (st.elapsed, st.throughput)
            }
            _ => (0.0, 0.0),
        };
        rows.push(SweepRow {
            n,
            r_approx: approx.responsiveness,
            r_exact: oplaws::responsiveness_exact(&summary, n, e_exact)?.responsiveness,
            e_approx: approx.elapsed,
            e_exact,
            x_exact,
            x_bound: (n as f64 / summary.sigma).min(summary.gamma_max),
        });
    }
    Ok(SweepReport {
        label: model.label.clone(),
        rows,
    })
}

impl Report for SweepReport {
    fn render(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "model: {}", self.label);
        let _ = writeln!(
            o,
            "{:>6} {:>9} {:>9} {:>10} {:>10} {:>8} {:>8}",
            "N", "R approx%", "R exact%", "E approx", "E exact", "X exact", "X bound"
        );
        for r in &self.rows {
            let _ = writeln!(
                o,
                "{:>6} {:>9} {:>9} {:>10} {:>10} {:>8} {:>8}",
                r.n,
                fixed(100.0 * r.r_approx, 1),
                fixed(100.0 * r.r_exact, 1),
                fixed(r.e_approx, 3),
                fixed(r.e_exact, 3),
                fixed(r.x_exact, 3),
                fixed(r.x_bound, 3)
            );
        }
        o
    }

    fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(&[
            "n", "r_approx", "r_exact", "e_approx", "e_exact", "x_exact", "x_bound",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.n.to_string(),
                full(r.r_approx),
                full(r.r_exact),
                full(r.e_approx),
                full(r.e_exact),
                full(r.x_exact),
                full(r.x_bound),
            ]);
        }
        t
    }
}
