use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cyclenet::report::{self, Report, DEFAULT_DECOMPOSE_POPULATION};
use cyclenet::sim::{DEFAULT_HORIZON, DEFAULT_REPLICATIONS};
use cyclenet::{load_model, Error, Model, ServiceDistribution, SimConfig, WorkloadSpec};

/// Operational analysis of closed cyclic queueing networks.
///
/// MODEL is either a bundled model name (table1, table1-swapped, two-server,
/// single-server) or the path of a JSON model file.
#[derive(Debug, Parser)]
#[command(name = "cyclenet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Summary, bounds, responsiveness table, and critical points.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Window sizes to tabulate, `A..B` or `A`.
        #[arg(long = "n", value_parser = parse_range, default_value = "1..15")]
        range: (u64, u64),
        /// Add exact MVA columns.
        #[arg(long)]
        exact: bool,
    },
    /// Flow-equivalent decomposition around the host.
    Decompose {
        #[command(flatten)]
        common: Common,
        /// Host position (1-based); defaults to the model's host.
        #[arg(long)]
        host: Option<usize>,
        /// Assumed ratio of FES throughput to its ceiling.
        #[arg(long, default_value_t = 0.75)]
        fraction: f64,
        /// Populations to check; the upper end is the balance population.
        #[arg(long = "n", value_parser = parse_range)]
        range: Option<(u64, u64)>,
    },
    /// Discrete-event simulation with MVA comparison.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Window size N.
        #[arg(long = "n", value_parser = parse_range)]
        range: (u64, u64),
        #[arg(long, default_value = "exp")]
        dist: ServiceDistribution,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_REPLICATIONS)]
        reps: usize,
        /// Simulated seconds per replication; the first 10% is discarded.
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: f64,
    },
    /// Closed-form against exact responsiveness over a range of N.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long = "n", value_parser = parse_range, default_value = "1..50")]
        range: (u64, u64),
    },
}

#[derive(Debug, Args)]
struct Common {
    model: String,
    /// Override the model's think time, seconds.
    #[arg(long)]
    think: Option<f64>,
    /// Override the model's transactions per session.
    #[arg(long)]
    transactions: Option<u64>,
    /// Also write the full-precision CSV view here.
    #[arg(long)]
    csv: Option<String>,
}

impl Common {
    fn model(&self) -> Result<Model, Error> {
        let mut model = load_model(&self.model)?;
        let w = model.workload;
        model.workload = WorkloadSpec::new(
            w.window_n,
            w.workstations_m,
            self.think.unwrap_or(w.think_time),
            self.transactions.unwrap_or(w.transactions),
        )?;
        Ok(model)
    }
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let num = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| format!("`{t}` is not a nonnegative integer"))
    };
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if a > b {
        return Err(format!("inverted range {a}..{b}"));
    }
    Ok((a, b))
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::ParseError { .. } | Error::MissingField(_) => 3,
        Error::DegenerateDecomposition => 5,
        Error::Io { .. } => 1,
        _ => 4,
    }
}

fn emit(report: &dyn Report, csv: Option<&str>) -> Result<(), Error> {
    print!("{}", report.render());
    if let Some(path) = csv {
        std::fs::write(path, report::emit_csv(report)).map_err(|e| Error::Io {
            path: path.to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Analyze {
            common,
            range,
            exact,
        } => {
            let model = common.model()?;
            let r = report::analyze(&model, range.0, range.1, exact)?;
            emit(&r, common.csv.as_deref())
        }
        Command::Decompose {
            common,
            host,
            fraction,
            range,
        } => {
            let model = common.model()?;
            let host = host.unwrap_or(model.host_index);
            let population = range.map_or(DEFAULT_DECOMPOSE_POPULATION, |r| r.1 as usize);
            let r = report::decompose(&model, host, fraction, population)?;
            emit(&r, common.csv.as_deref())
        }
        Command::Simulate {
            common,
            range,
            dist,
            seed,
            reps,
            horizon,
        } => {
            if range.0 != range.1 {
                return Err(Error::InvalidArgument(
                    "simulate takes a single window size --n N".into(),
                ));
            }
            let model = common.model()?;
            // the window holds N requests in the servers; a delay stage only when asked for
            let cfg = SimConfig::new(model.profile.clone(), range.0 as usize)
                .think_time(common.think.unwrap_or(0.0))
                .distribution(dist)
                .seed(seed)
                .replications(reps)
                .horizon(horizon);
            let r = report::simulate_report(&model, cfg)?;
            emit(&r, common.csv.as_deref())
        }
        Command::Sweep { common, range } => {
            let model = common.model()?;
            let r = report::sweep(&model, range.0, range.1)?;
            emit(&r, common.csv.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
