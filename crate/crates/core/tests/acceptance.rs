//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclenet::decomp::{fes_curve, flow_balance, norton_solve, subnetwork};
use cyclenet::oplaws::{
    critical_request_count, critical_user_count, responsiveness_approx, responsiveness_exact,
};
use cyclenet::report::{self, emit_csv, CsvTable, Report};
use cyclenet::sim::Estimate;
use cyclenet::{load_model, simulate, solve_mva, ServiceProfile, SimConfig, TABLE1_TIMES};

/// Percentages printed in the responsiveness table for N = 1..15.
const TABLE2_PRINTED: [f64; 15] = [
    91.3, 84.0, 77.8, 72.4, 67.8, 63.7, 60.0, 56.8, 53.9, 51.3, 48.9, 46.7, 44.7, 42.9, 41.2,
];

/// Throughput of the two-server cycle [0.5, 1.0] at N = 2, worked by hand: 6/7.
const TWO_SERVER_X2: f64 = 6.0 / 7.0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn table1() -> ServiceProfile {
    ServiceProfile::new(TABLE1_TIMES).unwrap()
}

fn random_profile(rng: &mut ChaCha8Rng, k_min: usize, k_max: usize) -> ServiceProfile {
    let k = rng.random_range(k_min..=k_max);
    ServiceProfile::new(
        (0..k)
            .map(|_| rng.random_range(0.05..2.0))
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

fn table1_aggregates() -> Outcome {
    let p = table1();
    let s = p.summarize();
    let ranked: Vec<usize> = p.ranked_servers().iter().take(5).map(|r| r.0).collect();
    ensure(
        format!("{:.3}", s.sigma) == "10.140",
        format!("sigma = {}", s.sigma),
    )?;
    ensure(
        s.s_max == 0.965 && s.bottleneck_index == 7,
        format!("s_max {} at {}", s.s_max, s.bottleneck_index),
    )?;
    ensure(ranked == [7, 11, 3, 6, 15], format!("ranking {ranked:?}"))?;
    Ok(format!(
        "sigma={:.3} s_max={} at S_{} ranking {:?}",
        s.sigma, s.s_max, s.bottleneck_index, ranked
    ))
}

fn table2_reproduction() -> Outcome {
    let s = table1().summarize();
    let mut worst: f64 = 0.0;
    for (i, printed) in TABLE2_PRINTED.iter().enumerate() {
        let n = i as u64 + 1;
        let pct = responsiveness_approx(&s, n).percent();
        let dev = (pct - printed).abs();
        worst = worst.max(dev);
        ensure(dev <= 0.15, format!("N={n}: {pct:.3} vs printed {printed}"))?;
    }
    for (n, want) in [(1, "91.3"), (11, "48.9"), (15, "41.2")] {
        let got = report::fixed(responsiveness_approx(&s, n).percent(), 1);
        ensure(got == want, format!("N={n}: {got} != {want}"))?;
    }
    Ok(format!("15 rows within 0.15 pp (worst {worst:.3} pp)"))
}

fn critical_points() -> Outcome {
    let s = table1().summarize();
    let n_star = critical_request_count(&s, 10).map_err(|e| e.to_string())?;
    let m_star = critical_user_count(n_star, 15.0, 10, s.s_max).map_err(|e| e.to_string())?;
    ensure(n_star == 110, format!("N* = {n_star}"))?;
    ensure(m_star == 266, format!("M* = {m_star}"))?;
    let r =
        report::analyze(&load_model("table1").unwrap(), 1, 15, false).map_err(|e| e.to_string())?;
    ensure(
        r.critical.m_star == 266 && r.notes.iter().any(|n| n.contains("270")),
        "report lacks the M* advisory",
    )?;
    Ok(format!(
        "N*={n_star} M*={m_star} (advisory for printed 270 emitted)"
    ))
}

fn decomposition_triple() -> Outcome {
    let p = table1().swap_servers(7, 15).map_err(|e| e.to_string())?;
    let r = flow_balance(&p, 15, 0.75).map_err(|e| e.to_string())?;
    let b = r.balance;
    let got = format!(
        "{:.3} {:.3} {:.3} {:.3}",
        b.gamma_e_star, b.lambda_k, b.rho_k_new, r.rho_k_before
    );
    ensure(got == "1.145 0.859 0.829 1.000", format!("got {got}"))?;
    ensure(b.steady_state(), "host not steady")?;
    Ok(format!(
        "gamma_e*, lambda_K, rho_K(new), rho_K(before) = {got}"
    ))
}

fn oracle_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cases = vec![(table1(), 50usize)];
    for _ in 0..200 {
        let n = rng.random_range(1..=50);
        cases.push((random_profile(&mut rng, 1, 10), n));
    }
    let tol = 1e-9;
    for (p, n_max) in &cases {
        let s = p.summarize();
        let sol = solve_mva(p, *n_max, 0.0).map_err(|e| e.to_string())?;
        for st in &sol.steps {
            let n = st.population as f64;
            let lower = s.sigma.max(n * s.s_max);
            ensure(
                st.elapsed >= lower * (1.0 - tol),
                format!("E({n}) = {} < {lower}", st.elapsed),
            )?;
            ensure(
                st.throughput >= s.gamma_min * (1.0 - tol),
                format!("X({n}) below 1/sigma"),
            )?;
            ensure(
                st.throughput <= s.gamma_max * (1.0 + tol),
                format!("X({n}) above 1/s_max"),
            )?;
            let exact = responsiveness_exact(&s, st.population as u64, st.elapsed).unwrap();
            let approx = responsiveness_approx(&s, st.population as u64);
            ensure(
                exact.responsiveness <= approx.responsiveness * (1.0 + tol),
                format!(
                    "R exact {} > approx {}",
                    exact.responsiveness, approx.responsiveness
                ),
            )?;
        }
    }
    Ok(format!("{} instances, every population", cases.len()))
}

fn balanced_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [2usize, 3] {
        for s in [0.5, 1.0] {
            let sol = solve_mva(&ServiceProfile::new(vec![s; k]).unwrap(), 10, 0.0).unwrap();
            for n in 1..=10 {
                let want = n as f64 / ((n + k - 1) as f64 * s);
                let d = rel(sol.throughput(n).unwrap(), want);
                worst = worst.max(d);
                ensure(d <= 1e-12, format!("K={k} s={s} n={n}: rel diff {d:e}"))?;
            }
        }
    }
    Ok(format!("worst relative difference {worst:.1e}"))
}

fn norton_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut solves = 0;
    for _ in 0..100 {
        let p = random_profile(&mut rng, 2, 8);
        let n_max = rng.random_range(1..=15);
        let full = solve_mva(&p, n_max, 0.0).unwrap();
        for host in 1..=p.len() {
            let curve = fes_curve(&subnetwork(&p, host).unwrap(), n_max).unwrap();
            let host_s = p.service_time(host).unwrap();
            for n in 1..=n_max {
                let (x, _) = norton_solve(&curve, host_s, n).map_err(|e| e.to_string())?;
                let d = rel(x, full.throughput(n).unwrap());
                worst = worst.max(d);
                solves += 1;
                ensure(
                    d <= 1e-9,
                    format!("K={} host={host} n={n}: rel diff {d:e}", p.len()),
                )?;
            }
        }
    }
    Ok(format!(
        "{solves} two-station solves, worst relative difference {worst:.1e}"
    ))
}

fn simulator_vs_mva() -> Outcome {
    let two = ServiceProfile::new(vec![0.5, 1.0]).unwrap();
    let r = simulate(
        &SimConfig::new(two, 2)
            .horizon(2_000.0)
            .replications(30)
            .seed(2024),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        r.throughput.covers(TWO_SERVER_X2),
        format!(
            "CI {:.4} +/- {:.4} misses {TWO_SERVER_X2:.4}",
            r.throughput.mean, r.throughput.half_width
        ),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let instances = 50;
    let mut covered = 0;
    for i in 0..instances {
        let p = random_profile(&mut rng, 1, 5);
        let n = rng.random_range(1..=10);
        let exact = solve_mva(&p, n, 0.0).unwrap().throughput(n).unwrap();
        let est: Estimate = simulate(
            &SimConfig::new(p, n)
                .horizon(2_000.0)
                .replications(30)
                .seed(i),
        )
        .map_err(|e| e.to_string())?
        .throughput;
        if est.covers(exact) {
            covered += 1;
        }
    }
    let coverage = covered as f64 / instances as f64;
    ensure(coverage >= 0.90, format!("coverage {coverage:.2} < 0.90"))?;
    Ok(format!(
        "[0.5,1.0] N=2: {:.4} +/- {:.4} covers 0.8571; coverage {covered}/{instances}",
        r.throughput.mean, r.throughput.half_width
    ))
}

fn saturation() -> Outcome {
    let cfg = SimConfig::new(table1(), 110)
        .horizon(20_000.0)
        .replications(10)
        .seed(42);
    let r = simulate(&cfg).map_err(|e| e.to_string())?;
    let bottleneck = r.utilizations[6].mean;
    let host = r.utilizations[14].mean;
    ensure(
        bottleneck > 0.99,
        format!("bottleneck utilization {bottleneck:.4}"),
    )?;
    ensure(
        (host - 0.760).abs() <= 0.02,
        format!("host utilization {host:.4}"),
    )?;
    Ok(format!("rho_7 = {bottleneck:.4}, rho_15 = {host:.4}"))
}

fn roundtrip(report: &dyn Report) -> Result<(), String> {
    let table = report.table();
    let back = CsvTable::from_csv(&emit_csv(report)).map_err(|e| e.to_string())?;
    ensure(back.header == table.header, "header changed")?;
    for col in &table.header {
        let (Ok(a), Ok(b)) = (table.column_f64(col), back.column_f64(col)) else {
            ensure(table.rows == back.rows, "text cells changed")?;
            continue;
        };
        let same = a.iter().zip(&b).all(|(x, y)| match (x, y) {
            (Some(x), Some(y)) => x.to_bits() == y.to_bits(),
            (None, None) => true,
            _ => false,
        });
        ensure(same && a.len() == b.len(), format!("column {col} changed"))?;
    }
    Ok(())
}

fn determinism() -> Outcome {
    let model = load_model("table1").unwrap();
    let cfg = SimConfig::new(model.profile.clone(), 20)
        .horizon(2_000.0)
        .replications(8)
        .seed(42);
    let a = report::simulate_report(&model, cfg.clone()).map_err(|e| e.to_string())?;
    let b = report::simulate_report(&model, cfg).map_err(|e| e.to_string())?;
    ensure(a.render() == b.render(), "text reports differ")?;
    ensure(emit_csv(&a) == emit_csv(&b), "CSV reports differ")?;
    roundtrip(&a)?;
    roundtrip(&report::analyze(&model, 0, 120, true).unwrap())?;
    roundtrip(&report::sweep(&model, 0, 50).unwrap())?;
    let swapped = load_model("table1-swapped").unwrap();
    roundtrip(&report::decompose(&swapped, 15, 0.75, 30).unwrap())?;
    Ok("identical bytes for repeated seed; analyze/decompose/simulate/sweep CSV round-trip bit-exact".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "1 Table 1 aggregates",
            table1_aggregates,
            Duration::from_millis(1),
        ),
        (
            "2 responsiveness table N=1..15",
            table2_reproduction,
            Duration::from_millis(1),
        ),
        (
            "3 critical points",
            critical_points,
            Duration::from_millis(1),
        ),
        (
            "4 decomposition triple",
            decomposition_triple,
            Duration::from_millis(1),
        ),
        (
            "5 oracle bound property",
            oracle_bounds,
            Duration::from_secs(10),
        ),
        (
            "6 balanced closed form",
            balanced_closed_form,
            Duration::from_millis(10),
        ),
        (
            "7 Norton equivalence",
            norton_equivalence,
            Duration::from_secs(10),
        ),
        (
            "8 simulator vs MVA",
            simulator_vs_mva,
            Duration::from_secs(120),
        ),
        ("9 saturation", saturation, Duration::from_secs(60)),
        ("10 determinism", determinism, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if took <= budget {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {took:?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail} ({took:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why} ({took:.2?})");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
