// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use tickbench::classical::ladder_clock;
use tickbench::delay::{erlang_cdf, DelayConfig, DelayFunction};
use tickbench::experiments::{
    classical_sweep, fig2a, fig2a_csv, fig2b_sigma, ladder_accuracies, loglog_slope, optimized_r1, sweep_csv,
    Fig2bConfig,
};
use tickbench::quantum::{
    optimize_potential, quantum_accuracy, survival, swp_state, AccuracyConfig, Evolution, InitialState,
    OptimizeConfig, OptimizeError, PotentialFamily, QuantumResetClockSpec,
};
use tickbench::sim::{ks_critical_001, ks_statistic, sample_classical, sample_quantum, SimConfig, SimResult};

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn ladder_exactness() -> Outcome {
    let cfg = DelayConfig::default();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for d in 1..=64 {
        let r = ladder_accuracies(d, 1, &cfg).map_err(|e| e.to_string())?[0];
        worst = worst.max((r - d as f64).abs() / d as f64);
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-4 && elapsed < Duration::from_secs(10),
        format!("d = 1..64, max rel. error {worst:.2e}, {}", secs(elapsed)),
    )
}

fn ladder_sequence() -> Outcome {
    let cfg = DelayConfig::default();
    let mut worst = 0.0f64;
    for d in (1..=8).chain([16, 32, 64]) {
        // ladder_accuracies reports R_j / j.
        for r in ladder_accuracies(d, 5, &cfg).map_err(|e| e.to_string())? {
            worst = worst.max((r - d as f64).abs() / d as f64);
        }
    }
    check(worst <= 1e-4, format!("j <= 5, d in 1..8,16,32,64, max rel. error {worst:.2e}"))
}

fn classical_bound() -> Outcome {
    let start = Instant::now();
    let rows = classical_sweep(6, 1000, 0, 0.5).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let max_r = rows.iter().map(|r| r.r1).fold(0.0, f64::max);
    let max_c = rows.iter().map(|r| r.r1_canonical).fold(0.0, f64::max);
    let worse = rows.iter().filter(|r| r.r1_canonical < r.r1 * (1.0 - 1e-4)).count();
    check(
        max_r <= 6.0 + 1e-3 && max_c <= 6.0 + 1e-3 && worse == 0 && elapsed < Duration::from_secs(120),
        format!(
            "1000 clocks at d = 6: max R1 {max_r:.4}, max canonical R1 {max_c:.4}, {worse} canonical below original, {}",
            secs(elapsed)
        ),
    )
}

fn exponential_base_case() -> Outcome {
    let (p, g) = (2.5, 1.75);
    let tau = DelayFunction::exponential(p, g).map_err(|e| e.to_string())?;
    let m = tau.moments().map_err(|e| e.to_string())?;
    let analytic = m.mass == g / p && m.mean == 1.0 / p && m.second_moment == 2.0 / (p * p) && m.accuracy == 1.0;
    let sampled = DelayFunction::Sampled(
        tau.to_sampled(1e-3, &DelayConfig::default())
            .map_err(|e| e.to_string())?,
    );
    let s = sampled.moments().map_err(|e| e.to_string())?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let err = rel(s.mass, g / p)
        .max(rel(s.mean, 1.0 / p))
        .max(rel(s.second_moment, 2.0 / (p * p)))
        .max(rel(s.accuracy, 1.0));
    check(
        analytic && err <= 1e-6,
        format!("analytic exact: {analytic}, sampled max rel. error {err:.2e}"),
    )
}

fn two_level_optimum() -> Outcome {
    let start = Instant::now();
    let r = optimized_r1(2, InitialState::Swp { k: 0 }, &Fig2bConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(
        r >= 3.8 && elapsed < Duration::from_secs(60),
        format!("d = 2 optimum R1 = {r:.4}, {}", secs(elapsed)),
    )
}

fn quantum_scaling() -> Outcome {
    let cfg = Fig2bConfig {
        vary_sigma: false,
        ..Fig2bConfig::default()
    };
    let ds = [8usize, 16, 32, 64];
    let mut rs = Vec::new();
    for &d in &ds {
        let state = InitialState::QuasiIdeal {
            sigma0: fig2b_sigma(d, cfg.eta),
            n0: None,
            k0: 0.0,
        };
        rs.push(optimized_r1(d, state, &cfg).map_err(|e| e.to_string())?);
    }
    let slope = loglog_slope(&ds.map(|d| d as f64), &rs);
    check(
        rs[1] >= 1.2 * 16.0 && slope > 1.3,
        format!(
            "R1 = {:.2}, {:.2}, {:.2}, {:.2} at d = 8, 16, 32, 64; slope {slope:.3}",
            rs[0], rs[1], rs[2], rs[3]
        ),
    )
}

fn property_suite() -> Outcome {
    let results = common::props::run_all();
    let failed: Vec<String> = results
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
        .collect();
    check(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} properties x {} cases", results.len(), common::props::CASES)
        } else {
            failed.join("; ")
        },
    )
}

fn mc_agrees(result: &SimResult, mean: f64, sd: f64, cdf: impl Fn(f64) -> f64) -> (bool, String) {
    let s = &result.stats[0];
    let times = result.tick_times(1);
    let ks = ks_statistic(&times, cdf);
    let crit = ks_critical_001(times.len());
    let ok = (s.mean - mean).abs() <= 3.0 * s.se_mean && (s.std_dev - sd).abs() <= 3.0 * s.se_std_dev && ks < crit;
    (
        ok,
        format!(
            "mean {:.4} (exact {mean:.4}, {:.1} SE), sd {:.4} (exact {sd:.4}, {:.1} SE), KS {ks:.4} < {crit:.4}",
            s.mean,
            (s.mean - mean).abs() / s.se_mean,
            s.std_dev,
            (s.std_dev - sd).abs() / s.se_std_dev
        ),
    )
}

fn monte_carlo() -> Outcome {
    let cfg = SimConfig::new(1, 100_000, 1e-3, 7);
    let ladder = ladder_clock(4).map_err(|e| e.to_string())?;
    let res = sample_classical(&ladder, &cfg).map_err(|e| e.to_string())?;
    let (ok_l, msg_l) = mc_agrees(&res, 4.0, 2.0, |t| erlang_cdf(4, t));

    let oc = OptimizeConfig::new(PotentialFamily::Diag { vary_sigma: false }, InitialState::Swp { k: 0 }, 400);
    let opt = match optimize_potential(2, &oc) {
        Ok(o) => o,
        Err(OptimizeError::BudgetExhausted(o)) => *o,
        Err(e) => return Err(e.to_string()),
    };
    let spec = QuantumResetClockSpec::from_time_diagonal(oc.omega, &opt.v_diag, swp_state(2, 0))
        .map_err(|e| e.to_string())?;
    let m = quantum_accuracy(&spec, &AccuracyConfig::default()).map_err(|e| e.to_string())?;
    let res = sample_quantum(&spec, &cfg).map_err(|e| e.to_string())?;
    let (ok_q, msg_q) = mc_agrees(&res, m.mean, m.std_dev, |t| 1.0 - survival(&spec, t).1);
    check(ok_l && ok_q, format!("ladder d = 4: {msg_l}; quantum d = 2: {msg_q}"))
}

fn fig2a_ordering() -> Outcome {
    let points = 101;
    let rows = fig2a(13, 1.8, points, Evolution::Free).map_err(|e| e.to_string())?;
    let mid = &rows[points / 2];
    let early = &rows[5];
    let ok = mid.swp > mid.quasi_sqrt_d && mid.quasi_sqrt_d > 0.0 && early.quasi_1p8 < early.quasi_sqrt_d;
    check(
        ok,
        format!(
            "mid-period SWP {:.3} > sqrt(d) {:.3} > 0; early sigma 1.8 {:.3} < sqrt(d) {:.3}",
            mid.swp, mid.quasi_sqrt_d, early.quasi_1p8, early.quasi_sqrt_d
        ),
    )
}

fn csv_outputs() -> Result<Vec<String>, String> {
    let sweep = sweep_csv(&classical_sweep(5, 300, 11, 0.6).map_err(|e| e.to_string())?).to_csv_string();
    let fig = fig2a_csv(&fig2a(9, 1.8, 64, Evolution::Free).map_err(|e| e.to_string())?).to_csv_string();
    let ladder = ladder_clock(3).map_err(|e| e.to_string())?;
    let res = sample_classical(&ladder, &SimConfig::new(3, 5000, 1e-3, 3)).map_err(|e| e.to_string())?;
    let mut mc = Vec::new();
    res.write_csv(&mut mc).map_err(|e| e.to_string())?;
    Ok(vec![sweep, fig, String::from_utf8(mc).map_err(|e| e.to_string())?])
}

fn determinism() -> Outcome {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?
            .install(csv_outputs)
    };
    let (one, four) = (run(1)?, run(4)?);
    let same = one == four;
    let bytes: usize = one.iter().map(String::len).sum();
    check(same, format!("sweep, fig2a and Monte-Carlo CSVs ({bytes} bytes) identical for 1 and 4 threads"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("ladder clock exactness", ladder_exactness),
        ("ladder sequence scaling", ladder_sequence),
        ("classical accuracy bound", classical_bound),
        ("exponential base case", exponential_base_case),
        ("two-level quantum optimum", two_level_optimum),
        ("quantum beats classical", quantum_scaling),
        ("property suite", property_suite),
        ("Monte-Carlo agreement", monte_carlo),
        ("time-basis spread ordering", fig2a_ordering),
        ("determinism across thread counts", determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = secs(start.elapsed());
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took}]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{took}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
