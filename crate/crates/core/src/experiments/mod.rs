// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Batch experiments producing accuracy tables and traces.

mod svg;
mod table;

pub use svg::line_chart_svg;
pub use table::Table;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::{canonicalize_to_reset, ladder_clock, random_clock, ClassicalError, TimeGrid};
use crate::delay::{DelayConfig, DelayError};
use crate::numfmt::fmt12;
use crate::quantum::{
    optimize_potential, quantum_accuracy, quasi_ideal_state, swp_state, time_basis_spread, AccuracyConfig, Evolution,
    InitialState, OptimizeConfig, OptimizeError, PotentialFamily, QuantumError, QuantumResetClockSpec,
    QuantumSpecJson, QuasiIdealParams,
};
use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Delay(#[from] DelayError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn nonempty<T>(xs: &[T], what: &str) -> Result<(), ExperimentError> {
    if xs.is_empty() {
        return Err(ExperimentError::Invalid(format!("{what} must not be empty")));
    }
    Ok(())
}

/// `R_j/j` for the first three ticks of a Ladder Clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub d: usize,
    /// `R_j / j` for `j = 1..=m`.
    pub per_tick: [f64; 3],
}

/// Accuracies `R_j/j`, `j = 1..=m`, of the Ladder Clock from grid quadrature
/// of the tick-sequence delays.
pub fn ladder_accuracies(d: usize, m: usize, cfg: &DelayConfig) -> Result<Vec<f64>, ExperimentError> {
    let clock = ladder_clock(d)?;
    let pts = clock.sequence_phase_types(m)?;
    let first = pts[0].moments()?;
    let last = &pts[m - 1];
    let t_max = last.horizon(&last.moments()?, cfg.tail_tol);
    let grid = TimeGrid::new(first.std_dev / cfg.points_per_sigma, t_max)?;
    clock
        .tick_sequence_delays_with(m, &grid, cfg)?
        .iter()
        .enumerate()
        .map(|(j, tau)| Ok(tau.moments()?.accuracy / (j + 1) as f64))
        .collect()
}

pub fn ladder_table(ds: &[usize], cfg: &DelayConfig) -> Result<Vec<LadderRow>, ExperimentError> {
    nonempty(ds, "d range")?;
    ds.par_iter()
        .map(|&d| {
            let r = ladder_accuracies(d, 3, cfg)?;
            Ok(LadderRow {
                d,
                per_tick: [r[0], r[1], r[2]],
            })
        })
        .collect()
}

pub fn ladder_csv(rows: &[LadderRow]) -> Table {
    let mut t = Table::new(["d", "R1", "R2_over_2", "R3_over_3"]);
    for r in rows {
        t.push([r.d.to_string(), fmt12(r.per_tick[0]), fmt12(r.per_tick[1]), fmt12(r.per_tick[2])]);
    }
    t
}

/// Largest relative deviation of any ladder column from `d`.
pub fn ladder_max_deviation(rows: &[LadderRow]) -> f64 {
    rows.iter()
        .flat_map(|r| r.per_tick.iter().map(move |x| (x - r.d as f64).abs() / r.d as f64))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sample: usize,
    pub seed: u64,
    pub r1: f64,
    pub r1_canonical: f64,
}

/// Random clocks of dimension `d`; clock `i` uses seed `seed + i`.
pub fn classical_sweep(d: usize, samples: usize, seed: u64, density: f64) -> Result<Vec<SweepRow>, ExperimentError> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i as u64);
            let clock = random_clock(d, s, density)?;
            let canon = canonicalize_to_reset(&clock)?;
            Ok(SweepRow {
                sample: i,
                seed: s,
                r1: clock.exact_moments()?.accuracy,
                r1_canonical: canon.exact_moments()?.accuracy,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(["sample", "seed", "R1", "R1_canonical"]);
    for r in rows {
        t.push([r.sample.to_string(), r.seed.to_string(), fmt12(r.r1), fmt12(r.r1_canonical)]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumRow {
    pub d: usize,
    pub sigma0: f64,
    pub eta: f64,
    pub r1: f64,
    pub mu: f64,
    pub sigma: f64,
    pub runtime_ms: f64,
}

/// `R₁` of Quasi-Ideal clocks with the derived sinc potential.
pub fn quantum_r_sweep(
    ds: &[usize],
    sigmas: &[f64],
    eta: f64,
    acc: &AccuracyConfig,
) -> Result<Vec<QuantumRow>, ExperimentError> {
    nonempty(ds, "d range")?;
    nonempty(sigmas, "sigma0 list")?;
    let grid: Vec<(usize, f64)> = ds.iter().flat_map(|&d| sigmas.iter().map(move |&s| (d, s))).collect();
    grid.par_iter()
        .map(|&(d, sigma0)| {
            let start = Instant::now();
            let spec = QuantumSpecJson::quasi_ideal(d, sigma0, eta).build()?;
            let m = quantum_accuracy(&spec, acc)?;
            Ok(QuantumRow {
                d,
                sigma0,
                eta,
                r1: m.accuracy,
                mu: m.mean,
                sigma: m.std_dev,
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect()
}

/// Columns `d,sigma0,eta,R1,mu,sigma,runtime_ms`; runtimes are left empty
/// unless `timing` is set, so that reruns are byte-identical.
pub fn quantum_csv(rows: &[QuantumRow], timing: bool) -> Table {
    let mut t = Table::new(["d", "sigma0", "eta", "R1", "mu", "sigma", "runtime_ms"]);
    for r in rows {
        t.push([
            r.d.to_string(),
            fmt12(r.sigma0),
            fmt12(r.eta),
            fmt12(r.r1),
            fmt12(r.mu),
            fmt12(r.sigma),
            if timing { format!("{:.3}", r.runtime_ms) } else { String::new() },
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig2aRow {
    pub t: f64,
    pub quasi_sqrt_d: f64,
    pub quasi_1p8: f64,
    pub swp: f64,
}

/// `ΔC(t)` over one period for Quasi-Ideal states with `σ₀ = √d` and
/// `σ₀ = sigma_small`, and for the time state `|θ₀⟩`.
pub fn fig2a(d: usize, sigma_small: f64, points: usize, evolution: Evolution) -> Result<Vec<Fig2aRow>, ExperimentError> {
    if points < 2 {
        return Err(ExperimentError::Invalid("fig2a needs at least two time points".into()));
    }
    let omega = 2.0 * std::f64::consts::PI;
    let zero = vec![0.0; d];
    let spec_for = |psi| QuantumResetClockSpec::from_time_diagonal(omega, &zero, psi);
    let specs = [
        spec_for(quasi_ideal_state(&QuasiIdealParams::new(d, (d as f64).sqrt(), 1.0)?)?)?,
        spec_for(quasi_ideal_state(&QuasiIdealParams::new(d, sigma_small, 1.0)?)?)?,
        spec_for(swp_state(d, 0))?,
    ];
    let period = specs[0].period();
    Ok((0..points)
        .into_par_iter()
        .map(|i| {
            let t = period * i as f64 / (points - 1) as f64;
            let dc = |s: &QuantumResetClockSpec| time_basis_spread(s, t, evolution).delta_c;
            Fig2aRow {
                t,
                quasi_sqrt_d: dc(&specs[0]),
                quasi_1p8: dc(&specs[1]),
                swp: dc(&specs[2]),
            }
        })
        .collect())
}

pub fn fig2a_csv(rows: &[Fig2aRow]) -> Table {
    let mut t = Table::new(["t", "DeltaC_quasi_sqrt_d", "DeltaC_quasi_1p8", "DeltaC_swp"]);
    for r in rows {
        t.push([fmt12(r.t), fmt12(r.quasi_sqrt_d), fmt12(r.quasi_1p8), fmt12(r.swp)]);
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2bConfig {
    /// Quasi-Ideal width `σ₀ = d^{η/2}`.
    pub eta: f64,
    /// Evaluations per search.
    pub budget: usize,
    pub seed: u64,
    /// Sinc powers searched for larger dimensions.
    pub powers: Vec<u32>,
    /// Up to this dimension the potential is optimised freely on the time
    /// grid instead of within the sinc family.
    pub free_max_d: usize,
    /// Optimise the Quasi-Ideal width jointly with the potential, starting
    /// from `d^{η/2}`.
    pub vary_sigma: bool,
}

impl Default for Fig2bConfig {
    fn default() -> Self {
        Self {
            eta: 0.25,
            budget: 150,
            seed: 0,
            powers: vec![1, 2, 4],
            free_max_d: 4,
            vary_sigma: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig2bRow {
    pub d: usize,
    pub r1_quasi_ideal: f64,
    pub r1_swp: f64,
}

/// Best `R₁` found for an initial state, accepting budget-limited searches.
pub fn optimized_r1(d: usize, state: InitialState, cfg: &Fig2bConfig) -> Result<f64, ExperimentError> {
    let vary_sigma = cfg.vary_sigma && matches!(state, InitialState::QuasiIdeal { .. });
    let family = if d <= cfg.free_max_d {
        PotentialFamily::Diag { vary_sigma }
    } else {
        PotentialFamily::Sinc {
            powers: cfg.powers.clone(),
            vary_sigma,
        }
    };
    let budget = if d <= cfg.free_max_d { cfg.budget.max(100 * d) } else { cfg.budget };
    let mut oc = OptimizeConfig::new(family, state, budget);
    oc.seed = cfg.seed;
    match optimize_potential(d, &oc) {
        Ok(o) => Ok(o.r1),
        Err(OptimizeError::BudgetExhausted(o)) => Ok(o.r1),
        Err(e) => Err(e.into()),
    }
}

/// Quasi-Ideal state width used in [`fig2b`].
pub fn fig2b_sigma(d: usize, eta: f64) -> f64 {
    (d as f64).powf(eta / 2.0)
}

pub fn fig2b(ds: &[usize], cfg: &Fig2bConfig) -> Result<Vec<Fig2bRow>, ExperimentError> {
    nonempty(ds, "d range")?;
    let mut ds = ds.to_vec();
    ds.sort_unstable();
    ds.dedup();
    if ds[0] < 2 {
        return Err(ExperimentError::Invalid("Quasi-Ideal states need d ≥ 2".into()));
    }
    ds.par_iter()
        .map(|&d| {
            let quasi = InitialState::QuasiIdeal {
                sigma0: fig2b_sigma(d, cfg.eta),
                n0: None,
                k0: 0.0,
            };
            Ok(Fig2bRow {
                d,
                r1_quasi_ideal: optimized_r1(d, quasi, cfg)?,
                r1_swp: optimized_r1(d, InitialState::Swp { k: 0 }, cfg)?,
            })
        })
        .collect()
}

pub fn fig2b_csv(rows: &[Fig2bRow]) -> Table {
    let mut t = Table::new(["d", "R1_quasi_ideal", "R1_swp", "guide_d", "guide_d2"]);
    for r in rows {
        let d = r.d as f64;
        t.push([r.d.to_string(), fmt12(r.r1_quasi_ideal), fmt12(r.r1_swp), fmt12(d), fmt12(d * d)]);
    }
    t
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
