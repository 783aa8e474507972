// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Monte-Carlo sampling of tick times.
//!
//! Time is discretised into steps of length `dt`. A tick that happens
//! during step `[k·dt, (k+1)·dt)` is reported at the midpoint of the step.
//! Every trial draws from its own ChaCha8 stream (`seed`, stream = trial
//! index), and moments are merged in fixed chunks of trials, so results do
//! not depend on the number of worker threads.

mod stats;

pub use stats::{ks_critical_001, ks_statistic, MomentAccumulator, TickStats};

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::ClassicalClock;
use crate::linalg::{dagger, expm};
use crate::numfmt::fmt12;
use crate::quantum::QuantumResetClockSpec;

/// Trials per merge chunk.
pub const CHUNK: usize = 1024;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation: {0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Ticks recorded per trial.
    pub ticks: usize,
    pub trials: usize,
    pub dt: f64,
    pub seed: u64,
    /// Steps after the last tick (or the start) before a trial is
    /// abandoned as truncated.
    pub max_steps: u64,
}

impl SimConfig {
    pub fn new(ticks: usize, trials: usize, dt: f64, seed: u64) -> Self {
        Self {
            ticks,
            trials,
            dt,
            seed,
            max_steps: 50_000_000,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.ticks == 0 {
            return Err(SimError::Invalid("at least one tick must be recorded".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimError::Invalid(format!("dt = {}", self.dt)));
        }
        Ok(())
    }
}

/// Tick times of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickSample {
    /// Strictly increasing times of the first ticks.
    pub tick_times: Vec<f64>,
    /// Set when the trial stopped before recording every tick.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub samples: Vec<TickSample>,
    /// One entry per tick index, from the trials that reached it.
    pub stats: Vec<TickStats>,
}

/// Serialisable summary without the raw samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub config: SimConfig,
    pub truncated: usize,
    pub stats: Vec<TickStats>,
}

impl SimResult {
    pub fn summary(&self) -> SimSummary {
        SimSummary {
            config: self.config,
            truncated: self.samples.iter().filter(|s| s.truncated).count(),
            stats: self.stats.clone(),
        }
    }

    /// Times of tick `j` (1-based) over the trials that reached it.
    pub fn tick_times(&self, j: usize) -> Vec<f64> {
        self.samples
            .iter()
            .filter_map(|s| s.tick_times.get(j.wrapping_sub(1)).copied())
            .collect()
    }

    /// CSV with columns `trial,tick_index,time`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SimError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["trial", "tick_index", "time"])?;
        for (trial, s) in self.samples.iter().enumerate() {
            for (j, t) in s.tick_times.iter().enumerate() {
                out.write_record([trial.to_string(), (j + 1).to_string(), fmt12(*t)])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_summary_json<W: Write>(&self, w: W) -> Result<(), SimError> {
        serde_json::to_writer_pretty(w, &self.summary())?;
        Ok(())
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Runs `trial` for every index in parallel chunks and merges in order.
fn run_trials<F>(cfg: &SimConfig, trial: F) -> SimResult
where
    F: Fn(&mut ChaCha8Rng) -> TickSample + Sync,
{
    let chunks: Vec<(Vec<TickSample>, Vec<MomentAccumulator>)> = (0..cfg.trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let range = c * CHUNK..((c + 1) * CHUNK).min(cfg.trials);
            let mut acc = vec![MomentAccumulator::new(); cfg.ticks];
            let samples: Vec<TickSample> = range
                .map(|i| {
                    let s = trial(&mut trial_rng(cfg.seed, i));
                    for (a, t) in acc.iter_mut().zip(&s.tick_times) {
                        a.push(*t);
                    }
                    s
                })
                .collect();
            (samples, acc)
        })
        .collect();
    let mut acc = vec![MomentAccumulator::new(); cfg.ticks];
    let mut samples = Vec::with_capacity(cfg.trials);
    for (s, a) in chunks {
        samples.extend(s);
        for (total, part) in acc.iter_mut().zip(&a) {
            *total = total.merged(part);
        }
    }
    SimResult {
        config: *cfg,
        samples,
        stats: acc.iter().enumerate().map(|(j, a)| a.stats(j + 1)).collect(),
    }
}

/// Uniform on `(0, 1]`.
fn unit_open0(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Picks an index with probability proportional to `weights`.
fn pick(weights: &[f64], rng: &mut ChaCha8Rng) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return Some(i);
        }
        u -= w;
    }
    weights.iter().rposition(|w| *w > 0.0)
}

/// Samples the hidden state of a classical clock step by step. In state `i`
/// an event happens during a step with probability `dt·(−N_ii)`; it is a
/// tick into `j` with weight `T_ji`, a silent move into `j ≠ i` with weight
/// `N_ji`, and absorption with the remaining weight of a leaky clock.
pub fn sample_classical(clock: &ClassicalClock, cfg: &SimConfig) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let (n, t) = (clock.generators().no_tick(), clock.generators().tick());
    let d = clock.dim();
    let max_rate = (0..d).map(|i| -n[(i, i)]).fold(0.0, f64::max);
    if cfg.dt * max_rate >= 1.0 {
        return Err(SimError::Invalid(format!(
            "dt = {} too large for exit rate {max_rate}",
            cfg.dt
        )));
    }
    // Per state: event probability per step, then weights over
    // [silent 0..d, tick 0..d, absorb].
    let table: Vec<(f64, Vec<f64>)> = (0..d)
        .map(|i| {
            let rate = -n[(i, i)];
            let mut w: Vec<f64> = (0..d).map(|j| if j == i { 0.0 } else { n[(j, i)].max(0.0) }).collect();
            w.extend((0..d).map(|j| t[(j, i)].max(0.0)));
            let out: f64 = w.iter().sum();
            w.push((rate - out).max(0.0));
            (cfg.dt * rate, w)
        })
        .collect();
    let initial: Vec<f64> = clock.initial().as_vector().iter().copied().collect();

    Ok(run_trials(cfg, |rng| {
        let mut times = Vec::with_capacity(cfg.ticks);
        let Some(mut state) = pick(&initial, rng) else {
            return TickSample {
                tick_times: times,
                truncated: true,
            };
        };
        let (mut step, mut since_tick) = (0u64, 0u64);
        while times.len() < cfg.ticks {
            let (p, w) = &table[state];
            if *p <= 0.0 {
                break;
            }
            let k = if *p >= 1.0 {
                1
            } else {
                (unit_open0(rng).ln() / (-p).ln_1p()).ceil().max(1.0) as u64
            };
            step += k;
            since_tick += k;
            if since_tick > cfg.max_steps {
                break;
            }
            match pick(w, rng) {
                Some(j) if j < d => state = j,
                Some(j) if j < 2 * d => {
                    state = j - d;
                    since_tick = 0;
                    times.push((step as f64 - 0.5) * cfg.dt);
                }
                _ => break,
            }
        }
        TickSample {
            truncated: times.len() < cfg.ticks,
            tick_times: times,
        }
    }))
}

/// Samples a quantum reset clock with the no-tick map
/// `ψ ↦ e^{−i·dt·H_C} √(1 − 2dt·V_C) ψ` (renormalised) and tick probability
/// `2dt⟨ψ|V_C|ψ⟩` per step; after a tick the state is reset to `ψ₀`.
///
/// Between ticks the conditional state is deterministic, so the per-step
/// tick probabilities after a reset are computed once and tick times are
/// drawn from the resulting discrete distribution.
pub fn sample_quantum(spec: &QuantumResetClockSpec, cfg: &SimConfig) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let survival = reset_survival(spec, cfg)?;
    let complete = *survival.last().unwrap_or(&1.0) <= 1e-15;
    Ok(run_trials(cfg, |rng| {
        let mut times = Vec::with_capacity(cfg.ticks);
        let mut elapsed = 0u64;
        while times.len() < cfg.ticks {
            let u = unit_open0(rng);
            // First step whose cumulative survival drops below u.
            let k = survival.partition_point(|s| *s >= u);
            if k == survival.len() {
                if complete {
                    // Residual mass below the cutoff: put it in the last step.
                    elapsed += k as u64;
                    times.push((elapsed as f64 - 0.5) * cfg.dt);
                    continue;
                }
                break;
            }
            elapsed += k as u64 + 1;
            times.push((elapsed as f64 - 0.5) * cfg.dt);
        }
        TickSample {
            truncated: times.len() < cfg.ticks,
            tick_times: times,
        }
    }))
}

/// `S_k = Π_{i ≤ k}(1 − h_i)` after a reset, until `S_k ≤ 1e-15` or the
/// step limit.
fn reset_survival(spec: &QuantumResetClockSpec, cfg: &SimConfig) -> Result<Vec<f64>, SimError> {
    let dt = cfg.dt;
    let v = spec.v_c();
    let eig = v.clone().symmetric_eigen();
    let v_max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    if 2.0 * dt * v_max >= 1.0 {
        return Err(SimError::Invalid(format!("need 2·dt·max(V) < 1, got {}", 2.0 * dt * v_max)));
    }
    let sqrt_diag = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|l| Complex64::new((1.0 - 2.0 * dt * l.max(0.0)).sqrt(), 0.0)),
    );
    let m0 = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_diag) * dagger(&eig.eigenvectors);
    let free = expm(&(spec.h_c() * Complex64::new(0.0, -dt)));
    let step = free * m0;
    let mut psi = spec.psi0().clone();
    let mut survival = Vec::new();
    let mut s = 1.0;
    while s > 1e-15 && (survival.len() as u64) < cfg.max_steps {
        let h = (2.0 * dt * psi.dotc(&(v * &psi)).re).clamp(0.0, 1.0);
        s *= 1.0 - h;
        survival.push(s);
        psi = &step * psi;
        let norm = psi.norm();
        if norm == 0.0 {
            break;
        }
        psi.unscale_mut(norm);
    }
    Ok(survival)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::ladder_clock;
    use crate::delay::erlang_cdf;
    use std::f64::consts::PI;

    #[test]
    fn ladder_mean_within_three_se() {
        let clock = ladder_clock(4).unwrap();
        let r = sample_classical(&clock, &SimConfig::new(2, 20_000, 1e-3, 7)).unwrap();
        let s = &r.stats[0];
        assert!((s.mean - 4.0).abs() <= 3.0 * s.se_mean, "{s:?}");
        assert!((s.accuracy - 4.0).abs() <= 5.0 * s.se_accuracy, "{s:?}");
        let s2 = &r.stats[1];
        assert!((s2.mean - 8.0).abs() <= 3.0 * s2.se_mean, "{s2:?}");
        let ks = ks_statistic(&r.tick_times(1), |t| erlang_cdf(4, t));
        assert!(ks < ks_critical_001(20_000), "ks = {ks}");
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let clock = ladder_clock(3).unwrap();
        let cfg = SimConfig::new(3, 3000, 1e-3, 42);
        let a = sample_classical(&clock, &cfg).unwrap();
        let b = sample_classical(&clock, &cfg).unwrap();
        assert_eq!(a, b);
        let other = sample_classical(&clock, &SimConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.samples, other.samples);
    }

    #[test]
    fn times_are_increasing() {
        let clock = crate::classical::random_clock(4, 3, 0.8).unwrap();
        let r = sample_classical(&clock, &SimConfig::new(4, 500, 1e-3, 1)).unwrap();
        for s in &r.samples {
            assert!(s.tick_times.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn scalar_quantum_clock_is_exponential() {
        let v = 0.8;
        let spec = QuantumResetClockSpec::from_time_diagonal(2.0 * PI, &[v], DVector::from_element(1, Complex64::new(1.0, 0.0)))
            .unwrap();
        let r = sample_quantum(&spec, &SimConfig::new(3, 20_000, 1e-3, 5)).unwrap();
        let s = &r.stats[0];
        assert!((s.mean - 1.0 / (2.0 * v)).abs() <= 3.0 * s.se_mean, "{s:?}");
        assert!((s.accuracy - 1.0).abs() <= 5.0 * s.se_accuracy, "{s:?}");
        // Reset structure: the j-th mean is j times the first.
        for s in &r.stats {
            assert!((s.mean - s.tick as f64 / (2.0 * v)).abs() <= 3.0 * s.se_mean, "{s:?}");
        }
        let ks = ks_statistic(&r.tick_times(1), |t| 1.0 - (-2.0 * v * t).exp());
        assert!(ks < ks_critical_001(20_000));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let clock = ladder_clock(2).unwrap();
        let r = sample_classical(&clock, &SimConfig::new(2, 3, 1e-3, 0)).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("trial,tick_index,time\n"));
        assert_eq!(text.lines().count(), 1 + 6);
    }

    #[test]
    fn rejects_large_step() {
        let clock = ladder_clock(2).unwrap();
        assert!(sample_classical(&clock, &SimConfig::new(1, 10, 2.0, 0)).is_err());
    }
}
