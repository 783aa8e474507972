// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Derivative-free search for tick potentials maximising `R₁`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    quantum_accuracy, quantum_accuracy_exact, quasi_ideal_state, swp_state, AccuracyConfig, QuantumError, QuantumResetClockSpec,
    QuasiIdealParams, SincPotential,
};
use crate::optim::{nelder_mead, NelderMeadConfig};

/// Parameterised families of time-diagonal potentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialFamily {
    /// Wrapped `sinc^{2N}` bumps, searching `(δ, n, x₀)` and optionally `σ₀`
    /// for each listed power `N`.
    Sinc { powers: Vec<u32>, vary_sigma: bool },
    /// Free nonnegative value at each time state, optionally with `σ₀`.
    Diag { vary_sigma: bool },
}

/// Initial clock state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    QuasiIdeal { sigma0: f64, n0: Option<f64>, k0: f64 },
    Swp { k: i64 },
}

impl InitialState {
    pub fn vector(&self, d: usize) -> Result<DVector<Complex64>, QuantumError> {
        self.vector_with_sigma(d, None)
    }

    fn vector_with_sigma(&self, d: usize, sigma: Option<f64>) -> Result<DVector<Complex64>, QuantumError> {
        match *self {
            Self::QuasiIdeal { sigma0, n0, k0 } => {
                let p = QuasiIdealParams {
                    d,
                    sigma0: sigma.unwrap_or(sigma0),
                    n0: n0.unwrap_or((d as f64 - 1.0) / 2.0),
                    k0,
                    eta: 1.0,
                };
                quasi_ideal_state(&p)
            }
            Self::Swp { k } => Ok(swp_state(d, k)),
        }
    }
}

/// How the objective is evaluated during the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchAccuracy {
    /// Closed-form moments from Lyapunov equations.
    Exact,
    /// Grid quadrature of the survival probability.
    Grid(AccuracyConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub family: PotentialFamily,
    pub state: InitialState,
    /// Objective evaluations allowed per search (one search per sinc power).
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Level spacing ω; the period is `2π/ω`.
    pub omega: f64,
    pub search: SearchAccuracy,
    /// Discretisation used to report the optimum.
    pub report: AccuracyConfig,
    /// Starting point `(δ, n, x₀)` of the sinc family.
    pub sinc_start: (f64, f64, f64),
}

impl OptimizeConfig {
    pub fn new(family: PotentialFamily, state: InitialState, budget: usize) -> Self {
        Self {
            family,
            state,
            budget,
            restarts: 4,
            seed: 0,
            omega: 2.0 * PI,
            search: SearchAccuracy::Exact,
            report: AccuracyConfig::default(),
            sinc_start: (4.0, 1.0, PI),
        }
    }
}

/// Best potential found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    /// Time-basis diagonal of `V_C`.
    pub v_diag: Vec<f64>,
    /// `R₁` under the reporting discretisation.
    pub r1: f64,
    /// `R₁` seen by the search.
    pub search_r1: f64,
    /// Family coordinates: `(δ, n, x₀)` for sinc or `v_k` for diag, then `σ₀`
    /// when it is varied.
    pub params: Vec<f64>,
    pub power: Option<u32>,
    pub sigma0: Option<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("evaluation budget exhausted; best R1 so far {:.6}", .0.r1)]
    BudgetExhausted(Box<Optimum>),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

impl OptimizeError {
    /// Best point found, if the search produced one.
    pub fn best(self) -> Option<Optimum> {
        match self {
            Self::BudgetExhausted(o) => Some(*o),
            Self::Quantum(_) => None,
        }
    }
}

/// One candidate point decoded from search coordinates.
struct Candidate {
    v_diag: Vec<f64>,
    params: Vec<f64>,
    sigma0: Option<f64>,
}

fn decode(d: usize, power: Option<u32>, x: &[f64], cfg: &OptimizeConfig) -> Result<Candidate, QuantumError> {
    let base = if power.is_some() { 3 } else { d };
    let sigma0 = x.get(base).map(|s| s.exp());
    let x = &x[..base];
    match power {
        Some(n_pot) => {
            let (delta, n, x0) = (x[0].exp(), x[1].exp(), x[2]);
            let pot = SincPotential::new(d, delta, n, n_pot, x0)?;
            let scale = delta * cfg.omega;
            let mut params = vec![delta, n, x0];
            params.extend(sigma0);
            Ok(Candidate {
                v_diag: pot.diag().iter().map(|v| scale * v).collect(),
                params,
                sigma0,
            })
        }
        None => {
            let v: Vec<f64> = x.iter().map(|p| p.exp()).collect();
            let mut params = v.clone();
            params.extend(sigma0);
            Ok(Candidate {
                v_diag: v,
                params,
                sigma0,
            })
        }
    }
}

fn evaluate(d: usize, c: &Candidate, cfg: &OptimizeConfig, acc: SearchAccuracy) -> Result<f64, QuantumError> {
    let psi = cfg.state.vector_with_sigma(d, c.sigma0)?;
    let spec = QuantumResetClockSpec::from_time_diagonal(cfg.omega, &c.v_diag, psi)?;
    let m = match acc {
        SearchAccuracy::Exact => quantum_accuracy_exact(&spec)?,
        SearchAccuracy::Grid(g) => quantum_accuracy(&spec, &g)?,
    };
    Ok(m.accuracy)
}

/// Maximises `R₁` over the family by Nelder–Mead on log-transformed
/// positive coordinates. Deterministic for a given configuration. When the
/// budget runs out before the simplex converges, the best point so far is
/// returned inside [`OptimizeError::BudgetExhausted`].
pub fn optimize_potential(d: usize, cfg: &OptimizeConfig) -> Result<Optimum, OptimizeError> {
    if d == 0 {
        return Err(QuantumError::Invalid("dimension must be at least 1".into()).into());
    }
    let (powers, mut x0, mut step, vary_sigma): (Vec<Option<u32>>, Vec<f64>, Vec<f64>, bool) = match &cfg.family {
        PotentialFamily::Sinc { powers, vary_sigma } => {
            if powers.is_empty() || powers.contains(&0) {
                return Err(QuantumError::Invalid("sinc family needs powers N ≥ 1".into()).into());
            }
            let (delta, n, x0) = cfg.sinc_start;
            let start = vec![delta.ln(), n.ln(), x0];
            (powers.iter().map(|p| Some(*p)).collect(), start, vec![0.5; 3], *vary_sigma)
        }
        PotentialFamily::Diag { vary_sigma } => {
            // Start from the default sinc bump sampled on the time grid.
            let (delta, n, x0) = cfg.sinc_start;
            let start = SincPotential::new(d, delta, n, 1, x0)
                .map(|p| p.diag().iter().map(|v| (delta * cfg.omega * v).max(1e-6).ln()).collect())
                .unwrap_or_else(|_| vec![0.0; d]);
            (vec![None], start, vec![1.0; d], *vary_sigma)
        }
    };
    if vary_sigma {
        let InitialState::QuasiIdeal { sigma0, .. } = cfg.state else {
            return Err(QuantumError::Invalid("varying sigma0 needs a Quasi-Ideal state".into()).into());
        };
        x0.push(sigma0.ln());
        step.push(0.2);
    }

    let runs: Vec<(Option<u32>, crate::optim::Minimum)> = powers
        .par_iter()
        .map(|&power| {
            let objective = |x: &[f64]| -> f64 {
                decode(d, power, x, cfg)
                    .and_then(|c| evaluate(d, &c, cfg, cfg.search))
                    .map_or(f64::INFINITY, |r| if r.is_finite() { -r } else { f64::INFINITY })
            };
            let mut nm = NelderMeadConfig::new(step.clone(), cfg.budget);
            nm.restarts = cfg.restarts;
            nm.seed = cfg.seed;
            (power, nelder_mead(objective, &x0, &nm))
        })
        .collect();

    // Ties go to the earliest power in the list.
    let (power, best) = runs
        .iter()
        .fold(None::<&(Option<u32>, crate::optim::Minimum)>, |acc, r| match acc {
            Some(a) if a.1.value <= r.1.value => Some(a),
            _ => Some(r),
        })
        .expect("at least one run");
    let evaluations = runs.iter().map(|r| r.1.evaluations).sum();
    let converged = runs.iter().all(|r| r.1.converged);

    let cand = decode(d, *power, &best.x, cfg)?;
    let r1 = evaluate(d, &cand, cfg, SearchAccuracy::Grid(cfg.report))?;
    let optimum = Optimum {
        v_diag: cand.v_diag,
        r1,
        search_r1: -best.value,
        params: cand.params,
        power: *power,
        sigma0: cand.sigma0,
        evaluations,
    };
    if converged {
        Ok(optimum)
    } else {
        Err(OptimizeError::BudgetExhausted(Box::new(optimum)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_of_one_returns_the_start() {
        let cfg = OptimizeConfig::new(
            PotentialFamily::Sinc {
                powers: vec![2],
                vary_sigma: false,
            },
            InitialState::QuasiIdeal {
                sigma0: 1.5,
                n0: None,
                k0: 0.0,
            },
            1,
        );
        let o = optimize_potential(6, &cfg).unwrap_err().best().unwrap();
        assert_eq!(o.evaluations, 1);
        let (delta, n, x0) = cfg.sinc_start;
        assert!((o.params[0] - delta).abs() < 1e-12);
        assert!((o.params[1] - n).abs() < 1e-12);
        assert_eq!(o.params[2], x0);
    }

    #[test]
    fn two_level_clock_reaches_four() {
        let cfg = OptimizeConfig::new(PotentialFamily::Diag { vary_sigma: false }, InitialState::Swp { k: 0 }, 400);
        let o = optimize_potential(2, &cfg).or_else(|e| e.best().ok_or(())).unwrap();
        assert!(o.r1 >= 3.8, "R1 = {}", o.r1);
    }
}
