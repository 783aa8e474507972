// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Nelder–Mead simplex minimisation with restarts.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadConfig {
    /// Initial step along each coordinate.
    pub step: Vec<f64>,
    /// Maximum number of objective evaluations over all restarts.
    pub max_evals: usize,
    /// Number of restarts from the best point after convergence.
    pub restarts: usize,
    /// Convergence when the spread of simplex values is below this.
    pub f_tol: f64,
    /// ... and the simplex diameter is below this.
    pub x_tol: f64,
    /// Seeds the orientation of restart simplices.
    pub seed: u64,
}

impl NelderMeadConfig {
    pub fn new(step: Vec<f64>, max_evals: usize) -> Self {
        Self {
            step,
            max_evals,
            restarts: 4,
            f_tol: 1e-9,
            x_tol: 1e-7,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// False if the evaluation budget ran out first.
    pub converged: bool,
}

struct Counter<F> {
    f: F,
    evals: usize,
    max: usize,
    best: (Vec<f64>, f64),
}

impl<F: FnMut(&[f64]) -> f64> Counter<F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.evals >= self.max {
            return None;
        }
        self.evals += 1;
        let v = (self.f)(x);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v < self.best.1 {
            self.best = (x.to_vec(), v);
        }
        Some(v)
    }
}

/// Minimises `f` from `x0`. Non-finite values are treated as `+∞`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(f: F, x0: &[f64], cfg: &NelderMeadConfig) -> Minimum {
    let mut c = Counter {
        f,
        evals: 0,
        max: cfg.max_evals.max(1),
        best: (x0.to_vec(), f64::INFINITY),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut converged = false;
    if let Some(f0) = c.eval(x0) {
        let (mut start, mut f_start) = (x0.to_vec(), f0);
        for round in 0..=cfg.restarts {
            let sign: Vec<f64> = if round == 0 {
                vec![1.0; x0.len()]
            } else {
                (0..x0.len())
                    .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                    .collect()
            };
            match run(&mut c, &start, f_start, &sign, cfg) {
                Some(()) => converged = true,
                None => {
                    converged = false;
                    break;
                }
            }
            start = c.best.0.clone();
            f_start = c.best.1;
        }
    }
    Minimum {
        x: c.best.0,
        value: c.best.1,
        evaluations: c.evals,
        converged,
    }
}

/// One simplex run; `None` when the budget is exhausted.
fn run<F: FnMut(&[f64]) -> f64>(
    c: &mut Counter<F>,
    x0: &[f64],
    f0: f64,
    sign: &[f64],
    cfg: &NelderMeadConfig,
) -> Option<()> {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += sign[i] * cfg.step[i];
        pts.push(p);
    }
    let mut vals = Vec::with_capacity(n + 1);
    vals.push(f0);
    for p in &pts[1..] {
        vals.push(c.eval(p)?);
    }
    let (alpha, gamma, rho, shrink) = (1.0, 2.0, 0.5, 0.5);
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let f_spread = (vals[n] - vals[0]).abs();
        let x_spread = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= cfg.f_tol * (1.0 + vals[0].abs()) && x_spread <= cfg.x_tol {
            return Some(());
        }
        if f_spread == 0.0 && vals[0].is_infinite() {
            return Some(());
        }

        let centroid: Vec<f64> = (0..n).map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&pts[n]).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = along(alpha);
        let fr = c.eval(&xr)?;
        if fr < vals[0] {
            let xe = along(gamma);
            let fe = c.eval(&xe)?;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = along(rho);
            let fc = c.eval(&xc)?;
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = c.eval(&xc)?;
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let p: Vec<f64> = pts[0].iter().zip(&pts[i]).map(|(b, x)| b + shrink * (x - b)).collect();
            vals[i] = c.eval(&p)?;
            pts[i] = p;
        }
    }
}
