// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form moments of phase-type densities `τ(t) = s·e^{St}α`.

use nalgebra::{DMatrix, DVector, LU};

use crate::delay::{DelayConfig, DelayError, Moments};
use crate::linalg::expm;

/// Phase-type density restricted to the states that can still tick.
///
/// States from which no tick is reachable carry mass that is never
/// emitted; dropping them keeps `S` invertible.
#[derive(Debug, Clone)]
pub struct PhaseType {
    generator: DMatrix<f64>,
    exit: DVector<f64>,
    alpha: DVector<f64>,
    lu: Option<LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl PhaseType {
    /// `generator` is the no-tick generator, `exit` the tick rate out of each
    /// state and `alpha` the initial populations.
    pub fn new(generator: &DMatrix<f64>, exit: &DVector<f64>, alpha: &DVector<f64>) -> Self {
        let d = generator.nrows();
        let mut live: Vec<bool> = exit.iter().map(|r| *r > 0.0).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..d {
                if !live[i] && (0..d).any(|k| live[k] && k != i && generator[(k, i)] > 0.0) {
                    live[i] = true;
                    changed = true;
                }
            }
        }
        let idx: Vec<usize> = (0..d).filter(|&i| live[i]).collect();
        let m = idx.len();
        let generator = DMatrix::from_fn(m, m, |r, c| generator[(idx[r], idx[c])]);
        let exit = DVector::from_fn(m, |r, _| exit[idx[r]]);
        let alpha = DVector::from_fn(m, |r, _| alpha[idx[r]]);
        let lu = (m > 0).then(|| (-&generator).lu());
        Self {
            generator,
            exit,
            alpha,
            lu,
        }
    }

    /// Number of states that can still tick.
    pub fn live_states(&self) -> usize {
        self.alpha.len()
    }

    /// `∫ t^k τ(t) dt = k!·s(−S)^{−(k+1)}α`.
    pub fn raw_moment(&self, k: u32) -> f64 {
        let Some(lu) = &self.lu else { return 0.0 };
        let mut v = self.alpha.clone();
        let mut fact = 1.0;
        for j in 0..=k {
            v = lu.solve(&v).unwrap_or_else(|| DVector::from_element(v.len(), f64::INFINITY));
            if j > 0 {
                fact *= j as f64;
            }
        }
        fact * self.exit.dot(&v)
    }

    pub fn mass(&self) -> f64 {
        self.raw_moment(0)
    }

    pub fn moments(&self) -> Result<Moments, DelayError> {
        let q = self.mass();
        if q.is_nan() || q < DelayConfig::default().tol_zero {
            return Err(DelayError::ZeroMass(q));
        }
        Ok(Moments::from_raw(q, self.raw_moment(1), self.raw_moment(2)))
    }

    pub fn density(&self, t: f64) -> f64 {
        if self.alpha.is_empty() {
            return 0.0;
        }
        self.exit.dot(&(expm(&(&self.generator * t)) * &self.alpha))
    }

    /// Mass emitted after `t`: `s(−S)^{−1}e^{St}α`.
    pub fn tail_mass(&self, t: f64) -> f64 {
        let Some(lu) = &self.lu else { return 0.0 };
        let v = expm(&(&self.generator * t)) * &self.alpha;
        lu.solve(&v).map_or(f64::INFINITY, |w| self.exit.dot(&w).max(0.0))
    }

    /// First time `μ + kσ`, `k ≥ 12`, beyond which at most `tail_tol·Q` of mass remains.
    pub fn horizon(&self, m: &Moments, tail_tol: f64) -> f64 {
        let mut t = m.mean + 12.0 * m.std_dev;
        let target = tail_tol * m.mass;
        let mut step = m.std_dev;
        while self.tail_mass(t) > target {
            t += step;
            step *= 1.25;
        }
        t
    }
}
