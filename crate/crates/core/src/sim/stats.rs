// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Mergeable sample moments and goodness-of-fit.

use serde::{Deserialize, Serialize};

/// Running central moments up to fourth order, mergeable across chunks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn push(&mut self, x: f64) {
        let one = Self {
            n: 1,
            mean: x,
            ..Self::default()
        };
        *self = self.merged(&one);
    }

    /// Combines two disjoint samples.
    pub fn merged(&self, other: &Self) -> Self {
        if other.n == 0 {
            return *self;
        }
        if self.n == 0 {
            return *other;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d_n = delta / n;
        let mean = self.mean + nb * d_n;
        let m2 = self.m2 + other.m2 + delta * d_n * na * nb;
        let m3 = self.m3 + other.m3 + delta * d_n * d_n * na * nb * (na - nb)
            + 3.0 * d_n * (na * other.m2 - nb * self.m2);
        let m4 = self.m4
            + other.m4
            + delta * d_n.powi(3) * na * nb * (na * na - na * nb + nb * nb)
            + 6.0 * d_n * d_n * (na * na * other.m2 + nb * nb * self.m2)
            + 4.0 * d_n * (na * other.m3 - nb * self.m3);
        Self {
            n: self.n + other.n,
            mean,
            m2,
            m3,
            m4,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        self.m2 / (self.n as f64 - 1.0)
    }

    pub fn stats(&self, tick: usize) -> TickStats {
        let n = self.n as f64;
        let var = self.variance();
        let sd = var.sqrt();
        let (c3, c4) = (self.m3 / n, self.m4 / n);
        let var_mean = var / n;
        let var_var = ((c4 - var * var) / n).max(0.0);
        let cov = c3 / n;
        let r = self.mean * self.mean / var;
        let (dr_dm, dr_dv) = (2.0 * self.mean / var, -r / var);
        let var_r = dr_dm * dr_dm * var_mean + dr_dv * dr_dv * var_var + 2.0 * dr_dm * dr_dv * cov;
        TickStats {
            tick,
            count: self.n,
            mean: self.mean,
            std_dev: sd,
            accuracy: r,
            se_mean: var_mean.sqrt(),
            se_std_dev: var_var.sqrt() / (2.0 * sd),
            se_accuracy: var_r.max(0.0).sqrt(),
        }
    }
}

/// Empirical moments of one tick time with delta-method standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TickStats {
    /// 1-based tick index.
    pub tick: usize,
    pub count: u64,
    pub mean: f64,
    pub std_dev: f64,
    pub accuracy: f64,
    pub se_mean: f64,
    pub se_std_dev: f64,
    pub se_accuracy: f64,
}

/// Kolmogorov–Smirnov statistic `sup |F_n − F|`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic one-sample KS critical value at `α = 0.01`.
pub fn ks_critical_001(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}
