// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Delay functions: (sub-)normalised densities of the waiting time until a
//! tick, their moments and accuracy `R = μ²/σ²`, and the algebra that
//! combines them (sequencing by convolution, mixing, rescaling time).
//!
//! Analytic kinds are kept in closed form as long as an operation allows it;
//! everything else is carried on a uniform grid as a [`SampledDelay`].

mod algebra;
mod io;

pub use algebra::{convolve, convolve_with, mix, mix_with, partial_norm, rescale};
pub use io::{read_csv, write_csv};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::gregory;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DelayError {
    #[error("delay function has zero mass (Q = {0:e}); moments are undefined")]
    ZeroMass(f64),
    #[error("combined support needs {needed} grid points, limit is {limit}")]
    GridOverflow { needed: usize, limit: usize },
    #[error("mixture mass {0} exceeds 1")]
    NormExceeded(f64),
    #[error("invalid delay function: {0}")]
    Invalid(String),
    #[error("empty list of delay functions")]
    Empty,
    #[error("csv: {0}")]
    Csv(String),
}

/// Numerical tolerances shared by the delay-function algebra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayConfig {
    /// Slack on the zeroth moment `Q ≤ 1`.
    pub tol_norm: f64,
    /// Relative tolerance on moment identities.
    pub tol_mom: f64,
    /// Relative tolerance on the accuracy inequalities.
    pub tol_prop: f64,
    /// Below this mass, moments are undefined.
    pub tol_zero: f64,
    /// Relative mass allowed beyond the horizon when sampling analytic kinds.
    pub tail_tol: f64,
    /// Grid resolution used for analytic kinds without an explicit step.
    pub points_per_sigma: f64,
    /// Upper bound on the number of grid points of any sampled result.
    pub max_points: usize,
    /// Truncate (setting the tail flag) instead of failing on overflow.
    pub allow_truncation: bool,
}

impl Default for DelayConfig {
    fn default() -> Self {
        Self {
            tol_norm: 1e-6,
            tol_mom: 1e-6,
            tol_prop: 1e-4,
            tol_zero: 1e-14,
            tail_tol: 1e-12,
            points_per_sigma: 400.0,
            max_points: 20_000_000,
            allow_truncation: false,
        }
    }
}

/// A density sampled at `t_i = i·dt`, `i = 0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledDelay {
    dt: f64,
    values: Vec<f64>,
    /// Set when mass beyond the last grid point was dropped.
    tail_flag: bool,
}

impl SampledDelay {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self, DelayError> {
        Self::with_tail_flag(dt, values, false)
    }

    pub fn with_tail_flag(dt: f64, values: Vec<f64>, tail_flag: bool) -> Result<Self, DelayError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DelayError::Invalid(format!("grid step {dt}")));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(DelayError::Invalid(format!("density[{i}] = {v}")));
        }
        let s = Self {
            dt,
            values,
            tail_flag,
        };
        let q = s.mass();
        if q > 1.0 + DelayConfig::default().tol_norm {
            return Err(DelayError::Invalid(format!("mass {q} exceeds 1")));
        }
        Ok(s)
    }

    // Internal constructor for results of the algebra; inputs are already valid.
    pub(crate) fn raw(dt: f64, values: Vec<f64>, tail_flag: bool) -> Self {
        Self {
            dt,
            values,
            tail_flag,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail_flag(&self) -> bool {
        self.tail_flag
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time of the last grid point.
    pub fn horizon(&self) -> f64 {
        self.values.len().saturating_sub(1) as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| i as f64 * self.dt)
    }

    /// Linear interpolation; zero outside the grid.
    pub fn value_at(&self, t: f64) -> f64 {
        if t < 0.0 || self.values.is_empty() || t > self.horizon() {
            return 0.0;
        }
        let x = t / self.dt;
        let i = x.floor() as usize;
        if i + 1 >= self.values.len() {
            return self.values[self.values.len() - 1];
        }
        let f = x - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    fn weighted_integral(&self, power: i32) -> f64 {
        let v: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * (i as f64 * self.dt).powi(power))
            .collect();
        gregory(&v, self.dt)
    }

    pub fn mass(&self) -> f64 {
        gregory(&self.values, self.dt)
    }

    /// Same density on a grid of step `dt` by linear interpolation.
    pub fn resample(&self, dt: f64) -> SampledDelay {
        if ((dt - self.dt) / self.dt).abs() < 1e-12 {
            return self.clone();
        }
        let n = (self.horizon() / dt).floor() as usize + 1;
        let values = (0..n).map(|i| self.value_at(i as f64 * dt)).collect();
        SampledDelay::raw(dt, values, self.tail_flag)
    }
}

/// A (sub-)normalised tick-time density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DelayFunction {
    /// `g·e^{−p t}`; mass `g/p`.
    Exponential { rate: f64, amplitude: f64 },
    /// `w·λ^k t^{k−1} e^{−λt}/(k−1)!`; mass `w`.
    Erlang { shape: u32, rate: f64, mass: f64 },
    Sampled(SampledDelay),
}

/// Zeroth moment, normalised first and second moments, and derived
/// accuracy figures of a delay function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    /// Q: probability that the tick happens at all.
    pub mass: f64,
    /// μ
    pub mean: f64,
    /// χ, second moment of the normalised density.
    pub second_moment: f64,
    /// σ = √(χ − μ²)
    pub std_dev: f64,
    /// R = μ²/σ², zero when the mean diverges.
    pub accuracy: f64,
    /// γ = χ/μ², so that R = 1/(γ − 1).
    pub gamma: f64,
}

impl Moments {
    /// Builds moments from the raw integrals ∫τ, ∫tτ, ∫t²τ.
    pub fn from_raw(mass: f64, first: f64, second: f64) -> Self {
        let mean = first / mass;
        let chi = second / mass;
        Self::from_normalised(mass, mean, chi)
    }

    /// Closed-form moments of an Erlang density of shape `k`.
    fn erlang(mass: f64, k: f64, rate: f64) -> Self {
        Self {
            mass,
            mean: k / rate,
            second_moment: k * (k + 1.0) / (rate * rate),
            std_dev: k.sqrt() / rate,
            accuracy: k,
            gamma: (k + 1.0) / k,
        }
    }

    pub fn from_normalised(mass: f64, mean: f64, second_moment: f64) -> Self {
        let var = (second_moment - mean * mean).max(0.0);
        let std_dev = var.sqrt();
        let gamma = second_moment / (mean * mean);
        let accuracy = if !mean.is_finite() || !second_moment.is_finite() {
            0.0
        } else if var > 0.0 {
            mean * mean / var
        } else {
            f64::INFINITY
        };
        Self {
            mass,
            mean,
            second_moment,
            std_dev,
            accuracy,
            gamma,
        }
    }

    /// Moments with the divergent-mean convention applied.
    fn diverged(mass: f64) -> Self {
        Self {
            mass,
            mean: f64::INFINITY,
            second_moment: f64::INFINITY,
            std_dev: f64::INFINITY,
            accuracy: 0.0,
            gamma: f64::INFINITY,
        }
    }
}

/// ln((k−1)!) for integer k ≥ 1.
pub(crate) fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|j| (j as f64).ln()).sum()
}

/// Regularised lower incomplete gamma P(k, x) for integer shape.
pub fn erlang_cdf(shape: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let k = shape as f64;
    let term = |j: u32| (-x + j as f64 * x.ln() - ln_factorial(j)).exp();
    if x < k {
        // Σ_{j≥k} e^{−x} x^j/j!, converging since x < k.
        let mut s = 0.0;
        let mut j = shape;
        loop {
            let t = term(j);
            s += t;
            if t < 1e-18 * s || j > shape + 10_000 {
                break;
            }
            j += 1;
        }
        s.min(1.0)
    } else {
        let upper: f64 = (0..shape).map(term).sum();
        (1.0 - upper).max(0.0)
    }
}

impl DelayFunction {
    pub fn exponential(rate: f64, amplitude: f64) -> Result<Self, DelayError> {
        if !(rate > 0.0 && rate.is_finite() && amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(DelayError::Invalid(format!(
                "exponential rate {rate}, amplitude {amplitude}"
            )));
        }
        if amplitude / rate > 1.0 + DelayConfig::default().tol_norm {
            return Err(DelayError::Invalid(format!(
                "exponential mass {} exceeds 1",
                amplitude / rate
            )));
        }
        Ok(Self::Exponential { rate, amplitude })
    }

    pub fn erlang(shape: u32, rate: f64) -> Result<Self, DelayError> {
        Self::erlang_weighted(shape, rate, 1.0)
    }

    pub fn erlang_weighted(shape: u32, rate: f64, mass: f64) -> Result<Self, DelayError> {
        if shape == 0 || !(rate > 0.0 && rate.is_finite()) || !(0.0..=1.0 + 1e-6).contains(&mass) {
            return Err(DelayError::Invalid(format!(
                "erlang shape {shape}, rate {rate}, mass {mass}"
            )));
        }
        Ok(Self::Erlang { shape, rate, mass })
    }

    pub fn sampled(dt: f64, values: Vec<f64>) -> Result<Self, DelayError> {
        SampledDelay::new(dt, values).map(Self::Sampled)
    }

    /// Gaussian bump of standard deviation `width` (at least one grid step)
    /// carrying `mass`, standing in for a point mass at `center`.
    pub fn narrow_peak(center: f64, mass: f64, dt: f64, width: Option<f64>) -> Result<Self, DelayError> {
        let w = width.unwrap_or(dt).max(dt);
        if center - 12.0 * w < 0.0 {
            return Err(DelayError::Invalid(format!(
                "peak at {center} with width {w} leaks below t = 0"
            )));
        }
        let n = ((center + 12.0 * w) / dt).ceil() as usize + 1;
        let mut values: Vec<f64> = (0..n)
            .map(|i| {
                let z = (i as f64 * dt - center) / w;
                (-0.5 * z * z).exp()
            })
            .collect();
        // Normalise on the grid so the discrete mass is exact.
        let norm = mass / gregory(&values, dt);
        values.iter_mut().for_each(|v| *v *= norm);
        Self::sampled(dt, values)
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, Self::Sampled(_))
    }

    pub fn tail_flag(&self) -> bool {
        matches!(self, Self::Sampled(s) if s.tail_flag)
    }

    /// Density value at time `t`.
    pub fn density(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match *self {
            Self::Exponential { rate, amplitude } => amplitude * (-rate * t).exp(),
            Self::Erlang { shape, rate, mass } => {
                if mass == 0.0 {
                    0.0
                } else if t == 0.0 {
                    if shape == 1 {
                        mass * rate
                    } else {
                        0.0
                    }
                } else {
                    let k = shape as f64;
                    (mass.ln() + k * rate.ln() + (k - 1.0) * t.ln() - rate * t
                        - ln_factorial(shape - 1))
                    .exp()
                }
            }
            Self::Sampled(ref s) => s.value_at(t),
        }
    }

    pub fn mass(&self) -> f64 {
        match *self {
            Self::Exponential { rate, amplitude } => amplitude / rate,
            Self::Erlang { mass, .. } => mass,
            Self::Sampled(ref s) => s.mass(),
        }
    }

    /// Moments of the normalised density and the accuracy `R`.
    pub fn moments(&self) -> Result<Moments, DelayError> {
        let q = self.mass();
        if q.is_nan() || q < DelayConfig::default().tol_zero {
            return Err(DelayError::ZeroMass(q));
        }
        Ok(match *self {
            Self::Exponential { rate, .. } => Moments::erlang(q, 1.0, rate),
            Self::Erlang { shape, rate, .. } => Moments::erlang(q, shape as f64, rate),
            Self::Sampled(ref s) => {
                if s.tail_flag {
                    Moments::diverged(q)
                } else {
                    let m = Moments::from_raw(q, s.weighted_integral(1), s.weighted_integral(2));
                    if m.mean.is_finite() {
                        m
                    } else {
                        Moments::diverged(q)
                    }
                }
            }
        })
    }

    /// Density multiplied by a constant weight.
    pub fn scaled(&self, weight: f64) -> Result<Self, DelayError> {
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(DelayError::Invalid(format!("weight {weight}")));
        }
        Ok(match self {
            Self::Exponential { rate, amplitude } => Self::Exponential {
                rate: *rate,
                amplitude: amplitude * weight,
            },
            Self::Erlang { shape, rate, mass } => Self::Erlang {
                shape: *shape,
                rate: *rate,
                mass: mass * weight,
            },
            Self::Sampled(s) => Self::Sampled(SampledDelay::with_tail_flag(
                s.dt,
                s.values.iter().map(|v| v * weight).collect(),
                s.tail_flag,
            )?),
        })
    }

    /// Grid step giving `points_per_sigma` points per standard deviation.
    pub fn natural_step(&self, cfg: &DelayConfig) -> f64 {
        match self {
            Self::Sampled(s) => s.dt,
            _ => {
                let m = self.moments().expect("analytic kinds have positive mass");
                m.std_dev / cfg.points_per_sigma
            }
        }
    }

    /// Mass beyond `t`.
    pub fn tail_mass(&self, t: f64) -> f64 {
        (self.mass() - partial_norm(self, t)).max(0.0)
    }

    /// Samples onto a grid of step `dt` extending until the neglected tail
    /// is below `cfg.tail_tol` relative to the mass.
    pub fn to_sampled(&self, dt: f64, cfg: &DelayConfig) -> Result<SampledDelay, DelayError> {
        match self {
            Self::Sampled(s) => Ok(s.resample(dt)),
            _ => {
                let m = self.moments()?;
                let target = cfg.tail_tol * m.mass;
                let mut t_max = m.mean + 12.0 * m.std_dev;
                while self.tail_mass(t_max) > target {
                    t_max += m.std_dev;
                }
                self.sample_on(dt, t_max, cfg)
            }
        }
    }

    /// Samples onto `[0, t_max]` with step `dt`. The tail flag is set when
    /// more than `tol_norm` of mass lies beyond `t_max`.
    pub fn sample_on(&self, dt: f64, t_max: f64, cfg: &DelayConfig) -> Result<SampledDelay, DelayError> {
        if !(dt > 0.0 && t_max >= 0.0) {
            return Err(DelayError::Invalid(format!("grid dt {dt}, horizon {t_max}")));
        }
        let n = (t_max / dt).round() as usize + 1;
        if n > cfg.max_points {
            return Err(DelayError::GridOverflow {
                needed: n,
                limit: cfg.max_points,
            });
        }
        let values: Vec<f64> = (0..n).map(|i| self.density(i as f64 * dt)).collect();
        let flag = self.tail_mass((n - 1) as f64 * dt) > cfg.tol_norm;
        Ok(SampledDelay::raw(dt, values, flag || self.tail_flag()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn exponential_base_case_closed_form() {
        let m = DelayFunction::exponential(1.0, 0.5).unwrap().moments().unwrap();
        assert_eq!(m.mass, 0.5);
        assert_eq!(m.mean, 1.0);
        assert_eq!(m.second_moment, 2.0);
        assert_eq!(m.std_dev, 1.0);
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.gamma, 2.0);
    }

    #[test]
    fn erlang_closed_form() {
        let m = DelayFunction::erlang(4, 1.0).unwrap().moments().unwrap();
        assert_eq!((m.mass, m.mean, m.std_dev, m.accuracy), (1.0, 4.0, 2.0, 4.0));
    }

    #[test]
    fn sampled_erlang_matches_closed_form() {
        let cfg = DelayConfig::default();
        let e = DelayFunction::erlang(4, 1.0).unwrap();
        let s = DelayFunction::Sampled(e.sample_on(1e-3, 60.0, &cfg).unwrap());
        let m = s.moments().unwrap();
        assert!(close(m.mass, 1.0, 1e-6));
        assert!(close(m.mean, 4.0, 1e-6));
        assert!(close(m.std_dev, 2.0, 1e-6));
        assert!(close(m.accuracy, 4.0, 1e-6));
    }

    #[test]
    fn zero_mass_is_an_error() {
        let z = DelayFunction::sampled(0.1, vec![0.0; 10]).unwrap();
        assert!(matches!(z.moments(), Err(DelayError::ZeroMass(_))));
    }

    #[test]
    fn tail_flag_forces_zero_accuracy() {
        let s = SampledDelay::with_tail_flag(0.1, vec![0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0], true).unwrap();
        let m = DelayFunction::Sampled(s).moments().unwrap();
        assert_eq!(m.accuracy, 0.0);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(DelayFunction::sampled(0.1, vec![0.5, -0.1]).is_err());
        assert!(DelayFunction::sampled(0.0, vec![0.5]).is_err());
        assert!(DelayFunction::sampled(1.0, vec![1.0, 2.0, 1.0]).is_err());
        assert!(DelayFunction::exponential(1.0, 2.0).is_err());
        assert!(DelayFunction::erlang(0, 1.0).is_err());
    }

    #[test]
    fn erlang_cdf_agrees_with_finite_sum() {
        // P(2, x) = 1 − e^{−x}(1 + x)
        for x in [0.01f64, 0.5, 1.0, 3.0, 40.0] {
            let exact = 1.0 - (-x).exp() * (1.0 + x);
            assert!((erlang_cdf(2, x) - exact).abs() < 1e-15, "x={x}");
        }
    }

    #[test]
    fn to_sampled_covers_the_tail() {
        let cfg = DelayConfig::default();
        let e = DelayFunction::exponential(2.0, 2.0).unwrap();
        let s = e.to_sampled(1e-3, &cfg).unwrap();
        assert!(!s.tail_flag());
        assert!(e.tail_mass(s.horizon()) <= cfg.tail_tol);
    }

    #[test]
    fn narrow_peak_carries_its_mass() {
        let p = DelayFunction::narrow_peak(5.0, 0.3, 1e-2, None).unwrap();
        let m = p.moments().unwrap();
        assert!(close(m.mass, 0.3, 1e-9));
        assert!(close(m.mean, 5.0, 1e-9));
    }
}
