// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! The wrapped `sinc^{2N}` potential and the parameterisation of the
//! Quasi-Ideal clock.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::QuantumError;
use crate::linalg::gregory;

/// Relative size of the neglected terms of the wrapped sum.
pub const TOL_POT: f64 = 1e-10;

/// Constant κ of the parameterisation of `n`.
pub const KAPPA: f64 = 0.792;

/// Highest derivative order used when estimating `C₀`.
const C0_MAX_ORDER: usize = 8;

/// `sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - (PI * x).powi(2) / 6.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `∫_{−∞}^{∞} sinc^{2N}(x) dx`.
///
/// Closed form for `N ≤ 8`; above that the alternating sum cancels badly
/// and the integral is evaluated numerically.
pub fn sinc_power_integral(big_n: u32) -> f64 {
    let n = 2 * big_n;
    if big_n <= 8 {
        let fact: f64 = (1..n).map(f64::from).product();
        let s: f64 = (0..=n / 2)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(n, k) * (n as f64 / 2.0 - k as f64).powi(n as i32 - 1)
            })
            .sum();
        s / fact
    } else {
        // Tail beyond |x| = 40 is below 40^{−2N}/(π^{2N}(2N−1)) < 1e-40.
        let dx = 1e-3;
        let m = (40.0 / dx) as usize;
        let v: Vec<f64> = (0..=m).map(|i| sinc(i as f64 * dx).powi(n as i32)).collect();
        2.0 * gregory(&v, dx)
    }
}

/// Truncation `P_max` of the wrapped sum `Σ_p V_B(n(x − x₀ − 2πp))`.
pub fn wrap_terms(n: f64, big_n: u32) -> usize {
    8 + (TOL_POT.powf(-1.0 / (2.0 * big_n as f64)) / (PI * PI * n)).ceil() as usize
}

/// Taylor coefficients `f^{(j)}(y)/j!`, `j = 0..=order`, of `sinc` at `y`.
fn sinc_taylor(y: f64, order: usize) -> Vec<f64> {
    let mut d = vec![0.0; order + 1];
    if y.abs() < 2.0 {
        // Power series Σ_p a_p y^p with a_{2m} = (−1)^m π^{2m}/(2m+1)!,
        // re-expanded about y: f^{(j)}(y)/j! = Σ_p C(p, j) a_p y^{p−j}.
        const TERMS: usize = 120;
        let mut a = [0.0; TERMS];
        let mut c = 1.0;
        for p in (0..TERMS).step_by(2) {
            if p > 0 {
                c *= -PI * PI / ((p as f64) * (p as f64 + 1.0));
            }
            a[p] = c;
        }
        for (j, dj) in d.iter_mut().enumerate() {
            let mut s = 0.0;
            let mut binom = 1.0;
            for p in j..TERMS {
                if p > j {
                    binom *= p as f64 / (p - j) as f64;
                }
                if a[p] != 0.0 {
                    s += binom * a[p] * y.powi((p - j) as i32);
                }
            }
            *dj = s;
        }
        return d;
    }
    // From πy·f = sin(πy): πy f^{(j)} + jπ f^{(j−1)} = π^j sin(πy + jπ/2).
    let py = PI * y;
    d[0] = py.sin() / py;
    for j in 1..=order {
        let rhs = PI.powi(j as i32) * (py + j as f64 * PI / 2.0).sin();
        d[j] = (rhs - j as f64 * PI * d[j - 1]) / py;
    }
    let mut fact = 1.0;
    for (j, dj) in d.iter_mut().enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        *dj /= fact;
    }
    d
}

fn series_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
}

/// Derivatives `V_B^{(k)}(y)`, `k = 0..=order`, of `V_B = sinc^{2N}`.
pub fn sinc_power_derivatives(y: f64, big_n: u32, order: usize) -> Vec<f64> {
    let base = sinc_taylor(y, order);
    let mut acc = {
        let mut one = vec![0.0; order + 1];
        one[0] = 1.0;
        one
    };
    let mut sq = base;
    let mut e = 2 * big_n;
    while e > 0 {
        if e & 1 == 1 {
            acc = series_mul(&acc, &sq);
        }
        sq = series_mul(&sq, &sq);
        e >>= 1;
    }
    let mut fact = 1.0;
    acc.iter()
        .enumerate()
        .map(|(k, c)| {
            if k > 0 {
                fact *= k as f64;
            }
            c * fact
        })
        .collect()
}

/// Smallest `C₀` with `max_x |V̄₀^{(k)}| ≤ (n C₀)^{k+1}` for `k ≤ 8` and all
/// `n ≥ 1`, `δ ≥ 1`, `d ≥ 1`, estimated on a grid.
///
/// The wrapped sum is evaluated at `n = 1`, where neighbouring bumps
/// overlap most, and the floor `1/(δd²)` and `A₀` are replaced by their
/// upper bounds `1` and `1/∫V_B`.
pub fn c0(big_n: u32) -> f64 {
    let integral = sinc_power_integral(big_n);
    let points = 4000;
    let mut max_abs = [0.0f64; C0_MAX_ORDER + 1];
    for i in 0..=points {
        let y = -PI + 2.0 * PI * i as f64 / points as f64;
        let mut total = [0.0; C0_MAX_ORDER + 1];
        for p in -6i32..=6 {
            let ders = sinc_power_derivatives(y - 2.0 * PI * p as f64, big_n, C0_MAX_ORDER);
            for (t, v) in total.iter_mut().zip(ders) {
                *t += v;
            }
        }
        for (m, t) in max_abs.iter_mut().zip(total) {
            *m = m.max(t.abs());
        }
    }
    max_abs
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let bound = m / integral + if k == 0 { 1.0 } else { 0.0 };
            bound.powf(1.0 / (k as f64 + 1.0))
        })
        .fold(0.0, f64::max)
}

/// Parameters of the Quasi-Ideal clock state and the derived potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiIdealParams {
    pub d: usize,
    /// Gaussian width σ in the time basis.
    pub sigma0: f64,
    /// Mean energy index.
    pub n0: f64,
    /// Centre in the time basis.
    pub k0: f64,
    pub eta: f64,
}

/// Values derived from [`QuasiIdealParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedPotential {
    pub alpha0: f64,
    pub eps5: f64,
    pub eps7: f64,
    pub eps8: f64,
    pub eps9: f64,
    pub delta: f64,
    /// Power `N` of `sinc^{2N}`.
    pub n_pot: u32,
    pub c0: f64,
    /// Width parameter `n`; not positive when `πα₀σ² ≤ 1`.
    pub n: f64,
    pub x_vr: f64,
    pub m: i64,
    pub gamma: f64,
    pub x0: f64,
    pub b: f64,
    pub upsilon: f64,
    /// Validity count of the asymptotic error bounds; reported only.
    pub big_n_count: i64,
}

impl QuasiIdealParams {
    /// Defaults `n₀ = (d−1)/2`, `k₀ = 0`.
    pub fn new(d: usize, sigma0: f64, eta: f64) -> Result<Self, QuantumError> {
        let p = Self {
            d,
            sigma0,
            n0: (d as f64 - 1.0) / 2.0,
            k0: 0.0,
            eta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        let d = self.d as f64;
        let bad = |m: String| Err(QuantumError::Invalid(m));
        if self.d < 2 {
            return bad(format!("Quasi-Ideal states need d ≥ 2, got {}", self.d));
        }
        if !(self.sigma0 > 0.0 && self.sigma0 < d) {
            return bad(format!("sigma0 = {} not in (0, d)", self.sigma0));
        }
        if !(self.n0 > 0.0 && self.n0 < d - 1.0) {
            return bad(format!("n0 = {} not in (0, d−1)", self.n0));
        }
        if !self.k0.is_finite() {
            return bad("k0 must be finite".into());
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("eta = {} not in (0, 1]", self.eta));
        }
        Ok(())
    }

    pub fn alpha0(&self) -> f64 {
        1.0 - (1.0 - 2.0 * self.n0 / (self.d as f64 - 1.0)).abs()
    }

    pub fn derived(&self) -> DerivedPotential {
        let d = self.d as f64;
        let s = self.sigma0;
        let eta = self.eta;
        let (eps7, eps5, eps8, eps9) = (eta / 4.0, eta / 16.0, eta / 16.0, eta / 2.0);
        let alpha0 = self.alpha0();
        let delta = d.powf(eps5);
        let n_pot = ((3.0 - 4.0 * eps5 - eps9) / (2.0 * (eps7 - eps8 - eps5))).ceil().max(1.0) as u32;
        let c0 = c0(n_pot);
        let log_term = (PI * alpha0 * s * s).ln();
        let n = log_term / (2.0 * PI * c0 * alpha0 * KAPPA) * d.powf(1.0 - eps5) / (delta * s);
        let x_vr = d.powf(eps7) * s / (PI * d);
        let even = self.d % 2 == 0;
        let m_bar = d.powf(eta / 2.0) * s / 2.0 + if even { 1.0 } else { 0.5 };
        let m = 2 * m_bar.floor() as i64 + if even { 0 } else { 1 };
        let gamma = (m as f64 - 2.0) / d;
        let x0 = PI + x_vr + PI * gamma;
        // sup_k (2δ(nC₀)^k)^{1/k} is attained at k = 1 since 2δ ≥ 1.
        let b = 2.0 * delta * n * c0;
        let upsilon = PI * alpha0 * KAPPA / log_term * b;
        let big_n_count =
            (PI * alpha0 * alpha0 / (2.0 * (upsilon + d / (s * s)).powi(2)) * (d / s).powi(2)).floor() as i64;
        DerivedPotential {
            alpha0,
            eps5,
            eps7,
            eps8,
            eps9,
            delta,
            n_pot,
            c0,
            n,
            x_vr,
            m,
            gamma,
            x0,
            b,
            upsilon,
            big_n_count,
        }
    }
}

/// `V̄₀(x) = 1/(δd²) + n A₀ Σ_p sinc^{2N}(n(x − x₀ − 2πp))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SincPotential {
    pub d: usize,
    pub delta: f64,
    pub n: f64,
    pub n_pot: u32,
    pub x0: f64,
}

impl SincPotential {
    pub fn new(d: usize, delta: f64, n: f64, n_pot: u32, x0: f64) -> Result<Self, QuantumError> {
        if d == 0 || !(delta > 0.0 && delta.is_finite()) || !(n > 0.0 && n.is_finite()) || n_pot == 0 || !x0.is_finite() {
            return Err(QuantumError::Invalid(format!(
                "sinc potential d = {d}, δ = {delta}, n = {n}, N = {n_pot}, x₀ = {x0}"
            )));
        }
        let floor = 1.0 / (delta * (d * d) as f64);
        if 2.0 * PI * floor >= 1.0 {
            return Err(QuantumError::Invalid(format!(
                "floor 1/(δd²) = {floor} leaves no mass for the peak"
            )));
        }
        Ok(Self {
            d,
            delta,
            n,
            n_pot,
            x0,
        })
    }

    pub fn from_params(p: &QuasiIdealParams) -> Result<Self, QuantumError> {
        let dv = p.derived();
        Self::new(p.d, dv.delta, dv.n, dv.n_pot, dv.x0)
    }

    pub fn floor(&self) -> f64 {
        1.0 / (self.delta * (self.d * self.d) as f64)
    }

    pub fn a0(&self) -> f64 {
        (1.0 - 2.0 * PI * self.floor()) / sinc_power_integral(self.n_pot)
    }

    pub fn p_max(&self) -> usize {
        wrap_terms(self.n, self.n_pot)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.value_with(x, self.a0(), self.p_max())
    }

    fn value_with(&self, x: f64, a0: f64, p_max: usize) -> f64 {
        let e = 2 * self.n_pot as i32;
        let base = x - self.x0;
        let p = p_max as i64;
        let sum: f64 = (-p..=p)
            .map(|q| sinc(self.n * (base - 2.0 * PI * q as f64)).powi(e))
            .sum();
        self.floor() + self.n * a0 * sum
    }

    /// `V̄₀(2πk/d)` for `k = 0..d`.
    pub fn diag(&self) -> Vec<f64> {
        let (a0, p) = (self.a0(), self.p_max());
        (0..self.d)
            .map(|k| self.value_with(2.0 * PI * k as f64 / self.d as f64, a0, p))
            .collect()
    }
}
