// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum clocks.
//!
//! A reset clock is described by its Hamiltonian `H_C`, a positive tick
//! operator `V_C` and an initial state `ψ₀`. Between ticks the state evolves
//! under `H = H_C − iV_C`; the survival probability is `S(t) = ‖e^{−itH}ψ₀‖²`
//! and the first-tick density is `P(t) = 2⟨ψ(t)|V_C|ψ(t)⟩ = −dS/dt`.
//!
//! The Quasi-Ideal clock uses `H_C = Σ ωn|n⟩⟨n|`, a tick operator that is
//! diagonal in the Fourier-conjugate time basis `|θ_k⟩`, and a Gaussian
//! superposition of time states as its initial state.

mod lindblad;
mod lyapunov;
mod optimize;
mod potential;
mod serial;

pub use lindblad::{lindblad_first_tick, LindbladClockSpec, LindbladConfig};
pub use lyapunov::quantum_accuracy_exact;
pub use optimize::{
    optimize_potential, InitialState, OptimizeConfig, OptimizeError, Optimum, PotentialFamily, SearchAccuracy,
};
pub use potential::{
    c0, sinc, sinc_power_derivatives, sinc_power_integral, wrap_terms, DerivedPotential, QuasiIdealParams,
    SincPotential, KAPPA, TOL_POT,
};
pub use serial::{PotentialJson, QuantumSpecJson, StateJson};

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::ClassicalError;
use crate::delay::{DelayError, DelayFunction, Moments, SampledDelay};
use crate::linalg::{dagger, expm, gregory};

/// Tolerance on Hermiticity and unitarity.
pub const TOL_HERM: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("invalid quantum clock: {0}")]
    Invalid(String),
    #[error("survival probability {survival:e} at the maximum horizon t = {t_max} has not decayed")]
    TailNotConverged { t_max: f64, survival: f64 },
    #[error("adaptive step size {step:e} underflowed at t = {t}")]
    StepSizeUnderflow { t: f64, step: f64 },
    #[error("classical clock is not norm preserving: {0}")]
    NotNormPreserving(String),
    #[error(transparent)]
    Delay(#[from] DelayError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Columns are the time states `|θ_k⟩ = d^{−1/2} Σ_n e^{−i2πnk/d}|E_n⟩`.
pub fn time_basis(d: usize) -> DMatrix<Complex64> {
    let norm = 1.0 / (d as f64).sqrt();
    DMatrix::from_fn(d, d, |n, k| {
        // Reduce nk mod d before scaling to keep the phase exact.
        let phase = -2.0 * PI * ((n * k) % d) as f64 / d as f64;
        Complex64::from_polar(norm, phase)
    })
}

/// The time state `|θ_k⟩` in the energy basis; `k` is taken modulo `d`.
pub fn swp_state(d: usize, k: i64) -> DVector<Complex64> {
    let k = k.rem_euclid(d as i64) as usize;
    time_basis(d).column(k).into_owned()
}

/// Quasi-Ideal state `Σ_{k∈S_d(k₀)} A e^{−π(k−k₀)²/σ²} e^{i2πn₀(k−k₀)/d} |θ_k⟩`
/// in the energy basis, with `S_d(k₀) = {k ∈ ℤ : −d/2 ≤ k₀ − k < d/2}`.
pub fn quasi_ideal_state(p: &QuasiIdealParams) -> Result<DVector<Complex64>, QuantumError> {
    p.validate()?;
    let d = p.d as f64;
    let k_lo = (p.k0 - d / 2.0).floor() as i64 - 1;
    let k_hi = (p.k0 + d / 2.0).ceil() as i64 + 1;
    let mut amp = DVector::<Complex64>::zeros(p.d);
    for k in k_lo..=k_hi {
        let off = p.k0 - k as f64;
        if !(-d / 2.0 <= off && off < d / 2.0) {
            continue;
        }
        let x = k as f64 - p.k0;
        let a = (-PI * x * x / (p.sigma0 * p.sigma0)).exp();
        amp[k.rem_euclid(p.d as i64) as usize] += Complex64::from_polar(a, 2.0 * PI * p.n0 * x / d);
    }
    let norm = amp.norm();
    Ok(time_basis(p.d) * amp.unscale(norm))
}

fn hermitian_error(a: &DMatrix<Complex64>) -> f64 {
    (a - dagger(a)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `H_C − iV_C` evolution for a reset clock.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumResetClockSpec {
    h_c: DMatrix<Complex64>,
    v_c: DMatrix<Complex64>,
    psi0: DVector<Complex64>,
    omega: f64,
    v_min: f64,
}

impl QuantumResetClockSpec {
    pub fn new(
        h_c: DMatrix<Complex64>,
        v_c: DMatrix<Complex64>,
        psi0: DVector<Complex64>,
        omega: f64,
    ) -> Result<Self, QuantumError> {
        let d = h_c.nrows();
        let bad = |m: String| Err(QuantumError::Invalid(m));
        if d == 0 || h_c.ncols() != d || v_c.shape() != (d, d) || psi0.len() != d {
            return bad(format!(
                "shapes H {:?}, V {:?}, ψ₀ {}",
                h_c.shape(),
                v_c.shape(),
                psi0.len()
            ));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return bad(format!("omega = {omega}"));
        }
        let scale = 1.0 + h_c.norm() + v_c.norm();
        if hermitian_error(&h_c) > TOL_HERM * scale || hermitian_error(&v_c) > TOL_HERM * scale {
            return bad("H_C and V_C must be Hermitian".into());
        }
        let v_min = v_c.clone().symmetric_eigenvalues().min();
        if v_min < -TOL_HERM * scale {
            return bad(format!("V_C has negative eigenvalue {v_min}"));
        }
        if ((psi0.norm() - 1.0).abs()) > 1e-6 {
            return bad(format!("‖ψ₀‖ = {}", psi0.norm()));
        }
        Ok(Self {
            h_c,
            v_c,
            psi0,
            omega,
            v_min: v_min.max(0.0),
        })
    }

    /// `H_C = Σ ωn|E_n⟩⟨E_n|` and `V_C = Σ v_k|θ_k⟩⟨θ_k|`.
    pub fn from_time_diagonal(omega: f64, v_diag: &[f64], psi0: DVector<Complex64>) -> Result<Self, QuantumError> {
        let d = v_diag.len();
        if v_diag.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(QuantumError::Invalid("time-basis potential must be finite and nonnegative".into()));
        }
        let h_c = DMatrix::from_diagonal(&DVector::from_fn(d, |n, _| Complex64::new(omega * n as f64, 0.0)));
        let u = time_basis(d);
        let diag = DVector::from_iterator(d, v_diag.iter().map(|v| Complex64::new(*v, 0.0)));
        let mut v_c = &u * DMatrix::from_diagonal(&diag) * dagger(&u);
        v_c = (&v_c + dagger(&v_c)).unscale(2.0);
        let mut spec = Self::new(h_c, v_c, psi0, omega)?;
        spec.v_min = v_diag.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(spec)
    }

    /// Quasi-Ideal clock with `V_C = (2πδ/T₀) Σ V̄₀(2πk/d)|θ_k⟩⟨θ_k|`.
    pub fn with_sinc_potential(
        omega: f64,
        potential: &SincPotential,
        psi0: DVector<Complex64>,
    ) -> Result<Self, QuantumError> {
        let scale = potential.delta * omega;
        let v: Vec<f64> = potential.diag().iter().map(|x| scale * x).collect();
        Self::from_time_diagonal(omega, &v, psi0)
    }

    pub fn dim(&self) -> usize {
        self.h_c.nrows()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `T₀ = 2π/ω`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn h_c(&self) -> &DMatrix<Complex64> {
        &self.h_c
    }

    pub fn v_c(&self) -> &DMatrix<Complex64> {
        &self.v_c
    }

    pub fn psi0(&self) -> &DVector<Complex64> {
        &self.psi0
    }

    /// Smallest eigenvalue of `V_C`.
    pub fn v_min(&self) -> f64 {
        self.v_min
    }

    /// Time-basis diagonal of `V_C`.
    pub fn time_diagonal(&self) -> Vec<f64> {
        let u = time_basis(self.dim());
        (dagger(&u) * &self.v_c * &u).diagonal().iter().map(|z| z.re).collect()
    }

    /// Tail constant `a = 1/(2 λ_min(V_C))`: `∫_t^∞ S ≤ a·S(t)`.
    pub fn tail_constant(&self) -> f64 {
        if self.v_min > 0.0 {
            0.5 / self.v_min
        } else {
            f64::INFINITY
        }
    }

    fn expectation_v(&self, psi: &DVector<Complex64>) -> f64 {
        psi.dotc(&(&self.v_c * psi)).re
    }
}

/// `H_C − iV_C`.
pub fn effective_hamiltonian(spec: &QuantumResetClockSpec) -> DMatrix<Complex64> {
    &spec.h_c - spec.v_c.map(|z| z * I)
}

/// `ψ(t) = e^{−itH}ψ₀` and `S(t) = ‖ψ(t)‖²`.
pub fn survival(spec: &QuantumResetClockSpec, t: f64) -> (DVector<Complex64>, f64) {
    let psi = expm(&(effective_hamiltonian(spec) * (-I * t))) * &spec.psi0;
    let s = psi.norm_squared();
    (psi, s)
}

/// `P(t) = 2⟨ψ(t)|V_C|ψ(t)⟩`.
pub fn tick_density(spec: &QuantumResetClockSpec, t: f64) -> f64 {
    let (psi, _) = survival(spec, t);
    2.0 * spec.expectation_v(&psi)
}

/// Discretisation and horizon of [`quantum_accuracy`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyConfig {
    /// Time step `T₀/(steps_per_site·d)`.
    pub steps_per_site: usize,
    /// Relative bound on the neglected tails of `μ` and `χ`.
    pub tail_tol: f64,
    /// Horizon limit in periods.
    pub max_periods: f64,
}

impl Default for AccuracyConfig {
    fn default() -> Self {
        Self {
            steps_per_site: 64,
            tail_tol: 1e-12,
            max_periods: 20_000.0,
        }
    }
}

impl AccuracyConfig {
    pub fn step(&self, spec: &QuantumResetClockSpec) -> f64 {
        spec.period() / (self.steps_per_site * spec.dim()) as f64
    }
}

/// Survival and tick density on the uniform grid, until the tail is negligible.
struct Trace {
    dt: f64,
    survival: Vec<f64>,
    density: Vec<f64>,
}

fn trace(spec: &QuantumResetClockSpec, cfg: &AccuracyConfig) -> Result<Trace, QuantumError> {
    let dt = cfg.step(spec);
    let step = expm(&(effective_hamiltonian(spec) * (-I * dt)));
    let a = spec.tail_constant();
    let t_limit = cfg.max_periods * spec.period();
    let mut psi = spec.psi0.clone();
    let mut survival = vec![psi.norm_squared()];
    let mut density = vec![2.0 * spec.expectation_v(&psi)];
    // Running first and second moments, for the relative tail test.
    let (mut mu, mut chi) = (0.0, 0.0);
    loop {
        psi = &step * psi;
        let s = psi.norm_squared();
        let k = survival.len();
        let t = k as f64 * dt;
        mu += 0.5 * dt * (s + survival[k - 1]);
        chi += dt * (t * s + (t - dt) * survival[k - 1]);
        survival.push(s);
        density.push(2.0 * spec.expectation_v(&psi));
        let done = if a.is_finite() {
            a * s <= cfg.tail_tol * mu && 2.0 * (t * a + a * a) * s <= cfg.tail_tol * chi
        } else {
            s <= cfg.tail_tol
        };
        if done {
            break;
        }
        if t >= t_limit {
            return Err(QuantumError::TailNotConverged { t_max: t, survival: s });
        }
    }
    Ok(Trace { dt, survival, density })
}

/// Moments of the first-tick delay from `μ = ∫S`, `χ = 2∫tS`.
pub fn quantum_accuracy(spec: &QuantumResetClockSpec, cfg: &AccuracyConfig) -> Result<Moments, QuantumError> {
    let tr = trace(spec, cfg)?;
    let ts: Vec<f64> = tr.survival.iter().enumerate().map(|(i, s)| 2.0 * i as f64 * tr.dt * s).collect();
    let mu = gregory(&tr.survival, tr.dt);
    let chi = gregory(&ts, tr.dt);
    let q = 1.0 - tr.survival[tr.survival.len() - 1];
    // S and χ integrate the defective density; normalise to Q.
    Ok(Moments::from_normalised(q, mu / q, chi / q))
}

/// First-tick density `P(t)` sampled on the accuracy grid.
pub fn quantum_first_tick_delay(spec: &QuantumResetClockSpec, cfg: &AccuracyConfig) -> Result<DelayFunction, QuantumError> {
    let tr = trace(spec, cfg)?;
    let values = tr.density.into_iter().map(|p| p.max(0.0)).collect();
    Ok(DelayFunction::Sampled(SampledDelay::new(tr.dt, values)?))
}

/// Which dynamics [`time_basis_spread`] follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evolution {
    /// `e^{−itH_C}`, ignoring the tick operator.
    Free,
    /// `e^{−itH}` renormalised: the state given no tick so far.
    Conditional,
}

/// Spread of the state in the time basis and in the energy basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub delta_c: f64,
    pub delta_e: f64,
}

fn weighted_std(p: &[f64], x: &[f64]) -> f64 {
    let total: f64 = p.iter().sum();
    let mean: f64 = p.iter().zip(x).map(|(p, x)| p * x).sum::<f64>() / total;
    let var: f64 = p.iter().zip(x).map(|(p, x)| p * (x - mean).powi(2)).sum::<f64>() / total;
    var.max(0.0).sqrt()
}

/// `ΔC(t)` and `ΔE(t)`. Time indices are unwrapped onto the `d` integers
/// nearest the centre `k₀ + td/T₀`, where `k₀` is the circular mean of the
/// initial time-basis populations.
pub fn time_basis_spread(spec: &QuantumResetClockSpec, t: f64, evolution: Evolution) -> Spread {
    let d = spec.dim();
    let psi = match evolution {
        Evolution::Free => {
            let h = spec.h_c.diagonal();
            let off_diag = spec
                .h_c
                .iter()
                .enumerate()
                .any(|(i, z)| i % (d + 1) != 0 && z.norm() > 0.0);
            if !off_diag {
                DVector::from_fn(d, |n, _| spec.psi0[n] * (-I * h[n] * t).exp())
            } else {
                expm(&(&spec.h_c * (-I * t))) * &spec.psi0
            }
        }
        Evolution::Conditional => survival(spec, t).0,
    };
    let ud = dagger(&time_basis(d));
    let pops = |v: &DVector<Complex64>| -> Vec<f64> { (&ud * v).iter().map(|z| z.norm_sqr()).collect() };
    let p0 = pops(&spec.psi0);
    let phasor: Complex64 = p0
        .iter()
        .enumerate()
        .map(|(k, p)| Complex64::from_polar(*p, 2.0 * PI * k as f64 / d as f64))
        .sum();
    let k0 = if phasor.norm() > 1e-12 {
        phasor.arg() * d as f64 / (2.0 * PI)
    } else {
        0.0
    };
    let centre = k0 + t * d as f64 / spec.period();
    let pt = pops(&psi);
    let idx: Vec<f64> = (0..d)
        .map(|k| {
            let k = k as f64;
            k + d as f64 * ((centre - k) / d as f64).round()
        })
        .collect();
    let pe: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    let levels: Vec<f64> = (0..d).map(|n| n as f64).collect();
    Spread {
        delta_c: weighted_std(&pt, &idx),
        delta_e: weighted_std(&pe, &levels),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn time_basis_small_cases() {
        assert_eq!(time_basis(1), DMatrix::from_element(1, 1, c(1.0)));
        let u = time_basis(2);
        let h = 1.0 / 2f64.sqrt();
        let want = DMatrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)]);
        assert!(max_abs_diff(&u, &want) < 1e-15);
    }

    #[test]
    fn time_basis_is_unitary() {
        let u = time_basis(64);
        let id = DMatrix::<Complex64>::identity(64, 64);
        assert!(max_abs_diff(&(dagger(&u) * &u), &id) < 1e-12);
        assert_eq!(swp_state(5, 7), swp_state(5, 2));
        assert_eq!(swp_state(5, -1), swp_state(5, 4));
    }

    #[test]
    fn quasi_ideal_state_normalised_and_centred() {
        let p = QuasiIdealParams::new(13, 13f64.sqrt(), 0.5).unwrap();
        let psi = quasi_ideal_state(&p).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);

        let mut p = QuasiIdealParams::new(32, 32f64.sqrt(), 0.5).unwrap();
        p.n0 = 15.5;
        let psi = quasi_ideal_state(&p).unwrap();
        let mean: f64 = psi.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum();
        assert!((mean - 15.5).abs() < 0.5);
    }

    #[test]
    fn narrow_quasi_ideal_is_a_time_state() {
        let mut p = QuasiIdealParams::new(8, 0.05, 0.5).unwrap();
        p.k0 = 3.0;
        let psi = quasi_ideal_state(&p).unwrap();
        let overlap = swp_state(8, 3).dotc(&psi).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_clock() {
        let v = 0.7;
        let spec = QuantumResetClockSpec::from_time_diagonal(2.0 * PI, &[v], DVector::from_element(1, c(1.0))).unwrap();
        for t in [0.0, 0.3, 2.0] {
            assert!((survival(&spec, t).1 - (-2.0 * v * t).exp()).abs() < 1e-14);
            assert!((tick_density(&spec, t) - 2.0 * v * (-2.0 * v * t).exp()).abs() < 1e-13);
        }
        let m = quantum_accuracy(&spec, &AccuracyConfig::default()).unwrap();
        assert!((m.accuracy - 1.0).abs() < 1e-6, "{m:?}");
        assert!((m.mean - 1.0 / (2.0 * v)).abs() < 1e-8);
        let fine = AccuracyConfig {
            steps_per_site: 1024,
            ..AccuracyConfig::default()
        };
        let m = quantum_accuracy(&spec, &fine).unwrap();
        assert!((m.accuracy - 1.0).abs() < 1e-10, "{m:?}");
    }

    #[test]
    fn zero_potential_is_hermitian_and_norm_preserving() {
        let d = 5;
        let spec = QuantumResetClockSpec::from_time_diagonal(2.0 * PI, &vec![0.0; d], swp_state(d, 0)).unwrap();
        let h = effective_hamiltonian(&spec);
        assert!(hermitian_error(&h) == 0.0);
        assert!((survival(&spec, 3.7).1 - 1.0).abs() < 1e-12);
        assert!(tick_density(&spec, 1.3).abs() < 1e-14);
        // Anti-Hermitian part is exactly −iV_C.
        let spec = QuantumResetClockSpec::from_time_diagonal(2.0 * PI, &[0.5, 1.0, 0.0, 2.0, 0.1], swp_state(d, 0)).unwrap();
        let h = effective_hamiltonian(&spec);
        let anti = (&h - dagger(&h)).unscale(2.0);
        assert!(max_abs_diff(&anti, &spec.v_c().map(|z| -z * I)) < 1e-15);
    }

    #[test]
    fn free_evolution_shifts_time_states() {
        let d = 7;
        let spec = QuantumResetClockSpec::from_time_diagonal(2.0 * PI, &vec![0.0; d], swp_state(d, 2)).unwrap();
        let (psi, _) = survival(&spec, spec.period() / d as f64);
        assert!((swp_state(d, 3).dotc(&psi).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swp_spread_starts_at_zero() {
        let spec = QuantumResetClockSpec::from_time_diagonal(2.0 * PI, &[0.0; 13], swp_state(13, 0)).unwrap();
        assert!(time_basis_spread(&spec, 0.0, Evolution::Free).delta_c < 1e-12);
        let mid = time_basis_spread(&spec, 0.5 / 13.0, Evolution::Free).delta_c;
        assert!(mid > 1.0);
    }
}
