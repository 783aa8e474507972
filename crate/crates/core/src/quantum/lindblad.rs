// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! General clocks `(H, {L_j}, {J_j})` with the tick channel removed:
//!
//! `dρ/dt = Kρ + ρK† + Σ_j L_j ρ L_j†`, `K = −iH − V − ½Σ L_j†L_j`,
//! `V = ½ Σ J_j†J_j`, and first-tick density `P(t) = 2 tr[Vρ(t)]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{hermitian_error, QuantumError, QuantumResetClockSpec, I, TOL_HERM};
use crate::classical::{ClassicalClock, TimeGrid};
use crate::delay::{DelayConfig, DelayError, DelayFunction, SampledDelay};
use crate::linalg::dagger;

type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladClockSpec {
    h: CMatrix,
    ls: Vec<CMatrix>,
    js: Vec<CMatrix>,
    rho0: CMatrix,
}

impl LindbladClockSpec {
    pub fn new(h: CMatrix, ls: Vec<CMatrix>, js: Vec<CMatrix>, rho0: CMatrix) -> Result<Self, QuantumError> {
        let d = h.nrows();
        let bad = |m: String| Err(QuantumError::Invalid(m));
        if d == 0 || h.ncols() != d || rho0.shape() != (d, d) {
            return bad(format!("H is {:?}, ρ₀ is {:?}", h.shape(), rho0.shape()));
        }
        if ls.iter().chain(&js).any(|m| m.shape() != (d, d)) {
            return bad(format!("jump and tick operators must be {d}×{d}"));
        }
        if hermitian_error(&h) > TOL_HERM * (1.0 + h.norm()) {
            return bad("H must be Hermitian".into());
        }
        if hermitian_error(&rho0) > TOL_HERM {
            return bad("ρ₀ must be Hermitian".into());
        }
        let tr = rho0.trace();
        if (tr.re - 1.0).abs() > DelayConfig::default().tol_norm || tr.im.abs() > TOL_HERM {
            return bad(format!("tr ρ₀ = {tr}"));
        }
        let min_eig = rho0.clone().symmetric_eigenvalues().min();
        if min_eig < -1e-10 {
            return bad(format!("ρ₀ has negative eigenvalue {min_eig}"));
        }
        Ok(Self { h, ls, js, rho0 })
    }

    /// Reset clock as a single tick channel `J = √(2V_C)`, no jumps, `ρ₀ = |ψ₀⟩⟨ψ₀|`.
    pub fn from_reset(spec: &QuantumResetClockSpec) -> Result<Self, QuantumError> {
        let eig = spec.v_c().clone().symmetric_eigen();
        let sqrt = eig.eigenvalues.map(|l| Complex64::new((2.0 * l.max(0.0)).sqrt(), 0.0));
        let j = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt) * dagger(&eig.eigenvectors);
        let psi = spec.psi0();
        Self::new(spec.h_c().clone(), Vec::new(), vec![j], psi * psi.adjoint())
    }

    /// Embeds a norm-preserving classical clock: `H = 0`,
    /// `L = √N_mn |m⟩⟨n|` for `m ≠ n`, `J = √T_mn |m⟩⟨n|`, `ρ₀ = diag(V₀)`.
    pub fn from_classical(clock: &ClassicalClock) -> Result<Self, QuantumError> {
        let g = clock.generators();
        let (n, t) = (g.no_tick(), g.tick());
        let d = clock.dim();
        if t.nrows() != d {
            return Err(QuantumError::NotNormPreserving(format!("tick generator is {}×{d}", t.nrows())));
        }
        for j in 0..d {
            let s = n.column(j).sum() + t.column(j).sum();
            if s.abs() > 1e-12 * (1.0 + n[(j, j)].abs()) {
                return Err(QuantumError::NotNormPreserving(format!("column {j} of N + T sums to {s}")));
            }
        }
        let op = |m: usize, k: usize, rate: f64| {
            let mut a = CMatrix::zeros(d, d);
            a[(m, k)] = Complex64::new(rate.sqrt(), 0.0);
            a
        };
        let mut ls = Vec::new();
        let mut js = Vec::new();
        for k in 0..d {
            for m in 0..d {
                if m != k && n[(m, k)] > 0.0 {
                    ls.push(op(m, k, n[(m, k)]));
                }
                if t[(m, k)] > 0.0 {
                    js.push(op(m, k, t[(m, k)]));
                }
            }
        }
        let rho0 = DMatrix::from_diagonal(&clock.initial().as_vector().map(|x| Complex64::new(x, 0.0)));
        Self::new(CMatrix::zeros(d, d), ls, js, rho0)
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// `V = ½ Σ J†J`.
    pub fn tick_operator(&self) -> CMatrix {
        let d = self.dim();
        self.js.iter().fold(CMatrix::zeros(d, d), |acc, j| acc + dagger(j) * j).unscale(2.0)
    }

    fn generator(&self) -> (CMatrix, CMatrix) {
        let d = self.dim();
        let v = self.tick_operator();
        let ll = self.ls.iter().fold(CMatrix::zeros(d, d), |acc, l| acc + dagger(l) * l);
        let k = self.h.map(|z| -I * z) - &v - ll.unscale(2.0);
        (k, v)
    }
}

/// Tolerances of the adaptive Dormand–Prince integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindbladConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest step relative to the grid step.
    pub min_step: f64,
}

impl Default for LindbladConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            min_step: 1e-12,
        }
    }
}

struct Rhs<'a> {
    k: &'a CMatrix,
    kd: CMatrix,
    ls: &'a [CMatrix],
    lds: Vec<CMatrix>,
}

impl Rhs<'_> {
    fn eval(&self, rho: &CMatrix) -> CMatrix {
        let mut out = self.k * rho + rho * &self.kd;
        for (l, ld) in self.ls.iter().zip(&self.lds) {
            out += l * rho * ld;
        }
        out
    }
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B_ERR: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// First-tick density `2 tr[Vρ(t)]` on `grid`, integrating the no-tick
/// master equation with an adaptive Dormand–Prince 5(4) scheme.
pub fn lindblad_first_tick(
    spec: &LindbladClockSpec,
    grid: &TimeGrid,
    cfg: &LindbladConfig,
) -> Result<DelayFunction, QuantumError> {
    let (k, v) = spec.generator();
    let rhs = Rhs {
        k: &k,
        kd: dagger(&k),
        ls: &spec.ls,
        lds: spec.ls.iter().map(dagger).collect(),
    };
    let n = grid.len();
    let limit = DelayConfig::default().max_points;
    if n > limit {
        return Err(DelayError::GridOverflow { needed: n, limit }.into());
    }
    let density = |rho: &CMatrix| 2.0 * (&v * rho).trace().re;
    let mut rho = spec.rho0.clone();
    let mut values = Vec::with_capacity(n);
    values.push(density(&rho).max(0.0));
    let mut h = grid.dt;
    let mut f0 = rhs.eval(&rho);
    for i in 1..n {
        let t_end = i as f64 * grid.dt;
        let mut t = t_end - grid.dt;
        while t < t_end - 1e-15 * t_end.max(1.0) {
            let step = h.min(t_end - t);
            let mut ks: Vec<CMatrix> = Vec::with_capacity(7);
            ks.push(f0.clone());
            for s in 1..7 {
                let mut y = rho.clone();
                for (j, kj) in ks.iter().enumerate() {
                    if A[s][j] != 0.0 {
                        y += kj * Complex64::new(step * A[s][j], 0.0);
                    }
                }
                ks.push(rhs.eval(&y));
            }
            // Stage 7 is evaluated at the fifth-order solution.
            let mut y5 = rho.clone();
            for (j, kj) in ks.iter().take(6).enumerate() {
                if A[6][j] != 0.0 {
                    y5 += kj * Complex64::new(step * A[6][j], 0.0);
                }
            }
            let mut err = CMatrix::zeros(rho.nrows(), rho.ncols());
            for (j, kj) in ks.iter().enumerate() {
                if B_ERR[j] != 0.0 {
                    err += kj * Complex64::new(step * B_ERR[j], 0.0);
                }
            }
            let ratio = err
                .iter()
                .zip(rho.iter().zip(y5.iter()))
                .map(|(e, (a, b))| e.norm() / (cfg.atol + cfg.rtol * a.norm().max(b.norm())))
                .fold(0.0, f64::max);
            if ratio <= 1.0 {
                t += step;
                rho = y5;
                f0 = ks.pop().expect("seven stages");
            }
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * factor;
            if h < cfg.min_step * grid.dt {
                return Err(QuantumError::StepSizeUnderflow { t, step: h });
            }
        }
        values.push(density(&rho).max(0.0));
    }
    Ok(DelayFunction::Sampled(SampledDelay::new(grid.dt, values)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::ladder_clock;
    use crate::quantum::{swp_state, tick_density};

    #[test]
    fn reset_clock_matches_pure_state_density() {
        let spec = QuantumResetClockSpec::from_time_diagonal(
            2.0 * std::f64::consts::PI,
            &[0.0, 0.3, 4.0, 1.0],
            swp_state(4, 0),
        )
        .unwrap();
        let l = LindbladClockSpec::from_reset(&spec).unwrap();
        let grid = TimeGrid::new(0.01, 3.0).unwrap();
        let tau = lindblad_first_tick(&l, &grid, &LindbladConfig::default()).unwrap();
        for i in [0, 7, 100, 250, 300] {
            let t = i as f64 * grid.dt;
            assert!((tau.density(t) - tick_density(&spec, t)).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn ladder_embedding_matches_classical_delay() {
        let c = ladder_clock(3).unwrap();
        let grid = TimeGrid::new(0.05, 20.0).unwrap();
        let q = lindblad_first_tick(&LindbladClockSpec::from_classical(&c).unwrap(), &grid, &LindbladConfig::default())
            .unwrap();
        let cl = c.first_tick_delay(&grid).unwrap();
        for i in 0..grid.len() {
            let t = i as f64 * grid.dt;
            assert!((q.density(t) - cl.density(t)).abs() < 1e-9);
        }
    }

    #[test]
    fn leaky_classical_clock_is_rejected() {
        use crate::classical::{ClassicalClock, PopulationVector, StochasticGeneratorPair};
        let c = ClassicalClock::new(
            StochasticGeneratorPair::new(DMatrix::from_element(1, 1, -2.0), DMatrix::from_element(1, 1, 1.0)).unwrap(),
            PopulationVector::basis(1, 0),
        )
        .unwrap();
        assert!(matches!(
            LindbladClockSpec::from_classical(&c),
            Err(QuantumError::NotNormPreserving(_))
        ));
    }
}
