// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! First-tick moments from Lyapunov equations.
//!
//! With `A = −iH_C − V_C`, `X = ∫₀^∞ e^{A†t}e^{At} dt` and
//! `Y = ∫₀^∞ t e^{A†t}e^{At} dt` solve `A†X + XA = −1` and `A†Y + YA = −X`,
//! so `μ = ⟨ψ₀|X|ψ₀⟩` and `χ = 2⟨ψ₀|Y|ψ₀⟩`. Both are solved in the Schur
//! basis of `A`.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use super::{effective_hamiltonian, QuantumError, QuantumResetClockSpec, I};
use crate::delay::Moments;

/// Solves `T†Y + YT = −C` for upper-triangular `T`.
fn solve_triangular_lyapunov(t: &DMatrix<Complex64>, c: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let d = t.nrows();
    let mut y = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut rhs = -c[(i, j)];
            for k in 0..i {
                rhs -= t[(k, i)].conj() * y[(k, j)];
            }
            for k in 0..j {
                rhs -= y[(i, k)] * t[(k, j)];
            }
            let denom = t[(i, i)].conj() + t[(j, j)];
            if denom.norm() == 0.0 {
                return None;
            }
            y[(i, j)] = rhs / denom;
        }
    }
    Some(y)
}

/// Exact `Q`, `μ`, `χ` of the first tick. Requires every eigenmode of the
/// effective Hamiltonian to decay, so that `Q = 1`.
pub fn quantum_accuracy_exact(spec: &QuantumResetClockSpec) -> Result<Moments, QuantumError> {
    let a = effective_hamiltonian(spec).map(|z| -I * z);
    let (q, t) = Schur::new(a).unpack();
    let decay = (0..t.nrows()).map(|i| -t[(i, i)].re).fold(f64::INFINITY, f64::min);
    if decay.is_nan() || decay <= 1e-12 * (1.0 + spec.omega()) {
        return Err(QuantumError::Invalid(format!(
            "survival does not decay: slowest rate {decay:e}"
        )));
    }
    let d = t.nrows();
    let not_solvable = || QuantumError::Invalid("Lyapunov equation is singular".into());
    let x = solve_triangular_lyapunov(&t, &DMatrix::identity(d, d)).ok_or_else(not_solvable)?;
    let y = solve_triangular_lyapunov(&t, &x).ok_or_else(not_solvable)?;
    let phi = q.adjoint() * spec.psi0();
    let mu = phi.dotc(&(&x * &phi)).re;
    let chi = 2.0 * phi.dotc(&(&y * &phi)).re;
    Ok(Moments::from_normalised(1.0, mu, chi))
}
