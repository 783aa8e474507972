// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON description of a quantum reset clock.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{
    quasi_ideal_state, swp_state, QuantumError, QuantumResetClockSpec, QuasiIdealParams, SincPotential,
};

fn default_omega() -> f64 {
    2.0 * PI
}

fn default_eta() -> f64 {
    0.25
}

/// Kind of initial state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateJson {
    /// Gaussian superposition of time states with width `sigma0`.
    #[default]
    QuasiIdeal,
    /// Time state `|θ_{k0}⟩`.
    Swp,
}

/// Tick potential. Unset sinc fields take the values derived from the
/// Quasi-Ideal state parameters and `eta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialJson {
    QuasiIdealSinc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_pot: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x0: Option<f64>,
    },
    /// Time-basis diagonal of `V_C`, in units of ω.
    Diag { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumSpecJson {
    pub d: usize,
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<f64>,
    #[serde(default)]
    pub k0: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub state: StateJson,
    pub potential: PotentialJson,
}

impl QuantumSpecJson {
    /// Quasi-Ideal clock with every potential parameter derived.
    pub fn quasi_ideal(d: usize, sigma0: f64, eta: f64) -> Self {
        Self {
            d,
            omega: default_omega(),
            sigma0: Some(sigma0),
            n0: None,
            k0: 0.0,
            eta,
            state: StateJson::QuasiIdeal,
            potential: PotentialJson::QuasiIdealSinc {
                delta: None,
                n: None,
                n_pot: None,
                x0: None,
            },
        }
    }

    /// State parameters, when `sigma0` is given.
    pub fn params(&self) -> Option<QuasiIdealParams> {
        self.sigma0.map(|sigma0| QuasiIdealParams {
            d: self.d,
            sigma0,
            n0: self.n0.unwrap_or((self.d as f64 - 1.0) / 2.0),
            k0: self.k0,
            eta: self.eta,
        })
    }

    pub fn build(&self) -> Result<QuantumResetClockSpec, QuantumError> {
        if self.d == 0 {
            return Err(QuantumError::Invalid("d must be at least 1".into()));
        }
        let params = self.params();
        if let Some(p) = &params {
            p.validate()?;
        }
        let psi0 = match (self.state, &params) {
            (StateJson::Swp, _) => {
                if self.k0.fract() != 0.0 {
                    return Err(QuantumError::Invalid(format!("SWP state needs an integer k0, got {}", self.k0)));
                }
                swp_state(self.d, self.k0 as i64)
            }
            (StateJson::QuasiIdeal, Some(p)) => quasi_ideal_state(p)?,
            (StateJson::QuasiIdeal, None) => {
                return Err(QuantumError::Invalid("Quasi-Ideal state needs sigma0".into()));
            }
        };
        match &self.potential {
            PotentialJson::QuasiIdealSinc { delta, n, n_pot, x0 } => {
                let derived = params.as_ref().map(QuasiIdealParams::derived);
                let missing = |name: &str| QuantumError::Invalid(format!("{name} required without sigma0"));
                let delta = delta.or(derived.map(|p| p.delta)).ok_or_else(|| missing("delta"))?;
                let n = n.or(derived.map(|p| p.n)).ok_or_else(|| missing("n"))?;
                let x0 = x0.or(derived.map(|p| p.x0)).ok_or_else(|| missing("x0"))?;
                let n_pot = n_pot.or(derived.map(|p| p.n_pot)).ok_or_else(|| missing("n_pot"))?;
                let pot = SincPotential::new(self.d, delta, n, n_pot, x0)?;
                QuantumResetClockSpec::with_sinc_potential(self.omega, &pot, psi0)
            }
            PotentialJson::Diag { values } => {
                if values.len() != self.d {
                    return Err(QuantumError::Invalid(format!(
                        "{} potential values for d = {}",
                        values.len(),
                        self.d
                    )));
                }
                let v: Vec<f64> = values.iter().map(|v| v * self.omega).collect();
                QuantumResetClockSpec::from_time_diagonal(self.omega, &v, psi0)
            }
        }
    }
}
