// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON form `{d, N, T, initial}` with row-major matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{ClassicalClock, ClassicalError, PopulationVector, StochasticGeneratorPair};

/// A matrix as a flat row-major array or as an array of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixJson {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

impl MatrixJson {
    fn to_matrix(&self, cols: usize, name: &str) -> Result<DMatrix<f64>, ClassicalError> {
        let bad = |msg: String| ClassicalError::Invalid(format!("{name}: {msg}"));
        match self {
            Self::Flat(v) => {
                if cols == 0 || v.len() % cols != 0 || v.is_empty() {
                    return Err(bad(format!("{} entries is not a multiple of d = {cols}", v.len())));
                }
                Ok(DMatrix::from_row_slice(v.len() / cols, cols, v))
            }
            Self::Rows(rows) => {
                if rows.is_empty() || rows.iter().any(|r| r.len() != cols) {
                    return Err(bad(format!("every row needs {cols} entries")));
                }
                let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                Ok(DMatrix::from_row_slice(rows.len(), cols, &flat))
            }
        }
    }

    fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self::Flat(m.transpose().iter().copied().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClockJson {
    pub d: usize,
    #[serde(rename = "N")]
    pub no_tick: MatrixJson,
    #[serde(rename = "T")]
    pub tick: MatrixJson,
    pub initial: Vec<f64>,
}

impl TryFrom<ClockJson> for ClassicalClock {
    type Error = ClassicalError;

    fn try_from(j: ClockJson) -> Result<Self, Self::Error> {
        let n = j.no_tick.to_matrix(j.d, "N")?;
        if n.nrows() != j.d {
            return Err(ClassicalError::Invalid(format!("N must be {0}×{0}", j.d)));
        }
        let t = j.tick.to_matrix(j.d, "T")?;
        ClassicalClock::new(StochasticGeneratorPair::new(n, t)?, PopulationVector::from_slice(&j.initial)?)
    }
}

impl From<&ClassicalClock> for ClockJson {
    fn from(c: &ClassicalClock) -> Self {
        Self {
            d: c.dim(),
            no_tick: MatrixJson::from_matrix(c.generators().no_tick()),
            tick: MatrixJson::from_matrix(c.generators().tick()),
            initial: c.initial().as_vector().iter().copied().collect(),
        }
    }
}

impl ClassicalClock {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ClockJson::from(self)).expect("plain data serialises")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self, ClassicalError> {
        let j: ClockJson =
            serde_json::from_value(value).map_err(|e| ClassicalError::Invalid(format!("clock JSON: {e}")))?;
        j.try_into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{ladder_clock, random_clock};

    #[test]
    fn round_trip() {
        let c = random_clock(3, 9, 0.8).unwrap();
        assert_eq!(ClassicalClock::from_json(c.to_json()).unwrap(), c);
    }

    #[test]
    fn row_major_layout() {
        let j = ladder_clock(2).unwrap().to_json();
        assert_eq!(j["N"], serde_json::json!([-1.0, 0.0, 1.0, -1.0]));
        assert_eq!(j["T"], serde_json::json!([0.0, 1.0, 0.0, 0.0]));
        let nested = serde_json::json!({
            "d": 2, "N": [[-1.0, 0.0], [1.0, -1.0]], "T": [[0.0, 1.0], [0.0, 0.0]], "initial": [1.0, 0.0]
        });
        assert_eq!(ClassicalClock::from_json(nested).unwrap(), ladder_clock(2).unwrap());
    }

    #[test]
    fn invalid_json_is_rejected() {
        let bad = serde_json::json!({"d": 2, "N": [1.0, 0.0, 0.0, -1.0], "T": [0.0, 0.0, 0.0, 0.0], "initial": [1.0, 0.0]});
        assert!(ClassicalClock::from_json(bad).is_err());
    }
}
