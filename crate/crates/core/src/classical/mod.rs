// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Classical stochastic clocks.
//!
//! A d-state clock evolves its population vector by `dV/dt = (N + T)V`,
//! where `N` generates the dynamics between ticks and `T` the transitions
//! that emit a tick. The first-tick delay is `τ(t) = ‖T e^{Nt} V₀‖₁`, a
//! phase-type density, so its moments are also available in closed form.

mod canonical;
mod phase_type;
mod serial;

pub use canonical::{canonicalize_to_reset, sub_event_accuracies};
pub use phase_type::PhaseType;
pub use serial::ClockJson;

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delay::{DelayConfig, DelayError, DelayFunction, Moments, SampledDelay};
use crate::linalg::expm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("invalid clock: {0}")]
    Invalid(String),
    #[error("generator pair violates: {0}")]
    Violations(ValidationReport),
    #[error("tick generator must be square for tick sequences (got {rows}×{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("clock never ticks from any canonical state")]
    DegenerateClock,
    #[error(transparent)]
    Delay(#[from] DelayError),
}

/// One violated generator condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    NonFinite,
    /// Negative off-diagonal entry of `N`.
    NonTickOffDiagonal { row: usize, col: usize, value: f64 },
    /// Positive diagonal entry of `N`.
    NonTickDiagonal { index: usize, value: f64 },
    /// Negative entry of `T`.
    Tick { row: usize, col: usize, value: f64 },
    /// Column of `N + T` summing to a positive value.
    Stochastic { col: usize, sum: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NonFinite => write!(f, "non-finite matrix entry"),
            Self::NonTickOffDiagonal { row, col, value } => {
                write!(f, "non-tick condition: N[{row}][{col}] = {value} < 0")
            }
            Self::NonTickDiagonal { index, value } => {
                write!(f, "non-tick condition: N[{index}][{index}] = {value} > 0")
            }
            Self::Tick { row, col, value } => write!(f, "tick condition: T[{row}][{col}] = {value} < 0"),
            Self::Stochastic { col, sum } => {
                write!(f, "stochastic condition: column {col} sums to {sum} > 0")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Nonnegative populations summing to at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationVector(DVector<f64>);

impl PopulationVector {
    pub fn new(entries: DVector<f64>) -> Result<Self, ClassicalError> {
        let tol = DelayConfig::default().tol_norm;
        if entries.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(ClassicalError::Invalid("population entries must be finite and nonnegative".into()));
        }
        if entries.sum() > 1.0 + tol {
            return Err(ClassicalError::Invalid(format!("population sum {} exceeds 1", entries.sum())));
        }
        Ok(Self(entries))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self, ClassicalError> {
        Self::new(DVector::from_column_slice(entries))
    }

    /// Canonical basis vector `e_i`.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        Self(v)
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// No-tick generator `N` (d×d) and tick generator `T` (d′×d).
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticGeneratorPair {
    no_tick: DMatrix<f64>,
    tick: DMatrix<f64>,
}

impl StochasticGeneratorPair {
    /// Checks shapes only; see [`validate`](Self::validate) for the sign conditions.
    pub fn new(no_tick: DMatrix<f64>, tick: DMatrix<f64>) -> Result<Self, ClassicalError> {
        if no_tick.nrows() != no_tick.ncols() || no_tick.nrows() == 0 {
            return Err(ClassicalError::Invalid(format!(
                "N must be square and non-empty, got {}×{}",
                no_tick.nrows(),
                no_tick.ncols()
            )));
        }
        if tick.ncols() != no_tick.ncols() || tick.nrows() == 0 {
            return Err(ClassicalError::Invalid(format!(
                "T must have {} columns, got {}×{}",
                no_tick.ncols(),
                tick.nrows(),
                tick.ncols()
            )));
        }
        Ok(Self { no_tick, tick })
    }

    pub fn no_tick(&self) -> &DMatrix<f64> {
        &self.no_tick
    }

    pub fn tick(&self) -> &DMatrix<f64> {
        &self.tick
    }

    pub fn dim(&self) -> usize {
        self.no_tick.nrows()
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_with(DelayConfig::default().tol_norm)
    }

    pub fn validate_with(&self, tol: f64) -> ValidationReport {
        let mut violations = Vec::new();
        let (n, t) = (&self.no_tick, &self.tick);
        if n.iter().chain(t.iter()).any(|v| !v.is_finite()) {
            return ValidationReport {
                violations: vec![Violation::NonFinite],
            };
        }
        let d = self.dim();
        for j in 0..d {
            for i in 0..d {
                let value = n[(i, j)];
                if i == j && value > tol {
                    violations.push(Violation::NonTickDiagonal { index: i, value });
                } else if i != j && value < -tol {
                    violations.push(Violation::NonTickOffDiagonal { row: i, col: j, value });
                }
            }
        }
        for j in 0..d {
            for i in 0..t.nrows() {
                if t[(i, j)] < -tol {
                    violations.push(Violation::Tick {
                        row: i,
                        col: j,
                        value: t[(i, j)],
                    });
                }
            }
        }
        for j in 0..d {
            let sum = n.column(j).sum() + t.column(j).sum();
            if sum > tol {
                violations.push(Violation::Stochastic { col: j, sum });
            }
        }
        ValidationReport { violations }
    }

    /// Column sums of `T`: the tick rate out of each state.
    pub fn tick_rates(&self) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.tick.column_iter().map(|c| c.sum()))
    }
}

/// A uniform time grid `0, dt, …, t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub t_max: f64,
}

impl TimeGrid {
    pub fn new(dt: f64, t_max: f64) -> Result<Self, ClassicalError> {
        if !(dt > 0.0 && dt.is_finite() && t_max >= 0.0 && t_max.is_finite()) {
            return Err(ClassicalError::Invalid(format!("grid dt {dt}, horizon {t_max}")));
        }
        Ok(Self { dt, t_max })
    }

    pub fn len(&self) -> usize {
        (self.t_max / self.dt).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A generator pair together with its initial populations.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalClock {
    generators: StochasticGeneratorPair,
    initial: PopulationVector,
}

impl ClassicalClock {
    pub fn new(generators: StochasticGeneratorPair, initial: PopulationVector) -> Result<Self, ClassicalError> {
        let report = generators.validate();
        if !report.is_valid() {
            return Err(ClassicalError::Violations(report));
        }
        if initial.len() != generators.dim() {
            return Err(ClassicalError::Invalid(format!(
                "initial state has {} entries, clock dimension is {}",
                initial.len(),
                generators.dim()
            )));
        }
        if (initial.sum() - 1.0).abs() > DelayConfig::default().tol_norm {
            return Err(ClassicalError::Invalid(format!(
                "initial populations sum to {}, expected 1",
                initial.sum()
            )));
        }
        Ok(Self { generators, initial })
    }

    pub fn generators(&self) -> &StochasticGeneratorPair {
        &self.generators
    }

    pub fn initial(&self) -> &PopulationVector {
        &self.initial
    }

    pub fn dim(&self) -> usize {
        self.generators.dim()
    }

    /// True if every tick returns the clock to its initial state, i.e. each
    /// column of `T` is proportional to the initial populations.
    pub fn is_reset(&self) -> bool {
        let t = self.generators.tick();
        if t.nrows() != t.ncols() {
            return false;
        }
        let v = self.initial.as_vector();
        t.column_iter().all(|c| {
            let s = c.sum();
            c.iter().zip(v.iter()).all(|(x, y)| (x - s * y).abs() <= 1e-12 * s.max(1.0))
        })
    }

    /// `e^{Nt} V₀`.
    pub fn evolve_no_tick(&self, t: f64) -> PopulationVector {
        let e = expm(&(self.generators.no_tick() * t));
        let v = (e * self.initial.as_vector()).map(|x| x.max(0.0));
        PopulationVector(v)
    }

    /// Phase-type view of the first-tick delay.
    pub fn phase_type(&self) -> PhaseType {
        PhaseType::new(
            self.generators.no_tick(),
            &self.generators.tick_rates(),
            self.initial.as_vector(),
        )
    }

    /// Closed-form moments of the first-tick delay.
    pub fn exact_moments(&self) -> Result<Moments, ClassicalError> {
        Ok(self.phase_type().moments()?)
    }

    /// Grid resolving the first-tick delay: `points_per_sigma` per standard
    /// deviation, extended until the neglected tail is below `tail_tol`.
    pub fn default_grid(&self, cfg: &DelayConfig) -> Result<TimeGrid, ClassicalError> {
        let pt = self.phase_type();
        let m = pt.moments()?;
        let dt = m.std_dev / cfg.points_per_sigma;
        let t_max = pt.horizon(&m, cfg.tail_tol);
        TimeGrid::new(dt, t_max)
    }

    /// `τ(t) = ‖T e^{Nt} V₀‖₁` sampled on `grid`.
    pub fn first_tick_delay(&self, grid: &TimeGrid) -> Result<DelayFunction, ClassicalError> {
        self.first_tick_delay_with(grid, &DelayConfig::default())
    }

    pub fn first_tick_delay_with(&self, grid: &TimeGrid, cfg: &DelayConfig) -> Result<DelayFunction, ClassicalError> {
        let n = checked_len(grid, cfg)?;
        let step = expm(&(self.generators.no_tick() * grid.dt));
        let rates = self.generators.tick_rates();
        let mut v = self.initial.as_vector().clone();
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(rates.dot(&v).max(0.0));
            v = &step * v;
        }
        let tail = self.phase_type().tail_mass(grid.t_max) > cfg.tol_norm;
        Ok(DelayFunction::Sampled(SampledDelay::with_tail_flag(grid.dt, values, tail)?))
    }

    /// Delays of ticks `1..=m` from the Markov sequence of tick states.
    ///
    /// The populations of the clock after `n` ticks are propagated together
    /// through the block generator with `N` on the diagonal and `T` on the
    /// first subdiagonal, so no convolution of sampled data is needed.
    pub fn tick_sequence_delays(&self, m: usize, grid: &TimeGrid) -> Result<Vec<DelayFunction>, ClassicalError> {
        self.tick_sequence_delays_with(m, grid, &DelayConfig::default())
    }

    pub fn tick_sequence_delays_with(
        &self,
        m: usize,
        grid: &TimeGrid,
        cfg: &DelayConfig,
    ) -> Result<Vec<DelayFunction>, ClassicalError> {
        if m == 0 {
            return Err(ClassicalError::Invalid("tick count must be at least 1".into()));
        }
        let (g, rates, v0) = self.sequence_generator(m)?;
        let d = self.dim();
        let n = checked_len(grid, cfg)?;
        let step = expm(&(&g * grid.dt));
        let mut v = v0;
        let mut values = vec![Vec::with_capacity(n); m];
        for _ in 0..n {
            for (k, vals) in values.iter_mut().enumerate() {
                let block = v.rows(k * d, d);
                vals.push(rates.dot(&block).max(0.0));
            }
            v = &step * v;
        }
        let exact = self.sequence_phase_types(m)?;
        values
            .into_iter()
            .zip(exact)
            .map(|(vals, pt)| {
                let tail = pt.tail_mass(grid.t_max) > cfg.tol_norm;
                Ok(DelayFunction::Sampled(SampledDelay::with_tail_flag(grid.dt, vals, tail)?))
            })
            .collect()
    }

    /// Closed-form phase-type description of ticks `1..=m`.
    pub fn sequence_phase_types(&self, m: usize) -> Result<Vec<PhaseType>, ClassicalError> {
        let (g, rates, v0) = self.sequence_generator(m)?;
        let d = self.dim();
        Ok((0..m)
            .map(|k| {
                let mut s = DVector::zeros(m * d);
                s.rows_mut(k * d, d).copy_from(&rates);
                PhaseType::new(&g, &s, &v0)
            })
            .collect())
    }

    /// Populations `V⁽ⁿ⁾(t)` after exactly `n = 0..m` ticks.
    pub fn tick_states(&self, m: usize, t: f64) -> Result<Vec<PopulationVector>, ClassicalError> {
        let (g, _, v0) = self.sequence_generator(m + 1)?;
        let d = self.dim();
        let v = expm(&(g * t)) * v0;
        Ok((0..=m)
            .map(|k| PopulationVector(v.rows(k * d, d).map(|x| x.max(0.0))))
            .collect())
    }

    fn sequence_generator(&self, m: usize) -> Result<(DMatrix<f64>, DVector<f64>, DVector<f64>), ClassicalError> {
        let t = self.generators.tick();
        if t.nrows() != t.ncols() {
            return Err(ClassicalError::NotSquare {
                rows: t.nrows(),
                cols: t.ncols(),
            });
        }
        let d = self.dim();
        let mut g = DMatrix::zeros(m * d, m * d);
        for k in 0..m {
            g.view_mut((k * d, k * d), (d, d)).copy_from(self.generators.no_tick());
            if k + 1 < m {
                g.view_mut(((k + 1) * d, k * d), (d, d)).copy_from(t);
            }
        }
        let mut v0 = DVector::zeros(m * d);
        v0.rows_mut(0, d).copy_from(self.initial.as_vector());
        Ok((g, self.generators.tick_rates(), v0))
    }
}

fn checked_len(grid: &TimeGrid, cfg: &DelayConfig) -> Result<usize, ClassicalError> {
    let n = grid.len();
    if n > cfg.max_points {
        return Err(DelayError::GridOverflow {
            needed: n,
            limit: cfg.max_points,
        }
        .into());
    }
    Ok(n)
}

/// The Ladder Clock: a unidirectional chain `0 → 1 → … → d−1` at unit rate
/// that ticks from the last site back to the first.
pub fn ladder_clock(d: usize) -> Result<ClassicalClock, ClassicalError> {
    if d == 0 {
        return Err(ClassicalError::Invalid("dimension must be at least 1".into()));
    }
    let mut n = DMatrix::zeros(d, d);
    for i in 0..d {
        n[(i, i)] = -1.0;
        if i + 1 < d {
            n[(i + 1, i)] = 1.0;
        }
    }
    let mut t = DMatrix::zeros(d, d);
    t[(0, d - 1)] = 1.0;
    ClassicalClock::new(StochasticGeneratorPair::new(n, t)?, PopulationVector::basis(d, 0))
}

/// Random norm-preserving clock. Each off-diagonal entry of `N` is
/// present with probability `density` and drawn from U(0,1); each entry of
/// `T` likewise from 0.3·U(0,1), with at least one tick entry forced. The
/// diagonal of `N` makes every column of `N + T` sum to zero, and the
/// initial populations are random.
pub fn random_clock(d: usize, seed: u64, density: f64) -> Result<ClassicalClock, ClassicalError> {
    if d == 0 {
        return Err(ClassicalError::Invalid("dimension must be at least 1".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(ClassicalError::Invalid(format!("density {density} not in (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = DMatrix::zeros(d, d);
    let mut t = DMatrix::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            if i != j && rng.random::<f64>() < density {
                n[(i, j)] = rng.random::<f64>();
            }
        }
    }
    for j in 0..d {
        for i in 0..d {
            if rng.random::<f64>() < density {
                t[(i, j)] = 0.3 * rng.random::<f64>();
            }
        }
    }
    if t.iter().all(|x| *x == 0.0) {
        let (i, j) = (rng.random_range(0..d), rng.random_range(0..d));
        t[(i, j)] = 0.3 * (1.0 - rng.random::<f64>());
    }
    for j in 0..d {
        let out: f64 = (0..d).filter(|&i| i != j).map(|i| n[(i, j)]).sum::<f64>() + t.column(j).sum();
        n[(j, j)] = -out;
    }
    let w = DVector::from_fn(d, |_, _| 1.0 - rng.random::<f64>());
    let initial = PopulationVector(&w / w.sum());
    ClassicalClock::new(StochasticGeneratorPair::new(n, t)?, initial)
}
