// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Randomised properties shared by the property tests and the acceptance run.

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use tickbench::classical::{random_clock, TimeGrid};
use tickbench::delay::{convolve, mix, partial_norm, rescale, DelayFunction};
use tickbench::quantum::{
    lindblad_first_tick, survival, tick_density, LindbladClockSpec, LindbladConfig, QuantumResetClockSpec,
};

pub const CASES: u32 = 200;
const TOL_PROP: f64 = 1e-4;
const TOL_MOM: f64 = 1e-6;
const DT: f64 = 0.01;
const POINTS: usize = 1200;

/// Up to three Gaussian bumps on a fixed grid, normalised to unit mass.
#[derive(Debug, Clone)]
pub struct Bumps(Vec<(f64, f64, f64)>);

impl Bumps {
    pub fn delay(&self) -> DelayFunction {
        let mut v: Vec<f64> = (0..POINTS)
            .map(|i| {
                let t = i as f64 * DT;
                self.0
                    .iter()
                    .map(|(c, w, a)| a * (-0.5 * ((t - c) / w).powi(2)).exp())
                    .sum::<f64>()
            })
            .collect();
        let total: f64 = v.iter().sum::<f64>() * DT;
        for x in &mut v {
            *x /= total * 1.001;
        }
        DelayFunction::sampled(DT, v).expect("valid density")
    }
}

pub fn bumps() -> impl Strategy<Value = Bumps> {
    prop::collection::vec((1.0..4.0f64, 0.1..0.6f64, 0.1..1.0f64), 1..=3).prop_map(Bumps)
}

fn accuracy(d: &DelayFunction) -> f64 {
    d.moments().expect("moments").accuracy
}

pub fn convolution_bound(a: &Bumps, b: &Bumps) -> Result<(), TestCaseError> {
    let (a, b) = (a.delay(), b.delay());
    let c = convolve(&[a.clone(), b.clone()]).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let bound = accuracy(&a) + accuracy(&b);
    let r = accuracy(&c);
    prop_assert!(r <= bound * (1.0 + TOL_PROP), "R = {r}, R1 + R2 = {bound}");
    Ok(())
}

pub fn mixture_bound(a: &Bumps, b: &Bumps, p: f64) -> Result<(), TestCaseError> {
    let (a, b) = (a.delay(), b.delay());
    let best = accuracy(&a).max(accuracy(&b));
    let parts = [a.scaled(p).unwrap(), b.scaled(1.0 - p).unwrap()];
    let m = mix(&parts).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let r = accuracy(&m);
    prop_assert!(r <= best * (1.0 + TOL_PROP), "R = {r}, max Ri = {best}");
    Ok(())
}

pub fn rescale_invariance(a: &Bumps, scale: f64) -> Result<(), TestCaseError> {
    let a = a.delay();
    let r = accuracy(&a);
    let s = rescale(&a, scale).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let m = s.moments().unwrap();
    prop_assert!((m.accuracy - r).abs() <= TOL_MOM * r, "{} vs {r}", m.accuracy);
    let mu = accuracy_mean(&a) / scale;
    prop_assert!((m.mean - mu).abs() <= TOL_MOM * mu);
    Ok(())
}

fn accuracy_mean(d: &DelayFunction) -> f64 {
    d.moments().unwrap().mean
}

pub fn partial_norm_product(a: &Bumps, b: &Bumps, t: f64) -> Result<(), TestCaseError> {
    let (a, b) = (a.delay(), b.delay());
    let c = convolve(&[a.clone(), b.clone()]).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let lhs = partial_norm(&c, t);
    let rhs = partial_norm(&a, t) * partial_norm(&b, t);
    prop_assert!(lhs <= rhs * (1.0 + TOL_PROP) + 1e-12, "P_t = {lhs}, product = {rhs}");
    Ok(())
}

/// Random reset clock: time-basis potential values and a random state.
#[derive(Debug, Clone)]
pub struct ResetClock {
    pub v: Vec<f64>,
    pub psi: Vec<(f64, f64)>,
}

impl ResetClock {
    pub fn spec(&self) -> QuantumResetClockSpec {
        let psi = DVector::from_iterator(self.psi.len(), self.psi.iter().map(|(re, im)| Complex64::new(*re, *im)));
        let norm = psi.norm();
        QuantumResetClockSpec::from_time_diagonal(2.0 * std::f64::consts::PI, &self.v, psi.unscale(norm))
            .expect("valid spec")
    }
}

pub fn reset_clock(max_d: usize, potential: bool) -> impl Strategy<Value = ResetClock> {
    (1..=max_d).prop_flat_map(move |d| {
        let hi = if potential { 20.0 } else { 0.0 };
        (
            prop::collection::vec(0.0..=hi, d),
            prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d)
                .prop_filter("nonzero state", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 0.1)),
        )
            .prop_map(|(v, psi)| ResetClock { v, psi })
    })
}

pub fn density_is_survival_derivative(c: &ResetClock, t: f64) -> Result<(), TestCaseError> {
    let spec = c.spec();
    let h = 1e-3;
    let s = |x: f64| survival(&spec, x).1;
    let ds = (-s(t + 2.0 * h) + 8.0 * s(t + h) - 8.0 * s(t - h) + s(t - 2.0 * h)) / (12.0 * h);
    let p = tick_density(&spec, t);
    let scale = p.abs().max(1e-3);
    prop_assert!((p + ds).abs() <= 1e-5 * scale, "P = {p}, -dS/dt = {}", -ds);
    Ok(())
}

pub fn free_evolution_is_periodic(c: &ResetClock) -> Result<(), TestCaseError> {
    let spec = c.spec();
    let (psi, _) = survival(&spec, spec.period());
    let overlap = spec.psi0().dotc(&psi);
    let phase = overlap / overlap.norm();
    let err = (psi - spec.psi0() * phase).norm();
    prop_assert!(err <= 1e-10, "‖ψ(T₀) − e^(iφ)ψ₀‖ = {err}");
    Ok(())
}

pub fn lindblad_matches_classical(d: usize, seed: u64, density: f64) -> Result<(), TestCaseError> {
    let clock = random_clock(d, seed, density).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let grid = TimeGrid::new(0.05, 10.0).unwrap();
    let spec = LindbladClockSpec::from_classical(&clock).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let q = lindblad_first_tick(&spec, &grid, &LindbladConfig::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let cl = clock.first_tick_delay(&grid).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for i in 0..grid.len() {
        let t = i as f64 * grid.dt;
        let (a, b) = (q.density(t), cl.density(t));
        prop_assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "t = {t}: {a} vs {b}");
    }
    Ok(())
}

/// Runs every property for [`CASES`] cases and returns `(name, outcome)`.
pub fn run_all() -> Vec<(&'static str, Result<(), String>)> {
    fn run<S: Strategy>(
        strategy: S,
        test: impl Fn(S::Value) -> Result<(), TestCaseError>,
    ) -> Result<(), String> {
        let mut runner = TestRunner::new(Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        });
        runner.run(&strategy, test).map_err(|e| e.to_string())
    }
    vec![
        ("convolution bound", run((bumps(), bumps()), |(a, b)| convolution_bound(&a, &b))),
        ("mixture bound", run((bumps(), bumps(), 0.01..0.99f64), |(a, b, p)| mixture_bound(&a, &b, p))),
        (
            "rescale invariance",
            run((bumps(), prop::sample::select(vec![0.1, 1.0, 10.0, 1000.0])), |(a, s)| {
                rescale_invariance(&a, s)
            }),
        ),
        (
            "partial-norm product bound",
            run((bumps(), bumps(), 0.0..20.0f64), |(a, b, t)| partial_norm_product(&a, &b, t)),
        ),
        (
            "tick density is -dS/dt",
            run((reset_clock(6, true), 0.01..3.0f64), |(c, t)| density_is_survival_derivative(&c, t)),
        ),
        ("free evolution periodicity", run(reset_clock(16, false), |c| free_evolution_is_periodic(&c))),
        (
            "Lindblad embedding of classical clocks",
            run((1..=4usize, any::<u64>(), 0.3..=1.0f64), |(d, s, p)| lindblad_matches_classical(d, s, p)),
        ),
    ]
}
