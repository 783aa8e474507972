// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Sequencing, mixing and rescaling of delay functions.

use super::{erlang_cdf, DelayConfig, DelayError, DelayFunction, SampledDelay};
use crate::linalg::GREGORY_ENDS;

/// Erlang view of an analytic kind: (shape, rate, mass).
fn as_erlang(d: &DelayFunction) -> Option<(u32, f64, f64)> {
    match *d {
        DelayFunction::Exponential { rate, amplitude } => Some((1, rate, amplitude / rate)),
        DelayFunction::Erlang { shape, rate, mass } => Some((shape, rate, mass)),
        DelayFunction::Sampled(_) => None,
    }
}

fn from_erlang(shape: u32, rate: f64, mass: f64) -> DelayFunction {
    if shape == 1 {
        DelayFunction::Exponential {
            rate,
            amplitude: mass * rate,
        }
    } else {
        DelayFunction::Erlang { shape, rate, mass }
    }
}

/// Common grid step for a set of delays: the finest step among them.
fn common_step(delays: &[DelayFunction], cfg: &DelayConfig) -> f64 {
    delays
        .iter()
        .map(|d| d.natural_step(cfg))
        .fold(f64::INFINITY, f64::min)
}

/// Convolution `τ₁ ∗ τ₂ ∗ …` with default tolerances.
pub fn convolve(delays: &[DelayFunction]) -> Result<DelayFunction, DelayError> {
    convolve_with(delays, &DelayConfig::default())
}

/// Sequential convolution of the delays. Equal-rate analytic kinds stay
/// analytic; everything else is evaluated on the finest common grid.
pub fn convolve_with(delays: &[DelayFunction], cfg: &DelayConfig) -> Result<DelayFunction, DelayError> {
    let (first, rest) = delays.split_first().ok_or(DelayError::Empty)?;
    if rest.is_empty() {
        return Ok(first.clone());
    }
    if let Some((_, r0, _)) = as_erlang(first) {
        let all_same_rate = delays
            .iter()
            .all(|d| matches!(as_erlang(d), Some((_, r, _)) if r == r0));
        if all_same_rate {
            let (mut shape, mut mass) = (0, 1.0);
            for d in delays {
                let (k, _, q) = as_erlang(d).expect("checked above");
                mass *= q;
                shape += k;
            }
            return Ok(from_erlang(shape, r0, mass));
        }
    }
    let dt = common_step(delays, cfg);
    let mut acc = first.to_sampled(dt, cfg)?;
    for d in rest {
        let next = d.to_sampled(dt, cfg)?;
        acc = convolve_sampled(&acc, &next, cfg)?;
    }
    Ok(DelayFunction::Sampled(acc))
}

/// Convolution of two densities on the same grid, with Gregory end
/// corrections on each lag integral.
pub(crate) fn convolve_sampled(
    f: &SampledDelay,
    g: &SampledDelay,
    cfg: &DelayConfig,
) -> Result<SampledDelay, DelayError> {
    let dt = f.dt();
    let (a, b) = (f.values(), g.values());
    if a.is_empty() || b.is_empty() {
        return Ok(SampledDelay::raw(dt, Vec::new(), f.tail_flag() || g.tail_flag()));
    }
    let needed = a.len() + b.len() - 1;
    let mut tail = f.tail_flag() || g.tail_flag();
    let n = if needed > cfg.max_points {
        if !cfg.allow_truncation {
            return Err(DelayError::GridOverflow {
                needed,
                limit: cfg.max_points,
            });
        }
        tail = true;
        cfg.max_points
    } else {
        needed
    };

    let mut c = vec![0.0; n];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 || i >= n {
            continue;
        }
        let m = b.len().min(n - i);
        for (cj, &y) in c[i..i + m].iter_mut().zip(&b[..m]) {
            *cj += x * y;
        }
    }

    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    c[0] = 0.0;
    for (k, ck) in c.iter_mut().enumerate().skip(1) {
        if k >= 5 {
            for (j, w) in GREGORY_ENDS.iter().enumerate() {
                let ends = at(a, j) * at(b, k - j) + at(a, k - j) * at(b, j);
                *ck += (w - 1.0) * ends;
            }
        } else {
            *ck -= 0.5 * (at(a, 0) * at(b, k) + at(a, k) * at(b, 0));
        }
        *ck = (*ck * dt).max(0.0);
    }
    Ok(SampledDelay::raw(dt, c, tail))
}

/// Pointwise sum with default tolerances.
pub fn mix(delays: &[DelayFunction]) -> Result<DelayFunction, DelayError> {
    mix_with(delays, &DelayConfig::default())
}

/// Pointwise sum `Σ τᵢ`. The component masses must sum to at most one.
pub fn mix_with(delays: &[DelayFunction], cfg: &DelayConfig) -> Result<DelayFunction, DelayError> {
    let (first, rest) = delays.split_first().ok_or(DelayError::Empty)?;
    let total: f64 = delays.iter().map(DelayFunction::mass).sum();
    if total > 1.0 + cfg.tol_norm {
        return Err(DelayError::NormExceeded(total));
    }
    if rest.is_empty() {
        return Ok(first.clone());
    }
    if let Some((k0, r0, _)) = as_erlang(first) {
        let same = delays
            .iter()
            .all(|d| matches!(as_erlang(d), Some((k, r, _)) if k == k0 && r == r0));
        if same {
            return Ok(from_erlang(k0, r0, total));
        }
    }
    let dt = common_step(delays, cfg);
    let parts = delays
        .iter()
        .map(|d| d.to_sampled(dt, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let n = parts.iter().map(SampledDelay::len).max().unwrap_or(0);
    if n > cfg.max_points {
        return Err(DelayError::GridOverflow {
            needed: n,
            limit: cfg.max_points,
        });
    }
    let mut values = vec![0.0; n];
    for p in &parts {
        for (v, x) in values.iter_mut().zip(p.values()) {
            *v += x;
        }
    }
    let tail = parts.iter().any(SampledDelay::tail_flag);
    Ok(DelayFunction::Sampled(SampledDelay::raw(dt, values, tail)))
}

/// `τ′(t) = a·τ(a·t)`.
pub fn rescale(delay: &DelayFunction, a: f64) -> Result<DelayFunction, DelayError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(DelayError::Invalid(format!("scale factor {a}")));
    }
    Ok(match delay {
        DelayFunction::Exponential { rate, amplitude } => DelayFunction::Exponential {
            rate: rate * a,
            amplitude: amplitude * a,
        },
        DelayFunction::Erlang { shape, rate, mass } => DelayFunction::Erlang {
            shape: *shape,
            rate: rate * a,
            mass: *mass,
        },
        DelayFunction::Sampled(s) => DelayFunction::Sampled(SampledDelay::raw(
            s.dt() / a,
            s.values().iter().map(|v| v * a).collect(),
            s.tail_flag(),
        )),
    })
}

/// `P_t[τ] = ∫₀ᵗ τ`. Infinite `t` gives the full mass.
pub fn partial_norm(delay: &DelayFunction, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    match *delay {
        DelayFunction::Exponential { rate, amplitude } => {
            if t.is_infinite() {
                amplitude / rate
            } else {
                amplitude / rate * -(-rate * t).exp_m1()
            }
        }
        DelayFunction::Erlang { shape, rate, mass } => mass * erlang_cdf(shape, rate * t),
        DelayFunction::Sampled(ref s) => sampled_partial_norm(s, t),
    }
}

fn sampled_partial_norm(s: &SampledDelay, t: f64) -> f64 {
    let v = s.values();
    let q = s.mass();
    if v.len() < 2 || t >= s.horizon() {
        return q;
    }
    let dt = s.dt();
    let x = t / dt;
    let i = (x.floor() as usize).min(v.len() - 2);
    let f = x - i as f64;
    let full: f64 = v[..=i].windows(2).map(|w| 0.5 * (w[0] + w[1])).sum::<f64>() * dt;
    // Exact integral of the linear interpolant over the partial cell.
    let vt = v[i] + f * (v[i + 1] - v[i]);
    let part = 0.5 * (v[i] + vt) * f * dt;
    (full + part).min(q)
}
