// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense matrix exponential via scaling-and-squaring with Padé approximants.
//!
//! Follows Higham's selection of the Padé degree m ∈ {3, 5, 7, 9, 13} from the
//! 1-norm of the argument. Generator matrices of stochastic clocks are in
//! general not diagonalisable, and effective Hamiltonians of quantum reset
//! clocks are not normal, so nothing here relies on an eigendecomposition.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

/// Backward-error thresholds θ_m for double precision.
const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068;
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Induced 1-norm (maximum absolute column sum).
pub fn norm1<T>(a: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64> + Copy,
{
    a.column_iter()
        .map(|c| c.iter().map(|x| x.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled<T>(a: &DMatrix<T>, c: f64) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    a.map(|x| x * T::from_real(c))
}

fn add_scaled<T>(acc: &mut DMatrix<T>, a: &DMatrix<T>, c: f64)
where
    T: ComplexField<RealField = f64> + Copy,
{
    let c = T::from_real(c);
    acc.zip_apply(a, |x, y| *x += y * c);
}

/// Matrix exponential `exp(A)` of a square matrix.
///
/// # Panics
/// Panics if `a` is not square or contains non-finite entries.
pub fn expm<T>(a: &DMatrix<T>) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    assert!(
        a.iter().all(|x| x.modulus().is_finite()),
        "expm requires finite entries"
    );
    if n == 1 {
        return DMatrix::from_element(1, 1, a[(0, 0)].exp());
    }

    let eye = DMatrix::<T>::identity(n, n);
    let norm = norm1(a);
    if norm == 0.0 {
        return eye;
    }

    let a2 = a * a;
    if norm <= THETA_9 {
        let b: &[f64] = if norm <= THETA_3 {
            &B3
        } else if norm <= THETA_5 {
            &B5
        } else if norm <= THETA_7 {
            &B7
        } else {
            &B9
        };
        // Even powers A^0, A^2, A^4, ...
        let mut powers = vec![eye.clone(), a2.clone()];
        while 2 * (powers.len() - 1) < b.len() - 1 {
            let next = powers.last().unwrap() * &a2;
            powers.push(next);
        }
        let mut u_inner = DMatrix::<T>::zeros(n, n);
        let mut v = DMatrix::<T>::zeros(n, n);
        for (k, &coef) in b.iter().enumerate() {
            let p = &powers[k / 2];
            if k % 2 == 1 {
                add_scaled(&mut u_inner, p, coef);
            } else {
                add_scaled(&mut v, p, coef);
            }
        }
        let u = a * u_inner;
        return pade_solve(u, v);
    }

    let s = ((norm / THETA_13).log2().ceil().max(0.0)) as i32;
    let scale = 0.5f64.powi(s);
    let a1 = scaled(a, scale);
    let a2 = scaled(&a2, scale * scale);
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let mut w1 = scaled(&a6, B13[13]);
    add_scaled(&mut w1, &a4, B13[11]);
    add_scaled(&mut w1, &a2, B13[9]);
    let mut w2 = &a6 * w1;
    add_scaled(&mut w2, &a6, B13[7]);
    add_scaled(&mut w2, &a4, B13[5]);
    add_scaled(&mut w2, &a2, B13[3]);
    add_scaled(&mut w2, &eye, B13[1]);
    let u = &a1 * w2;

    let mut z1 = scaled(&a6, B13[12]);
    add_scaled(&mut z1, &a4, B13[10]);
    add_scaled(&mut z1, &a2, B13[8]);
    let mut v = &a6 * z1;
    add_scaled(&mut v, &a6, B13[6]);
    add_scaled(&mut v, &a4, B13[4]);
    add_scaled(&mut v, &a2, B13[2]);
    add_scaled(&mut v, &eye, B13[0]);

    let mut r = pade_solve(u, v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Solves (V − U) R = (V + U).
fn pade_solve<T>(u: DMatrix<T>, v: DMatrix<T>) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .expect("Padé denominator is singular; argument norm out of range")
}

/// `exp(t·A)` applied to a vector.
pub fn expm_apply<T>(a: &DMatrix<T>, t: f64, v: &DVector<T>) -> DVector<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    expm(&scaled(a, t)) * v
}

/// Hermitian conjugate shorthand.
pub fn dagger(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.adjoint()
}

/// Largest absolute deviation between two matrices.
pub fn max_abs_diff<T>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64> + Copy,
{
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (*x - *y).modulus())
        .fold(0.0, f64::max)
}

/// Composite trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dt * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

/// Composite Simpson rule on a uniform grid; an even number of points closes
/// the last panel with the 3/8 rule.
pub fn simpson(values: &[f64], dt: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => trapezoid(values, dt),
        3 => dt / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ if n % 2 == 1 => {
            let mut s = values[0] + values[n - 1];
            for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
                s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            s * dt / 3.0
        }
        _ => {
            // Simpson on the first n-3 intervals, 3/8 on the last three.
            let head = simpson(&values[..n - 3], dt);
            let t = &values[n - 4..];
            head + 3.0 * dt / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3])
        }
    }
}

/// End-point weights of the fourth-order Gregory rule; interior weights are 1.
pub const GREGORY_ENDS: [f64; 3] = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];

/// Trapezoid rule with Gregory end corrections, O(dt⁴) for smooth integrands.
///
/// Interior weights stay at 1, so narrow interior peaks keep the spectral
/// accuracy of the plain trapezoid rule. Falls back to Simpson below six
/// points.
pub fn gregory(values: &[f64], dt: f64) -> f64 {
    let n = values.len();
    if n < 6 {
        return simpson(values, dt);
    }
    let mut s: f64 = values.iter().sum();
    for (k, w) in GREGORY_ENDS.iter().enumerate() {
        s += (w - 1.0) * (values[k] + values[n - 1 - k]);
    }
    s * dt
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        // Oracle: Taylor series with many terms, only valid for small norms.
        let n = a.nrows();
        let mut term = DMatrix::<Complex64>::identity(n, n);
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * a / Complex64::new(k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    fn pseudo_random(n: usize, seed: u64, scale: f64) -> DMatrix<Complex64> {
        let mut s = seed;
        DMatrix::from_fn(n, n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            Complex64::new(a * scale, b * scale)
        })
    }

    #[test]
    fn matches_taylor_for_every_pade_degree() {
        for (i, scale) in [0.001, 0.05, 0.3, 0.8, 1.5].iter().enumerate() {
            let a = pseudo_random(5, i as u64 + 1, *scale);
            let diff = max_abs_diff(&expm(&a), &taylor(&a));
            assert!(diff < 1e-13, "scale {scale}: {diff}");
        }
    }

    #[test]
    fn squaring_branch_matches_diagonal_closed_form() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(-3.0, 20.0),
            Complex64::new(-0.5, -7.0),
            Complex64::new(0.0, 40.0),
        ]));
        let e = expm(&d);
        for i in 0..3 {
            assert!((e[(i, i)] - d[(i, i)].exp()).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_and_group_property() {
        let a = pseudo_random(6, 42, 4.0);
        let prod = expm(&a) * expm(&(-&a));
        let eye = DMatrix::<Complex64>::identity(6, 6);
        assert!(max_abs_diff(&prod, &eye) < 1e-10);
    }

    #[test]
    fn real_jordan_block_is_exact() {
        // exp of a nilpotent-plus-shift block: e^{-t} [1 0; t 1].
        let a = DMatrix::from_row_slice(2, 2, &[-2.0, 0.0, 2.0, -2.0]);
        let e = expm(&a);
        let x = (-2.0f64).exp();
        assert!((e[(0, 0)] - x).abs() < 1e-15);
        assert!((e[(1, 0)] - 2.0 * x).abs() < 1e-15);
        assert!(e[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn quadrature_rules_integrate_polynomials() {
        let dt = 0.01;
        for n in [5usize, 6, 101, 102] {
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * dt).powi(3)).collect();
            let t = (n - 1) as f64 * dt;
            assert!((simpson(&v, dt) - t.powi(4) / 4.0).abs() < 1e-13, "n={n}");
        }
        for n in [6usize, 7, 50] {
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * dt).powi(3)).collect();
            let t = (n - 1) as f64 * dt;
            assert!((gregory(&v, dt) - t.powi(4) / 4.0).abs() < 1e-13, "n={n}");
        }
        let v: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        assert!((trapezoid(&v, 0.1) - 0.5).abs() < 1e-15);
    }
}
