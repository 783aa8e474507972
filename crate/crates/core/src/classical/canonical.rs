// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Reduction of a clock to the reset clock built from its most accurate
//! canonical sub-event.

use nalgebra::{DMatrix, DVector};

use super::{ClassicalClock, ClassicalError, PhaseType, PopulationVector, StochasticGeneratorPair};

/// Accuracy of `ν_ij(t) = T_j e^{Nt} e_i` for every start state `i` and tick
/// target row `j`, indexed `[i][j]`. `None` where the sub-event never happens.
pub fn sub_event_accuracies(clock: &ClassicalClock) -> Vec<Vec<Option<f64>>> {
    let n = clock.generators().no_tick();
    let t = clock.generators().tick();
    let d = clock.dim();
    (0..d)
        .map(|i| {
            let mut e = DVector::zeros(d);
            e[i] = 1.0;
            (0..t.nrows())
                .map(|j| {
                    let row: DVector<f64> = t.row(j).transpose();
                    PhaseType::new(n, &row, &e).moments().ok().map(|m| m.accuracy)
                })
                .collect()
        })
        .collect()
}

/// Reset clock whose single tick channel is the most accurate sub-event
/// `(i*, j*)`: all rows of `T` but `j*` are zeroed, row `j*` is moved to
/// `i*`, and the clock starts in `e_{i*}`. Ties go to the smallest `(i, j)`.
pub fn canonicalize_to_reset(clock: &ClassicalClock) -> Result<ClassicalClock, ClassicalError> {
    let acc = sub_event_accuracies(clock);
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, row) in acc.iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            if let Some(r) = *r {
                if best.is_none_or(|(_, _, b)| r > b) {
                    best = Some((i, j, r));
                }
            }
        }
    }
    let (i, j, _) = best.ok_or(ClassicalError::DegenerateClock)?;
    let d = clock.dim();
    let t = clock.generators().tick();
    let mut t_new = DMatrix::zeros(d, d);
    t_new.row_mut(i).copy_from(&t.row(j));
    ClassicalClock::new(
        StochasticGeneratorPair::new(clock.generators().no_tick().clone(), t_new)?,
        PopulationVector::basis(d, i),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{ladder_clock, random_clock};

    #[test]
    fn ladder_is_a_fixed_point() {
        for d in 1..6 {
            let c = ladder_clock(d).unwrap();
            assert_eq!(canonicalize_to_reset(&c).unwrap(), c);
        }
    }

    #[test]
    fn two_state_picks_the_best_row() {
        // Ticks from both states; state 0 also feeds state 1.
        let n = DMatrix::from_row_slice(2, 2, &[-1.5, 0.0, 1.0, -2.0]);
        let t = DMatrix::from_row_slice(2, 2, &[0.5, 2.0, 0.0, 0.0]);
        let c = ClassicalClock::new(
            StochasticGeneratorPair::new(n, t).unwrap(),
            PopulationVector::from_slice(&[0.5, 0.5]).unwrap(),
        )
        .unwrap();
        let acc = sub_event_accuracies(&c);
        let best = acc.iter().flatten().flatten().cloned().fold(0.0, f64::max);
        let r = canonicalize_to_reset(&c).unwrap();
        assert!(r.is_reset());
        let rr = r.exact_moments().unwrap().accuracy;
        assert!((rr - best).abs() < 1e-12);
        assert!(rr <= 2.0);
        assert!(rr >= c.exact_moments().unwrap().accuracy - 1e-12);
    }

    #[test]
    fn canonical_form_dominates_random_clocks() {
        for seed in 0..50 {
            let c = random_clock(4, seed, 0.6).unwrap();
            let r = canonicalize_to_reset(&c).unwrap();
            assert!(r.is_reset());
            let (a, b) = (c.exact_moments().unwrap().accuracy, r.exact_moments().unwrap().accuracy);
            assert!(b >= a - 1e-4 * a, "seed {seed}: {b} < {a}");
        }
    }

    #[test]
    fn never_ticking_clock_is_degenerate() {
        let n = DMatrix::from_row_slice(1, 1, &[0.0]);
        let t = DMatrix::from_row_slice(1, 1, &[0.0]);
        let c = ClassicalClock::new(StochasticGeneratorPair::new(n, t).unwrap(), PopulationVector::basis(1, 0)).unwrap();
        assert!(matches!(canonicalize_to_reset(&c), Err(ClassicalError::DegenerateClock)));
    }
}
