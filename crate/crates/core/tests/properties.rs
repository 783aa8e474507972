// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use common::props::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn convolution_accuracy_is_subadditive(a in bumps(), b in bumps()) {
        convolution_bound(&a, &b)?;
    }

    #[test]
    fn mixture_accuracy_is_bounded_by_best_component(a in bumps(), b in bumps(), p in 0.01..0.99f64) {
        mixture_bound(&a, &b, p)?;
    }

    #[test]
    fn accuracy_is_scale_invariant(a in bumps(), s in prop::sample::select(vec![0.1, 1.0, 10.0, 1000.0])) {
        rescale_invariance(&a, s)?;
    }

    #[test]
    fn partial_norm_of_convolution_is_bounded_by_product(a in bumps(), b in bumps(), t in 0.0..20.0f64) {
        partial_norm_product(&a, &b, t)?;
    }

    #[test]
    fn tick_density_is_minus_survival_derivative(c in reset_clock(6, true), t in 0.01..3.0f64) {
        density_is_survival_derivative(&c, t)?;
    }

    #[test]
    fn free_evolution_has_period_t0(c in reset_clock(16, false)) {
        free_evolution_is_periodic(&c)?;
    }

    #[test]
    fn lindblad_embedding_matches_classical_clock(d in 1..=4usize, seed in any::<u64>(), p in 0.3..=1.0f64) {
        lindblad_matches_classical(d, seed, p)?;
    }
}
