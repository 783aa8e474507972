// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Accuracy of ticking clocks.
//!
//! A clock is characterised by the delay functions of its ticks, and the
//! accuracy of a tick is `R = μ²/σ²` of its delay function. This crate
//! computes `R` for classical stochastic clocks (`classical`), for quantum
//! reset clocks driven by a non-Hermitian effective Hamiltonian and for
//! general Lindblad clocks (`quantum`), and cross-checks both against
//! trajectory sampling (`sim`).

pub mod classical;
pub mod cli;
pub mod delay;
pub mod experiments;
pub mod linalg;
pub mod numfmt;
pub mod optim;
pub mod quantum;
pub mod sim;
