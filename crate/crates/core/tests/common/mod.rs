// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

pub mod props;
