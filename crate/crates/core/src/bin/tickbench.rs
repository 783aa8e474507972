// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(tickbench::cli::run(std::env::args_os()));
}
