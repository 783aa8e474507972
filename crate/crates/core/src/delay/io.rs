// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-column `t,density` CSV for sampled delay functions.

use std::io::{Read, Write};

use super::{DelayError, SampledDelay};
use crate::numfmt::fmt12;

fn csv_err(e: impl std::fmt::Display) -> DelayError {
    DelayError::Csv(e.to_string())
}

pub fn write_csv<W: Write>(delay: &SampledDelay, out: W) -> Result<(), DelayError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "density"]).map_err(csv_err)?;
    for (t, v) in delay.times().zip(delay.values()) {
        w.write_record([fmt12(t), fmt12(*v)]).map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

/// Reads a `t,density` table. Times must start at zero and be uniformly
/// spaced to within 1e-9 relative.
pub fn read_csv<R: Read>(input: R) -> Result<SampledDelay, DelayError> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "density" {
        return Err(DelayError::Csv(format!(
            "expected header `t,density`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let parse = |i: usize| -> Result<f64, DelayError> {
            rec[i].trim().parse::<f64>().map_err(|e| {
                DelayError::Csv(format!("line {}: {e}", rec.position().map_or(0, |p| p.line())))
            })
        };
        times.push(parse(0)?);
        values.push(parse(1)?);
    }
    if times.len() < 2 {
        return Err(DelayError::Csv("need at least two samples".into()));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let uniform = times
        .iter()
        .enumerate()
        .all(|(i, t)| (t - i as f64 * dt).abs() <= 1e-9 * dt.max(t.abs()));
    if times[0].abs() > 1e-12 || !uniform {
        return Err(DelayError::Csv("times must be a uniform grid starting at 0".into()));
    }
    SampledDelay::new(dt, values)
}
