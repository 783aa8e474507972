// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;

use super::Table;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// Line chart of every other numeric column against column `x`, optionally
/// with logarithmic axes.
pub fn line_chart_svg(table: &Table, x: &str, title: &str, log: bool) -> Option<String> {
    let xs = table.column(x)?;
    let series: Vec<(String, Vec<f64>)> = table
        .header
        .iter()
        .filter(|h| h.as_str() != x)
        .filter_map(|h| table.column(h).map(|c| (h.clone(), c)))
        .filter(|(_, c)| c.iter().any(|v| v.is_finite()))
        .collect();
    let tf = |v: f64| if log { v.ln() } else { v };
    let ok = |v: f64| v.is_finite() && (!log || v > 0.0);
    let fx: Vec<f64> = xs.iter().copied().filter(|v| ok(*v)).map(tf).collect();
    let fy: Vec<f64> = series
        .iter()
        .flat_map(|(_, c)| c.iter().copied())
        .filter(|v| ok(*v))
        .map(tf)
        .collect();
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = range(&fx);
    let (y0, y1) = range(&fy);
    let px = |v: f64| PAD + (tf(v) - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |v: f64| H - PAD - (tf(v) - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{} H{}" stroke="black" fill="none"/>"#,
        H - PAD,
        W - PAD
    );
    let back = |v: f64| if log { v.exp() } else { v };
    for (label, (pos, anchor)) in [
        (back(x0), (format!(r#"x="{PAD}" y="{}""#, H - PAD + 18.0), "start")),
        (back(x1), (format!(r#"x="{}" y="{}""#, W - PAD, H - PAD + 18.0), "end")),
        (back(y0), (format!(r#"x="{}" y="{}""#, PAD - 4.0, H - PAD), "end")),
        (back(y1), (format!(r#"x="{}" y="{}""#, PAD - 4.0, PAD + 10.0), "end")),
    ] {
        let _ = writeln!(
            s,
            r#"<text {pos} text-anchor="{anchor}" font-family="sans-serif" font-size="11">{}</text>"#,
            crate::numfmt::fmt12(label).chars().take(8).collect::<String>()
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        W / 2.0,
        H - 16.0,
        escape(x)
    );
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter(|(a, b)| ok(**a) && ok(**b))
            .map(|(a, b)| format!("{:.2},{:.2}", px(*a), py(*b)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            PAD + 8.0,
            PAD + 14.0 * (k as f64 + 1.0),
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_one_polyline_per_series() {
        let mut t = Table::new(["d", "a", "b"]);
        for d in 1..5 {
            t.push([d.to_string(), (d * d).to_string(), d.to_string()]);
        }
        let svg = line_chart_svg(&t, "d", "test <chart>", true).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("&lt;chart&gt;"));
        assert!(line_chart_svg(&t, "missing", "", false).is_none());
    }
}
