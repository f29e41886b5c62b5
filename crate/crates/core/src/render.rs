//! Renderings of avalanche logs: one line per long avalanche, one cell per
//! column. A fired column is a light cell, a peak a dark cell, and the
//! global density column is marked in the margin rows.

use std::fmt::Write as _;

use crate::avalanche::AvalancheLog;

/// ASCII rendering: `.` idle, `+` fired, `#` peak. A header and footer rule
/// mark the global density column with `v` / `^`.
pub fn long_avalanches_ascii(log: &AvalancheLog) -> String {
    let longs = log.long_avalanches();
    if longs.is_empty() {
        return format!(
            "no long avalanches for D={} up to N={}\n",
            log.params().d(),
            log.n()
        );
    }
    let l = log.global_density_column();
    let width = longs
        .iter()
        .filter_map(|a| a.max_fired)
        .max()
        .unwrap_or(0)
        .max(l)
        + 1;
    let mut out = String::new();
    let mut rule = vec![b'-'; width];
    rule[l] = b'v';
    let _ = writeln!(out, "{}", String::from_utf8(rule.clone()).unwrap());
    for a in &longs {
        let mut row = vec![b'.'; width];
        for &c in &a.fired {
            row[c] = b'+';
        }
        for &p in &a.peaks {
            row[p] = b'#';
        }
        let _ = writeln!(out, "{}", String::from_utf8(row).unwrap());
    }
    rule[l] = b'^';
    let _ = writeln!(out, "{}", String::from_utf8(rule).unwrap());
    out
}

/// SVG rendering with grey cells for fired columns, dark cells for peaks and
/// a bold vertical line at the global density column.
pub fn long_avalanches_svg(log: &AvalancheLog) -> String {
    const CELL: usize = 8;
    let longs = log.long_avalanches();
    let l = log.global_density_column();
    let width = longs
        .iter()
        .filter_map(|a| a.max_fired)
        .max()
        .unwrap_or(0)
        .max(l)
        + 1;
    let rows = longs.len().max(1);
    let (w, h) = (width * CELL, rows * CELL);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        out,
        r#"  <rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#
    );
    for (row, a) in longs.iter().enumerate() {
        for &c in &a.fired {
            let dark = a.peaks.binary_search(&c).is_ok();
            let fill = if dark { "#404040" } else { "#c8c8c8" };
            let _ = writeln!(
                out,
                r#"  <rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{fill}"/>"#,
                c * CELL,
                row * CELL
            );
        }
    }
    let x = l * CELL + CELL / 2;
    let _ = writeln!(
        out,
        r#"  <line x1="{x}" y1="0" x2="{x}" y2="{h}" stroke="black" stroke-width="2"/>"#
    );
    let _ = writeln!(out, "</svg>");
    out
}

/// Sideways bar rendering of a height profile: one line per column.
pub fn heights_ascii(heights: &[u64]) -> String {
    const CAP: u64 = 100;
    let mut out = String::new();
    for (i, &h) in heights.iter().enumerate() {
        let bar: String = std::iter::repeat_n('#', h.min(CAP) as usize).collect();
        let more = if h > CAP { "…" } else { "" };
        let _ = writeln!(out, "{i:>6} |{bar}{more} {h}");
    }
    out
}
