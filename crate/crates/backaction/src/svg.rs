//! SVG heatmaps of binned outcome-plane data.
//!
//! Tomograms use a symmetric blue-white-red ramp over [-1, 1]; count
//! histograms use a white-to-dark-blue ramp on log(1 + count). Empty bins
//! render as the light background, so only filled cells emit elements.

use std::fmt::Write as _;

use crate::map::ConditionalMap;

const CELL: f64 = 3.0;
const MARGIN: f64 = 44.0;

/// Diverging ramp for values in [-1, 1]: blue through white to red.
fn diverging_color(v: f64) -> (u8, u8, u8) {
    let v = v.clamp(-1.0, 1.0);
    let (lo, hi, t) = if v < 0.0 {
        ((33, 102, 172), (247, 247, 247), v + 1.0)
    } else {
        ((247, 247, 247), (178, 24, 43), v)
    };
    let mix = |a: i32, b: i32| -> u8 { (a as f64 + (b - a) as f64 * t).round() as u8 };
    (mix(lo.0, hi.0), mix(lo.1, hi.1), mix(lo.2, hi.2))
}

/// Sequential ramp for t in [0, 1]: white to dark blue.
fn sequential_color(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(0.0, 1.0);
    let mix = |a: f64, b: f64| -> u8 { (a + (b - a) * t).round() as u8 };
    (mix(255.0, 8.0), mix(255.0, 48.0), mix(255.0, 107.0))
}

fn svg_header(out: &mut String, side: f64, title: &str) {
    let total = side + 2.0 * MARGIN;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect width="{total}" height="{total}" fill="#d9d9d9"/>"##
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        MARGIN + side / 2.0,
        MARGIN - 18.0,
        title
    );
}

fn svg_axes(out: &mut String, map: &ConditionalMap, side: f64) {
    let min = map.grid.min;
    let max = map.grid.max;
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">I_m/sigma</text>"#,
        MARGIN + side / 2.0,
        MARGIN + side + 30.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 {} {})">Q_m/sigma</text>"#,
        MARGIN - 28.0,
        MARGIN + side / 2.0,
        MARGIN - 28.0,
        MARGIN + side / 2.0
    );
    for (v, xanchor) in [(min, "start"), (0.0, "middle"), (max, "end")] {
        let frac = (v - min) / (max - min);
        let x = MARGIN + frac * side;
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="10" text-anchor="{xanchor}">{v}</text>"#,
            MARGIN + side + 14.0
        );
        let y = MARGIN + (1.0 - frac) * side;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="10" text-anchor="end">{v}</text>"#,
            MARGIN - 6.0
        );
    }
}

fn cell(out: &mut String, map: &ConditionalMap, bi: usize, bq: usize, color: (u8, u8, u8)) {
    let bins = map.grid.bins as f64;
    let side = bins * CELL;
    // i along x, q along y (upward)
    let x = MARGIN + bi as f64 * CELL;
    let y = MARGIN + side - (bq as f64 + 1.0) * CELL;
    let _ = writeln!(
        out,
        r##"<rect x="{x:.1}" y="{y:.1}" width="{CELL}" height="{CELL}" fill="#{:02x}{:02x}{:02x}"/>"##,
        color.0, color.1, color.2
    );
}

/// Render a conditional tomogram: per-bin means on the diverging
/// [-1, 1] ramp.
pub fn render_tomogram(map: &ConditionalMap, title: &str) -> String {
    let side = map.grid.bins as f64 * CELL;
    let mut out = String::new();
    svg_header(&mut out, side, title);
    for (bi, bq, _, mean) in map.iter_filled() {
        cell(&mut out, map, bi, bq, diverging_color(mean));
    }
    svg_axes(&mut out, map, side);
    out.push_str("</svg>\n");
    out
}

/// Render an outcome histogram: per-bin counts on the log-scaled
/// sequential ramp.
pub fn render_counts(map: &ConditionalMap, title: &str) -> String {
    let side = map.grid.bins as f64 * CELL;
    let mut out = String::new();
    svg_header(&mut out, side, title);
    let max = map
        .iter_filled()
        .map(|(_, _, n, _)| n)
        .max()
        .unwrap_or(1)
        .max(1);
    let log_max = (1.0 + max as f64).ln();
    for (bi, bq, n, _) in map.iter_filled() {
        let t = (1.0 + n as f64).ln() / log_max;
        cell(&mut out, map, bi, bq, sequential_color(t));
    }
    svg_axes(&mut out, map, side);
    out.push_str("</svg>\n");
    out
}
