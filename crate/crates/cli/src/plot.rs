//! Minimal SVG line plots: one or two series, each with its own ordinate.

use std::fmt::Write;

pub struct Series<'a> {
    pub label: &'a str,
    pub y: &'a [f64],
    pub color: &'a str,
}

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 70.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

fn range(values: &[f64]) -> (f64, f64) {
    let (lo, hi) = values
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = lo.abs().max(1.0) * 0.05;
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn polyline(out: &mut String, x: &[f64], y: &[f64], sx: impl Fn(f64) -> f64, sy: impl Fn(f64) -> f64, color: &str) {
    let pts: Vec<String> = x
        .iter()
        .zip(y)
        .filter(|(_, v)| v.is_finite())
        .map(|(&a, &b)| format!("{:.2},{:.2}", sx(a), sy(b)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
        pts.join(" ")
    );
}

/// Render `left` against the left axis and `right` (if any) against the
/// right axis.
pub fn line_plot(title: &str, x_label: &str, x: &[f64], left: &Series, right: Option<&Series>) -> String {
    let (x0, x1) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let (x0, x1) = if x1 > x0 { (x0, x1) } else { range(x) };
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |v: f64| LEFT + (v - x0) / (x1 - x0) * pw;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{title}</text>"#,
        W / 2.0
    );
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x0, x1) {
        let px = sx(t);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 19.0,
            label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        LEFT + pw / 2.0,
        H - 12.0
    );

    let axes: Vec<(&Series, bool)> = std::iter::once((left, true)).chain(right.map(|r| (r, false))).collect();
    for (series, is_left) in axes {
        let (y0, y1) = range(series.y);
        let sy = |v: f64| TOP + ph - (v - y0) / (y1 - y0) * ph;
        let (edge, dir, anchor) = if is_left { (LEFT, -1.0, "end") } else { (LEFT + pw, 1.0, "start") };
        for t in ticks(y0, y1) {
            let py = sy(t);
            let _ = writeln!(
                out,
                r#"<line x1="{edge}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="{c}"/><text x="{}" y="{:.2}" text-anchor="{anchor}" fill="{c}">{}</text>"#,
                edge + dir * 5.0,
                edge + dir * 8.0,
                py + 4.0,
                label(t),
                c = series.color,
            );
        }
        let lx = if is_left { 18.0 } else { W - 18.0 };
        let ly = TOP + ph / 2.0;
        let _ = writeln!(
            out,
            r#"<text x="{lx}" y="{ly}" text-anchor="middle" fill="{c}" transform="rotate(-90 {lx} {ly})">{}</text>"#,
            series.label,
            c = series.color,
        );
        polyline(&mut out, x, series.y, sx, sy, series.color);
    }
    out.push_str("</svg>\n");
    out
}
