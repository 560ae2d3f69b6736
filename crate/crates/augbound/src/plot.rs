//! Minimal SVG line charts: a grid of panels, each with named polylines.

use std::fmt::Write;

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub series: Vec<Series>,
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const W: f64 = 260.0;
const H: f64 = 200.0;
const PAD: f64 = 40.0;

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) { format!("{v:.1e}") } else { format!("{v:.3}") }
}

fn draw_panel(out: &mut String, panel: &Panel, x0: f64, y0: f64) {
    let pts = panel.series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    if !xmin.is_finite() {
        (xmin, xmax, ymin, ymax) = (0.0, 1.0, 0.0, 1.0);
    }
    if xmax == xmin {
        xmax = xmin + 1.0;
    }
    if ymax == ymin {
        ymax = ymin + 1.0;
    }
    let (pw, ph) = (W - 1.5 * PAD, H - 2.0 * PAD);
    let sx = |x: f64| x0 + PAD + (x - xmin) / (xmax - xmin) * pw;
    let sy = |y: f64| y0 + PAD + ph - (y - ymin) / (ymax - ymin) * ph;
    let _ = writeln!(out, r#"<rect x="{}" y="{}" width="{pw}" height="{ph}" fill="none" stroke="gray"/>"#, x0 + PAD, y0 + PAD);
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, x0 + PAD + pw / 2.0, y0 + PAD - 8.0, panel.title);
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="10" text-anchor="middle">{}</text>"#, x0 + PAD + pw / 2.0, y0 + H - 8.0, panel.x_label);
    for (v, y) in [(ymin, sy(ymin)), (ymax, sy(ymax))] {
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="9" text-anchor="end">{}</text>"#, x0 + PAD - 3.0, y + 3.0, fmt_tick(v));
    }
    for (v, x) in [(xmin, sx(xmin)), (xmax, sx(xmax))] {
        let _ = writeln!(out, r#"<text x="{x}" y="{}" font-size="9" text-anchor="middle">{}</text>"#, y0 + PAD + ph + 12.0, fmt_tick(v));
    }
    for (k, s) in panel.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
        if panel.series.len() > 1 {
            let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="9" fill="{color}">{}</text>"#, x0 + PAD + 4.0, y0 + PAD + 10.0 + 10.0 * k as f64, s.name);
        }
    }
}

/// Renders rows of panels into one SVG document.
pub fn render(rows: &[Vec<Panel>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">"#,
        W * cols as f64,
        H * rows.len() as f64
    );
    for (r, row) in rows.iter().enumerate() {
        for (c, panel) in row.iter().enumerate() {
            draw_panel(&mut out, panel, W * c as f64, H * r as f64);
        }
    }
    out.push_str("</svg>\n");
    out
}
