//! Orthographic SVG views of 3-D polylines: XY, XZ and an isometric panel.

use std::fmt::Write as _;

use crate::kinematics::Point3;

const PANEL: f64 = 360.0;
const MARGIN: f64 = 48.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<Point3>,
}

#[derive(Debug, Clone, Copy)]
enum View {
    Xy,
    Xz,
    Isometric,
}

impl View {
    fn project(self, p: &Point3) -> (f64, f64) {
        match self {
            View::Xy => (p.x, p.y),
            View::Xz => (p.x, p.z),
            View::Isometric => {
                let c = 30f64.to_radians().cos();
                let s = 30f64.to_radians().sin();
                ((p.x - p.y) * c, p.z + (p.x + p.y) * s)
            }
        }
    }

    fn labels(self) -> (&'static str, &'static str, &'static str) {
        match self {
            View::Xy => ("XY", "x (mm)", "y (mm)"),
            View::Xz => ("XZ", "x (mm)", "z (mm)"),
            View::Isometric => ("isometric", "u (mm)", "v (mm)"),
        }
    }
}

/// Tick spacing of 1, 2 or 5 times a power of ten giving about `target` ticks.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = (span / target).max(f64::MIN_POSITIVE);
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 5.0);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn panel(out: &mut String, view: View, series: &[Series], offset_x: f64) {
    let projected: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| s.points.iter().map(|p| view.project(p)).collect())
        .collect();
    let all = projected.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(u, v) in all {
        x0 = x0.min(u);
        x1 = x1.max(u);
        y0 = y0.min(v);
        y1 = y1.max(v);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    // Equal scale on both axes, padded to a square box.
    let span = (x1 - x0).max(y1 - y0).max(1e-6) * 1.1;
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let (x0, x1, y0, y1) = (cx - span / 2.0, cx + span / 2.0, cy - span / 2.0, cy + span / 2.0);
    let inner = PANEL - 2.0 * MARGIN;
    let sx = |u: f64| offset_x + MARGIN + (u - x0) / span * inner;
    let sy = |v: f64| PANEL - MARGIN - (v - y0) / span * inner;

    let (name, xlabel, ylabel) = view.labels();
    let _ = writeln!(
        out,
        r#"<g class="panel" id="{name}"><rect x="{:.2}" y="{:.2}" width="{inner:.2}" height="{inner:.2}" fill="none" stroke="black"/>"#,
        offset_x + MARGIN,
        MARGIN
    );
    let _ = writeln!(out, r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">{name}</text>"#, offset_x + PANEL / 2.0);
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="10">{}</text>"#,
            PANEL - MARGIN,
            PANEL - MARGIN + 5.0,
            PANEL - MARGIN + 16.0,
            fmt_tick(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{}</text>"#,
            offset_x + MARGIN - 5.0,
            offset_x + MARGIN,
            offset_x + MARGIN - 7.0,
            y + 3.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">{xlabel}</text><text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11" transform="rotate(-90 {:.2} {:.2})">{ylabel}</text>"#,
        offset_x + PANEL / 2.0,
        PANEL - 8.0,
        offset_x + 12.0,
        PANEL / 2.0,
        offset_x + 12.0,
        PANEL / 2.0
    );
    for (i, pts) in projected.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts.iter().map(|&(u, v)| format!("{:.3},{:.3}", sx(u), sy(v))).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
    }
    out.push_str("</g>\n");
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders all series into one SVG document with three side-by-side views.
pub fn render_svg(series: &[Series], title: &str) -> String {
    let width = 3.0 * PANEL;
    let legend_h = 18.0 * series.len() as f64 + 30.0;
    let height = PANEL + legend_h;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    out.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    out.push('\n');
    for (k, view) in [View::Xy, View::Xz, View::Isometric].into_iter().enumerate() {
        panel(&mut out, view, series, k as f64 * PANEL);
    }
    for (i, s) in series.iter().enumerate() {
        let y = PANEL + 20.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{MARGIN}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="3"/><text x="{}" y="{}" font-size="12">{}</text>"#,
            MARGIN + 24.0,
            COLORS[i % COLORS.len()],
            MARGIN + 30.0,
            y + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
