//! Static SVG plots of planar point series.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotStyle {
    Polyline,
    Dots,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const PLOT_PX: f64 = 600.0;
const MARGIN_PX: f64 = 50.0;
const LEGEND_PX: f64 = 160.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the series on equal-aspect axes (mm) with a 1 mm grid.
pub fn render_svg(series: &[Series], style: PlotStyle) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::InvalidInput("nothing to plot: no points in any series".into()));
    }
    let all = series.iter().flat_map(|s| s.points.iter());
    if all.clone().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(Error::InvalidInput("plot points must be finite".into()));
    }
    let (x0, x1, y0, y1) = all.fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.0), b.max(p.0), c.min(p.1), d.max(p.1)),
    );
    // square window padded out to whole millimetres
    let half = (0.5 * (x1 - x0).max(y1 - y0)).max(0.5);
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let x0 = (cx - half).floor();
    let y0 = (cy - half).floor();
    let span = ((cx + half).ceil() - x0).max((cy + half).ceil() - y0);
    let y1 = y0 + span;
    let px = PLOT_PX / span;
    let map = |x: f64, y: f64| (MARGIN_PX + (x - x0) * px, MARGIN_PX + (y1 - y) * px);

    let width = PLOT_PX + 2.0 * MARGIN_PX + LEGEND_PX;
    let height = PLOT_PX + 2.0 * MARGIN_PX;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let _ = writeln!(out, r##"<g class="grid" stroke="#dddddd" stroke-width="1">"##);
    let steps = span.round() as i64;
    for i in 0..=steps {
        let v = i as f64;
        let (gx, _) = map(x0 + v, y0);
        let (_, gy) = map(x0, y0 + v);
        let _ = writeln!(
            out,
            r#"<line x1="{gx:.2}" y1="{:.2}" x2="{gx:.2}" y2="{:.2}"/>"#,
            MARGIN_PX,
            MARGIN_PX + PLOT_PX
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{gy:.2}" x2="{:.2}" y2="{gy:.2}"/>"#,
            MARGIN_PX,
            MARGIN_PX + PLOT_PX
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g class="axes" stroke="black" stroke-width="1.5" fill="none">"#);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN_PX}" y="{MARGIN_PX}" width="{PLOT_PX}" height="{PLOT_PX}"/>"#
    );
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g class="ticks" font-family="sans-serif" font-size="12" fill="black">"#);
    for i in 0..=steps {
        let v = i as f64;
        let (tx, _) = map(x0 + v, y0);
        let (_, ty) = map(x0, y0 + v);
        let _ = writeln!(
            out,
            r#"<text x="{tx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_PX + PLOT_PX + 18.0,
            x0 + v
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_PX - 6.0,
            ty + 4.0,
            y0 + v
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">x (mm)</text>"#,
        MARGIN_PX + 0.5 * PLOT_PX,
        height - 8.0
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">y (mm)</text>"#,
        MARGIN_PX + 0.5 * PLOT_PX,
        MARGIN_PX + 0.5 * PLOT_PX
    );
    let _ = writeln!(out, "</g>");

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(out, r#"<g class="series" id="series-{i}">"#);
        let single = s.points.len() == 1;
        if style == PlotStyle::Dots || single {
            for p in &s.points {
                let (x, y) = map(p.0, p.1);
                let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="2" fill="{color}"/>"#);
            }
        } else if !s.points.is_empty() {
            let mut pts = String::new();
            for (j, p) in s.points.iter().enumerate() {
                let (x, y) = map(p.0, p.1);
                if j > 0 {
                    pts.push(' ');
                }
                let _ = write!(pts, "{x:.3},{y:.3}");
            }
            let _ = writeln!(
                out,
                r#"<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>"#
            );
        }
        let _ = writeln!(out, "</g>");
        let ly = MARGIN_PX + 20.0 * i as f64 + 10.0;
        let lx = MARGIN_PX + PLOT_PX + 20.0;
        let _ = writeln!(
            out,
            r#"<rect class="legend" x="{lx}" y="{:.1}" width="12" height="12" fill="{color}"/>"#,
            ly - 10.0
        );
        let _ = writeln!(
            out,
            r#"<text class="legend" x="{:.1}" y="{ly:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 18.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn write_svg_plot(series: &[Series], style: PlotStyle, out: &Path) -> Result<()> {
    let svg = render_svg(series, style)?;
    fs::write(out, svg)?;
    Ok(())
}
