//! SVG 1.1 output. The y axis is flipped so that counterclockwise
//! polygons stay counterclockwise on screen.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::polygon::{Polygon, PolygonPatch};
use super::GeometryError;

/// Fill used for labels missing from the style map.
pub const DEFAULT_FILL: &str = "#d0d0d0";

#[derive(Clone, Debug, Default)]
pub struct SvgStyle {
    pub fills: BTreeMap<String, String>,
    pub stroke: Option<String>,
}

impl SvgStyle {
    pub fn with(mut self, label: &str, fill: &str) -> Self {
        self.fills.insert(label.into(), fill.into());
        self
    }
}

pub fn render_svg(patch: &PolygonPatch<f64>, style: &SvgStyle) -> Result<String, GeometryError> {
    render_svg_with_overlay(patch, style, &[])
}

/// Renders the tiles, then draws each overlay polygon as an unfilled
/// `polygon` element on top.
pub fn render_svg_with_overlay(
    patch: &PolygonPatch<f64>,
    style: &SvgStyle,
    overlay: &[Polygon<f64>],
) -> Result<String, GeometryError> {
    if patch.is_empty() {
        return Err(GeometryError::EmptyPatch);
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for t in &patch.tiles {
        for p in &t.polygon.vertices {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
    }
    let w = (x1 - x0).max(1e-9);
    let h = (y1 - y0).max(1e-9);
    let pad = 0.02 * w.max(h);
    let stroke = style.stroke.as_deref().unwrap_or("#000000");
    let sw = 0.004 * w.max(h);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}">"#,
        fmt(x0 - pad),
        fmt(-y1 - pad),
        fmt(w + 2.0 * pad),
        fmt(h + 2.0 * pad)
    );
    for t in &patch.tiles {
        let fill = style.fills.get(&t.label).map(String::as_str).unwrap_or(DEFAULT_FILL);
        let mut d = String::new();
        for (k, p) in t.polygon.vertices.iter().enumerate() {
            let _ = write!(d, "{}{} {} ", if k == 0 { "M" } else { "L" }, fmt(p.x), fmt(-p.y));
        }
        d.push('Z');
        let _ = writeln!(
            s,
            r#"<path d="{d}" fill="{fill}" stroke="{stroke}" stroke-width="{}" data-label="{}"/>"#,
            fmt(sw),
            escape(&t.label)
        );
    }
    for poly in overlay {
        let pts: Vec<String> = poly.vertices.iter().map(|p| format!("{},{}", fmt(p.x), fmt(-p.y))).collect();
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="none" stroke="#c00000" stroke-width="{}"/>"##,
            pts.join(" "),
            fmt(2.0 * sw)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn fmt(v: f64) -> String {
    let r = format!("{:.6}", v);
    if r == "-0.000000" { "0.000000".into() } else { r }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
