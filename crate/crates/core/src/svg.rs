//! Static SVG rendering of persistence diagrams.
//!
//! Degree 0 is drawn in red and degree 1 in green (higher degrees in blue).
//! Essential points sit on the top border as upward triangles.

use std::fmt::Write;

use crate::fmt::g17;
use crate::persistence::PersistenceDiagram;

const SIZE: f64 = 400.0;
const MARGIN: f64 = 40.0;

fn color(dim: usize) -> &'static str {
    match dim {
        0 => "#d62728",
        1 => "#2ca02c",
        _ => "#1f77b4",
    }
}

fn short(x: f64) -> String {
    format!("{:.3}", x).trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Renders the nontrivial points of `d` as a standalone SVG document.
pub fn render_diagram(d: &PersistenceDiagram) -> String {
    let pts: Vec<_> = d.nontrivial().collect();
    let mut hi = pts.iter().flat_map(|q| [q.birth, q.death]).filter(|v| v.is_finite()).fold(0.0f64, f64::max);
    if let Some(c) = d.censor_value() {
        hi = hi.max(c);
    }
    let lo = pts.iter().map(|q| q.birth).fold(0.0f64, f64::min);
    if hi <= lo {
        hi = lo + 1.0;
    }
    let span = hi - lo;
    let plot = SIZE - 2.0 * MARGIN;
    let sx = |v: f64| MARGIN + (v - lo) / span * plot;
    let sy = |v: f64| SIZE - MARGIN - (v - lo) / span * plot;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (sx(lo), sy(lo), sx(hi), sy(hi));
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1" fill="none"><rect x="{x0}" y="{y1}" width="{}" height="{}"/></g>"#, x1 - x0, y0 - y1);
    let _ = writeln!(s, r##"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#888" stroke-dasharray="4 3"/>"##);
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="11" fill="black">"#);
    let _ = writeln!(s, r#"<text x="{x0}" y="{}" text-anchor="middle">{}</text>"#, y0 + 15.0, short(lo));
    let _ = writeln!(s, r#"<text x="{x1}" y="{}" text-anchor="middle">{}</text>"#, y0 + 15.0, short(hi));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, x0 - 4.0, y1 + 4.0, short(hi));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">birth</text>"#, (x0 + x1) / 2.0, SIZE - 8.0);
    let _ = writeln!(s, r#"<text x="12" y="{}" text-anchor="middle" transform="rotate(-90 12 {})">death</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0);
    let _ = writeln!(s, "</g>");
    for q in pts {
        let x = sx(q.birth);
        let c = color(q.dim);
        if q.is_essential() {
            let _ = writeln!(
                s,
                r#"<polygon class="essential" data-dim="{}" data-birth="{}" points="{},{} {},{} {},{}" fill="{c}"/>"#,
                q.dim,
                g17(q.birth),
                x,
                y1 - 5.0,
                x - 5.0,
                y1 + 4.0,
                x + 5.0,
                y1 + 4.0
            );
        } else {
            let _ = writeln!(
                s,
                r#"<circle class="finite" data-dim="{}" data-birth="{}" data-death="{}" cx="{x}" cy="{}" r="3.5" fill="{c}" fill-opacity="0.8"/>"#,
                q.dim,
                g17(q.birth),
                g17(q.death),
                sy(q.death)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
