//! Self-contained SVG scatter of locus points `r e^{i theta}`.

use std::fmt::Write;

/// Side of the square canvas in pixels.
const SIZE: f64 = 600.0;

/// Scatter of `points` (given as `(x, y)`), the unit circle, a reference
/// circle of radius 2 and the axes.
pub fn scatter(points: &[(f64, f64)]) -> String {
    let extent = points
        .iter()
        .map(|(x, y)| x.abs().max(y.abs()))
        .fold(2.5f64, f64::max)
        * 1.1;
    let scale = SIZE / (2.0 * extent);
    let px = |x: f64| SIZE / 2.0 + x * scale;
    let py = |y: f64| SIZE / 2.0 - y * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mid = SIZE / 2.0;
    let _ = writeln!(s, r##"<line x1="0" y1="{mid}" x2="{SIZE}" y2="{mid}" stroke="#999" stroke-width="1"/>"##);
    let _ = writeln!(s, r##"<line x1="{mid}" y1="0" x2="{mid}" y2="{SIZE}" stroke="#999" stroke-width="1"/>"##);
    for (r, color) in [(1.0, "#3366cc"), (2.0, "#cc9933")] {
        let _ = writeln!(
            s,
            r#"<circle cx="{mid}" cy="{mid}" r="{:.3}" fill="none" stroke="{color}" stroke-dasharray="4 3"/>"#,
            r * scale
        );
    }
    for &(x, y) in points {
        let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="1.5" fill="black"/>"#, px(x), py(y));
    }
    s.push_str("</svg>\n");
    s
}
