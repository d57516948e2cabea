use std::fmt::Write;

use crate::geometry::Point;

/// Minimal SVG writer for closed curves in the plane (y axis pointing up).
#[derive(Debug, Clone)]
pub struct SvgCanvas {
    lo: Point,
    hi: Point,
    pixels: f64,
    body: String,
}

impl SvgCanvas {
    /// A canvas showing `[lo, hi]` with the longer side `pixels` wide.
    pub fn new(lo: Point, hi: Point, pixels: f64) -> Self {
        let pad = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        SvgCanvas { lo: [lo[0] - pad, lo[1] - pad], hi: [hi[0] + pad, hi[1] + pad], pixels, body: String::new() }
    }

    fn scale(&self) -> f64 {
        self.pixels / (self.hi[0] - self.lo[0]).max(self.hi[1] - self.lo[1])
    }

    fn map(&self, p: Point) -> (f64, f64) {
        let s = self.scale();
        ((p[0] - self.lo[0]) * s, (self.hi[1] - p[1]) * s)
    }

    pub fn polygon(&mut self, points: &[Point], stroke: &str, fill: &str) {
        if points.is_empty() {
            return;
        }
        let mut pts = String::new();
        for &p in points {
            let (x, y) = self.map(p);
            let _ = write!(pts, "{x:.3},{y:.3} ");
        }
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{fill}" stroke="{stroke}" stroke-width="1"/>"#,
            pts.trim_end()
        );
    }

    pub fn finish(&self) -> String {
        let s = self.scale();
        let (w, h) = ((self.hi[0] - self.lo[0]) * s, (self.hi[1] - self.lo[1]) * s);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

/// A fixed palette cycled over curves.
pub(crate) fn color(i: usize) -> &'static str {
    const C: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    C[i % C.len()]
}
