use super::{cross, dot, norm, segment_distance, sub, Point};

/// A convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Wraps vertices that are already convex and counter-clockwise.
    pub fn from_ccw(vertices: Vec<Point>) -> Self {
        ConvexPolygon { vertices }
    }

    /// Convex hull of arbitrary points (Andrew's monotone chain).
    pub fn hull(points: &[Point]) -> Self {
        let mut pts: Vec<Point> = points.to_vec();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        if pts.len() < 3 {
            return ConvexPolygon { vertices: pts };
        }
        let mut lower: Vec<Point> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2
                && cross(sub(lower[lower.len() - 1], lower[lower.len() - 2]), sub(p, lower[lower.len() - 2])) <= 0.0
            {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Point> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2
                && cross(sub(upper[upper.len() - 1], upper[upper.len() - 2]), sub(p, upper[upper.len() - 2])) <= 0.0
            {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        ConvexPolygon { vertices: lower }
    }

    /// Intersection of the half-planes `{p : p·v(θ_i) <= h_i}`.
    ///
    /// When consecutive support lines already bound a convex polygon (the
    /// discrete analogue of `h'' + h > 0`) the vertices are the pairwise line
    /// intersections; otherwise the half-planes are clipped one at a time.
    /// Returns `None` for an empty intersection.
    pub fn from_support(theta: &[f64], h: &[f64]) -> Option<Self> {
        assert_eq!(theta.len(), h.len());
        let n = theta.len();
        if n < 3 {
            return None;
        }
        if let Some(v) = consecutive_vertices(theta, h) {
            return Some(ConvexPolygon { vertices: v });
        }
        let r = h.iter().fold(1.0_f64, |m, x| m.max(x.abs())) * 4.0;
        let mut poly = vec![[-r, -r], [r, -r], [r, r], [-r, r]];
        for (t, &b) in theta.iter().zip(h) {
            let v = [t.cos(), t.sin()];
            poly = clip_halfplane(&poly, v, b);
            if poly.is_empty() {
                return None;
            }
        }
        let poly = ConvexPolygon::hull(&poly);
        if poly.vertices.len() < 3 || poly.area() <= 0.0 {
            return None;
        }
        Some(poly)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        super::polygon_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        super::polyline_length(&self.vertices, true)
    }

    pub fn scaled(&self, s: f64) -> Self {
        ConvexPolygon { vertices: self.vertices.iter().map(|p| [p[0] * s, p[1] * s]).collect() }
    }

    pub fn translated(&self, d: Point) -> Self {
        ConvexPolygon { vertices: self.vertices.iter().map(|p| [p[0] + d[0], p[1] + d[1]]).collect() }
    }

    pub fn bounds(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Support value `max_{p} p·dir`.
    pub fn support(&self, dir: Point) -> f64 {
        self.vertices.iter().map(|&p| dot(p, dir)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Closed-set membership in `O(log n)`.
    pub fn contains(&self, p: Point) -> bool {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return false;
        }
        let eps = 1e-12 * (1.0 + norm(v[0]));
        let d = sub(p, v[0]);
        if cross(sub(v[1], v[0]), d) < -eps || cross(sub(v[n - 1], v[0]), d) > eps {
            return false;
        }
        let (mut lo, mut hi) = (1usize, n - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if cross(sub(v[mid], v[0]), d) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        cross(sub(v[hi], v[lo]), sub(p, v[lo])) >= -eps
    }

    /// Euclidean distance to the boundary, negated for interior points.
    pub fn signed_distance(&self, p: Point) -> f64 {
        let n = self.vertices.len();
        let mut d = f64::INFINITY;
        for i in 0..n {
            d = d.min(segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]));
        }
        if self.contains(p) {
            -d
        } else {
            d
        }
    }

    /// `[x_min, x_max]` of the intersection with the horizontal line at `y`.
    pub fn cross_section(&self, y: f64) -> Option<(f64, f64)> {
        let n = self.vertices.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let (ymin, ymax) = if a[1] <= b[1] { (a[1], b[1]) } else { (b[1], a[1]) };
            if y < ymin || y > ymax {
                continue;
            }
            if a[1] == b[1] {
                lo = lo.min(a[0].min(b[0]));
                hi = hi.max(a[0].max(b[0]));
            } else {
                let s = (y - a[1]) / (b[1] - a[1]);
                let x = a[0] + s * (b[0] - a[0]);
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Horizontal extent of the part of the polygon inside the band `y0 <= y <= y1`.
    pub fn x_range_in_band(&self, y0: f64, y1: f64) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for y in [y0, y1] {
            if let Some((a, b)) = self.cross_section(y) {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        for p in &self.vertices {
            if p[1] > y0 && p[1] < y1 {
                lo = lo.min(p[0]);
                hi = hi.max(p[0]);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Outward offset `p -> p + δ n` evaluated through the support function
    /// on `n_dirs` uniform directions; `δ < 0` erodes.
    pub fn offset(&self, delta: f64, n_dirs: usize) -> Option<Self> {
        let theta: Vec<f64> = (0..n_dirs).map(|i| std::f64::consts::TAU * i as f64 / n_dirs as f64).collect();
        let h: Vec<f64> = theta.iter().map(|t| self.support([t.cos(), t.sin()]) + delta).collect();
        ConvexPolygon::from_support(&theta, &h)
    }
}

fn line_intersection(v1: Point, b1: f64, v2: Point, b2: f64) -> Option<Point> {
    let det = cross(v1, v2);
    if det.abs() < 1e-300 {
        return None;
    }
    Some([(b1 * v2[1] - b2 * v1[1]) / det, (v1[0] * b2 - v2[0] * b1) / det])
}

fn consecutive_vertices(theta: &[f64], h: &[f64]) -> Option<Vec<Point>> {
    let n = theta.len();
    let dirs: Vec<Point> = theta.iter().map(|t| [t.cos(), t.sin()]).collect();
    for i in 0..n {
        if cross(dirs[i], dirs[(i + 1) % n]) <= 0.0 {
            return None;
        }
    }
    let mut verts = Vec::with_capacity(n);
    for i in 0..n {
        let j = (i + 1) % n;
        verts.push(line_intersection(dirs[i], h[i], dirs[j], h[j])?);
    }
    // edge along line j runs from verts[i] to verts[j]; it must point along the tangent of j
    for i in 0..n {
        let j = (i + 1) % n;
        let t = [-dirs[j][1], dirs[j][0]];
        if dot(sub(verts[j], verts[i]), t) <= 0.0 {
            return None;
        }
    }
    Some(verts)
}

fn clip_halfplane(poly: &[Point], v: Point, b: f64) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let fp = dot(p, v) - b;
        let fq = dot(q, v) - b;
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let s = fp / (fp - fq);
            out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
        }
    }
    out
}
