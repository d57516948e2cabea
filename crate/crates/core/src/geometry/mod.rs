//! Planar geometry shared by the lattice and continuum sides: convex polygons
//! built from support functions, unions of lattice cells, region predicates for
//! rasterisation, and Hausdorff distances between sampled sets.

mod hausdorff;
mod pixels;
mod polygon;
mod region;

pub use hausdorff::{hausdorff_distance, one_sided_distance, GeometryError, PlanarSet};
pub use pixels::PixelSet;
pub use polygon::ConvexPolygon;
pub use region::{Disk, Ellipse, Rect, Region};

pub type Point = [f64; 2];

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let len2 = dot(ab, ab);
    let s = if len2 > 0.0 { (dot(ap, ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    norm([ap[0] - s * ab[0], ap[1] - s * ab[1]])
}

/// Shoelace area of a closed polyline (positive when counter-clockwise).
pub fn polygon_area(points: &[Point]) -> f64 {
    let n = points.len();
    let mut s = 0.0;
    for i in 0..n {
        s += cross(points[i], points[(i + 1) % n]);
    }
    0.5 * s
}

pub fn polyline_length(points: &[Point], closed: bool) -> f64 {
    let mut len: f64 = points.windows(2).map(|w| norm(sub(w[1], w[0]))).sum();
    if closed && points.len() > 1 {
        len += norm(sub(points[0], points[points.len() - 1]));
    }
    len
}
