use super::{segment_distance, ConvexPolygon, PixelSet, Point};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("Hausdorff distance of an empty set")]
    EmptySet,
}

/// A compact planar set known through membership and its boundary.
pub trait PlanarSet {
    fn contains_point(&self, p: Point) -> bool;
    fn boundary_segments(&self) -> Vec<[Point; 2]>;
}

impl PlanarSet for PixelSet {
    fn contains_point(&self, p: Point) -> bool {
        PixelSet::contains_point(self, p)
    }
    fn boundary_segments(&self) -> Vec<[Point; 2]> {
        self.boundary_segments_physical()
    }
}

impl PlanarSet for ConvexPolygon {
    fn contains_point(&self, p: Point) -> bool {
        self.contains(p)
    }
    fn boundary_segments(&self) -> Vec<[Point; 2]> {
        let v = self.vertices();
        (0..v.len()).map(|i| [v[i], v[(i + 1) % v.len()]]).collect()
    }
}

/// Uniform-grid bucket index over segments for nearest-segment queries.
struct SegmentIndex {
    segs: Vec<[Point; 2]>,
    lo: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl SegmentIndex {
    fn new(segs: Vec<[Point; 2]>) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for s in &segs {
            for p in s {
                for k in 0..2 {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let side = ((segs.len() as f64).sqrt().ceil() as usize).clamp(1, 512);
        let cell = span / side as f64 * (1.0 + 1e-9);
        let nx = ((hi[0] - lo[0]) / cell).floor() as usize + 1;
        let ny = ((hi[1] - lo[1]) / cell).floor() as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        for (k, s) in segs.iter().enumerate() {
            let (a, b) = (s[0], s[1]);
            let i0 = ((a[0].min(b[0]) - lo[0]) / cell).floor() as usize;
            let i1 = ((a[0].max(b[0]) - lo[0]) / cell).floor() as usize;
            let j0 = ((a[1].min(b[1]) - lo[1]) / cell).floor() as usize;
            let j1 = ((a[1].max(b[1]) - lo[1]) / cell).floor() as usize;
            for j in j0..=j1.min(ny - 1) {
                for i in i0..=i1.min(nx - 1) {
                    buckets[j * nx + i].push(k);
                }
            }
        }
        SegmentIndex { segs, lo, cell, nx, ny, buckets }
    }

    fn distance(&self, p: Point) -> f64 {
        let ci = ((p[0] - self.lo[0]) / self.cell).floor() as i64;
        let cj = ((p[1] - self.lo[1]) / self.cell).floor() as i64;
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        let mut best = f64::INFINITY;
        let max_ring = nx.max(ny) + ci.abs().max(cj.abs()) + 1;
        for ring in 0..=max_ring {
            // every point outside the searched square is at least this far away
            let reach = if ring == 0 { 0.0 } else { (ring - 1) as f64 * self.cell };
            if best <= reach {
                break;
            }
            for j in (cj - ring)..=(cj + ring) {
                for i in (ci - ring)..=(ci + ring) {
                    if (j - cj).abs() != ring && (i - ci).abs() != ring {
                        continue;
                    }
                    if i < 0 || j < 0 || i >= nx || j >= ny {
                        continue;
                    }
                    for &k in &self.buckets[(j * nx + i) as usize] {
                        let s = self.segs[k];
                        best = best.min(segment_distance(p, s[0], s[1]));
                    }
                }
            }
        }
        best
    }
}

fn samples(segs: &[[Point; 2]], spacing: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for s in segs {
        let len = (s[1][0] - s[0][0]).hypot(s[1][1] - s[0][1]);
        let n = ((len / spacing).ceil() as usize).max(1);
        for k in 0..=n {
            let t = k as f64 / n as f64;
            out.push([s[0][0] + t * (s[1][0] - s[0][0]), s[0][1] + t * (s[1][1] - s[0][1])]);
        }
    }
    out
}

/// `sup_{a in A} dist(a, B)`, evaluated on boundary samples of `A` spaced at
/// most `spacing` apart. Points of `A` inside `B` contribute zero.
pub fn one_sided_distance(a: &dyn PlanarSet, b: &dyn PlanarSet, spacing: f64) -> Result<f64, GeometryError> {
    let sa = a.boundary_segments();
    let sb = b.boundary_segments();
    if sa.is_empty() || sb.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let index = SegmentIndex::new(sb);
    let mut worst: f64 = 0.0;
    for p in samples(&sa, spacing) {
        if b.contains_point(p) {
            continue;
        }
        worst = worst.max(index.distance(p));
    }
    Ok(worst)
}

/// Symmetric Hausdorff distance, exact up to the boundary sampling `spacing`.
pub fn hausdorff_distance(a: &dyn PlanarSet, b: &dyn PlanarSet, spacing: f64) -> Result<f64, GeometryError> {
    Ok(one_sided_distance(a, b, spacing)?.max(one_sided_distance(b, a, spacing)?))
}
