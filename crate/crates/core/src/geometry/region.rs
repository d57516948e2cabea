use super::{ConvexPolygon, Point};

/// A bounded closed planar region given by a membership predicate.
pub trait Region {
    fn contains(&self, p: Point) -> bool;
    /// Axis-aligned bounding box `(lower-left, upper-right)`.
    fn bounds(&self) -> (Point, Point);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    /// The square `[-half, half]^2`.
    pub fn centered_square(half: f64) -> Self {
        Rect { min: [-half, -half], max: [half, half] }
    }
}

impl Region for Rect {
    fn contains(&self, p: Point) -> bool {
        p[0] >= self.min[0] && p[0] <= self.max[0] && p[1] >= self.min[1] && p[1] <= self.max[1]
    }
    fn bounds(&self) -> (Point, Point) {
        (self.min, self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Region for Disk {
    fn contains(&self, p: Point) -> bool {
        (p[0] - self.center[0]).hypot(p[1] - self.center[1]) <= self.radius
    }
    fn bounds(&self) -> (Point, Point) {
        let (c, r) = (self.center, self.radius);
        ([c[0] - r, c[1] - r], [c[0] + r, c[1] + r])
    }
}

/// Axis-aligned ellipse with semi-axes `a` (horizontal) and `b` (vertical).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub center: Point,
    pub a: f64,
    pub b: f64,
}

impl Region for Ellipse {
    fn contains(&self, p: Point) -> bool {
        let x = (p[0] - self.center[0]) / self.a;
        let y = (p[1] - self.center[1]) / self.b;
        x * x + y * y <= 1.0
    }
    fn bounds(&self) -> (Point, Point) {
        let c = self.center;
        ([c[0] - self.a, c[1] - self.b], [c[0] + self.a, c[1] + self.b])
    }
}

impl Region for ConvexPolygon {
    fn contains(&self, p: Point) -> bool {
        ConvexPolygon::contains(self, p)
    }
    fn bounds(&self) -> (Point, Point) {
        ConvexPolygon::bounds(self)
    }
}
