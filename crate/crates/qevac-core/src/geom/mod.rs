//! Planar geometry and raster primitives.
//!
//! Everything here works in projected planar coordinates in meters.
//! Geographic (lat/lon) input must be pre-projected before it reaches
//! this crate.

mod buffer;
mod grid;
mod index;
mod polygon;

pub use buffer::buffer_polygon;
pub use grid::ElevationGrid;
pub use index::{segment_blocked, segment_entry, SpatialIndex};
pub use polygon::{equivalent_rectangle, EquivalentRectangle, Polygon2D};

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Absolute tolerance used for on-boundary point tests.
pub(crate) const BOUNDARY_EPS: f64 = 1e-9;

/// A point (or displacement vector) in the projected plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ZERO: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(&self, other: Point2D) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(&self, other: Point2D) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: Point2D) -> f64 {
        (*self - other).norm()
    }

    /// Unit vector, or zero if the vector is (numerically) zero.
    pub fn normalized(&self) -> Point2D {
        let n = self.norm();
        if n <= f64::MIN_POSITIVE {
            Point2D::ZERO
        } else {
            *self / n
        }
    }

    /// Rotate counterclockwise by `radians`.
    pub fn rotated(&self, radians: f64) -> Point2D {
        let (s, c) = radians.sin_cos();
        Point2D::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point2D {
    type Output = Point2D;
    fn add(self, o: Point2D) -> Point2D {
        Point2D::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2D {
    type Output = Point2D;
    fn sub(self, o: Point2D) -> Point2D {
        Point2D::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2D {
    type Output = Point2D;
    fn mul(self, k: f64) -> Point2D {
        Point2D::new(self.x * k, self.y * k)
    }
}

impl Div<f64> for Point2D {
    type Output = Point2D;
    fn div(self, k: f64) -> Point2D {
        Point2D::new(self.x / k, self.y / k)
    }
}

impl Neg for Point2D {
    type Output = Point2D;
    fn neg(self) -> Point2D {
        Point2D::new(-self.x, -self.y)
    }
}

/// Axis-aligned bounding box (closed: touching boxes intersect).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point2D,
    pub max: Point2D,
}

impl BBox {
    pub fn of_points<'a>(pts: impl IntoIterator<Item = &'a Point2D>) -> Option<BBox> {
        let mut it = pts.into_iter();
        let first = *it.next()?;
        let mut bb = BBox { min: first, max: first };
        for p in it {
            bb.expand(*p);
        }
        Some(bb)
    }

    pub fn expand(&mut self, p: Point2D) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn merge(&self, other: &BBox) -> BBox {
        BBox {
            min: Point2D::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: Point2D::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }

    pub fn contains_point(&self, p: Point2D) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Closest point on segment `[a, b]` to `p`, and its parameter in `[0, 1]`.
pub(crate) fn closest_on_segment(p: Point2D, a: Point2D, b: Point2D) -> (Point2D, f64) {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= f64::MIN_POSITIVE {
        return (a, 0.0);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (a + ab * t, t)
}

pub(crate) fn point_segment_distance(p: Point2D, a: Point2D, b: Point2D) -> f64 {
    closest_on_segment(p, a, b).0.dist(p)
}

/// Intersection parameters (on segment `a1->a2`) where it meets segment
/// `b1->b2`. A proper crossing or endpoint touch yields one `t`; a
/// collinear overlap yields the two parameters bounding the shared part.
pub(crate) fn segment_intersection_params(
    a1: Point2D,
    a2: Point2D,
    b1: Point2D,
    b2: Point2D,
) -> Vec<f64> {
    let r = a2 - a1;
    let s = b2 - b1;
    let denom = r.cross(s);
    let qp = b1 - a1;
    let scale = r.norm().max(s.norm()).max(1.0);
    let eps_area = 1e-12 * scale * scale;

    if denom.abs() > eps_area {
        let t = qp.cross(s) / denom;
        let u = qp.cross(r) / denom;
        let eps = 1e-12;
        if (-eps..=1.0 + eps).contains(&t) && (-eps..=1.0 + eps).contains(&u) {
            return vec![t.clamp(0.0, 1.0)];
        }
        return Vec::new();
    }

    // Parallel. Non-collinear parallels never meet.
    if qp.cross(r).abs() > eps_area {
        return Vec::new();
    }
    let rr = r.dot(r);
    if rr <= f64::MIN_POSITIVE {
        return Vec::new();
    }
    let t0 = (b1 - a1).dot(r) / rr;
    let t1 = (b2 - a1).dot(r) / rr;
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let lo = lo.max(0.0);
    let hi = hi.min(1.0);
    if lo > hi {
        return Vec::new();
    }
    if (hi - lo).abs() < 1e-12 {
        vec![lo]
    } else {
        vec![lo, hi]
    }
}
