use super::{closest_on_segment, point_segment_distance, BBox, Point2D, BOUNDARY_EPS};
use crate::error::{Error, Result};

/// A simple polygon with an optional set of holes.
///
/// The exterior ring is stored counterclockwise without the closing
/// duplicate vertex; holes are stored clockwise. Containment follows the
/// even-odd rule and counts boundary points as inside.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon2D {
    exterior: Vec<Point2D>,
    holes: Vec<Vec<Point2D>>,
    bbox: BBox,
}

fn normalize_ring(mut ring: Vec<Point2D>, ccw: bool) -> Result<Vec<Point2D>> {
    if ring.len() >= 2 && ring.first() == ring.last() {
        ring.pop();
    }
    if ring.len() < 3 {
        return Err(Error::InvalidGeometry(format!(
            "ring needs at least 3 distinct vertices, got {}",
            ring.len()
        )));
    }
    if ring.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidGeometry("non-finite ring coordinate".into()));
    }
    let signed = signed_ring_area(&ring);
    if signed.abs() <= 0.0 {
        return Err(Error::InvalidGeometry("degenerate ring with zero area".into()));
    }
    if (signed > 0.0) != ccw {
        ring.reverse();
    }
    Ok(ring)
}

fn signed_ring_area(ring: &[Point2D]) -> f64 {
    let mut sum = 0.0;
    for i in 0..ring.len() {
        let a = ring[i];
        let b = ring[(i + 1) % ring.len()];
        sum += a.cross(b);
    }
    sum / 2.0
}

impl Polygon2D {
    pub fn new(exterior: Vec<Point2D>, holes: Vec<Vec<Point2D>>) -> Result<Self> {
        let exterior = normalize_ring(exterior, true)?;
        let holes = holes
            .into_iter()
            .map(|h| normalize_ring(h, false))
            .collect::<Result<Vec<_>>>()?;
        let bbox = BBox::of_points(exterior.iter()).expect("ring has vertices");
        let poly = Self { exterior, holes, bbox };
        if poly.area() <= 0.0 {
            return Err(Error::InvalidGeometry(
                "holes consume the polygon's entire area".into(),
            ));
        }
        Ok(poly)
    }

    /// Convenience constructor for an axis-aligned rectangle.
    pub fn rectangle(min: Point2D, max: Point2D) -> Result<Self> {
        Self::new(
            vec![
                min,
                Point2D::new(max.x, min.y),
                max,
                Point2D::new(min.x, max.y),
            ],
            Vec::new(),
        )
    }

    pub fn exterior(&self) -> &[Point2D] {
        &self.exterior
    }

    pub fn holes(&self) -> &[Vec<Point2D>] {
        &self.holes
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    /// Shoelace area of the exterior minus the holes.
    pub fn area(&self) -> f64 {
        let mut a = signed_ring_area(&self.exterior).abs();
        for h in &self.holes {
            a -= signed_ring_area(h).abs();
        }
        a
    }

    /// Edge-length sum of the exterior ring only.
    pub fn perimeter(&self) -> f64 {
        let n = self.exterior.len();
        (0..n)
            .map(|i| self.exterior[i].dist(self.exterior[(i + 1) % n]))
            .sum()
    }

    fn rings(&self) -> impl Iterator<Item = &[Point2D]> {
        std::iter::once(self.exterior.as_slice()).chain(self.holes.iter().map(|h| h.as_slice()))
    }

    /// Even-odd containment; boundary points (of any ring) count as inside.
    pub fn contains(&self, pt: Point2D) -> bool {
        if !self.bbox.contains_point(pt) && self.boundary_distance_all_rings(pt) > BOUNDARY_EPS {
            return false;
        }
        if self.on_boundary(pt, BOUNDARY_EPS) {
            return true;
        }
        self.even_odd_inside(pt)
    }

    /// Strict interior: even-odd inside and not on any ring boundary.
    pub fn contains_interior(&self, pt: Point2D) -> bool {
        if !self.bbox.contains_point(pt) {
            return false;
        }
        !self.on_boundary(pt, BOUNDARY_EPS) && self.even_odd_inside(pt)
    }

    fn even_odd_inside(&self, pt: Point2D) -> bool {
        let mut inside = false;
        for ring in self.rings() {
            let n = ring.len();
            for i in 0..n {
                let a = ring[i];
                let b = ring[(i + 1) % n];
                if (a.y > pt.y) != (b.y > pt.y) {
                    let x_at = a.x + (pt.y - a.y) / (b.y - a.y) * (b.x - a.x);
                    if pt.x < x_at {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }

    pub fn on_boundary(&self, pt: Point2D, tol: f64) -> bool {
        self.boundary_distance_all_rings(pt) <= tol
    }

    fn boundary_distance_all_rings(&self, pt: Point2D) -> f64 {
        let mut best = f64::INFINITY;
        for ring in self.rings() {
            let n = ring.len();
            for i in 0..n {
                let d = point_segment_distance(pt, ring[i], ring[(i + 1) % n]);
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    /// Closest point on the exterior ring and the distance to it.
    /// The distance is 0 whenever `pt` is inside the polygon.
    pub fn nearest_boundary_point(&self, pt: Point2D) -> (Point2D, f64) {
        let n = self.exterior.len();
        let mut best = (self.exterior[0], f64::INFINITY);
        for i in 0..n {
            let (q, _) = closest_on_segment(pt, self.exterior[i], self.exterior[(i + 1) % n]);
            let d = q.dist(pt);
            if d < best.1 {
                best = (q, d);
            }
        }
        if self.contains(pt) {
            (best.0, 0.0)
        } else {
            best
        }
    }

    /// Nearest exterior vertex index to `pt`.
    pub fn nearest_vertex(&self, pt: Point2D) -> usize {
        let mut best = (0usize, f64::INFINITY);
        for (i, v) in self.exterior.iter().enumerate() {
            let d = v.dist(pt);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Checks the exterior ring for self-intersections (slow; intended
    /// for load-time validation, not per-tick queries).
    pub fn is_simple(&self) -> bool {
        let ring = &self.exterior;
        let n = ring.len();
        for i in 0..n {
            let (a1, a2) = (ring[i], ring[(i + 1) % n]);
            for j in (i + 1)..n {
                let (b1, b2) = (ring[j], ring[(j + 1) % n]);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let ts = super::segment_intersection_params(a1, a2, b1, b2);
                if adjacent {
                    // Sharing one endpoint is fine; overlapping beyond it
                    // (a spike or doubled edge) is not.
                    if ts.len() > 1 {
                        return false;
                    }
                } else if !ts.is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// Rectangle with the same area and (when feasible) perimeter as a source
/// polygon. `x` is the long side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentRectangle {
    pub x: f64,
    pub y: f64,
}

/// Sides of the rectangle with the given area and perimeter.
///
/// When no such rectangle exists (`perimeter² < 16·area`, possible for
/// near-circular footprints) this falls back to the area-preserving
/// square: area drives debris volume, perimeter is secondary.
pub fn equivalent_rectangle(area: f64, perimeter: f64) -> Result<EquivalentRectangle> {
    if !(area > 0.0) || !(perimeter > 0.0) {
        return Err(Error::Domain(format!(
            "equivalent rectangle needs positive area and perimeter, got ({area}, {perimeter})"
        )));
    }
    if perimeter * perimeter >= 16.0 * area {
        let s = perimeter / 2.0;
        let disc = (s * s - 4.0 * area).max(0.0).sqrt();
        let x = (s + disc) / 2.0;
        let y = (s - disc) / 2.0;
        Ok(EquivalentRectangle { x, y })
    } else {
        let side = area.sqrt();
        Ok(EquivalentRectangle { x: side, y: side })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polygon2D {
        Polygon2D::new(
            vec![
                Point2D::new(0.0, 0.0),
                Point2D::new(1.0, 0.0),
                Point2D::new(1.0, 1.0),
                Point2D::new(0.0, 1.0),
            ],
            Vec::new(),
        )
        .unwrap()
    }

    fn l_shape() -> Polygon2D {
        Polygon2D::new(
            vec![
                Point2D::new(0.0, 0.0),
                Point2D::new(2.0, 0.0),
                Point2D::new(2.0, 1.0),
                Point2D::new(1.0, 1.0),
                Point2D::new(1.0, 2.0),
                Point2D::new(0.0, 2.0),
            ],
            Vec::new(),
        )
        .unwrap()
    }

    #[test]
    fn area_of_unit_square_is_one() {
        assert_eq!(unit_square().area(), 1.0);
    }

    #[test]
    fn area_of_20m_square_is_400() {
        let sq =
            Polygon2D::rectangle(Point2D::new(0.0, 0.0), Point2D::new(20.0, 20.0)).unwrap();
        assert_eq!(sq.area(), 400.0);
        assert_eq!(sq.perimeter(), 80.0);
    }

    #[test]
    fn area_of_l_shape_is_three() {
        // Decomposes into three unit squares.
        assert!((l_shape().area() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn perimeter_of_unit_square_is_four() {
        assert_eq!(unit_square().perimeter(), 4.0);
    }

    #[test]
    fn perimeter_of_l_shape_is_eight() {
        assert!((l_shape().perimeter() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn holes_subtract_from_area_but_not_perimeter() {
        let outer = vec![
            Point2D::new(0.0, 0.0),
            Point2D::new(4.0, 0.0),
            Point2D::new(4.0, 4.0),
            Point2D::new(0.0, 4.0),
        ];
        let hole = vec![
            Point2D::new(1.0, 1.0),
            Point2D::new(2.0, 1.0),
            Point2D::new(2.0, 2.0),
            Point2D::new(1.0, 2.0),
        ];
        let p = Polygon2D::new(outer, vec![hole]).unwrap();
        assert!((p.area() - 15.0).abs() < 1e-12);
        assert_eq!(p.perimeter(), 16.0);
    }

    #[test]
    fn degenerate_ring_is_rejected() {
        let line = vec![
            Point2D::new(0.0, 0.0),
            Point2D::new(1.0, 0.0),
            Point2D::new(2.0, 0.0),
        ];
        assert!(matches!(
            Polygon2D::new(line, Vec::new()),
            Err(Error::InvalidGeometry(_))
        ));
    }

    #[test]
    fn contains_interior_boundary_and_outside() {
        let sq = unit_square();
        assert!(sq.contains(Point2D::new(0.5, 0.5)));
        assert!(!sq.contains(Point2D::new(2.0, 2.0)));
        // Boundary convention: edge points are inside.
        assert!(sq.contains(Point2D::new(1.0, 0.5)));
        assert!(!sq.contains_interior(Point2D::new(1.0, 0.5)));
        assert!(sq.contains_interior(Point2D::new(0.5, 0.5)));
    }

    #[test]
    fn point_in_hole_is_outside() {
        let outer = vec![
            Point2D::new(0.0, 0.0),
            Point2D::new(4.0, 0.0),
            Point2D::new(4.0, 4.0),
            Point2D::new(0.0, 4.0),
        ];
        let hole = vec![
            Point2D::new(1.0, 1.0),
            Point2D::new(3.0, 1.0),
            Point2D::new(3.0, 3.0),
            Point2D::new(1.0, 3.0),
        ];
        let p = Polygon2D::new(outer, vec![hole]).unwrap();
        assert!(!p.contains(Point2D::new(2.0, 2.0)));
        assert!(p.contains(Point2D::new(0.5, 0.5)));
        assert!(p.contains(Point2D::new(1.0, 2.0))); // hole boundary
    }

    #[test]
    fn nearest_boundary_point_cases() {
        let sq = unit_square();
        let (p, d) = sq.nearest_boundary_point(Point2D::new(0.5, 2.0));
        assert!((p.x - 0.5).abs() < 1e-12 && (p.y - 1.0).abs() < 1e-12);
        assert!((d - 1.0).abs() < 1e-12);

        let (_, d) = sq.nearest_boundary_point(Point2D::new(0.5, 0.5));
        assert_eq!(d, 0.0);

        let (p, d) = sq.nearest_boundary_point(Point2D::new(2.0, 2.0));
        assert!((p.x - 1.0).abs() < 1e-12 && (p.y - 1.0).abs() < 1e-12);
        assert!((d - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn equivalent_rectangle_square_case() {
        let r = equivalent_rectangle(100.0, 40.0).unwrap();
        assert_eq!((r.x, r.y), (10.0, 10.0));
    }

    #[test]
    fn equivalent_rectangle_general_case() {
        // Roots of t² − 30t + 200.
        let r = equivalent_rectangle(200.0, 60.0).unwrap();
        assert!((r.x - 20.0).abs() < 1e-12);
        assert!((r.y - 10.0).abs() < 1e-12);
    }

    #[test]
    fn equivalent_rectangle_infeasible_pair_falls_back_to_square() {
        // 35² = 1225 < 1600 = 16·100.
        let r = equivalent_rectangle(100.0, 35.0).unwrap();
        assert_eq!((r.x, r.y), (10.0, 10.0));
    }

    #[test]
    fn equivalent_rectangle_rejects_non_positive_inputs() {
        assert!(equivalent_rectangle(0.0, 10.0).is_err());
        assert!(equivalent_rectangle(10.0, -1.0).is_err());
    }

    #[test]
    fn simple_and_self_intersecting_rings() {
        assert!(unit_square().is_simple());
        assert!(l_shape().is_simple());
        let bowtie = Polygon2D::new(
            vec![
                Point2D::new(0.0, 0.0),
                Point2D::new(2.0, 2.0),
                Point2D::new(2.0, 0.0),
                Point2D::new(0.0, 2.0),
            ],
            Vec::new(),
        );
        // Bowtie may or may not construct (net signed area), but if it
        // does it must not be simple.
        if let Ok(p) = bowtie {
            assert!(!p.is_simple());
        }
    }
}
