use super::{Point2D, Polygon2D};
use crate::error::{Error, Result};

/// Segments used to approximate each convex join arc.
const ARC_SEGMENTS: usize = 8;

/// Outward offset of a polygon's exterior ring by `d` meters.
///
/// Convex joins are approximated by 8-segment arcs; reflex joins are
/// trimmed at the intersection of the adjacent offset edges. Holes are
/// dropped. `d = 0` returns the input unchanged.
///
/// Deep concavities offset by more than their local feature size can
/// still self-intersect; inputs here are building footprints, where the
/// offset is small against the footprint.
pub fn buffer_polygon(p: &Polygon2D, d: f64) -> Result<Polygon2D> {
    if d < 0.0 {
        return Err(Error::Domain(format!("buffer distance must be >= 0, got {d}")));
    }
    if d == 0.0 {
        return Ok(p.clone());
    }

    let ring = p.exterior(); // CCW
    let n = ring.len();

    // Unit edge directions and outward normals. For a CCW ring the
    // interior lies left of each directed edge, so outward is the
    // right-hand normal.
    let mut dirs = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    for i in 0..n {
        let e = (ring[(i + 1) % n] - ring[i]).normalized();
        dirs.push(e);
        normals.push(Point2D::new(e.y, -e.x));
    }

    let mut out: Vec<Point2D> = Vec::with_capacity(n * (ARC_SEGMENTS + 2));
    for i in 0..n {
        // Join at vertex i between incoming edge (i-1) and outgoing edge i.
        let prev = (i + n - 1) % n;
        let v = ring[i];
        let turn = dirs[prev].cross(dirs[i]);

        if turn >= -1e-12 {
            // Convex (or straight) vertex: sweep an arc from the incoming
            // normal to the outgoing normal around v.
            let th0 = normals[prev].y.atan2(normals[prev].x);
            let th1 = normals[i].y.atan2(normals[i].x);
            let sweep = (th1 - th0).rem_euclid(std::f64::consts::TAU);
            out.push(v + normals[prev] * d);
            if sweep > 1e-9 && sweep < std::f64::consts::TAU - 1e-9 {
                for j in 1..ARC_SEGMENTS {
                    let th = th0 + sweep * (j as f64 / ARC_SEGMENTS as f64);
                    out.push(v + Point2D::new(th.cos(), th.sin()) * d);
                }
                out.push(v + normals[i] * d);
            }
        } else {
            // Reflex vertex: the adjacent offset edges cross; trim at
            // their line intersection.
            let a1 = ring[prev] + normals[prev] * d;
            let a2 = v + normals[i] * d;
            let denom = dirs[prev].cross(dirs[i]);
            let t = (a2 - a1).cross(dirs[i]) / denom;
            out.push(a1 + dirs[prev] * t);
        }
    }

    // Drop consecutive duplicates introduced by short edges.
    let tol = 1e-12 * (1.0 + d);
    let mut dedup: Vec<Point2D> = Vec::with_capacity(out.len());
    for pt in out {
        if dedup.last().map_or(true, |last| last.dist(pt) > tol) {
            dedup.push(pt);
        }
    }
    if dedup.len() >= 2 && dedup[0].dist(*dedup.last().unwrap()) <= tol {
        dedup.pop();
    }

    Polygon2D::new(dedup, Vec::new())
}
