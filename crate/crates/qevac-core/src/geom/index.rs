use super::{segment_intersection_params, BBox, Point2D, Polygon2D};

/// Build-once uniform-grid index over polygons keyed by integer id.
///
/// Queries return exactly the ids whose bounding boxes intersect the
/// query box (closed-box semantics), in ascending id order.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    items: Vec<(u32, Polygon2D, BBox)>,
    extent: BBox,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>, // positions into `items`
}

impl SpatialIndex {
    pub fn build(polygons: Vec<(u32, Polygon2D)>) -> Self {
        let mut items: Vec<(u32, Polygon2D, BBox)> = polygons
            .into_iter()
            .map(|(id, p)| {
                let bb = p.bbox();
                (id, p, bb)
            })
            .collect();
        items.sort_by_key(|(id, _, _)| *id);

        if items.is_empty() {
            return Self {
                items,
                extent: BBox { min: Point2D::ZERO, max: Point2D::ZERO },
                cell: 1.0,
                nx: 1,
                ny: 1,
                cells: vec![Vec::new()],
            };
        }

        let mut extent = items[0].2;
        for (_, _, bb) in &items[1..] {
            extent = extent.merge(bb);
        }
        let w = (extent.max.x - extent.min.x).max(1e-9);
        let h = (extent.max.y - extent.min.y).max(1e-9);
        // Aim for roughly one item per cell.
        let target = (items.len() as f64).sqrt().ceil().max(1.0);
        let cell = (w.max(h) / target).max(1e-6);
        let nx = ((w / cell).ceil() as usize).max(1);
        let ny = ((h / cell).ceil() as usize).max(1);

        let mut cells = vec![Vec::new(); nx * ny];
        for (pos, (_, _, bb)) in items.iter().enumerate() {
            let (c0, r0) = cell_of(extent.min, cell, nx, ny, bb.min);
            let (c1, r1) = cell_of(extent.min, cell, nx, ny, bb.max);
            for r in r0..=r1 {
                for c in c0..=c1 {
                    cells[r * nx + c].push(pos as u32);
                }
            }
        }

        Self { items, extent, cell, nx, ny, cells }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&Polygon2D> {
        self.items
            .binary_search_by_key(&id, |(i, _, _)| *i)
            .ok()
            .map(|pos| &self.items[pos].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Polygon2D)> {
        self.items.iter().map(|(id, p, _)| (*id, p))
    }

    /// Ids whose bounding boxes intersect `query`, ascending.
    pub fn query_bbox(&self, query: &BBox) -> Vec<u32> {
        if self.items.is_empty() || !self.extent.intersects(query) {
            return Vec::new();
        }
        let (c0, r0) = cell_of(self.extent.min, self.cell, self.nx, self.ny, query.min);
        let (c1, r1) = cell_of(self.extent.min, self.cell, self.nx, self.ny, query.max);
        let mut found: Vec<u32> = Vec::new();
        for r in r0..=r1 {
            for c in c0..=c1 {
                for &pos in &self.cells[r * self.nx + c] {
                    let (id, _, bb) = &self.items[pos as usize];
                    if bb.intersects(query) {
                        found.push(*id);
                    }
                }
            }
        }
        found.sort_unstable();
        found.dedup();
        found
    }

    pub fn query_point(&self, pt: Point2D) -> Vec<u32> {
        self.query_bbox(&BBox { min: pt, max: pt })
    }

    pub fn query_segment(&self, a: Point2D, b: Point2D) -> Vec<u32> {
        let bb = BBox {
            min: Point2D::new(a.x.min(b.x), a.y.min(b.y)),
            max: Point2D::new(a.x.max(b.x), a.y.max(b.y)),
        };
        self.query_bbox(&bb)
    }
}

fn cell_of(origin: Point2D, cell: f64, nx: usize, ny: usize, p: Point2D) -> (usize, usize) {
    let cx = (((p.x - origin.x) / cell).floor() as i64).clamp(0, nx as i64 - 1) as usize;
    let cy = (((p.y - origin.y) / cell).floor() as i64).clamp(0, ny as i64 - 1) as usize;
    (cx, cy)
}

/// Parameter in `[0, 1]` along `a->b` at which the segment first enters
/// the interior of `poly`, plus the index of the boundary edge crossed
/// there. `None` if the segment never enters the interior.
///
/// Grazing a vertex or running along an edge does not count as entering:
/// the segment is cut at every boundary crossing and a piece counts only
/// if its midpoint lies strictly inside.
pub fn segment_entry(poly: &Polygon2D, a: Point2D, b: Point2D) -> Option<(f64, usize)> {
    let mut ts: Vec<f64> = vec![0.0, 1.0];
    let mut crossings: Vec<(f64, usize)> = Vec::new(); // exterior-edge crossings

    for (ring_idx, ring) in std::iter::once(poly.exterior())
        .chain(poly.holes().iter().map(|h| h.as_slice()))
        .enumerate()
    {
        let n = ring.len();
        for i in 0..n {
            let hits = segment_intersection_params(a, b, ring[i], ring[(i + 1) % n]);
            for t in hits {
                ts.push(t);
                if ring_idx == 0 {
                    crossings.push((t, i));
                }
            }
        }
    }

    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);

    let dir = b - a;
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 <= 1e-12 {
            continue;
        }
        let mid = a + dir * ((t0 + t1) / 2.0);
        if poly.contains_interior(mid) {
            // Entered at t0; find the exterior edge crossed there.
            let edge = crossings
                .iter()
                .filter(|(t, _)| (*t - t0).abs() <= 1e-9)
                .map(|(_, i)| *i)
                .min()
                .unwrap_or_else(|| nearest_edge(poly, a + dir * t0));
            return Some((t0, edge));
        }
    }
    None
}

fn nearest_edge(poly: &Polygon2D, pt: Point2D) -> usize {
    let ring = poly.exterior();
    let n = ring.len();
    let mut best = (0usize, f64::INFINITY);
    for i in 0..n {
        let d = super::point_segment_distance(pt, ring[i], ring[(i + 1) % n]);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Id of the first obstacle whose interior the segment `(a, b]` enters,
/// in parametric order along the segment; ties break to the smaller id.
pub fn segment_blocked(a: Point2D, b: Point2D, obstacles: &SpatialIndex) -> Option<u32> {
    if a == b {
        return None;
    }
    let mut best: Option<(f64, u32)> = None;
    for id in obstacles.query_segment(a, b) {
        let poly = obstacles.get(id).expect("id from query");
        if let Some((t, _)) = segment_entry(poly, a, b) {
            let key = (t, id);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
    }
    best.map(|(_, id)| id)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(id_min: Point2D, side: f64) -> Polygon2D {
        Polygon2D::rectangle(id_min, Point2D::new(id_min.x + side, id_min.y + side)).unwrap()
    }

    fn index_with_one_square() -> SpatialIndex {
        SpatialIndex::build(vec![(7, square(Point2D::new(1.0, 1.0), 2.0))])
    }

    #[test]
    fn clear_segment_is_not_blocked() {
        let idx = index_with_one_square();
        assert_eq!(
            segment_blocked(Point2D::new(0.0, 0.0), Point2D::new(0.0, 5.0), &idx),
            None
        );
    }

    #[test]
    fn segment_entering_square_reports_its_id() {
        let idx = index_with_one_square();
        assert_eq!(
            segment_blocked(Point2D::new(0.0, 2.0), Point2D::new(5.0, 2.0), &idx),
            Some(7)
        );
    }

    #[test]
    fn grazing_a_vertex_does_not_block() {
        // Diagonal through the corner (1,1) of the square [1,3]²,
        // exactly touching the vertex without entering the interior.
        let idx = index_with_one_square();
        assert_eq!(
            segment_blocked(Point2D::new(0.0, 2.0), Point2D::new(2.0, 0.0), &idx),
            None
        );
    }

    #[test]
    fn running_along_an_edge_does_not_block() {
        let idx = index_with_one_square();
        assert_eq!(
            segment_blocked(Point2D::new(0.0, 1.0), Point2D::new(5.0, 1.0), &idx),
            None
        );
    }

    #[test]
    fn first_obstacle_in_parametric_order_wins() {
        let idx = SpatialIndex::build(vec![
            (3, square(Point2D::new(4.0, 0.0), 2.0)),
            (9, square(Point2D::new(1.0, 0.0), 2.0)),
        ]);
        assert_eq!(
            segment_blocked(Point2D::new(0.0, 1.0), Point2D::new(7.0, 1.0), &idx),
            Some(9)
        );
    }

    #[test]
    fn entry_edge_is_reported() {
        let sq = square(Point2D::new(1.0, 1.0), 2.0);
        // Enter from the left: crosses edge x=1 (the west edge). The ring
        // is CCW from (1,1): edges are S(0), E(1), N(2), W(3).
        let (t, edge) = segment_entry(&sq, Point2D::new(0.0, 2.0), Point2D::new(2.0, 2.0)).unwrap();
        assert!((t - 0.5).abs() < 1e-12);
        assert_eq!(edge, 3);
    }

    #[test]
    fn segment_from_boundary_outward_is_clear_inward_is_blocked() {
        let idx = index_with_one_square();
        let door = Point2D::new(2.0, 1.0); // on the south edge
        assert_eq!(segment_blocked(door, Point2D::new(2.0, 0.0), &idx), None);
        assert_eq!(segment_blocked(door, Point2D::new(2.0, 2.5), &idx), Some(7));
    }

    #[test]
    fn query_matches_brute_force_on_random_polygons() {
        use crate::rng::Stream;
        let mut s = Stream::new(0xBEEF, 0, 99);
        let mut polys = Vec::new();
        for id in 0..1000u32 {
            let x = s.next_range(0.0, 500.0);
            let y = s.next_range(0.0, 500.0);
            let w = s.next_range(0.5, 12.0);
            let h = s.next_range(0.5, 12.0);
            polys.push((
                id,
                Polygon2D::rectangle(Point2D::new(x, y), Point2D::new(x + w, y + h)).unwrap(),
            ));
        }
        let brute: Vec<(u32, BBox)> = polys.iter().map(|(id, p)| (*id, p.bbox())).collect();
        let idx = SpatialIndex::build(polys);
        for _ in 0..200 {
            let x = s.next_range(-10.0, 510.0);
            let y = s.next_range(-10.0, 510.0);
            let q = BBox {
                min: Point2D::new(x, y),
                max: Point2D::new(x + s.next_range(0.0, 40.0), y + s.next_range(0.0, 40.0)),
            };
            let got = idx.query_bbox(&q);
            let mut want: Vec<u32> = brute
                .iter()
                .filter(|(_, bb)| bb.intersects(&q))
                .map(|(id, _)| *id)
                .collect();
            want.sort_unstable();
            assert_eq!(got, want);
        }
    }
}
