//! Effective pedestrian speed (slope- and debris-modified) and
//! deterministic candidate-direction steering with building avoidance
//! and person-person separation.

use crate::error::{Error, Result};
use crate::geom::{segment_blocked, segment_entry, Point2D, SpatialIndex};
use std::path::Path;

/// Upper bound any accepted speed-slope curve may reach. The reference
/// hiking relation peaks slightly above 1 on gentle downhill grades.
pub const FACTOR_MAX: f64 = 1.25;

/// Piecewise-linear speed factor over signed slope (degrees), clamped at
/// the end knots. A knot at slope 0 with factor exactly 1 is required so
/// flat ground never alters the natural speed.
///
/// The shipped default is a qualitative transcription of the crowd-
/// sourced slope/travel-rate relation (slight-downhill maximum, steep
/// decline both ways); replace it with a published curve via the curve
/// CSV if finer fidelity is needed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedSlopeCurve {
    knots: Vec<(f64, f64)>,
}

const DEFAULT_CURVE_CSV: &str = include_str!("../assets/speed_slope.csv");

impl SpeedSlopeCurve {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Config("speed-slope curve needs at least 2 knots".into()));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Config(format!(
                    "curve knots must be strictly increasing in slope ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        for (slope, factor) in &knots {
            if !(0.0..=FACTOR_MAX).contains(factor) {
                return Err(Error::Config(format!(
                    "curve factor {factor} at slope {slope} outside [0, {FACTOR_MAX}]"
                )));
            }
        }
        if !knots.iter().any(|&(s, f)| s == 0.0 && f == 1.0) {
            return Err(Error::Config("curve must have a knot (0, 1.0)".into()));
        }
        Ok(Self { knots })
    }

    pub fn default_curve() -> Self {
        Self::from_csv_str(DEFAULT_CURVE_CSV).expect("shipped curve is valid")
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_csv_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::Config(format!("curve header: {e}")))?;
        if headers.iter().collect::<Vec<_>>() != ["slope_deg", "factor"] {
            return Err(Error::Config("curve header must be `slope_deg,factor`".into()));
        }
        let mut knots = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Config(format!("curve row {}: {e}", line + 2)))?;
            let slope: f64 = record
                .get(0)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Config(format!("curve row {}: bad slope", line + 2)))?;
            let factor: f64 = record
                .get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Config(format!("curve row {}: bad factor", line + 2)))?;
            knots.push((slope, factor));
        }
        Self::new(knots)
    }

    /// Factor at the given signed slope, clamped outside the knot range.
    pub fn factor(&self, slope_deg: f64) -> f64 {
        let k = &self.knots;
        if slope_deg <= k[0].0 {
            return k[0].1;
        }
        if slope_deg >= k[k.len() - 1].0 {
            return k[k.len() - 1].1;
        }
        for w in k.windows(2) {
            let (s0, f0) = w[0];
            let (s1, f1) = w[1];
            if slope_deg <= s1 {
                return f0 + (slope_deg - s0) / (s1 - s0) * (f1 - f0);
            }
        }
        unreachable!("knot range covered above")
    }
}

/// Natural speed scaled by the slope factor, halved inside debris.
/// The two effects compose multiplicatively.
pub fn effective_speed(natural: f64, slope_factor: f64, in_debris: bool) -> f64 {
    natural * slope_factor * if in_debris { 0.5 } else { 1.0 }
}

/// Immutable inputs of one steering decision.
///
/// `neighbors` are keep-out discs for this mover's center: each entry is
/// a neighbor's previous-tick position with the combined radius of both
/// person discs already folded in. `slide_bias` is the slide direction
/// chosen on the previous step (if any); keeping it while the straight
/// path stays blocked makes wall-following monotone instead of
/// oscillating at corners where the goal direction flips sides.
pub struct SteeringContext<'a> {
    pub position: Point2D,
    pub target: Point2D,
    pub obstacles: &'a SpatialIndex,
    pub neighbors: &'a [(Point2D, f64)],
    pub step_budget: f64,
    pub slide_bias: Option<Point2D>,
}

/// Result of one steering step: the displacement to commit and the slide
/// memory to carry into the next step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Steer {
    pub displacement: Point2D,
    pub slide_bias: Option<Point2D>,
}

impl Steer {
    fn stop() -> Self {
        Steer { displacement: Point2D::ZERO, slide_bias: None }
    }
}

/// One deterministic steering step.
///
/// Candidate directions are tried in a fixed order — straight to target,
/// slide along the blocking edge (persisting orientation first), then
/// ±45° offsets — and the first whose swept segment does not enter any
/// obstacle interior is taken. The chosen step is then shortened so the
/// endpoint does not newly overlap a neighbor disc; discs the mover
/// already overlaps impose no constraint (transient overlaps resolve as
/// movers separate). If every candidate is blocked the displacement is
/// zero.
pub fn steer(ctx: &SteeringContext) -> Steer {
    if ctx.step_budget <= 0.0 {
        return Steer::stop();
    }
    let to_target = ctx.target - ctx.position;
    let dist = to_target.norm();
    if dist <= 1e-12 {
        return Steer::stop();
    }
    let dir0 = to_target / dist;

    // (direction, step length, is_slide) candidates in priority order.
    let mut candidates: Vec<(Point2D, f64, bool)> = Vec::with_capacity(5);
    candidates.push((dir0, ctx.step_budget.min(dist), false));

    let straight_end = ctx.position + dir0 * candidates[0].1;
    if let Some(block_id) = segment_blocked(ctx.position, straight_end, ctx.obstacles) {
        let poly = ctx.obstacles.get(block_id).expect("blocking id exists");
        if let Some((_, edge_idx)) = segment_entry(poly, ctx.position, straight_end) {
            let ring = poly.exterior();
            let e = (ring[(edge_idx + 1) % ring.len()] - ring[edge_idx]).normalized();
            // Order the two orientations by the previous slide direction
            // when one aligns with it, otherwise by progress toward the
            // target.
            let primary = match ctx.slide_bias {
                Some(bias) if e.dot(bias).abs() > 0.1 => bias,
                _ => dir0,
            };
            let (first, second) = if e.dot(primary) >= 0.0 { (e, -e) } else { (-e, e) };
            candidates.push((first, ctx.step_budget, true));
            candidates.push((second, ctx.step_budget, true));
        }
        let quarter = std::f64::consts::FRAC_PI_4;
        candidates.push((dir0.rotated(quarter), ctx.step_budget, false));
        candidates.push((dir0.rotated(-quarter), ctx.step_budget, false));
    }

    for (dir, len, is_slide) in candidates {
        let end = ctx.position + dir * len;
        if segment_blocked(ctx.position, end, ctx.obstacles).is_some() {
            continue;
        }
        let len = shorten_for_neighbors(ctx.position, dir, len, ctx.neighbors);
        return Steer {
            displacement: dir * len,
            slide_bias: if is_slide { Some(dir) } else { None },
        };
    }
    Steer::stop()
}

/// Largest step length in `[0, len]` along `dir` whose endpoint does not
/// newly enter any keep-out disc.
fn shorten_for_neighbors(pos: Point2D, dir: Point2D, len: f64, discs: &[(Point2D, f64)]) -> f64 {
    let mut s_max = len;
    for &(c, radius) in discs {
        if radius <= 0.0 {
            continue;
        }
        let rel = pos - c;
        let cc = rel.dot(rel) - radius * radius;
        if cc <= 0.0 {
            // Already overlapping this disc: no constraint.
            continue;
        }
        let b = 2.0 * dir.dot(rel);
        let disc = b * b - 4.0 * cc;
        if disc <= 0.0 {
            continue; // line misses the disc
        }
        let entry = (-b - disc.sqrt()) / 2.0;
        if entry >= 0.0 && entry < s_max {
            s_max = entry;
        }
    }
    s_max.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polygon2D;

    #[test]
    fn default_curve_matches_its_knots() {
        let c = SpeedSlopeCurve::default_curve();
        assert_eq!(c.factor(0.0), 1.0);
        assert_eq!(c.factor(30.0), 0.4);
        assert_eq!(c.factor(45.0), 0.4); // clamped
        assert_eq!(c.factor(-45.0), 0.4);
        assert!((c.factor(-5.0) - 1.025).abs() < 1e-12);
    }

    #[test]
    fn curve_is_continuous_across_knots() {
        let c = SpeedSlopeCurve::default_curve();
        for knot in c.knots().to_vec() {
            let before = c.factor(knot.0 - 1e-9);
            let after = c.factor(knot.0 + 1e-9);
            assert!((before - knot.1).abs() < 1e-6);
            assert!((after - knot.1).abs() < 1e-6);
        }
    }

    #[test]
    fn invalid_curves_are_rejected() {
        assert!(SpeedSlopeCurve::new(vec![(0.0, 1.0)]).is_err()); // one knot
        assert!(SpeedSlopeCurve::new(vec![(0.0, 1.0), (0.0, 0.9)]).is_err()); // not increasing
        assert!(SpeedSlopeCurve::new(vec![(-5.0, 1.0), (5.0, 0.9)]).is_err()); // no (0,1) knot
        assert!(SpeedSlopeCurve::new(vec![(0.0, 1.0), (5.0, 1.5)]).is_err()); // above FACTOR_MAX
    }

    #[test]
    fn effective_speed_composes_multiplicatively() {
        assert_eq!(effective_speed(1.4, 1.0, true), 0.7);
        assert_eq!(effective_speed(1.4, 1.0, false), 1.4);
        assert!((effective_speed(1.4, 0.4, true) - 0.28).abs() < 1e-12);
    }

    fn one_square_index() -> SpatialIndex {
        SpatialIndex::build(vec![(
            0,
            Polygon2D::rectangle(Point2D::new(2.0, -2.0), Point2D::new(3.0, 2.0)).unwrap(),
        )])
    }

    #[test]
    fn clear_path_takes_the_full_step() {
        let idx = SpatialIndex::build(Vec::new());
        let ctx = SteeringContext {
            position: Point2D::ZERO,
            target: Point2D::new(10.0, 0.0),
            obstacles: &idx,
            neighbors: &[],
            step_budget: 1.4,
            slide_bias: None,
        };
        let d = steer(&ctx).displacement;
        assert!((d.norm() - 1.4).abs() < 1e-12);
        assert!((d.x - 1.4).abs() < 1e-12);
    }

    #[test]
    fn step_never_overshoots_the_target() {
        let idx = SpatialIndex::build(Vec::new());
        let ctx = SteeringContext {
            position: Point2D::ZERO,
            target: Point2D::new(0.5, 0.0),
            obstacles: &idx,
            neighbors: &[],
            step_budget: 1.4,
            slide_bias: None,
        };
        assert!((steer(&ctx).displacement.norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn wall_produces_a_slide_with_nonnegative_progress() {
        let idx = one_square_index();
        // Start on the wall face itself so the straight candidate is
        // blocked immediately.
        let pos = Point2D::new(2.0, 0.5);
        let target = Point2D::new(6.0, 0.5);
        let ctx = SteeringContext {
            position: pos,
            target,
            obstacles: &idx,
            neighbors: &[],
            step_budget: 1.0,
            slide_bias: None,
        };
        let out = steer(&ctx);
        let d = out.displacement;
        assert!(d.norm() > 0.0, "should slide, not stall");
        assert!(out.slide_bias.is_some(), "slide memory should be set");
        // The swept segment must not enter the obstacle, and the slide
        // runs along the wall (no backward motion relative to target).
        assert_eq!(segment_blocked(pos, pos + d, &idx), None);
        let dir0 = (target - pos).normalized();
        assert!(d.dot(dir0) >= -1e-12, "slide should not move backward");
        assert!(d.x.abs() < 1e-12, "slide should be parallel to the wall");
    }

    #[test]
    fn approach_then_slide_then_round_the_corner() {
        // Walk a full detour around the square and verify the mover gets
        // past it (wall-following memory prevents corner oscillation).
        let idx = one_square_index();
        let target = Point2D::new(6.0, 0.5);
        let mut pos = Point2D::new(1.0, 0.5);
        let mut bias = None;
        for _ in 0..30 {
            let out = steer(&SteeringContext {
                position: pos,
                target,
                obstacles: &idx,
                neighbors: &[],
                step_budget: 1.0,
                slide_bias: bias,
            });
            assert_eq!(segment_blocked(pos, pos + out.displacement, &idx), None);
            pos = pos + out.displacement;
            bias = out.slide_bias;
            if pos.dist(target) < 1e-9 {
                break;
            }
        }
        assert!(pos.dist(target) < 1e-9, "never reached the target, stuck at {pos:?}");
    }

    #[test]
    fn fully_enclosed_mover_stays_put() {
        // Four walls forming a closed box around the origin.
        let walls = vec![
            (0, Polygon2D::rectangle(Point2D::new(-2.0, 1.0), Point2D::new(2.0, 2.0)).unwrap()),
            (1, Polygon2D::rectangle(Point2D::new(-2.0, -2.0), Point2D::new(2.0, -1.0)).unwrap()),
            (2, Polygon2D::rectangle(Point2D::new(1.0, -2.0), Point2D::new(2.0, 2.0)).unwrap()),
            (3, Polygon2D::rectangle(Point2D::new(-2.0, -2.0), Point2D::new(-1.0, 2.0)).unwrap()),
        ];
        let idx = SpatialIndex::build(walls);
        let ctx = SteeringContext {
            position: Point2D::ZERO,
            target: Point2D::new(10.0, 10.0),
            obstacles: &idx,
            neighbors: &[],
            step_budget: 5.0,
            slide_bias: None,
        };
        assert_eq!(steer(&ctx).displacement, Point2D::ZERO);
    }

    #[test]
    fn neighbor_disc_shortens_the_step() {
        let idx = SpatialIndex::build(Vec::new());
        let neighbors = [(Point2D::new(1.0, 0.0), 0.6)];
        let ctx = SteeringContext {
            position: Point2D::ZERO,
            target: Point2D::new(10.0, 0.0),
            obstacles: &idx,
            neighbors: &neighbors,
            step_budget: 1.4,
            slide_bias: None,
        };
        let d = steer(&ctx).displacement;
        assert!((d.norm() - 0.4).abs() < 1e-9, "stops at the disc edge, got {}", d.norm());
    }

    #[test]
    fn pre_overlapped_disc_does_not_freeze_the_mover() {
        let idx = SpatialIndex::build(Vec::new());
        let neighbors = [(Point2D::new(0.1, 0.0), 0.6)];
        let ctx = SteeringContext {
            position: Point2D::ZERO,
            target: Point2D::new(10.0, 0.0),
            obstacles: &idx,
            neighbors: &neighbors,
            step_budget: 1.4,
            slide_bias: None,
        };
        assert!((steer(&ctx).displacement.norm() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn steering_is_deterministic() {
        let idx = one_square_index();
        let neighbors = [(Point2D::new(1.2, 0.8), 0.6)];
        let ctx = SteeringContext {
            position: Point2D::new(1.0, 0.5),
            target: Point2D::new(6.0, 0.5),
            obstacles: &idx,
            neighbors: &neighbors,
            step_budget: 1.0,
            slide_bias: None,
        };
        let a = steer(&ctx);
        let b = steer(&ctx);
        assert_eq!(a, b);
    }

    #[test]
    fn random_scenes_never_sweep_through_obstacles() {
        use crate::rng::Stream;
        let mut s = Stream::new(0xA11CE, 0, 7);
        for case in 0..2000 {
            let bx = s.next_range(-5.0, 5.0);
            let by = s.next_range(-5.0, 5.0);
            let w = s.next_range(0.5, 8.0);
            let h = s.next_range(0.5, 8.0);
            let sq = Polygon2D::rectangle(
                Point2D::new(bx, by),
                Point2D::new(bx + w, by + h),
            )
            .unwrap();
            let idx = SpatialIndex::build(vec![(0, sq.clone())]);
            // Start outside the obstacle.
            let pos = loop {
                let p = Point2D::new(s.next_range(-12.0, 12.0), s.next_range(-12.0, 12.0));
                if !sq.contains(p) {
                    break p;
                }
            };
            let target = Point2D::new(s.next_range(-12.0, 12.0), s.next_range(-12.0, 12.0));
            if (target - pos).norm() < 1e-9 {
                continue;
            }
            let ctx = SteeringContext {
                position: pos,
                target,
                obstacles: &idx,
                neighbors: &[],
                step_budget: s.next_range(0.1, 2.0),
                slide_bias: None,
            };
            let d = steer(&ctx).displacement;
            assert!(d.norm() <= ctx.step_budget + 1e-9, "case {case}: budget exceeded");
            if d.norm() > 0.0 {
                assert_eq!(
                    segment_blocked(pos, pos + d, &idx),
                    None,
                    "case {case}: swept into obstacle"
                );
            }
        }
    }
}
