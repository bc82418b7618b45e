//! Debris volume and footprint: the truncated-pyramid system that turns
//! a building's equivalent rectangle, floor count and normalized mean
//! damage into an outward buffer distance.
//!
//! A collapsing rectangular building of height `h = 3n` settles into a
//! truncated pyramid of height `h' = 2n` whose volume equals the debris
//! volume `V = A·h·mu_nds / 3`. With the base ratio `r = x/x_p = y/y_p`
//! the three governing relations reduce to `(k−1)r² + r − 1 = 0` where
//! `k = 3V/(x·y·h')`, which has a unique root in (0, 1) exactly when
//! `k > 1`; for `k ≤ 1` the pile stays within the footprint and the
//! buffer is zero (the closed form is continuous at k = 1, where r → 1).

use crate::error::{Error, Result};
use crate::geom::{buffer_polygon, Polygon2D};
use serde::{Deserialize, Serialize};

/// Inputs of the debris solve for one building.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildingGeometryInput {
    /// Equivalent-rectangle sides, meters.
    pub x: f64,
    pub y: f64,
    /// Floor count.
    pub n: u32,
    /// Normalized mean damage in [0, 1].
    pub mu_nds: f64,
}

impl BuildingGeometryInput {
    pub fn new(x: f64, y: f64, n: u32, mu_nds: f64) -> Result<Self> {
        if !(x > 0.0) || !(y > 0.0) {
            return Err(Error::Domain(format!("rectangle sides must be positive, got ({x}, {y})")));
        }
        if n < 1 {
            return Err(Error::Domain("floor count must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&mu_nds) {
            return Err(Error::Domain(format!("normalized mean damage {mu_nds} outside [0, 1]")));
        }
        Ok(Self { x, y, n, mu_nds })
    }
}

/// Solved debris geometry for one building.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DebrisSolution {
    /// Original building height, meters (3 per floor).
    pub h: f64,
    /// Truncated-pyramid height, meters (one meter lost per floor).
    pub h_prime: f64,
    /// Debris volume, cubic meters.
    pub volume: f64,
    /// Volume ratio 3V/(x·y·h').
    pub k: f64,
    /// Base ratio x/x_p (1 when the pile stays within the footprint).
    pub r: f64,
    /// Truncated-pyramid base sides, meters.
    pub x_p: f64,
    pub y_p: f64,
    /// Full (untruncated) pyramid height, meters.
    pub h_t: f64,
    /// Outward debris buffer distance, meters.
    pub buffer: f64,
}

/// Building height and truncated-pyramid height from the floor count:
/// 3 m per floor standing, one meter lost per floor in collapse.
pub fn building_heights(n: u32) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::Domain("floor count must be at least 1".into()));
    }
    let h = 3.0 * n as f64;
    let h_prime = h - n as f64;
    Ok((h, h_prime))
}

/// Debris volume: a third of the building volume, scaled by normalized
/// mean damage.
pub fn debris_volume(x: f64, y: f64, h: f64, mu_nds: f64) -> Result<f64> {
    if !(x > 0.0) || !(y > 0.0) || !(h > 0.0) {
        return Err(Error::Domain(format!("dimensions must be positive, got ({x}, {y}, {h})")));
    }
    if !(0.0..=1.0).contains(&mu_nds) {
        return Err(Error::Domain(format!("normalized mean damage {mu_nds} outside [0, 1]")));
    }
    Ok((x * y) * h * mu_nds / 3.0)
}

/// Solve the truncated-pyramid system for one building.
///
/// Total for all valid inputs: when `k ≤ 1` the base equals the
/// footprint and the buffer is zero; when `k > 1` the unique root
/// `r = (−1 + sqrt(4k−3)) / (2(k−1))` in (0, 1) spreads the base to
/// `x/r × y/r` with apex height `h'/(1+r)`.
pub fn solve_truncated_pyramid(input: &BuildingGeometryInput) -> Result<DebrisSolution> {
    let (h, h_prime) = building_heights(input.n)?;
    let volume = debris_volume(input.x, input.y, h, input.mu_nds)?;
    Ok(solve_with_volume(input.x, input.y, h, h_prime, volume))
}

/// Same solve with the volume supplied directly (used by tests that pin
/// `k` independently of the volume formula).
pub fn solve_with_volume(x: f64, y: f64, h: f64, h_prime: f64, volume: f64) -> DebrisSolution {
    let k = 3.0 * volume / (x * y * h_prime);
    if k <= 1.0 {
        return DebrisSolution {
            h,
            h_prime,
            volume,
            k,
            r: 1.0,
            x_p: x,
            y_p: y,
            h_t: h_prime,
            buffer: 0.0,
        };
    }
    let r = (-1.0 + (4.0 * k - 3.0).sqrt()) / (2.0 * (k - 1.0));
    let x_p = x / r;
    let y_p = y / r;
    let h_t = h_prime / (1.0 + r);
    let buffer = ((x_p - x) / 2.0).max((y_p - y) / 2.0);
    DebrisSolution { h, h_prime, volume, k, r, x_p, y_p, h_t, buffer }
}

/// Alternative flat-pile model: spread the debris volume in a ring of
/// configurable pile height around the footprint. Unlike the pyramid
/// model it produces nonzero buffers for any nonzero damage, which
/// visually matches zones around slightly damaged buildings.
pub fn ring_buffer(x: f64, y: f64, volume: f64, pile_height: f64) -> Result<f64> {
    if !(pile_height > 0.0) {
        return Err(Error::Domain(format!("pile height must be positive, got {pile_height}")));
    }
    if volume <= 0.0 {
        return Ok(0.0);
    }
    // ((x+2b)(y+2b) − x·y)·h_ring = V  =>  4b² + 2b(x+y) − V/h_ring = 0
    let s = x + y;
    let b = (-s + (s * s + 4.0 * volume / pile_height).sqrt()) / 4.0;
    Ok(b.max(0.0))
}

/// Which footprint rule converts debris volume into a buffer distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DebrisModel {
    #[default]
    Pyramid,
    Ring,
}

/// Debris zone geometry: the buffered footprint with the footprint as a
/// hole. A zero buffer yields no zone.
pub fn make_debris_zone(footprint: &Polygon2D, buffer: f64) -> Result<Option<Polygon2D>> {
    if buffer < 0.0 {
        return Err(Error::Domain(format!("buffer must be >= 0, got {buffer}")));
    }
    if buffer == 0.0 {
        return Ok(None);
    }
    let outer = buffer_polygon(footprint, buffer)?;
    let zone = Polygon2D::new(outer.exterior().to_vec(), vec![footprint.exterior().to_vec()])?;
    Ok(Some(zone))
}
