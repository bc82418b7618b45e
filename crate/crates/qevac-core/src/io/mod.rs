//! Input loading/validation and result writing.
//!
//! Vector inputs are GeoJSON feature collections of polygons in planar
//! meter coordinates; elevation is an ESRI ASCII grid; the casualty
//! table and speed-slope curve are CSV. Validation is not fail-fast: a
//! load either yields a complete bundle or the full list of problems.

mod ascii_grid;
mod geojson;
mod results;

pub use ascii_grid::{parse_ascii_grid, write_ascii_grid};
pub use geojson::{buildings_to_geojson, spaces_to_geojson};
pub use results::{spaces_csv, timeseries_csv, write_results};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geom::{BBox, ElevationGrid, Point2D, Polygon2D};
use crate::mobility::SpeedSlopeCurve;
use crate::vulnerability::CasualtyTable;
use std::path::{Path, PathBuf};

/// One validated building record.
#[derive(Debug, Clone)]
pub struct BuildingInput {
    pub id: u32,
    pub footprint: Polygon2D,
    pub floors: u32,
    pub apartments: u32,
    pub year: i32,
    pub mu_ds: f64,
    pub door: Point2D,
}

/// One validated open-space record.
#[derive(Debug, Clone)]
pub struct SpaceInput {
    pub id: u32,
    pub polygon: Polygon2D,
    pub locked: bool,
}

/// Everything a simulation needs, fully validated.
#[derive(Debug, Clone)]
pub struct InputBundle {
    pub buildings: Vec<BuildingInput>,
    pub spaces: Vec<SpaceInput>,
    pub grid: ElevationGrid,
    pub casualty_table: CasualtyTable,
    pub speed_curve: SpeedSlopeCurve,
    pub config: ScenarioConfig,
}

/// Input file locations for `load_bundle`.
#[derive(Debug, Clone)]
pub struct BundlePaths {
    pub buildings: PathBuf,
    pub open_spaces: PathBuf,
    pub dem: PathBuf,
    pub config: Option<PathBuf>,
}

/// Tolerance for a provided door to count as on the footprint boundary.
const DOOR_TOL: f64 = 1e-6;

/// Door fallback when the input provides none: the midpoint of the
/// longest exterior edge (first such edge on ties).
pub fn derive_door(footprint: &Polygon2D) -> Point2D {
    let ring = footprint.exterior();
    let n = ring.len();
    let mut best = (0usize, -1.0);
    for i in 0..n {
        let len = ring[i].dist(ring[(i + 1) % n]);
        if len > best.1 {
            best = (i, len);
        }
    }
    let (i, _) = best;
    (ring[i] + ring[(i + 1) % n]) * 0.5
}

/// Load and validate every input. Collects all validation errors before
/// failing so a broken dataset reports every problem at once; on success
/// the bundle is complete and internally consistent.
pub fn load_bundle(paths: &BundlePaths) -> Result<InputBundle> {
    let mut errors: Vec<String> = Vec::new();

    let config = match &paths.config {
        None => Some(ScenarioConfig::default()),
        Some(p) => match ScenarioConfig::from_toml_path(p) {
            Ok(c) => Some(c),
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        },
    };

    let buildings = match std::fs::read_to_string(&paths.buildings) {
        Err(e) => {
            errors.push(format!("{}: {e}", paths.buildings.display()));
            Vec::new()
        }
        Ok(text) => geojson::parse_buildings(&text, &paths.buildings.display().to_string(), &mut errors),
    };

    let spaces = match std::fs::read_to_string(&paths.open_spaces) {
        Err(e) => {
            errors.push(format!("{}: {e}", paths.open_spaces.display()));
            Vec::new()
        }
        Ok(text) => geojson::parse_spaces(&text, &paths.open_spaces.display().to_string(), &mut errors),
    };

    let grid = match std::fs::read_to_string(&paths.dem) {
        Err(e) => {
            errors.push(format!("{}: {e}", paths.dem.display()));
            None
        }
        Ok(text) => match parse_ascii_grid(&text) {
            Ok(g) => Some(g),
            Err(e) => {
                errors.push(format!("{}: {e}", paths.dem.display()));
                None
            }
        },
    };

    let casualty_table = match config.as_ref().and_then(|c| c.casualty_table.as_ref()) {
        None => Some(CasualtyTable::default_table()),
        Some(p) => match CasualtyTable::from_csv_path(p) {
            Ok(t) => Some(t),
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        },
    };

    let speed_curve = match config.as_ref().and_then(|c| c.speed_slope_curve.as_ref()) {
        None => Some(SpeedSlopeCurve::default_curve()),
        Some(p) => match SpeedSlopeCurve::from_csv_path(p) {
            Ok(c) => Some(c),
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        },
    };

    // The grid must cover the whole scene so slope probes stay in extent.
    if let Some(g) = &grid {
        let scene = scene_bbox(&buildings, &spaces);
        if let Some(bb) = scene {
            if !g.covers(&bb) {
                let e = g.extent();
                errors.push(format!(
                    "{}: grid extent ({}, {})..({}, {}) does not cover the scene ({}, {})..({}, {})",
                    paths.dem.display(),
                    e.min.x, e.min.y, e.max.x, e.max.y,
                    bb.min.x, bb.min.y, bb.max.x, bb.max.y
                ));
            }
        }
    }

    if !errors.is_empty() {
        return Err(Error::Validation(errors));
    }
    Ok(InputBundle {
        buildings,
        spaces,
        grid: grid.expect("checked"),
        casualty_table: casualty_table.expect("checked"),
        speed_curve: speed_curve.expect("checked"),
        config: config.expect("checked"),
    })
}

/// Load and validate just the building file (used by batch debris
/// computation, which needs no terrain or spaces).
pub fn load_buildings(path: &Path) -> Result<Vec<BuildingInput>> {
    let mut errors = Vec::new();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(vec![format!("{}: {e}", path.display())]))?;
    let buildings = geojson::parse_buildings(&text, &path.display().to_string(), &mut errors);
    if !errors.is_empty() {
        return Err(Error::Validation(errors));
    }
    Ok(buildings)
}

fn scene_bbox(buildings: &[BuildingInput], spaces: &[SpaceInput]) -> Option<BBox> {
    let mut bb: Option<BBox> = None;
    for poly in buildings
        .iter()
        .map(|b| &b.footprint)
        .chain(spaces.iter().map(|s| &s.polygon))
    {
        let p = poly.bbox();
        bb = Some(match bb {
            None => p,
            Some(acc) => acc.merge(&p),
        });
    }
    bb
}

pub(crate) fn validate_polygon(poly: &Polygon2D, what: &str, errors: &mut Vec<String>) -> bool {
    if !poly.is_simple() {
        errors.push(format!("{what}: polygon exterior is self-intersecting"));
        return false;
    }
    true
}

pub(crate) fn validate_door(
    footprint: &Polygon2D,
    door: Option<Point2D>,
    what: &str,
    errors: &mut Vec<String>,
) -> Point2D {
    match door {
        None => derive_door(footprint),
        Some(d) => {
            if !footprint.on_boundary(d, DOOR_TOL) {
                errors.push(format!(
                    "{what}: door ({}, {}) is not on the footprint boundary",
                    d.x, d.y
                ));
            }
            d
        }
    }
}

/// Write a `path` with the given contents, creating parent directories.
pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}
