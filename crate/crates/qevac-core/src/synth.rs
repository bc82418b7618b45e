//! Deterministic synthetic-city generation for desk-scale experiments.
//!
//! Cities are square lot grids with axis-aligned building footprints and
//! open spaces placed on a ring (plus an optional central space). The
//! `hamra_like` preset pins the reference scale: 745 buildings and
//! 37 752 residents on about 0.885 km² with 8 open spaces.

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geom::{ElevationGrid, Point2D, Polygon2D};
use crate::io::{
    buildings_to_geojson, derive_door, spaces_to_geojson, write_ascii_grid, BuildingInput,
    InputBundle, SpaceInput,
};
use crate::mobility::SpeedSlopeCurve;
use crate::rng::{purpose, Stream};
use crate::vulnerability::CasualtyTable;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Terrain {
    Flat,
    /// Constant grade along +x (rise per meter).
    Ramp {
        grade: f64,
    },
}

/// Target share of buildings per damage-state bin; mean damage values
/// are drawn uniformly inside each bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DamageMix {
    pub none: f64,
    pub slight: f64,
    pub moderate: f64,
    pub extensive: f64,
    pub complete: f64,
}

impl DamageMix {
    /// The reference test zone's distribution: 0.8% none, 81% slight,
    /// 18% moderate, 0.2% extensive.
    pub fn reference() -> Self {
        Self { none: 0.008, slight: 0.81, moderate: 0.18, extensive: 0.002, complete: 0.0 }
    }

    fn shares(&self) -> [f64; 5] {
        [self.none, self.slight, self.moderate, self.extensive, self.complete]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCitySpec {
    pub cols: u32,
    pub rows: u32,
    /// Lot pitch, meters.
    pub spacing_m: f64,
    /// Margin around the lot grid, meters.
    pub margin_m: f64,
    /// Building footprint side, meters.
    pub footprint_m: f64,
    pub floors_min: u32,
    pub floors_max: u32,
    pub apartments_min: u32,
    pub apartments_max: u32,
    pub damage_mix: DamageMix,
    pub year_min: i32,
    pub year_max: i32,
    /// Total open spaces (ring plus optional center); at least 1.
    pub space_count: u32,
    pub center_space: bool,
    pub space_side_m: f64,
    /// Ring radius as a fraction of the smaller city side.
    pub ring_radius_frac: f64,
    pub terrain: Terrain,
    pub dem_cell_m: f64,
    /// Keep exactly this many buildings (dropping surplus lots); all
    /// non-carved lots otherwise.
    pub building_count: Option<u32>,
    /// Adjust apartment draws so they sum to exactly this.
    pub apartments_total: Option<u32>,
    pub seed: u64,
}

impl Default for SynthCitySpec {
    fn default() -> Self {
        Self {
            cols: 10,
            rows: 10,
            spacing_m: 30.0,
            margin_m: 15.0,
            footprint_m: 16.0,
            floors_min: 2,
            floors_max: 8,
            apartments_min: 4,
            apartments_max: 12,
            damage_mix: DamageMix::reference(),
            year_min: 1930,
            year_max: 2015,
            space_count: 4,
            center_space: true,
            space_side_m: 40.0,
            ring_radius_frac: 0.415,
            terrain: Terrain::Flat,
            dem_cell_m: 2.0,
            building_count: None,
            apartments_total: None,
            seed: 0,
        }
    }
}

/// The reference-scale preset: 31x31 lots on 941 m, 745 buildings,
/// 9 438 apartments (37 752 residents at household size 4), 8 spaces
/// (one central), gentle 2% ramp.
pub fn hamra_like(seed: u64) -> SynthCitySpec {
    SynthCitySpec {
        cols: 31,
        rows: 31,
        spacing_m: 30.0,
        margin_m: 5.5,
        footprint_m: 16.0,
        floors_min: 3,
        floors_max: 14,
        apartments_min: 8,
        apartments_max: 17,
        damage_mix: DamageMix::reference(),
        year_min: 1930,
        year_max: 2015,
        space_count: 8,
        center_space: true,
        space_side_m: 54.0,
        ring_radius_frac: 0.415,
        terrain: Terrain::Ramp { grade: 0.02 },
        dem_cell_m: 2.0,
        building_count: Some(745),
        apartments_total: Some(9438),
        seed,
    }
}

/// A generated city, ready to simulate or to write to disk.
#[derive(Debug, Clone)]
pub struct SynthCity {
    pub buildings: Vec<BuildingInput>,
    pub spaces: Vec<SpaceInput>,
    pub grid: ElevationGrid,
    pub config: ScenarioConfig,
}

impl SynthCity {
    pub fn residents(&self) -> u32 {
        self.buildings.iter().map(|b| b.apartments).sum::<u32>() * self.config.household_size
    }

    pub fn into_bundle(self) -> InputBundle {
        InputBundle {
            buildings: self.buildings,
            spaces: self.spaces,
            grid: self.grid,
            casualty_table: CasualtyTable::default_table(),
            speed_curve: SpeedSlopeCurve::default_curve(),
            config: self.config,
        }
    }
}

/// Clearance kept between building footprints and open spaces.
const SPACE_CLEARANCE: f64 = 6.0;

pub fn generate(spec: &SynthCitySpec) -> Result<SynthCity> {
    validate_spec(spec)?;
    let width = spec.cols as f64 * spec.spacing_m + 2.0 * spec.margin_m;
    let height = spec.rows as f64 * spec.spacing_m + 2.0 * spec.margin_m;
    let city_center = Point2D::new(width / 2.0, height / 2.0);

    // Open spaces: optional center, then a ring. The central space gets
    // id 1 so "lock the central space" is always `--lock 1`.
    let mut space_centers: Vec<Point2D> = Vec::new();
    if spec.center_space {
        space_centers.push(city_center);
    }
    let ring_count = spec.space_count as usize - space_centers.len();
    let radius = spec.ring_radius_frac * width.min(height);
    for k in 0..ring_count {
        let theta = std::f64::consts::TAU * k as f64 / ring_count.max(1) as f64;
        space_centers.push(city_center + Point2D::new(theta.cos(), theta.sin()) * radius);
    }
    let half_space = spec.space_side_m / 2.0;
    let spaces: Vec<SpaceInput> = space_centers
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let polygon = Polygon2D::rectangle(
                Point2D::new(c.x - half_space, c.y - half_space),
                Point2D::new(c.x + half_space, c.y + half_space),
            )
            .expect("space rectangle");
            SpaceInput { id: i as u32 + 1, polygon, locked: false }
        })
        .collect();
    for i in 0..spaces.len() {
        for j in (i + 1)..spaces.len() {
            if spaces[i].polygon.bbox().intersects(&spaces[j].polygon.bbox()) {
                return Err(Error::Config(format!(
                    "open spaces {} and {} overlap; shrink space_side_m or the ring",
                    spaces[i].id, spaces[j].id
                )));
            }
        }
    }

    // Candidate lots, minus those whose footprint (plus clearance) would
    // collide with an open space.
    let half_fp = spec.footprint_m / 2.0;
    let mut candidates: Vec<(u32, Point2D)> = Vec::new();
    let mut lot_index = 0u32;
    for j in 0..spec.rows {
        for i in 0..spec.cols {
            let c = Point2D::new(
                spec.margin_m + (i as f64 + 0.5) * spec.spacing_m,
                spec.margin_m + (j as f64 + 0.5) * spec.spacing_m,
            );
            let keep_out = half_fp + SPACE_CLEARANCE + half_space;
            let clear = space_centers.iter().all(|s| {
                (s.x - c.x).abs() > keep_out || (s.y - c.y).abs() > keep_out
            });
            if clear {
                candidates.push((lot_index, c));
            }
            lot_index += 1;
        }
    }

    let chosen: Vec<(u32, Point2D)> = match spec.building_count {
        None => candidates,
        Some(target) => {
            if (target as usize) > candidates.len() {
                return Err(Error::Config(format!(
                    "building_count {} exceeds the {} available lots",
                    target,
                    candidates.len()
                )));
            }
            let mut shuffled = candidates;
            Stream::new(spec.seed, u64::MAX, purpose::SYNTH).shuffle(&mut shuffled);
            let mut kept: Vec<(u32, Point2D)> = shuffled.into_iter().take(target as usize).collect();
            kept.sort_by_key(|(lot, _)| *lot);
            kept
        }
    };
    if chosen.is_empty() {
        return Err(Error::Config("no buildable lots remain".into()));
    }

    // Damage classes by largest-remainder apportionment of the mix.
    let class_counts = apportion(spec.damage_mix.shares(), chosen.len());
    let mut classes: Vec<usize> = class_counts
        .iter()
        .enumerate()
        .flat_map(|(cls, &count)| std::iter::repeat(cls).take(count))
        .collect();
    Stream::new(spec.seed, u64::MAX - 1, purpose::SYNTH).shuffle(&mut classes);

    let mut buildings = Vec::with_capacity(chosen.len());
    for (ordinal, (_, center)) in chosen.iter().enumerate() {
        let mut draws = Stream::new(spec.seed, ordinal as u64, purpose::SYNTH);
        let floors = draws.next_int(spec.floors_min as u64, spec.floors_max as u64) as u32;
        let apartments =
            draws.next_int(spec.apartments_min as u64, spec.apartments_max as u64) as u32;
        let year = draws.next_int(spec.year_min as u64, spec.year_max as u64) as i32;
        let mu_range = match classes[ordinal] {
            0 => (0.0, 0.5),
            1 => (0.5, 1.5),
            2 => (1.5, 2.5),
            3 => (2.5, 3.5),
            _ => (3.5, 4.0),
        };
        let mu_ds = draws.next_range(mu_range.0, mu_range.1);
        let footprint = Polygon2D::rectangle(
            Point2D::new(center.x - half_fp, center.y - half_fp),
            Point2D::new(center.x + half_fp, center.y + half_fp),
        )
        .expect("footprint rectangle");
        let door = derive_door(&footprint);
        buildings.push(BuildingInput {
            id: ordinal as u32 + 1,
            footprint,
            floors,
            apartments,
            year,
            mu_ds,
            door,
        });
    }

    if let Some(total) = spec.apartments_total {
        adjust_apartment_total(&mut buildings, total, spec.seed)?;
    }

    // The DEM covers every footprint and space (ring spaces can stick out
    // beyond the lot grid for small cities) plus a walking margin.
    let mut scene = crate::geom::BBox {
        min: Point2D::ZERO,
        max: Point2D::new(width, height),
    };
    for s in &spaces {
        scene = scene.merge(&s.polygon.bbox());
    }
    let grid = make_dem(spec, &scene);
    let mut config = ScenarioConfig::default();
    config.seed = spec.seed;

    Ok(SynthCity { buildings, spaces, grid, config })
}

fn validate_spec(spec: &SynthCitySpec) -> Result<()> {
    let mut errors = Vec::new();
    if spec.cols == 0 || spec.rows == 0 {
        errors.push("grid must be at least 1x1".to_string());
    }
    if spec.space_count < 1 {
        errors.push("at least one open space is required".to_string());
    }
    if !(spec.footprint_m > 0.0) || !(spec.spacing_m >= spec.footprint_m) {
        errors.push("need 0 < footprint_m <= spacing_m".to_string());
    }
    if spec.floors_min < 1 || spec.floors_max < spec.floors_min {
        errors.push("need 1 <= floors_min <= floors_max".to_string());
    }
    if spec.apartments_min < 1 || spec.apartments_max < spec.apartments_min {
        errors.push("need 1 <= apartments_min <= apartments_max".to_string());
    }
    if !(spec.space_side_m > 0.0) {
        errors.push("space_side_m must be positive".to_string());
    }
    if !(spec.dem_cell_m > 0.0) {
        errors.push("dem_cell_m must be positive".to_string());
    }
    if spec.year_min <= 0 || spec.year_max < spec.year_min {
        errors.push("need 0 < year_min <= year_max".to_string());
    }
    let shares = spec.damage_mix.shares();
    if shares.iter().any(|s| *s < 0.0) || (shares.iter().sum::<f64>() - 1.0).abs() > 1e-6 {
        errors.push("damage mix shares must be non-negative and sum to 1".to_string());
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(errors))
    }
}

/// Largest-remainder apportionment of `total` items over shares.
fn apportion(shares: [f64; 5], total: usize) -> [usize; 5] {
    let mut counts = [0usize; 5];
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(5);
    let mut assigned = 0usize;
    for (i, share) in shares.iter().enumerate() {
        let exact = share * total as f64;
        counts[i] = exact.floor() as usize;
        assigned += counts[i];
        remainders.push((i, exact - exact.floor()));
    }
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for (i, _) in remainders.into_iter().take(total - assigned) {
        counts[i] += 1;
    }
    counts
}

fn adjust_apartment_total(buildings: &mut [BuildingInput], total: u32, seed: u64) -> Result<()> {
    let mut order: Vec<usize> = (0..buildings.len()).collect();
    Stream::new(seed, u64::MAX - 2, purpose::SYNTH).shuffle(&mut order);
    let mut sum: i64 = buildings.iter().map(|b| b.apartments as i64).sum();
    let target = total as i64;
    let mut guard = 0usize;
    while sum != target {
        for &i in &order {
            if sum == target {
                break;
            }
            if sum < target {
                buildings[i].apartments += 1;
                sum += 1;
            } else if buildings[i].apartments > 1 {
                buildings[i].apartments -= 1;
                sum -= 1;
            }
        }
        guard += 1;
        if guard > 10_000 {
            return Err(Error::Config(format!(
                "cannot reach apartments_total {total} from the drawn distribution"
            )));
        }
    }
    Ok(())
}

fn make_dem(spec: &SynthCitySpec, scene: &crate::geom::BBox) -> ElevationGrid {
    const DEM_MARGIN: f64 = 12.0;
    let cell = spec.dem_cell_m;
    let origin = Point2D::new(scene.min.x - DEM_MARGIN, scene.min.y - DEM_MARGIN);
    let ncols = (((scene.max.x - scene.min.x) + 2.0 * DEM_MARGIN) / cell).ceil() as usize;
    let nrows = (((scene.max.y - scene.min.y) + 2.0 * DEM_MARGIN) / cell).ceil() as usize;
    let mut values = Vec::with_capacity(ncols * nrows);
    for _row_top in 0..nrows {
        for col in 0..ncols {
            let x = origin.x + (col as f64 + 0.5) * cell;
            let v = match spec.terrain {
                Terrain::Flat => 0.0,
                Terrain::Ramp { grade } => grade * (x - origin.x),
            };
            values.push(v);
        }
    }
    ElevationGrid::new(origin, cell, ncols, nrows, values, -9999.0).expect("synthetic DEM")
}

/// Write the generated city as a ready-to-run input directory:
/// `buildings.geojson`, `open_spaces.geojson`, `dem.asc`, `scenario.toml`.
pub fn write_city(city: &SynthCity, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let files = [
        ("buildings.geojson", buildings_to_geojson(&city.buildings)),
        ("open_spaces.geojson", spaces_to_geojson(&city.spaces)),
        ("dem.asc", write_ascii_grid(&city.grid)),
        ("scenario.toml", city.config.to_toml_string()),
    ];
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = dir.join(name);
        crate::io::write_file(&path, &contents)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamra_preset_hits_the_reference_scale() {
        let city = generate(&hamra_like(42)).unwrap();
        assert_eq!(city.buildings.len(), 745);
        assert_eq!(city.spaces.len(), 8);
        assert_eq!(city.residents(), 37_752);
        // Area about 0.885 km².
        let e = city.grid.extent();
        let w = 941.0;
        assert!((e.max.x - e.min.x) >= w && (e.max.y - e.min.y) >= w);
        // Space 1 sits at the city center.
        let c = city.spaces[0].polygon.bbox();
        let mid = Point2D::new((c.min.x + c.max.x) / 2.0, (c.min.y + c.max.y) / 2.0);
        assert!((mid.x - w / 2.0).abs() < 1.0 && (mid.y - w / 2.0).abs() < 1.0);
        // Damage mix apportionment.
        let mut counts = [0usize; 5];
        for b in &city.buildings {
            counts[crate::vulnerability::bin_damage_state(b.mu_ds).unwrap() as usize] += 1;
        }
        assert_eq!(counts, [6, 603, 134, 2, 0]);
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let a = generate(&hamra_like(7)).unwrap();
        let b = generate(&hamra_like(7)).unwrap();
        assert_eq!(buildings_to_geojson(&a.buildings), buildings_to_geojson(&b.buildings));
        let c = generate(&hamra_like(8)).unwrap();
        assert_ne!(buildings_to_geojson(&a.buildings), buildings_to_geojson(&c.buildings));
    }

    #[test]
    fn minimal_city_generates() {
        let spec = SynthCitySpec {
            cols: 1,
            rows: 1,
            space_count: 1,
            center_space: false,
            space_side_m: 10.0,
            ring_radius_frac: 1.2, // space beyond the single lot
            building_count: None,
            apartments_total: None,
            ..SynthCitySpec::default()
        };
        let city = generate(&spec).unwrap();
        assert_eq!(city.buildings.len(), 1);
        assert_eq!(city.spaces.len(), 1);
        // DEM must cover both the lot and the offset space.
        let bundle = city.into_bundle();
        assert!(bundle.grid.covers(&bundle.spaces[0].polygon.bbox()));
    }

    #[test]
    fn apportionment_is_exact() {
        assert_eq!(apportion([0.008, 0.81, 0.18, 0.002, 0.0], 745), [6, 603, 134, 2, 0]);
        assert_eq!(apportion([0.2, 0.2, 0.2, 0.2, 0.2], 10), [2, 2, 2, 2, 2]);
        assert_eq!(apportion([1.0, 0.0, 0.0, 0.0, 0.0], 3), [3, 0, 0, 0, 0]);
    }
}
