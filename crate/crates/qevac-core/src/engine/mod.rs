//! Discrete-time simulation core: world construction, resident
//! generation, the per-second tick loop, casualty sampling, open-space
//! admission and metric accumulation.
//!
//! Determinism contract: results are a pure function of (inputs, config,
//! seed). Per-tick movement is computed against an immutable snapshot of
//! the previous tick and committed in ascending person id, and all
//! random draws are counter-based, so worker-thread count and iteration
//! partitioning cannot perturb outcomes.

mod tick;

use crate::config::ScenarioConfig;
use crate::debris::{
    make_debris_zone, ring_buffer, solve_truncated_pyramid, BuildingGeometryInput, DebrisModel,
    DebrisSolution,
};
use crate::error::{Error, Result};
use crate::geom::{equivalent_rectangle, ElevationGrid, Point2D, Polygon2D, SpatialIndex};
use crate::io::{BuildingInput, InputBundle, SpaceInput};
use crate::mobility::SpeedSlopeCurve;
use crate::rng;
use crate::vulnerability::{
    bin_damage_state, classify_typology, normalize_mean_damage, CasualtyTable, DamageState,
    Setting, Typology,
};
use serde::Serialize;

/// A building agent with everything derived at world construction.
#[derive(Debug, Clone)]
pub struct Building {
    pub id: u32,
    pub footprint: Polygon2D,
    pub floors: u32,
    pub apartments: u32,
    pub year: i32,
    pub mu_ds: f64,
    pub door: Point2D,
    pub typology: Typology,
    pub damage_state: DamageState,
    pub indoor_rate: f64,
    pub outdoor_rate: f64,
    pub debris: DebrisSolution,
    pub debris_zone: Option<Polygon2D>,
}

/// An open-space agent: target polygon with capacity and arrival stats.
#[derive(Debug, Clone)]
pub struct OpenSpace {
    pub id: u32,
    pub polygon: Polygon2D,
    pub locked: bool,
    pub capacity: u32,
    pub occupancy: u32,
    pub arrival_times: Vec<f64>,
}

impl OpenSpace {
    pub fn min_arrival(&self) -> f64 {
        self.arrival_times.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_arrival(&self) -> f64 {
        self.arrival_times.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn avg_arrival(&self) -> f64 {
        if self.arrival_times.is_empty() {
            return 0.0;
        }
        self.arrival_times.iter().sum::<f64>() / self.arrival_times.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PersonState {
    Unspawned,
    Vulnerable,
    InDanger,
    Safe,
    Dead,
}

/// A person agent. `target_space` and the orbit state index into
/// `WorldState::spaces`.
#[derive(Debug, Clone)]
pub struct Person {
    pub id: u32,
    pub home_building: u32,
    pub floor: u32,
    pub natural_speed: f64,
    pub spawn_time: f64,
    pub position: Point2D,
    pub state: PersonState,
    pub target_space: Option<usize>,
    pub arrival_time: Option<f64>,
    /// Spaces this person has personally discovered to be locked.
    pub discovered_locked: Vec<usize>,
    /// Boundary vertex currently orbited around a full target space.
    pub orbit_vertex: Option<usize>,
    /// Wall-following memory: the slide direction taken last tick, kept
    /// so blocked walks round obstacles instead of oscillating.
    pub slide_bias: Option<Point2D>,
    /// Set when every space has been discovered locked and the person
    /// keeps its last target.
    pub retarget_exhausted: bool,
}

/// Per-tick state counts (the Fig.-6-style time series).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TickCounts {
    pub t: f64,
    pub safe: u32,
    pub vulnerable: u32,
    pub in_danger: u32,
    pub dead: u32,
    pub unspawned: u32,
}

impl TickCounts {
    pub fn total(&self) -> u32 {
        self.safe + self.vulnerable + self.in_danger + self.dead + self.unspawned
    }
}

/// Final per-space record (the Table-2-style output).
#[derive(Debug, Clone, Serialize)]
pub struct SpaceResult {
    pub space_id: u32,
    pub locked: bool,
    pub pct_population: f64,
    pub min_arrival_s: f64,
    pub max_arrival_s: f64,
    pub avg_arrival_s: f64,
    pub occupancy: u32,
    pub capacity: u32,
}

/// Everything a finished run reports.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub ticks: Vec<TickCounts>,
    pub spaces: Vec<SpaceResult>,
    pub total_residents: u32,
    pub seed: u64,
    pub config: ScenarioConfig,
    /// Persons that discovered every space locked and kept their last
    /// target.
    pub retarget_exhausted: u32,
}

/// The complete mutable simulation state.
pub struct WorldState {
    pub buildings: Vec<Building>,
    pub spaces: Vec<OpenSpace>,
    pub persons: Vec<Person>,
    pub grid: ElevationGrid,
    pub config: ScenarioConfig,
    pub seed: u64,
    pub clock: f64,
    pub(crate) step: u64,
    pub ticks: Vec<TickCounts>,
    /// Building footprints (keyed by building index) for steering.
    pub(crate) obstacles: SpatialIndex,
    /// Debris zones (keyed by building index) for danger classification.
    pub(crate) zones: SpatialIndex,
    pub(crate) curve: SpeedSlopeCurve,
}

/// Maximum density of an open space, persons per square meter.
const SPACE_DENSITY: f64 = 2.0;

/// Construct the initial world from validated inputs.
///
/// Typologies, damage states, casualty rates and debris zones are
/// derived per building; residents (apartments x household size each)
/// get a uniform-random floor, a natural-speed draw, and one indoor
/// survival draw — those who die at home enter `Dead` and never spawn.
/// Egress delay is `(floor − 1) x seconds_per_floor`.
pub fn build_world(bundle: InputBundle) -> Result<WorldState> {
    let InputBundle { mut buildings, spaces, grid, casualty_table, speed_curve, config } = bundle;
    config.validate()?;
    if spaces.is_empty() {
        return Err(Error::Domain("world needs at least one open space".into()));
    }
    buildings.sort_by_key(|b| b.id);

    let mut built = Vec::with_capacity(buildings.len());
    for b in buildings {
        built.push(derive_building(b, &casualty_table, &config)?);
    }

    let open_spaces: Vec<OpenSpace> = spaces
        .into_iter()
        .map(|s: SpaceInput| {
            let capacity = (SPACE_DENSITY * s.polygon.area()).floor() as u32;
            OpenSpace {
                id: s.id,
                polygon: s.polygon,
                locked: s.locked,
                capacity,
                occupancy: 0,
                arrival_times: Vec::new(),
            }
        })
        .collect();

    let seed = config.seed;
    let mut persons = Vec::new();
    let mut pid: u32 = 0;
    for (b_idx, b) in built.iter().enumerate() {
        let residents = b.apartments * config.household_size;
        for _ in 0..residents {
            let floor =
                rng::draw_int(seed, pid as u64, 0, rng::purpose::FLOOR, 1, b.floors as u64) as u32;
            let natural_speed = rng::draw_range(
                seed,
                pid as u64,
                0,
                rng::purpose::SPEED,
                config.speed_min_mps,
                config.speed_max_mps,
            );
            let dead_indoor =
                rng::draw_bool(seed, pid as u64, 0, rng::purpose::INDOOR_DEATH, b.indoor_rate);
            persons.push(Person {
                id: pid,
                home_building: b_idx as u32,
                floor,
                natural_speed,
                spawn_time: (floor - 1) as f64 * config.seconds_per_floor,
                position: b.door,
                state: if dead_indoor { PersonState::Dead } else { PersonState::Unspawned },
                target_space: None,
                arrival_time: None,
                discovered_locked: Vec::new(),
                orbit_vertex: None,
                slide_bias: None,
                retarget_exhausted: false,
            });
            pid += 1;
        }
    }

    let obstacles = SpatialIndex::build(
        built
            .iter()
            .enumerate()
            .map(|(i, b)| (i as u32, b.footprint.clone()))
            .collect(),
    );
    let zones = SpatialIndex::build(
        built
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.debris_zone.clone().map(|z| (i as u32, z)))
            .collect(),
    );

    let mut world = WorldState {
        buildings: built,
        spaces: open_spaces,
        persons,
        grid,
        config,
        seed,
        clock: 0.0,
        step: 0,
        ticks: Vec::new(),
        obstacles,
        zones,
        curve: speed_curve,
    };
    let initial = world.counts();
    world.ticks.push(initial);
    Ok(world)
}

fn derive_building(
    b: BuildingInput,
    table: &CasualtyTable,
    config: &ScenarioConfig,
) -> Result<Building> {
    let typology = classify_typology(b.year, b.floors);
    let damage_state = bin_damage_state(b.mu_ds)?;
    let indoor_rate = table.rate(typology, damage_state, Setting::Indoor);
    let outdoor_rate = table.rate(typology, damage_state, Setting::Outdoor);

    let rect = equivalent_rectangle(b.footprint.area(), b.footprint.perimeter())?;
    let mu_nds = normalize_mean_damage(b.mu_ds)?;
    let input = BuildingGeometryInput::new(rect.x, rect.y, b.floors, mu_nds)?;
    let mut debris = solve_truncated_pyramid(&input)?;
    if config.debris_model == DebrisModel::Ring {
        debris.buffer = ring_buffer(rect.x, rect.y, debris.volume, config.ring_pile_height_m)?;
    }
    let debris_zone = make_debris_zone(&b.footprint, debris.buffer)?;

    Ok(Building {
        id: b.id,
        footprint: b.footprint,
        floors: b.floors,
        apartments: b.apartments,
        year: b.year,
        mu_ds: b.mu_ds,
        door: b.door,
        typology,
        damage_state,
        indoor_rate,
        outdoor_rate,
        debris,
        debris_zone,
    })
}

impl WorldState {
    pub fn total_residents(&self) -> u32 {
        self.persons.len() as u32
    }

    pub fn counts(&self) -> TickCounts {
        let mut c = TickCounts {
            t: self.clock,
            safe: 0,
            vulnerable: 0,
            in_danger: 0,
            dead: 0,
            unspawned: 0,
        };
        for p in &self.persons {
            match p.state {
                PersonState::Unspawned => c.unspawned += 1,
                PersonState::Vulnerable => c.vulnerable += 1,
                PersonState::InDanger => c.in_danger += 1,
                PersonState::Safe => c.safe += 1,
                PersonState::Dead => c.dead += 1,
            }
        }
        c
    }

    /// The nearest not-yet-discovered-locked space by boundary distance
    /// from `pos`; ties break to the smaller space id.
    pub fn select_target(&self, pos: Point2D, discovered_locked: &[usize]) -> Option<usize> {
        let mut best: Option<(f64, u32, usize)> = None;
        for (idx, s) in self.spaces.iter().enumerate() {
            if discovered_locked.contains(&idx) {
                continue;
            }
            let (_, d) = s.polygon.nearest_boundary_point(pos);
            let key = (d, s.id, idx);
            match best {
                None => best = Some(key),
                Some((bd, bid, _)) if (d, s.id) < (bd, bid) => best = Some(key),
                _ => {}
            }
        }
        best.map(|(_, _, idx)| idx)
    }

    /// Run to the configured horizon and summarize. `threads` sets the
    /// worker pool (0 = library default); the outcome is identical for
    /// any thread count.
    pub fn run(&mut self, threads: usize) -> SimulationResult {
        self.run_with_observer(threads, |_| {})
    }

    /// `run` with a per-tick callback (used by invariant-checking tests).
    pub fn run_with_observer<F: FnMut(&WorldState) + Send>(
        &mut self,
        threads: usize,
        mut observe: F,
    ) -> SimulationResult {
        let steps = self.config.steps();
        let body = |world: &mut WorldState, observe: &mut F| {
            while world.step < steps {
                world.tick();
                observe(world);
            }
        };
        if threads == 0 {
            body(self, &mut observe);
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("worker pool");
            pool.install(|| body(self, &mut observe));
        }
        self.result()
    }

    pub fn result(&self) -> SimulationResult {
        let total = self.total_residents();
        let spaces = self
            .spaces
            .iter()
            .map(|s| SpaceResult {
                space_id: s.id,
                locked: s.locked,
                pct_population: if total == 0 {
                    0.0
                } else {
                    s.occupancy as f64 / total as f64 * 100.0
                },
                min_arrival_s: if s.arrival_times.is_empty() { 0.0 } else { s.min_arrival() },
                max_arrival_s: if s.arrival_times.is_empty() { 0.0 } else { s.max_arrival() },
                avg_arrival_s: s.avg_arrival(),
                occupancy: s.occupancy,
                capacity: s.capacity,
            })
            .collect();
        SimulationResult {
            ticks: self.ticks.clone(),
            spaces,
            total_residents: total,
            seed: self.seed,
            config: self.config.clone(),
            retarget_exhausted: self.persons.iter().filter(|p| p.retarget_exhausted).count()
                as u32,
        }
    }
}

#[cfg(test)]
mod tests;
