//! The per-tick update: spawn, parallel movement against the previous
//! tick's snapshot, danger classification, casualty draws, and
//! open-space arrival handling committed in ascending person id.

use super::{PersonState, WorldState};
use crate::geom::Point2D;
use crate::mobility::{effective_speed, steer, SteeringContext, FACTOR_MAX};
use crate::rng;
use rayon::prelude::*;
use std::collections::HashMap;

/// Outcome of one person's movement phase, computed in parallel and
/// committed sequentially.
struct MoveOutcome {
    idx: usize,
    new_pos: Point2D,
    slide_bias: Option<Point2D>,
    in_zone: bool,
    dies: bool,
}

/// Previous-tick positions of movable persons bucketed for neighbor
/// queries. Cell size covers the largest possible step plus the combined
/// person diameter, so a 3x3 neighborhood always contains every disc
/// that could shorten a step.
struct PersonGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
}

impl PersonGrid {
    fn build(world: &WorldState, active: &[usize]) -> Self {
        let cell = (world.config.speed_max_mps * FACTOR_MAX * world.config.tick_s
            + 2.0 * world.config.person_radius_m)
            .max(1.0);
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for &i in active {
            let p = world.persons[i].position;
            let key = ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
            buckets.entry(key).or_default().push(i as u32);
        }
        Self { cell, buckets }
    }

    fn nearby(&self, world: &WorldState, center: Point2D, exclude: usize, out: &mut Vec<(Point2D, f64)>) {
        out.clear();
        let keep_out = 2.0 * world.config.person_radius_m;
        let cx = (center.x / self.cell).floor() as i64;
        let cy = (center.y / self.cell).floor() as i64;
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(bucket) = self.buckets.get(&(cx + dx, cy + dy)) {
                    for &j in bucket {
                        if j as usize == exclude {
                            continue;
                        }
                        let q = world.persons[j as usize].position;
                        if q.dist(center) <= self.cell {
                            out.push((q, keep_out));
                        }
                    }
                }
            }
        }
    }
}

/// Event-level outdoor rate converted to a per-tick hazard so that a
/// person exposed for the whole shaking dies with probability exactly
/// the configured rate.
pub(crate) fn per_tick_hazard(rate: f64, tick_s: f64, shake_s: f64) -> f64 {
    1.0 - (1.0 - rate).powf(tick_s / shake_s)
}

impl WorldState {
    /// Highest outdoor casualty rate among debris zones containing `pt`,
    /// or `None` when the point is in no zone.
    fn zone_rate_at(&self, pt: Point2D) -> Option<f64> {
        let mut best: Option<f64> = None;
        for b_idx in self.zones.query_point(pt) {
            let zone = self.zones.get(b_idx).expect("zone id");
            if zone.contains(pt) {
                let rate = self.buildings[b_idx as usize].outdoor_rate;
                best = Some(best.map_or(rate, |r: f64| r.max(rate)));
            }
        }
        best
    }

    /// The point a person currently walks toward: the orbit vertex when
    /// circling a full space, otherwise the nearest point of the target
    /// space's boundary.
    fn nav_point(&self, person_idx: usize) -> Option<Point2D> {
        let p = &self.persons[person_idx];
        let space = &self.spaces[p.target_space?];
        match p.orbit_vertex {
            Some(v) => Some(space.polygon.exterior()[v]),
            None => Some(space.polygon.nearest_boundary_point(p.position).0),
        }
    }

    fn move_outcome(&self, idx: usize, grid: &PersonGrid, neighbors: &mut Vec<(Point2D, f64)>) -> MoveOutcome {
        let p = &self.persons[idx];
        let tick_s = self.config.tick_s;

        let (new_pos, slide_bias) = match self.nav_point(idx) {
            None => (p.position, None),
            Some(nav) => {
                let heading = (nav - p.position).normalized();
                let slope_f = if heading == Point2D::ZERO {
                    1.0
                } else {
                    // Local probe one natural step ahead, capped at the nav
                    // point; outside the grid the terrain is taken as flat.
                    let probe_len = (p.natural_speed * tick_s).min(nav.dist(p.position));
                    let probe = p.position + heading * probe_len;
                    self.grid
                        .directional_slope(p.position, probe)
                        .map(|s| self.curve.factor(s))
                        .unwrap_or(1.0)
                };
                let in_debris = self.zone_rate_at(p.position).is_some();
                let speed = effective_speed(p.natural_speed, slope_f, in_debris);
                if self.config.person_radius_m > 0.0 {
                    grid.nearby(self, p.position, idx, neighbors);
                } else {
                    neighbors.clear();
                }
                let ctx = SteeringContext {
                    position: p.position,
                    target: nav,
                    obstacles: &self.obstacles,
                    neighbors,
                    step_budget: speed * tick_s,
                    slide_bias: p.slide_bias,
                };
                let out = steer(&ctx);
                (p.position + out.displacement, out.slide_bias)
            }
        };

        let (in_zone, dies) = match self.zone_rate_at(new_pos) {
            None => (false, false),
            Some(rate) => {
                let dies = if self.clock < self.config.shake_duration_s {
                    let q = per_tick_hazard(rate, tick_s, self.config.shake_duration_s);
                    rng::draw_bool(self.seed, p.id as u64, self.step, rng::purpose::DEBRIS_DEATH, q)
                } else {
                    false
                };
                (true, dies)
            }
        };

        MoveOutcome { idx, new_pos, slide_bias, in_zone, dies }
    }

    /// Advance the world by one tick.
    pub fn tick(&mut self) {
        let t = self.clock;
        let tick_s = self.config.tick_s;

        // (1) Spawn everyone whose egress delay has elapsed, at their
        // building door, targeting the nearest open space.
        for i in 0..self.persons.len() {
            if self.persons[i].state == PersonState::Unspawned && self.persons[i].spawn_time <= t {
                let target = self.select_target(self.persons[i].position, &[]);
                let p = &mut self.persons[i];
                p.state = PersonState::Vulnerable;
                p.target_space = target;
            }
        }

        // (2) Movement, danger classification and casualty draws against
        // the pre-move snapshot, in parallel.
        let active: Vec<usize> = self
            .persons
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                matches!(p.state, PersonState::Vulnerable | PersonState::InDanger)
            })
            .map(|(i, _)| i)
            .collect();
        let grid = PersonGrid::build(self, &active);
        let world = &*self;
        let moves: Vec<MoveOutcome> = active
            .par_iter()
            .with_min_len(128)
            .map_init(Vec::new, |neighbors, &i| world.move_outcome(i, &grid, neighbors))
            .collect();

        // (3)-(5) Commit in ascending person id: positions, states,
        // deaths, then arrivals (occupancy checks are serialized here so
        // capacity is exact).
        let arrival_t = t + tick_s;
        for mo in moves {
            let p = &mut self.persons[mo.idx];
            p.position = mo.new_pos;
            p.slide_bias = mo.slide_bias;
            p.state = if mo.in_zone { PersonState::InDanger } else { PersonState::Vulnerable };
            if mo.dies {
                p.state = PersonState::Dead;
                continue;
            }
            self.handle_arrival(mo.idx, arrival_t);
        }

        // (6) Advance the clock and append metrics.
        self.step += 1;
        self.clock = self.step as f64 * tick_s;
        let counts = self.counts();
        self.ticks.push(counts);
    }

    fn handle_arrival(&mut self, idx: usize, arrival_t: f64) {
        let Some(space_idx) = self.persons[idx].target_space else {
            return;
        };
        let (_, dist) = self.spaces[space_idx]
            .polygon
            .nearest_boundary_point(self.persons[idx].position);
        if dist > self.config.discovery_radius_m {
            return;
        }

        if self.spaces[space_idx].locked {
            // Locked status is only learned here, upon arrival.
            let pos = self.persons[idx].position;
            let p = &mut self.persons[idx];
            if !p.discovered_locked.contains(&space_idx) {
                p.discovered_locked.push(space_idx);
            }
            p.orbit_vertex = None;
            let discovered = p.discovered_locked.clone();
            match self.select_target(pos, &discovered) {
                Some(next) => {
                    let p = &mut self.persons[idx];
                    p.target_space = Some(next);
                    p.retarget_exhausted = false;
                }
                None => {
                    // Every space known locked: keep the last target.
                    self.persons[idx].retarget_exhausted = true;
                }
            }
            return;
        }

        let space = &self.spaces[space_idx];
        if space.occupancy >= space.capacity {
            // Full: circle the space, re-checking admission every tick.
            let pos = self.persons[idx].position;
            let ring_len = space.polygon.exterior().len();
            let clockwise = |v: usize| (v + ring_len - 1) % ring_len;
            let p = &mut self.persons[idx];
            match p.orbit_vertex {
                None => {
                    let nearest = self.spaces[space_idx].polygon.nearest_vertex(pos);
                    p.orbit_vertex = Some(clockwise(nearest));
                }
                Some(v) => {
                    let vertex = self.spaces[space_idx].polygon.exterior()[v];
                    if vertex.dist(pos) <= self.config.discovery_radius_m {
                        p.orbit_vertex = Some(clockwise(v));
                    }
                }
            }
            return;
        }

        if space.polygon.contains(self.persons[idx].position) {
            let space = &mut self.spaces[space_idx];
            space.occupancy += 1;
            space.arrival_times.push(arrival_t);
            let p = &mut self.persons[idx];
            p.state = PersonState::Safe;
            p.arrival_time = Some(arrival_t);
        }
    }
}
