use super::*;
use crate::engine::tick::per_tick_hazard;
use crate::io::derive_door;

fn flat_grid_for(scene: crate::geom::BBox) -> ElevationGrid {
    let margin = 20.0;
    let cell = 4.0;
    let ncols = (((scene.max.x - scene.min.x) + 2.0 * margin) / cell).ceil() as usize;
    let nrows = (((scene.max.y - scene.min.y) + 2.0 * margin) / cell).ceil() as usize;
    ElevationGrid::constant(
        Point2D::new(scene.min.x - margin, scene.min.y - margin),
        cell,
        ncols,
        nrows,
        0.0,
    )
}

fn building(id: u32, min: Point2D, side: f64, floors: u32, apartments: u32, mu_ds: f64) -> BuildingInput {
    let footprint =
        Polygon2D::rectangle(min, Point2D::new(min.x + side, min.y + side)).unwrap();
    let door = derive_door(&footprint);
    BuildingInput { id, footprint, floors, apartments, year: 1990, mu_ds, door }
}

fn space(id: u32, min: Point2D, side: f64, locked: bool) -> SpaceInput {
    SpaceInput {
        id,
        polygon: Polygon2D::rectangle(min, Point2D::new(min.x + side, min.y + side)).unwrap(),
        locked,
    }
}

fn bundle(
    buildings: Vec<BuildingInput>,
    spaces: Vec<SpaceInput>,
    config: ScenarioConfig,
) -> InputBundle {
    let mut scene = buildings[0].footprint.bbox();
    for b in &buildings {
        scene = scene.merge(&b.footprint.bbox());
    }
    for s in &spaces {
        scene = scene.merge(&s.polygon.bbox());
    }
    InputBundle {
        buildings,
        spaces,
        grid: flat_grid_for(scene),
        casualty_table: CasualtyTable::default_table(),
        speed_curve: SpeedSlopeCurve::default_curve(),
        config,
    }
}

fn fixed_speed_config(speed: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.speed_min_mps = speed;
    cfg.speed_max_mps = speed;
    cfg
}

#[test]
fn residents_are_apartments_times_household_size() {
    let cfg = ScenarioConfig::default();
    let w = build_world(bundle(
        vec![building(1, Point2D::new(0.0, 0.0), 16.0, 3, 5, 0.0)],
        vec![space(1, Point2D::new(40.0, 0.0), 20.0, false)],
        cfg,
    ))
    .unwrap();
    assert_eq!(w.total_residents(), 20);
}

#[test]
fn zero_indoor_rate_means_zero_prespawn_deaths() {
    // mu_ds 0 bins to the `none` state whose rate is pinned to 0.
    let w = build_world(bundle(
        vec![building(1, Point2D::new(0.0, 0.0), 16.0, 4, 25, 0.0)],
        vec![space(1, Point2D::new(40.0, 0.0), 20.0, false)],
        ScenarioConfig::default(),
    ))
    .unwrap();
    assert_eq!(w.counts().dead, 0);
    assert_eq!(w.counts().unspawned, 100);
}

#[test]
fn world_requires_an_open_space() {
    let b = bundle(
        vec![building(1, Point2D::new(0.0, 0.0), 16.0, 3, 5, 0.0)],
        vec![space(1, Point2D::new(40.0, 0.0), 20.0, false)],
        ScenarioConfig::default(),
    );
    let no_spaces = InputBundle { spaces: Vec::new(), ..b };
    assert!(build_world(no_spaces).is_err());
}

#[test]
fn spawn_time_follows_floor_and_floors_stay_in_range() {
    let cfg = ScenarioConfig::default();
    let w = build_world(bundle(
        vec![building(1, Point2D::new(0.0, 0.0), 16.0, 6, 50, 0.0)],
        vec![space(1, Point2D::new(40.0, 0.0), 20.0, false)],
        cfg.clone(),
    ))
    .unwrap();
    for p in &w.persons {
        assert!((1..=6).contains(&p.floor));
        assert_eq!(p.spawn_time, (p.floor - 1) as f64 * cfg.seconds_per_floor);
        assert!((cfg.speed_min_mps..=cfg.speed_max_mps).contains(&p.natural_speed));
    }
    // All six floors should appear among 200 residents.
    let mut seen = [false; 6];
    for p in &w.persons {
        seen[(p.floor - 1) as usize] = true;
    }
    assert!(seen.iter().all(|&s| s));
}

#[test]
fn select_target_prefers_nearest_then_smaller_id() {
    let w = build_world(bundle(
        vec![building(1, Point2D::new(-8.0, -8.0), 16.0, 1, 1, 0.0)],
        vec![
            // Both space boundaries are exactly 20 m from the door at
            // (0, -8): one to the east, one to the west.
            space(7, Point2D::new(20.0, -18.0), 20.0, false),
            space(3, Point2D::new(-40.0, -18.0), 20.0, false),
        ],
        ScenarioConfig::default(),
    ))
    .unwrap();
    let door = Point2D::new(0.0, -8.0);
    let picked = w.select_target(door, &[]).unwrap();
    assert_eq!(w.spaces[picked].id, 3, "tie must break to the smaller id");
    // With the nearer-by-id space discovered locked, the other wins.
    let other = w.select_target(door, &[picked]).unwrap();
    assert_eq!(w.spaces[other].id, 7);
}

#[test]
fn adjacent_person_reaches_the_space_quickly() {
    let mut cfg = fixed_speed_config(1.4);
    cfg.sim_duration_s = 20.0;
    let mut w = build_world(bundle(
        vec![building(1, Point2D::new(0.0, 0.0), 10.0, 1, 1, 0.0)],
        // Door at (5,0); space boundary 2 m south of it.
        vec![space(1, Point2D::new(-2.0, -10.0), 8.0, false)],
        cfg,
    ))
    .unwrap();
    assert_eq!(w.total_residents(), 4);
    let result = w.run(1);
    let last = result.ticks.last().unwrap();
    assert_eq!(last.safe, 4);
    for p in &w.persons {
        let arrival = p.arrival_time.unwrap();
        assert!(arrival <= 5.0, "arrival {arrival} too slow for a 2 m walk");
    }
    assert!(result.spaces[0].min_arrival_s <= result.spaces[0].avg_arrival_s);
    assert!(result.spaces[0].avg_arrival_s <= result.spaces[0].max_arrival_s);
}

#[test]
fn all_locked_spaces_admit_nobody() {
    let mut cfg = fixed_speed_config(1.4);
    cfg.sim_duration_s = 60.0;
    let mut w = build_world(bundle(
        vec![building(1, Point2D::new(0.0, 0.0), 10.0, 1, 2, 0.0)],
        vec![
            space(1, Point2D::new(-2.0, -12.0), 8.0, true),
            space(2, Point2D::new(20.0, -12.0), 8.0, true),
        ],
        cfg,
    ))
    .unwrap();
    let result = w.run(1);
    for c in &result.ticks {
        assert_eq!(c.safe, 0);
    }
    for s in &result.spaces {
        assert_eq!(s.occupancy, 0);
        assert_eq!(s.pct_population, 0.0);
    }
    // Everyone eventually discovered both spaces locked.
    assert_eq!(result.retarget_exhausted, 8);
}

#[test]
fn locked_discovery_retargets_to_second_nearest() {
    let mut cfg = fixed_speed_config(1.4);
    cfg.sim_duration_s = 120.0;
    let mut w = build_world(bundle(
        vec![building(1, Point2D::new(0.0, 0.0), 10.0, 1, 1, 0.0)],
        vec![
            space(1, Point2D::new(1.0, -16.0), 8.0, true), // nearest, locked
            space(2, Point2D::new(1.0, 30.0), 8.0, false), // farther, open
        ],
        cfg,
    ))
    .unwrap();
    let result = w.run(1);
    assert_eq!(result.ticks.last().unwrap().safe, 4);
    assert_eq!(result.spaces[0].occupancy, 0);
    assert_eq!(result.spaces[1].occupancy, 4);
    for p in &w.persons {
        assert!(p.discovered_locked.contains(&0));
    }
}

#[test]
fn full_space_keeps_people_orbiting() {
    // A 1 m² space has capacity 2·1 = 2; the remaining residents orbit.
    let mut cfg = fixed_speed_config(1.0);
    cfg.sim_duration_s = 60.0;
    let mut w = build_world(bundle(
        vec![building(1, Point2D::new(0.0, 0.0), 10.0, 1, 2, 0.0)],
        vec![space(1, Point2D::new(4.0, -6.0), 1.0, false)],
        cfg,
    ))
    .unwrap();
    let result = w.run(1);
    let last = result.ticks.last().unwrap();
    assert_eq!(result.spaces[0].capacity, 2);
    assert_eq!(last.safe, 2);
    assert_eq!(result.spaces[0].occupancy, 2);
    assert_eq!(last.vulnerable, 6);
    // Orbiters are still near the space, not wandering off.
    for p in w.persons.iter().filter(|p| p.state == PersonState::Vulnerable) {
        let (_, d) = w.spaces[0].polygon.nearest_boundary_point(p.position);
        assert!(d < 10.0, "orbiter strayed {d} m");
        assert!(p.orbit_vertex.is_some());
    }
}

#[test]
fn population_is_conserved_every_tick() {
    let mut cfg = ScenarioConfig::default();
    cfg.sim_duration_s = 90.0;
    cfg.seed = 5;
    let mut w = build_world(bundle(
        vec![
            building(1, Point2D::new(0.0, 0.0), 16.0, 5, 10, 3.9),
            building(2, Point2D::new(40.0, 0.0), 16.0, 3, 8, 2.0),
            building(3, Point2D::new(80.0, 0.0), 16.0, 8, 12, 3.2),
        ],
        vec![space(1, Point2D::new(30.0, 60.0), 20.0, false)],
        cfg,
    ))
    .unwrap();
    let total = w.total_residents();
    let result = w.run(1);
    for c in &result.ticks {
        assert_eq!(c.total(), total, "conservation broken at t={}", c.t);
    }
    // Safe and dead counts are monotone.
    for pair in result.ticks.windows(2) {
        assert!(pair[1].safe >= pair[0].safe);
        assert!(pair[1].dead >= pair[0].dead);
    }
}

#[test]
fn no_deaths_after_the_shaking_ends() {
    let mut cfg = ScenarioConfig::default();
    cfg.sim_duration_s = 120.0;
    cfg.shake_duration_s = 30.0;
    cfg.seed = 11;
    // Complete-damage masonry: big debris zone, high outdoor rate.
    let mut w = build_world(bundle(
        vec![building(1, Point2D::new(0.0, 0.0), 20.0, 5, 40, 4.0)],
        vec![space(1, Point2D::new(120.0, 0.0), 20.0, false)],
        cfg,
    ))
    .unwrap();
    let result = w.run(1);
    let dead_at_shake_end = result
        .ticks
        .iter()
        .find(|c| c.t >= 30.0)
        .map(|c| c.dead)
        .unwrap();
    assert_eq!(result.ticks.last().unwrap().dead, dead_at_shake_end);
}

#[test]
fn identical_seeds_reproduce_bit_identical_runs() {
    let mk = || {
        let mut cfg = ScenarioConfig::default();
        cfg.sim_duration_s = 60.0;
        cfg.seed = 99;
        build_world(bundle(
            vec![
                building(1, Point2D::new(0.0, 0.0), 16.0, 5, 10, 3.8),
                building(2, Point2D::new(40.0, 0.0), 16.0, 4, 10, 1.0),
            ],
            vec![space(1, Point2D::new(10.0, 50.0), 20.0, false)],
            cfg,
        ))
        .unwrap()
    };
    let r1 = mk().run(1);
    let r2 = mk().run(1);
    assert_eq!(crate::io::timeseries_csv(&r1), crate::io::timeseries_csv(&r2));
    assert_eq!(crate::io::spaces_csv(&r1), crate::io::spaces_csv(&r2));
    // And across thread counts.
    let r4 = mk().run(4);
    assert_eq!(crate::io::timeseries_csv(&r1), crate::io::timeseries_csv(&r4));
    assert_eq!(crate::io::spaces_csv(&r1), crate::io::spaces_csv(&r4));
}

#[test]
fn zero_duration_run_reports_initial_counts_only() {
    let mut cfg = ScenarioConfig::default();
    cfg.sim_duration_s = 0.0;
    let mut w = build_world(bundle(
        vec![building(1, Point2D::new(0.0, 0.0), 16.0, 3, 5, 0.0)],
        vec![space(1, Point2D::new(40.0, 0.0), 20.0, false)],
        cfg,
    ))
    .unwrap();
    let result = w.run(1);
    assert_eq!(result.ticks.len(), 1);
    assert_eq!(result.ticks[0].t, 0.0);
    assert_eq!(result.ticks[0].unspawned, 20);
}

#[test]
fn hazard_conversion_matches_event_rate_over_full_exposure() {
    // Survival over shake/tick draws at hazard q equals 1 - R exactly.
    let (rate, tick, shake) = (0.3, 1.0, 30.0);
    let q = per_tick_hazard(rate, tick, shake);
    let survive = (1.0 - q).powi(30);
    assert!((survive - 0.7).abs() < 1e-12);
    assert_eq!(per_tick_hazard(0.0, tick, shake), 0.0);
    assert_eq!(per_tick_hazard(1.0, tick, shake), 1.0);
}

#[test]
fn committed_positions_never_enter_building_interiors() {
    let mut cfg = ScenarioConfig::default();
    cfg.sim_duration_s = 60.0;
    cfg.seed = 3;
    // The space sits behind the second building, forcing detours.
    let mut w = build_world(bundle(
        vec![
            building(1, Point2D::new(0.0, 0.0), 16.0, 2, 10, 0.0),
            building(2, Point2D::new(24.0, -10.0), 16.0, 2, 10, 0.0),
        ],
        vec![space(1, Point2D::new(26.0, -40.0), 16.0, false)],
        cfg,
    ))
    .unwrap();
    let mut violations = 0;
    let result = w.run_with_observer(1, |world| {
        for p in &world.persons {
            if matches!(p.state, PersonState::Vulnerable | PersonState::InDanger) {
                for b in &world.buildings {
                    if b.footprint.contains_interior(p.position) {
                        violations += 1;
                    }
                }
            }
        }
    });
    assert_eq!(violations, 0);
    assert!(result.ticks.last().unwrap().safe > 0, "someone should arrive");
}
