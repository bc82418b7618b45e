use crate::Failure;
use clap::Args;
use qevac_core::config::ScenarioConfig;
use qevac_core::debris::{
    make_debris_zone, ring_buffer, solve_truncated_pyramid, BuildingGeometryInput, DebrisModel,
};
use qevac_core::geom::equivalent_rectangle;
use qevac_core::io::load_buildings;
use qevac_core::vulnerability::normalize_mean_damage;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Args)]
pub struct DebrisArgs {
    /// Buildings GeoJSON (planar meter coordinates).
    #[arg(long)]
    buildings: PathBuf,
    /// Output directory for debris.csv and debris_zones.geojson.
    #[arg(long)]
    out: PathBuf,
    /// Scenario configuration TOML (sets the debris model switch).
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: DebrisArgs) -> Result<(), Failure> {
    let config = match &args.config {
        None => ScenarioConfig::default(),
        Some(p) => ScenarioConfig::from_toml_path(p).map_err(Failure::validation)?,
    };
    let buildings = load_buildings(&args.buildings).map_err(Failure::validation)?;

    let mut csv =
        String::from("building_id,x,y,h,h_prime,V,k,r,x_p,y_p,h_t,buffer\n");
    let mut zone_features: Vec<serde_json::Value> = Vec::new();

    for b in &buildings {
        let rect = equivalent_rectangle(b.footprint.area(), b.footprint.perimeter())
            .map_err(Failure::validation)?;
        let mu_nds = normalize_mean_damage(b.mu_ds).map_err(Failure::validation)?;
        let input = BuildingGeometryInput::new(rect.x, rect.y, b.floors, mu_nds)
            .map_err(Failure::validation)?;
        let mut sol = solve_truncated_pyramid(&input).map_err(Failure::validation)?;
        if config.debris_model == DebrisModel::Ring {
            sol.buffer = ring_buffer(rect.x, rect.y, sol.volume, config.ring_pile_height_m)
                .map_err(Failure::validation)?;
        }
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            b.id, rect.x, rect.y, sol.h, sol.h_prime, sol.volume, sol.k, sol.r, sol.x_p, sol.y_p,
            sol.h_t, sol.buffer
        )
        .expect("string write");

        let zone = make_debris_zone(&b.footprint, sol.buffer).map_err(Failure::runtime)?;
        if let Some(zone) = zone {
            let mut rings = vec![ring_coords(zone.exterior())];
            for h in zone.holes() {
                rings.push(ring_coords(h));
            }
            zone_features.push(serde_json::json!({
                "type": "Feature",
                "id": b.id,
                "geometry": { "type": "Polygon", "coordinates": rings },
                "properties": { "building_id": b.id, "buffer_m": sol.buffer },
            }));
        }
    }

    std::fs::create_dir_all(&args.out).map_err(Failure::runtime)?;
    std::fs::write(args.out.join("debris.csv"), csv).map_err(Failure::runtime)?;
    let fc = serde_json::json!({ "type": "FeatureCollection", "features": zone_features });
    std::fs::write(
        args.out.join("debris_zones.geojson"),
        serde_json::to_string_pretty(&fc).expect("geojson serializes"),
    )
    .map_err(Failure::runtime)?;

    println!(
        "buildings={} zones={} model={:?}",
        buildings.len(),
        zone_features.len(),
        config.debris_model
    );
    Ok(())
}

fn ring_coords(ring: &[qevac_core::geom::Point2D]) -> serde_json::Value {
    let mut coords: Vec<serde_json::Value> =
        ring.iter().map(|p| serde_json::json!([p.x, p.y])).collect();
    if let Some(first) = ring.first() {
        coords.push(serde_json::json!([first.x, first.y]));
    }
    serde_json::Value::Array(coords)
}
