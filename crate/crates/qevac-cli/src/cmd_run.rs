use crate::Failure;
use clap::Args;
use qevac_core::engine::build_world;
use qevac_core::io::{load_bundle, write_results, BundlePaths};
use std::path::PathBuf;

#[derive(Args)]
pub struct RunArgs {
    /// Buildings GeoJSON (planar meter coordinates).
    #[arg(long)]
    buildings: PathBuf,
    /// Open spaces GeoJSON.
    #[arg(long)]
    open_spaces: PathBuf,
    /// Elevation model, ESRI ASCII grid.
    #[arg(long)]
    dem: PathBuf,
    /// Scenario configuration TOML (defaults apply when omitted).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for result files.
    #[arg(long)]
    out: PathBuf,
    /// Override the configured RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Space ids to force-lock (configuration-2 style experiments).
    #[arg(long, value_delimiter = ',')]
    lock: Vec<u32>,
    /// Worker threads (0 = library default). Does not change results.
    #[arg(long, env = "QEVAC_THREADS", default_value_t = 0)]
    threads: usize,
}

pub fn run(args: RunArgs) -> Result<(), Failure> {
    let paths = BundlePaths {
        buildings: args.buildings,
        open_spaces: args.open_spaces,
        dem: args.dem,
        config: args.config,
    };
    let mut bundle = load_bundle(&paths).map_err(Failure::validation)?;

    if let Some(seed) = args.seed {
        bundle.config.seed = seed;
    }
    for id in &args.lock {
        let Some(space) = bundle.spaces.iter_mut().find(|s| s.id == *id) else {
            return Err(Failure::Validation(format!("--lock: no open space with id {id}")));
        };
        space.locked = true;
    }

    let mut world = build_world(bundle).map_err(Failure::validation)?;
    let result = world.run(args.threads);
    write_results(&result, &args.out).map_err(Failure::runtime)?;

    let last = result.ticks.last().copied().expect("at least the initial row");
    let safe_pct = if result.total_residents == 0 {
        0.0
    } else {
        last.safe as f64 / result.total_residents as f64 * 100.0
    };
    println!(
        "total={} safe={} safe_pct={safe_pct:.1} dead={}",
        result.total_residents, last.safe, last.dead
    );
    Ok(())
}
