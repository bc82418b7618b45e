use crate::Failure;
use clap::Args;
use qevac_core::synth::{generate, hamra_like, write_city, DamageMix, SynthCitySpec, Terrain};
use std::path::PathBuf;

#[derive(Args)]
pub struct SynthArgs {
    /// Named preset; `hamra-like` pins the reference city scale
    /// (745 buildings, 8 spaces, ~0.885 km²). Other flags except
    /// --seed and --out are ignored when a preset is chosen.
    #[arg(long)]
    preset: Option<String>,
    /// Lot grid as COLSxROWS, e.g. 12x10.
    #[arg(long, default_value = "10x10")]
    grid: String,
    /// Lot pitch in meters.
    #[arg(long, default_value_t = 30.0)]
    spacing: f64,
    /// Margin around the lot grid in meters.
    #[arg(long, default_value_t = 15.0)]
    margin: f64,
    /// Building footprint side in meters.
    #[arg(long, default_value_t = 16.0)]
    footprint: f64,
    /// Floor count range as MIN..MAX.
    #[arg(long, default_value = "2..8")]
    floors: String,
    /// Apartments-per-building range as MIN..MAX.
    #[arg(long, default_value = "4..12")]
    apartments: String,
    /// Damage-state mix as five comma-separated shares
    /// (none,slight,moderate,extensive,complete).
    #[arg(long, default_value = "0.008,0.81,0.18,0.002,0")]
    mu_mix: String,
    /// Construction year range as MIN..MAX.
    #[arg(long, default_value = "1930..2015")]
    years: String,
    /// Open space count (ring plus optional center).
    #[arg(long, default_value_t = 4)]
    spaces: u32,
    /// Place one space at the city center.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    center_space: bool,
    /// Open space side in meters.
    #[arg(long, default_value_t = 40.0)]
    space_side: f64,
    /// Ring radius as a fraction of the smaller city side.
    #[arg(long, default_value_t = 0.415)]
    ring_frac: f64,
    /// Terrain: `flat` or `ramp:GRADE` (e.g. ramp:0.02).
    #[arg(long, default_value = "flat")]
    terrain: String,
    /// Keep exactly this many buildings.
    #[arg(long)]
    buildings: Option<u32>,
    /// Adjust apartment draws to this exact total.
    #[arg(long)]
    apartments_total: Option<u32>,
    /// Generator seed (also echoed into scenario.toml).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn parse_pair(s: &str, sep: &str, what: &str) -> Result<(u32, u32), Failure> {
    let parts: Vec<&str> = s.split(sep).collect();
    if parts.len() == 2 {
        if let (Ok(a), Ok(b)) = (parts[0].parse(), parts[1].parse()) {
            return Ok((a, b));
        }
    }
    Err(Failure::Validation(format!("{what}: expected A{sep}B, got `{s}`")))
}

fn parse_mix(s: &str) -> Result<DamageMix, Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Validation(format!("--mu-mix: bad number in `{s}`")))?;
    if parts.len() != 5 {
        return Err(Failure::Validation("--mu-mix needs exactly 5 shares".into()));
    }
    Ok(DamageMix {
        none: parts[0],
        slight: parts[1],
        moderate: parts[2],
        extensive: parts[3],
        complete: parts[4],
    })
}

fn parse_terrain(s: &str) -> Result<Terrain, Failure> {
    if s == "flat" {
        return Ok(Terrain::Flat);
    }
    if let Some(grade) = s.strip_prefix("ramp:") {
        let grade: f64 = grade
            .parse()
            .map_err(|_| Failure::Validation(format!("--terrain: bad grade in `{s}`")))?;
        return Ok(Terrain::Ramp { grade });
    }
    Err(Failure::Validation(format!("--terrain: expected `flat` or `ramp:GRADE`, got `{s}`")))
}

pub fn run(args: SynthArgs) -> Result<(), Failure> {
    let spec = match args.preset.as_deref() {
        Some("hamra-like") => hamra_like(args.seed),
        Some(other) => {
            return Err(Failure::Validation(format!(
                "unknown preset `{other}` (available: hamra-like)"
            )))
        }
        None => {
            let (cols, rows) = parse_pair(&args.grid, "x", "--grid")?;
            let (floors_min, floors_max) = parse_pair(&args.floors, "..", "--floors")?;
            let (apartments_min, apartments_max) =
                parse_pair(&args.apartments, "..", "--apartments")?;
            let (year_min, year_max) = parse_pair(&args.years, "..", "--years")?;
            SynthCitySpec {
                cols,
                rows,
                spacing_m: args.spacing,
                margin_m: args.margin,
                footprint_m: args.footprint,
                floors_min,
                floors_max,
                apartments_min,
                apartments_max,
                damage_mix: parse_mix(&args.mu_mix)?,
                year_min: year_min as i32,
                year_max: year_max as i32,
                space_count: args.spaces,
                center_space: args.center_space,
                space_side_m: args.space_side,
                ring_radius_frac: args.ring_frac,
                terrain: parse_terrain(&args.terrain)?,
                dem_cell_m: 2.0,
                building_count: args.buildings,
                apartments_total: args.apartments_total,
                seed: args.seed,
            }
        }
    };

    let city = generate(&spec).map_err(Failure::validation)?;
    write_city(&city, &args.out).map_err(Failure::runtime)?;
    println!(
        "buildings={} residents={} spaces={} out={}",
        city.buildings.len(),
        city.residents(),
        city.spaces.len(),
        args.out.display()
    );
    Ok(())
}
