//! Result file writers: the safe-count time series, the per-space table,
//! a JSON summary, the effective config echo, and an SVG chart. All
//! output is a pure function of the result, so identical runs produce
//! byte-identical files.

use super::write_file;
use crate::engine::SimulationResult;
use crate::error::Result;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Serialize)]
struct Summary {
    total_residents: u32,
    safe: u32,
    vulnerable: u32,
    in_danger: u32,
    dead: u32,
    unspawned: u32,
    safe_fraction: f64,
    seed: u64,
    config_hash: String,
    retarget_exhausted: u32,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

pub fn timeseries_csv(result: &SimulationResult) -> String {
    let mut out = String::from("t,safe,vulnerable,in_danger,dead,unspawned\n");
    for c in &result.ticks {
        writeln!(out, "{},{},{},{},{},{}", c.t, c.safe, c.vulnerable, c.in_danger, c.dead, c.unspawned)
            .unwrap();
    }
    out
}

pub fn spaces_csv(result: &SimulationResult) -> String {
    let mut out = String::from(
        "space_id,locked,pct_population,min_arrival_s,max_arrival_s,avg_arrival_s,occupancy,capacity\n",
    );
    for s in &result.spaces {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.space_id,
            s.locked,
            s.pct_population,
            s.min_arrival_s,
            s.max_arrival_s,
            s.avg_arrival_s,
            s.occupancy,
            s.capacity
        )
        .unwrap();
    }
    out
}

fn summary_json(result: &SimulationResult, config_echo: &str) -> String {
    let last = result.ticks.last().copied().unwrap_or(crate::engine::TickCounts {
        t: 0.0,
        safe: 0,
        vulnerable: 0,
        in_danger: 0,
        dead: 0,
        unspawned: 0,
    });
    let summary = Summary {
        total_residents: result.total_residents,
        safe: last.safe,
        vulnerable: last.vulnerable,
        in_danger: last.in_danger,
        dead: last.dead,
        unspawned: last.unspawned,
        safe_fraction: if result.total_residents == 0 {
            0.0
        } else {
            last.safe as f64 / result.total_residents as f64
        },
        seed: result.seed,
        config_hash: format!("{:016x}", fnv1a64(config_echo.as_bytes())),
        retarget_exhausted: result.retarget_exhausted,
    };
    let mut s = serde_json::to_string_pretty(&summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Single-line chart of the safe count over time.
fn timeseries_svg(result: &SimulationResult) -> String {
    const W: f64 = 860.0;
    const H: f64 = 480.0;
    const ML: f64 = 70.0; // left margin
    const MB: f64 = 50.0; // bottom margin
    const MT: f64 = 20.0;
    const MR: f64 = 20.0;

    let t_max = result.ticks.last().map_or(1.0, |c| c.t).max(1.0);
    let y_max = result.total_residents.max(1) as f64;
    let px = |t: f64| ML + t / t_max * (W - ML - MR);
    let py = |v: f64| H - MB - v / y_max * (H - MB - MT);

    let mut points = String::new();
    for c in &result.ticks {
        write!(points, "{},{} ", px(c.t), py(c.safe as f64)).unwrap();
    }

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="14">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    // axes
    writeln!(
        svg,
        r#"<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{}" stroke="black"/>"#,
        H - MB
    )
    .unwrap();
    writeln!(
        svg,
        r#"<line x1="{ML}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        H - MB,
        W - MR,
        H - MB
    )
    .unwrap();
    // axis labels and end ticks
    writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">time (s)</text>"#,
        (ML + W - MR) / 2.0,
        H - 12.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">safe persons</text>"#,
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{ML}" y="{}" text-anchor="middle">0</text>"#,
        H - MB + 20.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        W - MR,
        H - MB + 20.0,
        t_max
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        ML - 6.0,
        MT + 6.0,
        result.total_residents
    )
    .unwrap();
    writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#2166ac" stroke-width="2"/>"##,
        points.trim_end()
    )
    .unwrap();
    writeln!(svg, "</svg>").unwrap();
    svg
}

/// Write `timeseries.csv`, `spaces.csv`, `summary.json`, `config.toml`
/// and `timeseries.svg` under `out_dir`; returns the written paths.
pub fn write_results(result: &SimulationResult, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let config_echo = result.config.to_toml_string();

    let files = [
        ("timeseries.csv", timeseries_csv(result)),
        ("spaces.csv", spaces_csv(result)),
        ("summary.json", summary_json(result, &config_echo)),
        ("config.toml", config_echo.clone()),
        ("timeseries.svg", timeseries_svg(result)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = out_dir.join(name);
        write_file(&path, &contents)?;
        written.push(path);
    }
    Ok(written)
}
