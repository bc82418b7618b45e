use crate::Failure;
use clap::Args;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Args)]
pub struct CompareArgs {
    /// First result directory (e.g. all spaces open).
    dir_a: PathBuf,
    /// Second result directory (e.g. one space locked).
    dir_b: PathBuf,
    /// Where to write the per-tick comparison CSV.
    #[arg(long, default_value = "compare.csv")]
    out: PathBuf,
}

struct RunData {
    total: u64,
    /// (t, safe) rows in file order.
    series: Vec<(f64, u64)>,
}

fn load_run(dir: &Path) -> Result<RunData, Failure> {
    let summary_path = dir.join("summary.json");
    let text = std::fs::read_to_string(&summary_path)
        .map_err(|e| Failure::Validation(format!("{}: {e}", summary_path.display())))?;
    let summary: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Validation(format!("{}: {e}", summary_path.display())))?;
    let total = summary
        .get("total_residents")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| {
            Failure::Validation(format!("{}: missing total_residents", summary_path.display()))
        })?;

    let ts_path = dir.join("timeseries.csv");
    let text = std::fs::read_to_string(&ts_path)
        .map_err(|e| Failure::Validation(format!("{}: {e}", ts_path.display())))?;
    let mut series = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue; // header
        }
        let mut fields = line.split(',');
        let t: f64 = fields
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Failure::Validation(format!("{}: bad row {}", ts_path.display(), i)))?;
        let safe: u64 = fields
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Failure::Validation(format!("{}: bad row {}", ts_path.display(), i)))?;
        series.push((t, safe));
    }
    Ok(RunData { total, series })
}

pub fn run(args: CompareArgs) -> Result<(), Failure> {
    let a = load_run(&args.dir_a)?;
    let b = load_run(&args.dir_b)?;
    if a.total != b.total {
        return Err(Failure::Validation(format!(
            "resident totals differ: {} vs {}",
            a.total, b.total
        )));
    }
    if a.total == 0 {
        return Err(Failure::Validation("runs have zero residents".into()));
    }

    let rows = a.series.len().min(b.series.len());
    let mut csv = String::from("t,safe_frac_a,safe_frac_b,diff_pp\n");
    let mut aligned: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(rows);
    for i in 0..rows {
        let (ta, safe_a) = a.series[i];
        let (tb, safe_b) = b.series[i];
        if (ta - tb).abs() > 1e-9 {
            return Err(Failure::Validation(format!(
                "time axes differ at row {i}: {ta} vs {tb}"
            )));
        }
        let fa = safe_a as f64 / a.total as f64;
        let fb = safe_b as f64 / b.total as f64;
        let diff = (fa - fb) * 100.0;
        writeln!(csv, "{ta},{fa},{fb},{diff}").expect("string write");
        aligned.push((ta, fa, fb, diff));
    }

    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(Failure::runtime)?;
        }
    }
    std::fs::write(&args.out, csv).map_err(Failure::runtime)?;

    println!("{:>6} {:>12} {:>12} {:>9}", "t_s", "safe_frac_a", "safe_frac_b", "diff_pp");
    for checkpoint in [60.0, 120.0, 180.0, 240.0, 300.0] {
        if let Some(row) = aligned.iter().find(|(t, ..)| (*t - checkpoint).abs() < 1e-9) {
            println!("{:>6} {:>12.4} {:>12.4} {:>9.2}", row.0, row.1, row.2, row.3);
        }
    }
    let last = aligned.last().expect("at least one row");
    println!("final difference at t={}: {:.2} percentage points", last.0, last.3);
    Ok(())
}
