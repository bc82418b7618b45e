//! ESRI ASCII grid parsing and writing.

use crate::error::{Error, Result};
use crate::geom::{ElevationGrid, Point2D};

/// Parse an ESRI ASCII grid. Header keys are case-insensitive;
/// `xllcenter`/`yllcenter` are converted to corner origin; the nodata
/// marker defaults to -9999 when absent.
pub fn parse_ascii_grid(text: &str) -> Result<ElevationGrid> {
    let mut ncols: Option<usize> = None;
    let mut nrows: Option<usize> = None;
    let mut xll: Option<(f64, bool)> = None; // (value, is_center)
    let mut yll: Option<(f64, bool)> = None;
    let mut cell: Option<f64> = None;
    let mut nodata: f64 = -9999.0;

    let mut tokens = text.split_whitespace().peekable();
    loop {
        let Some(&word) = tokens.peek() else {
            return Err(Error::Config("ASCII grid: missing data section".into()));
        };
        let key = word.to_ascii_lowercase();
        let is_header = matches!(
            key.as_str(),
            "ncols" | "nrows" | "xllcorner" | "yllcorner" | "xllcenter" | "yllcenter"
                | "cellsize" | "nodata_value"
        );
        if !is_header {
            break;
        }
        tokens.next();
        let value = tokens
            .next()
            .ok_or_else(|| Error::Config(format!("ASCII grid: header `{key}` without value")))?;
        let parse_f = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("ASCII grid: bad value `{v}` for `{key}`")))
        };
        match key.as_str() {
            "ncols" => ncols = Some(parse_f(value)? as usize),
            "nrows" => nrows = Some(parse_f(value)? as usize),
            "xllcorner" => xll = Some((parse_f(value)?, false)),
            "yllcorner" => yll = Some((parse_f(value)?, false)),
            "xllcenter" => xll = Some((parse_f(value)?, true)),
            "yllcenter" => yll = Some((parse_f(value)?, true)),
            "cellsize" => cell = Some(parse_f(value)?),
            "nodata_value" => nodata = parse_f(value)?,
            _ => unreachable!(),
        }
    }

    let ncols = ncols.ok_or_else(|| Error::Config("ASCII grid: missing ncols".into()))?;
    let nrows = nrows.ok_or_else(|| Error::Config("ASCII grid: missing nrows".into()))?;
    let cell = cell.ok_or_else(|| Error::Config("ASCII grid: missing cellsize".into()))?;
    let (x, x_center) = xll.ok_or_else(|| Error::Config("ASCII grid: missing xllcorner".into()))?;
    let (y, y_center) = yll.ok_or_else(|| Error::Config("ASCII grid: missing yllcorner".into()))?;
    let origin = Point2D::new(
        if x_center { x - cell / 2.0 } else { x },
        if y_center { y - cell / 2.0 } else { y },
    );

    let mut values = Vec::with_capacity(ncols * nrows);
    for tok in tokens {
        let v: f64 = tok
            .parse()
            .map_err(|_| Error::Config(format!("ASCII grid: bad cell value `{tok}`")))?;
        values.push(v);
    }
    if values.len() != ncols * nrows {
        return Err(Error::Config(format!(
            "ASCII grid: expected {} values ({}x{}), got {}",
            ncols * nrows,
            ncols,
            nrows,
            values.len()
        )));
    }
    ElevationGrid::new(origin, cell, ncols, nrows, values, nodata)
}

/// Serialize a grid in ESRI ASCII format (row 0 = north, as stored).
pub fn write_ascii_grid(grid: &ElevationGrid) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let o = grid.origin();
    writeln!(out, "ncols {}", grid.ncols()).unwrap();
    writeln!(out, "nrows {}", grid.nrows()).unwrap();
    writeln!(out, "xllcorner {}", o.x).unwrap();
    writeln!(out, "yllcorner {}", o.y).unwrap();
    writeln!(out, "cellsize {}", grid.cell_size()).unwrap();
    writeln!(out, "NODATA_value {}", grid.nodata()).unwrap();
    for row in grid.values().chunks(grid.ncols()) {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
ncols 3
nrows 2
xllcorner 10.0
yllcorner 20.0
cellsize 5.0
NODATA_value -9999
1 2 3
4 5 6
";

    #[test]
    fn parses_header_and_rows() {
        let g = parse_ascii_grid(SAMPLE).unwrap();
        assert_eq!(g.ncols(), 3);
        assert_eq!(g.nrows(), 2);
        assert_eq!(g.cell_size(), 5.0);
        // Bottom-left cell is the first value of the LAST row.
        assert_eq!(g.sample(Point2D::new(12.0, 22.0)).unwrap(), 4.0);
        // Top-right cell is the last value of the FIRST row.
        assert_eq!(g.sample(Point2D::new(24.0, 29.0)).unwrap(), 3.0);
    }

    #[test]
    fn center_origin_is_shifted_to_corner() {
        let text = SAMPLE
            .replace("xllcorner 10.0", "xllcenter 12.5")
            .replace("yllcorner 20.0", "yllcenter 22.5");
        let g = parse_ascii_grid(&text).unwrap();
        assert_eq!(g.origin(), Point2D::new(10.0, 20.0));
    }

    #[test]
    fn wrong_value_count_is_rejected() {
        let text = SAMPLE.replace("4 5 6\n", "4 5\n");
        assert!(parse_ascii_grid(&text).is_err());
    }

    #[test]
    fn round_trips_through_writer() {
        let g = parse_ascii_grid(SAMPLE).unwrap();
        let text = write_ascii_grid(&g);
        let again = parse_ascii_grid(&text).unwrap();
        assert_eq!(g, again);
    }
}
