use super::{BBox, Point2D};
use crate::error::{Error, Result};

/// Regular elevation raster with ESRI ASCII grid semantics: `values` is
/// row-major with row 0 the northernmost row, `origin` the lower-left
/// corner of the extent.
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationGrid {
    origin: Point2D,
    cell: f64,
    ncols: usize,
    nrows: usize,
    values: Vec<f64>,
    nodata: f64,
}

const EXTENT_EPS: f64 = 1e-9;

impl ElevationGrid {
    pub fn new(
        origin: Point2D,
        cell: f64,
        ncols: usize,
        nrows: usize,
        values: Vec<f64>,
        nodata: f64,
    ) -> Result<Self> {
        if !(cell > 0.0) {
            return Err(Error::Config(format!("grid cell size must be > 0, got {cell}")));
        }
        if ncols == 0 || nrows == 0 {
            return Err(Error::Config("grid must have at least one cell".into()));
        }
        if values.len() != ncols * nrows {
            return Err(Error::Config(format!(
                "grid value count {} does not match {}x{}",
                values.len(),
                ncols,
                nrows
            )));
        }
        Ok(Self { origin, cell, ncols, nrows, values, nodata })
    }

    /// A constant-elevation grid covering the given extent.
    pub fn constant(origin: Point2D, cell: f64, ncols: usize, nrows: usize, value: f64) -> Self {
        Self::new(origin, cell, ncols, nrows, vec![value; ncols * nrows], -9999.0)
            .expect("constant grid parameters")
    }

    pub fn origin(&self) -> Point2D {
        self.origin
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn nodata(&self) -> f64 {
        self.nodata
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extent(&self) -> BBox {
        BBox {
            min: self.origin,
            max: Point2D::new(
                self.origin.x + self.cell * self.ncols as f64,
                self.origin.y + self.cell * self.nrows as f64,
            ),
        }
    }

    pub fn covers(&self, bbox: &BBox) -> bool {
        let e = self.extent();
        bbox.min.x >= e.min.x - EXTENT_EPS
            && bbox.min.y >= e.min.y - EXTENT_EPS
            && bbox.max.x <= e.max.x + EXTENT_EPS
            && bbox.max.y <= e.max.y + EXTENT_EPS
    }

    pub fn in_extent(&self, pt: Point2D) -> bool {
        self.covers(&BBox { min: pt, max: pt })
    }

    /// Nearest-cell elevation. Points on the extent's far edges map into
    /// the last cell, so grid corners sample the corner cells.
    pub fn sample(&self, pt: Point2D) -> Result<f64> {
        let fx = (pt.x - self.origin.x) / self.cell;
        let fy = (pt.y - self.origin.y) / self.cell;
        let feps = EXTENT_EPS / self.cell;
        if fx < -feps
            || fy < -feps
            || fx > self.ncols as f64 + feps
            || fy > self.nrows as f64 + feps
        {
            return Err(Error::Sampling(format!(
                "point ({}, {}) outside grid extent",
                pt.x, pt.y
            )));
        }
        let col = (fx.floor() as i64).clamp(0, self.ncols as i64 - 1) as usize;
        let row_from_bottom = (fy.floor() as i64).clamp(0, self.nrows as i64 - 1) as usize;
        let row_top = self.nrows - 1 - row_from_bottom;
        let v = self.values[row_top * self.ncols + col];
        if v == self.nodata {
            return Err(Error::Sampling(format!(
                "nodata cell at ({}, {})",
                pt.x, pt.y
            )));
        }
        Ok(v)
    }

    /// Signed slope in degrees along the direction `from -> to`;
    /// positive is uphill.
    pub fn directional_slope(&self, from: Point2D, to: Point2D) -> Result<f64> {
        let dist = from.dist(to);
        if dist <= 0.0 {
            return Err(Error::Domain("slope direction needs two distinct points".into()));
        }
        let dz = self.sample(to)? - self.sample(from)?;
        Ok((dz / dist).atan().to_degrees())
    }
}
