//! Two-dimensional fields propagated separably: the paraxial kernel factors
//! into an x part and a y part, with the global phase applied once.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result, Warning};
use crate::grid::Grid;
use crate::optics::OpticsContext;
use crate::propagate::{Method, Propagator};

/// Row-major samples; row 0 is the largest `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2 {
    grid_x: Grid,
    grid_y: Grid,
    values: Vec<Complex64>,
}

impl ComplexField2 {
    pub fn new(grid_x: Grid, grid_y: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid_x.len() * grid_y.len() {
            return Err(invalid(format!(
                "2D field has {} values for {}x{} samples",
                values.len(),
                grid_x.len(),
                grid_y.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("2D field contains non-finite values"));
        }
        Ok(Self {
            grid_x,
            grid_y,
            values,
        })
    }

    pub fn grid_x(&self) -> &Grid {
        &self.grid_x
    }

    pub fn grid_y(&self) -> &Grid {
        &self.grid_y
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn width(&self) -> usize {
        self.grid_x.len()
    }

    pub fn height(&self) -> usize {
        self.grid_y.len()
    }

    pub fn scale(mut self, factor: Complex64) -> Self {
        for v in &mut self.values {
            *v *= factor;
        }
        self
    }

    pub fn power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid_x.spacing() * self.grid_y.spacing()
    }
}

/// Propagate over optical path `z` and diffraction length `zbar` in both
/// transverse directions.
pub fn propagate_2d(
    ctx: &OpticsContext,
    field: &ComplexField2,
    z: f64,
    zbar: f64,
    method: Method,
) -> Result<(ComplexField2, Vec<Warning>)> {
    let (nx, ny) = (field.width(), field.height());
    let along_x = Propagator::new(ctx, &field.grid_x, &field.grid_x, z, zbar, method)?;
    let along_y = Propagator::new(ctx, &field.grid_y, &field.grid_y, 0.0, zbar, method)?;
    let mut warnings: Vec<Warning> = along_x.warnings().to_vec();
    for w in along_y.warnings() {
        if !warnings.contains(w) {
            warnings.push(w.clone());
        }
    }

    let rows: Vec<Vec<Complex64>> = field
        .values
        .par_chunks(nx)
        .map(|row| along_x.apply(row))
        .collect();
    // row index runs downward in y; reverse into grid order and back
    let cols: Vec<Vec<Complex64>> = (0..nx)
        .into_par_iter()
        .map(|c| {
            let column: Vec<Complex64> = (0..ny).map(|r| rows[ny - 1 - r][c]).collect();
            along_y.apply(&column)
        })
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); nx * ny];
    for (c, column) in cols.iter().enumerate() {
        for (k, v) in column.iter().enumerate() {
            values[(ny - 1 - k) * nx + c] = *v;
        }
    }
    Ok((ComplexField2::new(field.grid_x, field.grid_y, values)?, warnings))
}
