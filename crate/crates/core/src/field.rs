use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldRole {
    Source,
    ObjectArm,
    ReferenceArm,
    Generic,
}

/// Complex amplitudes sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
    role: FieldRole,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<Complex64>, role: FieldRole) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "field has {} values for a grid of {} samples",
                values.len(),
                grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid(format!("field value at sample {j} is not finite")));
        }
        Ok(Self { grid, values, role })
    }

    pub fn from_fn(grid: Grid, role: FieldRole, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.coords().map(f).collect();
        Self::new(grid, values, role)
    }

    pub fn zeros(grid: Grid, role: FieldRole) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            role,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn role(&self) -> FieldRole {
        self.role
    }

    pub fn with_role(mut self, role: FieldRole) -> Self {
        self.role = role;
        self
    }

    /// `sum |E|^2 dx`.
    pub fn power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn scale(mut self, factor: Complex64) -> Self {
        for v in &mut self.values {
            *v *= factor;
        }
        self
    }

    /// Pointwise product, e.g. with a sampled transmittance.
    pub fn multiply(mut self, factors: &[Complex64]) -> Result<Self> {
        if factors.len() != self.values.len() {
            return Err(invalid("multiplier length does not match the field"));
        }
        for (v, t) in self.values.iter_mut().zip(factors) {
            *v *= t;
        }
        Ok(self)
    }
}
