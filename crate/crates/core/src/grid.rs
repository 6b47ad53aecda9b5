//! Uniformly sampled transverse axis.

use crate::error::{invalid, Result};

/// Midpoint-sampled axis: `x_j = center - half_width + (j + 1/2) dx` with
/// `dx = 2 half_width / n_samples`. All lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    center: f64,
    half_width: f64,
    n_samples: usize,
}

impl Grid {
    pub fn new(center: f64, half_width: f64, n_samples: usize) -> Result<Self> {
        if !center.is_finite() {
            return Err(invalid("grid center must be finite"));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(invalid(format!(
                "grid half_width must be positive, got {half_width}"
            )));
        }
        if n_samples < 2 {
            return Err(invalid(format!(
                "grid needs at least 2 samples, got {n_samples}"
            )));
        }
        Ok(Self {
            center,
            half_width,
            n_samples,
        })
    }

    /// Grid with the given spacing whose first sample sits at `first`.
    pub fn from_spacing(first: f64, spacing: f64, n_samples: usize) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(invalid(format!("grid spacing must be positive, got {spacing}")));
        }
        let half_width = 0.5 * spacing * n_samples as f64;
        Self::new(first - 0.5 * spacing + half_width, half_width, n_samples)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_samples
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n_samples as f64
    }

    pub fn width(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn coord(&self, j: usize) -> f64 {
        self.center - self.half_width + (j as f64 + 0.5) * self.spacing()
    }

    pub fn first(&self) -> f64 {
        self.coord(0)
    }

    pub fn last(&self) -> f64 {
        self.coord(self.n_samples - 1)
    }

    pub fn coords(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_samples).map(move |j| self.coord(j))
    }

    /// Same spacing to within a relative `1e-12`.
    pub fn same_spacing(&self, other: &Grid) -> bool {
        let (a, b) = (self.spacing(), other.spacing());
        (a - b).abs() <= 1e-12 * a.max(b)
    }

    /// Contiguous sub-grid `[start, start + len)` with the same spacing.
    pub fn window(&self, start: usize, len: usize) -> Result<Grid> {
        if len < 2 || start + len > self.n_samples {
            return Err(invalid(format!(
                "window [{start}, {}) outside grid of {} samples",
                start + len,
                self.n_samples
            )));
        }
        Grid::from_spacing(self.coord(start), self.spacing(), len)
    }

    /// Smallest window covering `[lo, hi]` (clamped to the grid), padded by
    /// `pad` samples on each side.
    pub fn window_covering(&self, lo: f64, hi: f64, pad: usize) -> Result<Grid> {
        let dx = self.spacing();
        let start_f = ((lo - self.first()) / dx).floor() - pad as f64;
        let end_f = ((hi - self.first()) / dx).ceil() + pad as f64;
        let start = start_f.max(0.0) as usize;
        let end = (end_f.max(0.0) as usize).min(self.n_samples - 1);
        if end <= start {
            return Err(invalid(format!(
                "interval [{lo}, {hi}] does not intersect the grid"
            )));
        }
        self.window(start, end - start + 1)
    }

    /// Signed offset `(x - first) / spacing`; integer values land on samples.
    pub fn fractional_index(&self, x: f64) -> f64 {
        (x - self.first()) / self.spacing()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_sample_midpoints() {
        let g = Grid::new(0.0, 5e-3, 4).unwrap();
        let xs: Vec<f64> = g.coords().collect();
        let want = [-3.75e-3, -1.25e-3, 1.25e-3, 3.75e-3];
        for (x, w) in xs.iter().zip(want) {
            assert!((x - w).abs() < 1e-18, "{x} vs {w}");
        }
    }

    #[test]
    fn source_width_spacing() {
        let g = Grid::new(0.0, 5e-3, 1024).unwrap();
        assert!((g.spacing() - 10e-3 / 1024.0).abs() < 1e-20);
        assert!((g.spacing() * 1e6 - 9.766).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(Grid::new(0.0, 5e-3, 0).is_err());
        assert!(Grid::new(0.0, 5e-3, 1).is_err());
        assert!(Grid::new(0.0, 0.0, 16).is_err());
        assert!(Grid::new(0.0, -1.0, 16).is_err());
        assert!(Grid::new(f64::NAN, 1.0, 16).is_err());
    }

    #[test]
    fn coordinates_strictly_increase() {
        let g = Grid::new(1e-3, 2e-3, 37).unwrap();
        let xs: Vec<f64> = g.coords().collect();
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn windows_keep_sample_positions() {
        let g = Grid::new(0.0, 1e-3, 64).unwrap();
        let w = g.window(10, 20).unwrap();
        assert!(w.same_spacing(&g));
        for j in 0..20 {
            assert!((w.coord(j) - g.coord(10 + j)).abs() < 1e-15);
        }
        let c = g.window_covering(-1e-4, 1e-4, 2).unwrap();
        assert!(c.first() <= -1e-4 && c.last() >= 1e-4);
        assert!((g.fractional_index(c.first()).round() - g.fractional_index(c.first())).abs() < 1e-9);
    }
}
