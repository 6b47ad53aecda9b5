//! Transmittance objects `T(x)` placed in the object arm.

use num_complex::Complex64;

use crate::error::{invalid, OpticsError, Result};
use crate::grid::Grid;

/// Grayscale amplitude mask centered on the optical axis. Row 0 is the top
/// row (largest y).
#[derive(Debug, Clone, PartialEq)]
pub struct RasterMask {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
    pitch: f64,
}

impl RasterMask {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    fn column(&self, x: f64) -> Option<usize> {
        let u = (x + 0.5 * self.width as f64 * self.pitch) / self.pitch;
        (u >= 0.0 && u < self.width as f64).then(|| u as usize)
    }

    fn row(&self, y: f64) -> Option<usize> {
        let v = (0.5 * self.height as f64 * self.pitch - y) / self.pitch;
        (v >= 0.0 && v < self.height as f64).then(|| v as usize)
    }

    fn amplitude(&self, x: f64, y: f64) -> f64 {
        match (self.column(x), self.row(y)) {
            (Some(c), Some(r)) => self.pixels[r * self.width + c] as f64 / 255.0,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transmittance {
    /// Two open slits of width `width` centered at `±spacing/2`.
    DoubleSlit { width: f64, spacing: f64 },
    /// Two holes at `±separation/2`; the one at `+separation/2` carries
    /// the extra phase.
    PhaseHoles {
        width: f64,
        separation: f64,
        phase: f64,
    },
    Raster(RasterMask),
    /// Constant over the whole (unbounded) plane.
    Uniform(Complex64),
}

fn in_aperture(x: f64, center: f64, width: f64) -> bool {
    (x - center).abs() < 0.5 * width
}

fn check_pair(width: f64, spacing: f64) -> Result<()> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(invalid(format!("aperture width must be positive, got {width}")));
    }
    if !(spacing.is_finite()) || width >= spacing {
        return Err(OpticsError::OverlappingApertures { width, spacing });
    }
    Ok(())
}

/// Two-slit amplitude mask: `T = 1` on `|x ∓ d/2| < b/2`, else 0.
pub fn double_slit(width: f64, spacing: f64) -> Result<Transmittance> {
    check_pair(width, spacing)?;
    Ok(Transmittance::DoubleSlit { width, spacing })
}

/// Two-hole phase object: `T = 1` on the first hole and `exp(i phase)` on the second.
pub fn phase_holes(width: f64, separation: f64, phase: f64) -> Result<Transmittance> {
    check_pair(width, separation)?;
    if !phase.is_finite() {
        return Err(invalid("hole phase must be finite"));
    }
    Ok(Transmittance::PhaseHoles {
        width,
        separation,
        phase,
    })
}

/// Amplitude mask from 8-bit grayscale pixels (`pixel / 255`, zero phase),
/// row-major with `width` columns.
pub fn raster_to_transmittance(pixels: Vec<u8>, width: usize, pitch: f64) -> Result<Transmittance> {
    if pixels.is_empty() || width == 0 {
        return Err(invalid("raster is empty"));
    }
    if pixels.len() % width != 0 {
        return Err(invalid(format!(
            "raster of {} pixels is not a multiple of width {width}",
            pixels.len()
        )));
    }
    if !(pitch > 0.0) || !pitch.is_finite() {
        return Err(invalid(format!("raster pitch must be positive, got {pitch}")));
    }
    let height = pixels.len() / width;
    Ok(Transmittance::Raster(RasterMask {
        width,
        height,
        pixels,
        pitch,
    }))
}

pub fn uniform(value: Complex64) -> Result<Transmittance> {
    if !(value.norm() <= 1.0 + 1e-12) {
        return Err(invalid(format!("uniform transmittance |{value}| exceeds 1")));
    }
    Ok(Transmittance::Uniform(value))
}

impl Transmittance {
    /// `T(x)`; multi-row rasters are read along their middle row.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_2d(x, 0.0)
    }

    /// `T(x, y)`; one-dimensional objects are invariant along `y`.
    pub fn eval_2d(&self, x: f64, y: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Transmittance::DoubleSlit { width, spacing } => {
                let open = in_aperture(x, -0.5 * spacing, *width) || in_aperture(x, 0.5 * spacing, *width);
                if open {
                    one
                } else {
                    zero
                }
            }
            Transmittance::PhaseHoles {
                width,
                separation,
                phase,
            } => {
                if in_aperture(x, -0.5 * separation, *width) {
                    one
                } else if in_aperture(x, 0.5 * separation, *width) {
                    Complex64::from_polar(1.0, *phase)
                } else {
                    zero
                }
            }
            // a single row is a one-dimensional mask
            Transmittance::Raster(mask) if mask.height == 1 => Complex64::new(mask.amplitude(x, 0.0), 0.0),
            Transmittance::Raster(mask) => Complex64::new(mask.amplitude(x, y), 0.0),
            Transmittance::Uniform(c) => *c,
        }
    }

    pub fn sample(&self, grid: &Grid) -> Vec<Complex64> {
        grid.coords().map(|x| self.eval(x)).collect()
    }

    /// Row-major samples on `grid_x × grid_y`, first row at the largest `y`.
    pub fn sample_2d(&self, grid_x: &Grid, grid_y: &Grid) -> Vec<Complex64> {
        let ny = grid_y.len();
        (0..ny)
            .flat_map(|r| {
                let y = grid_y.coord(ny - 1 - r);
                grid_x.coords().map(move |x| self.eval_2d(x, y))
            })
            .collect()
    }

    /// Closed x-interval outside which `T == 0`; `None` when unbounded.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Transmittance::DoubleSlit { width, spacing } => {
                let h = 0.5 * (spacing + width);
                Some((-h, h))
            }
            Transmittance::PhaseHoles {
                width, separation, ..
            } => {
                let h = 0.5 * (separation + width);
                Some((-h, h))
            }
            Transmittance::Raster(m) => {
                let h = 0.5 * m.width as f64 * m.pitch;
                Some((-h, h))
            }
            Transmittance::Uniform(_) => None,
        }
    }

    /// Smallest structural length: aperture width or gap, or the raster pitch.
    pub fn min_feature(&self) -> Option<f64> {
        match self {
            Transmittance::DoubleSlit { width, spacing } => Some(width.min(spacing - width)),
            Transmittance::PhaseHoles {
                width, separation, ..
            } => Some(width.min(separation - width)),
            Transmittance::Raster(m) => Some(m.pitch),
            Transmittance::Uniform(_) => None,
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Transmittance::PhaseHoles { phase, .. } => phase.sin() == 0.0,
            Transmittance::Uniform(c) => c.im == 0.0,
            _ => true,
        }
    }

    pub fn is_two_dimensional(&self) -> bool {
        matches!(self, Transmittance::Raster(m) if m.height > 1)
    }
}

/// Parse a binary PGM (`P5`, maxval 255).
pub fn read_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let mut pos = 0;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(OpticsError::RasterFormat("truncated PGM header".into()));
        }
        tokens.push(std::str::from_utf8(&bytes[start..pos]).unwrap_or(""));
    }
    if tokens[0] != "P5" {
        return Err(OpticsError::RasterFormat(format!(
            "expected binary PGM magic P5, got {:?}",
            tokens[0]
        )));
    }
    let num = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| OpticsError::RasterFormat(format!("bad PGM {what}: {s:?}")))
    };
    let width = num(tokens[1], "width")?;
    let height = num(tokens[2], "height")?;
    let maxval = num(tokens[3], "maxval")?;
    if maxval != 255 {
        return Err(OpticsError::RasterFormat(format!(
            "only maxval 255 is supported, got {maxval}"
        )));
    }
    // single whitespace byte separates header and raster
    pos += 1;
    let n = width * height;
    if n == 0 {
        return Err(OpticsError::RasterFormat("empty PGM raster".into()));
    }
    if bytes.len() < pos + n {
        return Err(OpticsError::RasterFormat(format!(
            "PGM raster truncated: need {n} bytes, have {}",
            bytes.len().saturating_sub(pos)
        )));
    }
    Ok((width, height, bytes[pos..pos + n].to_vec()))
}

pub fn read_pgm_file(path: &std::path::Path) -> Result<(usize, usize, Vec<u8>)> {
    read_pgm(&std::fs::read(path)?)
}
