//! Declarative scenario files.

use std::path::{Path, PathBuf};

use revdiff_core::transmittance::read_pgm_file;
use revdiff_core::{
    double_slit, phase_holes, raster_to_transmittance, uniform, CoherentSource, Complex64, Grid, MediumSegment,
    OpticsContext, Transmittance, DEFAULT_COHERENCE_TOLERANCE,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analytic,
    Ensemble,
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub length: f64,
    pub index: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectConfig {
    DoubleSlit {
        width: f64,
        spacing: f64,
    },
    PhaseHoles {
        hole_width: f64,
        separation: f64,
        phase: f64,
    },
    /// Amplitude mask from a P5 PGM file or from inline rows of `#` (open)
    /// and `.` (opaque).
    Raster {
        pitch: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rows: Option<Vec<String>>,
    },
    Uniform {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoherentConfig {
    PlaneWave,
    Pinhole { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub intensity: f64,
    pub width: f64,
    /// Illumination for coherent mode; plane wave when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherent: Option<CoherentConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSettings {
    pub n_realizations: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    CorrelationCsv,
    PortsCsv,
    ImagePgm,
}

/// Scalar shown in an image export.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `|C|`
    Abs,
    /// `Re C`
    Re,
    /// `|C|^2`
    Abs2,
    IPlus,
    IMinus,
    /// `I+ - I-`
    Diff,
    /// `I+ + I-`
    Sum,
    /// `|E_o + E_r|^2`, coherent mode only.
    Intensity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub kind: OutputKind,
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<Quantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub mode: Mode,
    pub wavelength: f64,
    pub z_o1: f64,
    pub z_o2: f64,
    pub reference_segments: Vec<SegmentConfig>,
    pub object: ObjectConfig,
    pub grid: GridConfig,
    pub source: SourceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSettings>,
    /// Allowed `|z_o1 + z_o2 - Z|` in metres.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence_tolerance: Option<f64>,
    pub outputs: Vec<OutputConfig>,
}

/// Parse JSON text; syntax and shape errors carry line and column.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

pub fn to_json(config: &ScenarioConfig) -> String {
    let mut s = serde_json::to_string_pretty(config).expect("config serializes");
    s.push('\n');
    s
}

fn positive(value: f64, field: &str) -> Result<(), CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::validation(field, format!("must be positive, got {value}")))
    }
}

/// Validated scenario with library objects built.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub ctx: OpticsContext,
    pub segments: Vec<MediumSegment>,
    pub object: Transmittance,
    pub grid: Grid,
    pub coherent: CoherentSource,
    pub tolerance: f64,
    /// The config with file references made absolute.
    pub config: ScenarioConfig,
}

impl ScenarioConfig {
    /// Check every field; relative raster paths resolve against `base`.
    pub fn resolve(&self, base: &Path) -> Result<Resolved, CliError> {
        if self.name.trim().is_empty() {
            return Err(CliError::validation("name", "must not be empty"));
        }
        positive(self.wavelength, "wavelength")?;
        positive(self.z_o1, "z_o1")?;
        positive(self.z_o2, "z_o2")?;
        if self.reference_segments.is_empty() {
            return Err(CliError::validation("reference_segments", "at least one segment is required"));
        }
        let mut segments = Vec::with_capacity(self.reference_segments.len());
        for (i, s) in self.reference_segments.iter().enumerate() {
            positive(s.length, &format!("reference_segments[{i}].length"))?;
            let seg = MediumSegment::new(s.length, s.index)
                .map_err(|e| CliError::from_setup(&format!("reference_segments[{i}].index"), e))?;
            segments.push(seg);
        }
        if self.grid.n_samples == 0 {
            return Err(CliError::validation("grid.n_samples", "must be at least 1"));
        }
        positive(self.grid.half_width, "grid.half_width")?;
        positive(self.source.intensity, "source.intensity")?;
        positive(self.source.width, "source.width")?;
        let tolerance = self.coherence_tolerance.unwrap_or(DEFAULT_COHERENCE_TOLERANCE);
        if !(tolerance >= 0.0) || !tolerance.is_finite() {
            return Err(CliError::validation("coherence_tolerance", "must be non-negative"));
        }
        match (self.mode, &self.ensemble) {
            (Mode::Ensemble, None) => {
                return Err(CliError::validation("ensemble", "required in ensemble mode"));
            }
            (Mode::Ensemble, Some(e)) if e.n_realizations == 0 => {
                return Err(CliError::validation("ensemble.n_realizations", "must be at least 1"));
            }
            _ => {}
        }
        let coherent = match self.source.coherent {
            None | Some(CoherentConfig::PlaneWave) => CoherentSource::PlaneWave,
            Some(CoherentConfig::Pinhole { width }) => {
                positive(width, "source.coherent.width")?;
                CoherentSource::Pinhole { width }
            }
        };
        if self.outputs.is_empty() {
            return Err(CliError::validation("outputs", "at least one output is required"));
        }
        for (i, o) in self.outputs.iter().enumerate() {
            if o.path.trim().is_empty() {
                return Err(CliError::validation(format!("outputs[{i}].path"), "must not be empty"));
            }
            if o.quantity.is_some() && o.kind != OutputKind::ImagePgm {
                return Err(CliError::validation(format!("outputs[{i}].quantity"), "only image_pgm takes a quantity"));
            }
            if o.quantity == Some(Quantity::Intensity) && self.mode != Mode::Coherent {
                return Err(CliError::validation(format!("outputs[{i}].quantity"), "intensity needs coherent mode"));
            }
            if ["manifest.json", "scenario.json"].contains(&o.path.as_str()) {
                return Err(CliError::validation(format!("outputs[{i}].path"), "name is reserved for the run record"));
            }
            if self.outputs[..i].iter().any(|p| p.path == o.path) {
                return Err(CliError::validation(format!("outputs[{i}].path"), "duplicate output path"));
            }
        }

        let ctx = OpticsContext::new(self.wavelength).map_err(|e| CliError::from_setup("wavelength", e))?;
        let grid = Grid::new(0.0, self.grid.half_width, self.grid.n_samples)
            .map_err(|e| CliError::from_setup("grid", e))?;
        let mut config = self.clone();
        let object = self.build_object(base, &mut config)?;
        if self.mode == Mode::Ensemble && object.is_two_dimensional() {
            return Err(CliError::validation(
                "object",
                "ensemble mode supports one-dimensional objects (single-row rasters)",
            ));
        }
        Ok(Resolved {
            ctx,
            segments,
            object,
            grid,
            coherent,
            tolerance,
            config,
        })
    }

    fn build_object(&self, base: &Path, resolved: &mut ScenarioConfig) -> Result<Transmittance, CliError> {
        let setup = |e| CliError::from_setup("object", e);
        match &self.object {
            ObjectConfig::DoubleSlit { width, spacing } => {
                positive(*width, "object.width")?;
                positive(*spacing, "object.spacing")?;
                double_slit(*width, *spacing).map_err(setup)
            }
            ObjectConfig::PhaseHoles {
                hole_width,
                separation,
                phase,
            } => {
                positive(*hole_width, "object.hole_width")?;
                positive(*separation, "object.separation")?;
                if !phase.is_finite() {
                    return Err(CliError::validation("object.phase", "must be finite"));
                }
                phase_holes(*hole_width, *separation, *phase).map_err(setup)
            }
            ObjectConfig::Uniform { re, im } => {
                let c = Complex64::new(*re, *im);
                if !(c.norm() <= 1.0) {
                    return Err(CliError::validation("object", "uniform transmittance needs |T| <= 1"));
                }
                uniform(c).map_err(setup)
            }
            ObjectConfig::Raster { pitch, path, rows } => {
                positive(*pitch, "object.pitch")?;
                let (width, pixels) = match (path, rows) {
                    (Some(p), None) => {
                        let full = absolute(base, p);
                        let (w, _, px) = read_pgm_file(&full).map_err(|e| match e {
                            revdiff_core::OpticsError::Io(io) => CliError::validation("object.path", format!("{}: {io}", full.display())),
                            other => CliError::validation("object.path", other.to_string()),
                        })?;
                        resolved.object = ObjectConfig::Raster {
                            pitch: *pitch,
                            path: Some(full.to_string_lossy().into_owned()),
                            rows: None,
                        };
                        (w, px)
                    }
                    (None, Some(rows)) => inline_raster(rows)?,
                    _ => {
                        return Err(CliError::validation("object", "raster needs exactly one of `path` or `rows`"));
                    }
                };
                raster_to_transmittance(pixels, width, *pitch).map_err(setup)
            }
        }
    }
}

fn absolute(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn inline_raster(rows: &[String]) -> Result<(usize, Vec<u8>), CliError> {
    let width = rows.first().map(|r| r.chars().count()).unwrap_or(0);
    if width == 0 {
        return Err(CliError::validation("object.rows", "raster is empty"));
    }
    let mut pixels = Vec::with_capacity(width * rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.chars().count() != width {
            return Err(CliError::validation(format!("object.rows[{i}]"), format!("expected {width} pixels")));
        }
        for ch in row.chars() {
            pixels.push(match ch {
                '#' => 255,
                '.' => 0,
                other => {
                    return Err(CliError::validation(
                        format!("object.rows[{i}]"),
                        format!("unexpected character {other:?}, use '#' or '.'"),
                    ))
                }
            });
        }
    }
    Ok((width, pixels))
}

/// Resolve an output path: relative paths land under `base`.
pub fn output_path(base: &Path, path: &str) -> PathBuf {
    absolute(base, path)
}
