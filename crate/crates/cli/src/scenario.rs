//! Execute a validated scenario and write its outputs.

use std::fs;
use std::path::{Path, PathBuf};

use revdiff_core::ensemble::run_coherent_2d;
use revdiff_core::interferometer::{background_intensity_2d, correlation_analytic_2d};
use revdiff_core::{
    background_intensity, correlation_analytic, detector_ports, imaging_positions, run_coherent, run_ensemble,
    Complex64, EnsembleConfig, Grid, InterferometerSpec, PathLedger, Warning,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{load_config, output_path, to_json, Mode, OutputKind, Quantity, Resolved, ScenarioConfig};
use crate::error::CliError;
use crate::export;

/// Resolved geometry echoed after every run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerEcho {
    #[serde(rename = "Z")]
    pub optical_path: f64,
    #[serde(rename = "Zbar")]
    pub diffraction_length: f64,
    #[serde(rename = "Z_eff")]
    pub effective_diffraction_length: f64,
    /// `None` when the reference arm admits no imaging plane.
    pub z_o2_img: Option<f64>,
}

impl LedgerEcho {
    pub fn summary(&self) -> String {
        let line = |name: &str, v: f64| format!("{name:<9}= {:>10.4} cm  ({v:.16e} m)\n", v * 100.0);
        let mut s = line("Z", self.optical_path);
        s += &line("Zbar", self.diffraction_length);
        s += &line("Z_eff", self.effective_diffraction_length);
        match self.z_o2_img {
            Some(v) => s += &line("z_o2_img", v),
            None => s += "z_o2_img = none\n",
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputBundle {
    pub name: String,
    pub ledger: LedgerEcho,
    pub files: Vec<ManifestEntry>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub directory: PathBuf,
}

impl OutputBundle {
    /// Re-hash every file and compare against the manifest.
    pub fn verify(&self) -> Result<(), CliError> {
        for f in &self.files {
            let path = output_path(&self.directory, &f.path);
            let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
            if sha256_hex(&bytes) != f.sha256 {
                return Err(CliError::Runtime(format!("checksum mismatch for {}", path.display())));
            }
        }
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Result fields on the detector, row-major when two-dimensional.
struct Computed {
    x: Vec<f64>,
    width: usize,
    height: usize,
    correlation: Vec<Complex64>,
    background: Vec<f64>,
    intensity: Option<Vec<f64>>,
    warnings: Vec<Warning>,
}

impl Computed {
    /// The row nearest `y = 0`; the whole result in 1D.
    fn central_row<T: Copy>(&self, values: &[T]) -> Vec<T> {
        let r = self.height / 2;
        values[r * self.width..(r + 1) * self.width].to_vec()
    }
}

fn build_spec(r: &Resolved) -> Result<InterferometerSpec, CliError> {
    let c = &r.config;
    InterferometerSpec::with_tolerance(
        r.ctx,
        c.z_o1,
        c.z_o2,
        r.segments.clone(),
        r.object.clone(),
        c.source.intensity,
        c.source.width,
        r.tolerance,
    )
    .map_err(|e| CliError::from_setup("z_o2", e))
}

fn compute(r: &Resolved, spec: &InterferometerSpec) -> Result<Computed, CliError> {
    let grid = r.grid;
    let x: Vec<f64> = grid.coords().collect();
    let n = grid.len();
    let two_d = r.object.is_two_dimensional();
    let (width, height) = if two_d { (n, n) } else { (n, 1) };
    let setup = |e| CliError::from_setup("grid", e);

    let (correlation, background, intensity, warnings) = match (r.config.mode, two_d) {
        (Mode::Analytic, false) => {
            let c = correlation_analytic(spec, &grid).map_err(setup)?;
            let bg = background_intensity(spec, &grid)?;
            (c.correlation, bg, None, c.warnings)
        }
        (Mode::Analytic, true) => {
            let c = correlation_analytic_2d(spec, &grid, &grid).map_err(setup)?;
            let bg = background_intensity_2d(spec, &grid, &grid)?;
            (c.field.values().to_vec(), bg, None, c.warnings)
        }
        (Mode::Ensemble, _) => {
            let settings = r.config.ensemble.expect("validated");
            let w = spec.source_width();
            // match the detector spacing when the aperture allows it
            let n_source = ((w / grid.spacing()).round() as usize).max(1);
            let source = Grid::new(0.0, w / 2.0, n_source).map_err(setup)?;
            let cfg = EnsembleConfig::new(spec.clone(), source, grid, settings.n_realizations, settings.seed)
                .map_err(|e| CliError::from_setup("ensemble", e))?;
            let est = run_ensemble(&cfg)?;
            let bg = est.background();
            (est.correlation_mean, bg, None, est.warnings)
        }
        (Mode::Coherent, false) => {
            let out = run_coherent(spec, &grid, r.coherent).map_err(|e| CliError::from_setup("source.coherent", e))?;
            (out.cross_term(), out.background(), Some(out.intensity.clone()), out.warnings)
        }
        (Mode::Coherent, true) => {
            let out = run_coherent_2d(spec, &grid, &grid, r.coherent)
                .map_err(|e| CliError::from_setup("source.coherent", e))?;
            let (o, e) = (out.object_field.values(), out.reference_field.values());
            let cross = o.iter().zip(e).map(|(o, e)| e.conj() * o).collect();
            let bg = o.iter().zip(e).map(|(o, e)| o.norm_sqr() + e.norm_sqr()).collect();
            (cross, bg, Some(out.intensity), out.warnings)
        }
    };
    Ok(Computed {
        x,
        width,
        height,
        correlation,
        background,
        intensity,
        warnings,
    })
}

fn ledger_echo(spec: &InterferometerSpec, tolerance: f64) -> Result<LedgerEcho, CliError> {
    let r: PathLedger = spec.reference_ledger();
    let z_eff = spec
        .effective_diffraction_length()
        .map_err(|e| CliError::from_setup("z_o1", e))?;
    let z_o2_img = imaging_positions(&r, spec.z_o1() + spec.z_o2(), tolerance)
        .ok()
        .map(|p| p.z_o2);
    Ok(LedgerEcho {
        optical_path: r.optical_path,
        diffraction_length: r.diffraction_length,
        effective_diffraction_length: z_eff,
        z_o2_img,
    })
}

fn write(dir: &Path, rel: &str, bytes: &[u8]) -> Result<ManifestEntry, CliError> {
    let path = output_path(dir, rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    Ok(ManifestEntry {
        path: rel.to_string(),
        sha256: sha256_hex(bytes),
        bytes: bytes.len() as u64,
    })
}

/// Validate, compute and write a scenario. Relative raster paths resolve
/// against `config_dir`; outputs land under `out_dir`.
pub fn run_config(config: &ScenarioConfig, config_dir: &Path, out_dir: &Path) -> Result<OutputBundle, CliError> {
    let resolved = config.resolve(config_dir)?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let spec = build_spec(&resolved)?;
    let ledger = ledger_echo(&spec, resolved.tolerance)?;
    let computed = compute(&resolved, &spec)?;
    let ports = detector_ports(&computed.correlation, &computed.background)?;

    let mut files = Vec::new();
    for o in &resolved.config.outputs {
        let bytes = match o.kind {
            OutputKind::CorrelationCsv => {
                export::correlation_csv(&computed.x, &computed.central_row(&computed.correlation)).into_bytes()
            }
            OutputKind::PortsCsv => export::ports_csv(
                &computed.x,
                &computed.central_row(&ports.i_plus),
                &computed.central_row(&ports.i_minus),
            )
            .into_bytes(),
            OutputKind::ImagePgm => {
                let quantity = o.quantity.unwrap_or(match resolved.config.mode {
                    Mode::Coherent => Quantity::Intensity,
                    _ => Quantity::Abs,
                });
                let values: Vec<f64> = match quantity {
                    Quantity::Abs => computed.correlation.iter().map(|c| c.norm()).collect(),
                    Quantity::Re => computed.correlation.iter().map(|c| c.re).collect(),
                    Quantity::Abs2 => computed.correlation.iter().map(|c| c.norm_sqr()).collect(),
                    Quantity::IPlus => ports.i_plus.clone(),
                    Quantity::IMinus => ports.i_minus.clone(),
                    Quantity::Diff => ports.difference(),
                    Quantity::Sum => ports.sum(),
                    Quantity::Intensity => computed.intensity.clone().expect("coherent mode"),
                };
                export::pgm(computed.width, computed.height, &values)
            }
        };
        files.push(write(out_dir, &o.path, &bytes)?);
    }
    files.push(write(out_dir, "scenario.json", to_json(&resolved.config).as_bytes())?);

    let bundle = OutputBundle {
        name: resolved.config.name.clone(),
        ledger,
        files,
        warnings: computed.warnings.iter().map(|w| w.to_string()).collect(),
        directory: out_dir.to_path_buf(),
    };
    let mut manifest = serde_json::to_string_pretty(&bundle).expect("manifest serializes");
    manifest.push('\n');
    let path = out_dir.join("manifest.json");
    fs::write(&path, manifest).map_err(|e| CliError::io(&path, e))?;
    Ok(bundle)
}

/// Run a config file; outputs default to the file's directory.
pub fn run_scenario(config_path: &Path, out_dir: Option<&Path>) -> Result<OutputBundle, CliError> {
    let config = load_config(config_path)?;
    let config_dir = match config_path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    run_config(&config, config_dir, out_dir.unwrap_or(config_dir))
}
