//! Built-in scenarios for the glass-rod interferometer: imaging of
//! amplitude and phase objects, incoherent vs coherent illumination, and a
//! sweep of the double slit through the imaging plane.

use revdiff_core::{ledger, MediumSegment};

use crate::config::{
    CoherentConfig, EnsembleSettings, GridConfig, Mode, ObjectConfig, OutputConfig, OutputKind, Quantity,
    ScenarioConfig, SegmentConfig, SourceConfig,
};

const WAVELENGTH: f64 = 589.3e-9;
const AIR: f64 = 0.183;
const GLASS: f64 = 0.155;
const N_GLASS: f64 = 1.5163;
const SLIT_WIDTH: f64 = 125e-6;
const SLIT_SPACING: f64 = 300e-6;
const SOURCE_WIDTH: f64 = 10e-3;

/// Two blocky glyphs used as the amplitude mask.
const GLYPHS: [&str; 9] = [
    "....#......#########",
    "#########..#.......#",
    "#...#...#..#.#####.#",
    "#...#...#..#...#...#",
    "#########..#.#####.#",
    "....#......#...#.#.#",
    "....#......#.#####.#",
    "....#......#.......#",
    "....#......#########",
];

pub const NAMES: [&str; 9] = [
    "fig2_amplitude",
    "fig2_phase",
    "fig3_incoherent",
    "fig3_coherent",
    "fig4a",
    "fig4b",
    "fig4c",
    "fig4d",
    "fig4e",
];

fn segments() -> Vec<SegmentConfig> {
    vec![
        SegmentConfig {
            length: AIR,
            index: 1.0,
        },
        SegmentConfig {
            length: GLASS,
            index: N_GLASS,
        },
    ]
}

/// `(Z, Zbar)` of the glass-rod arm.
fn reference() -> (f64, f64) {
    let segs: Vec<MediumSegment> = segments()
        .iter()
        .map(|s| MediumSegment::new(s.length, s.index).expect("valid segment"))
        .collect();
    let r = ledger(&segs).expect("non-empty");
    (r.optical_path, r.diffraction_length)
}

fn output(kind: OutputKind, path: &str, quantity: Option<Quantity>) -> OutputConfig {
    OutputConfig {
        kind,
        path: path.into(),
        quantity,
    }
}

fn slit() -> ObjectConfig {
    ObjectConfig::DoubleSlit {
        width: SLIT_WIDTH,
        spacing: SLIT_SPACING,
    }
}

fn base(name: &str, mode: Mode, z_o1: f64, object: ObjectConfig) -> ScenarioConfig {
    let (z, _) = reference();
    ScenarioConfig {
        name: name.into(),
        mode,
        wavelength: WAVELENGTH,
        z_o1,
        z_o2: z - z_o1,
        reference_segments: segments(),
        object,
        grid: GridConfig {
            half_width: 2e-3,
            n_samples: 1024,
        },
        source: SourceConfig {
            intensity: 1.0,
            width: SOURCE_WIDTH,
            coherent: None,
        },
        ensemble: None,
        coherence_tolerance: None,
        outputs: vec![
            output(OutputKind::CorrelationCsv, "correlation.csv", None),
            output(OutputKind::PortsCsv, "ports.csv", None),
        ],
    }
}

/// The imaging plane sits at `z_o1 = Zbar`, about 28.5 cm.
fn imaging(name: &str, mode: Mode, object: ObjectConfig) -> ScenarioConfig {
    base(name, mode, reference().1, object)
}

pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    let ccd = |mut c: ScenarioConfig| {
        c.outputs.push(output(OutputKind::ImagePgm, "ccd_plus.pgm", Some(Quantity::IPlus)));
        c.outputs.push(output(OutputKind::ImagePgm, "ccd_minus.pgm", Some(Quantity::IMinus)));
        c.outputs.push(output(OutputKind::ImagePgm, "difference.pgm", Some(Quantity::Diff)));
        c.outputs.push(output(OutputKind::ImagePgm, "sum.pgm", Some(Quantity::Sum)));
        c
    };
    let fig4 = |name: &str, z_o1_cm: f64| {
        let mut c = base(name, Mode::Analytic, z_o1_cm * 1e-2, slit());
        c.outputs.push(output(OutputKind::ImagePgm, "pattern.pgm", Some(Quantity::Abs)));
        c
    };
    let config = match name {
        "fig2_amplitude" => {
            let mut c = imaging(
                name,
                Mode::Analytic,
                ObjectConfig::Raster {
                    pitch: 60e-6,
                    path: None,
                    rows: Some(GLYPHS.iter().map(|r| r.to_string()).collect()),
                },
            );
            c.grid = GridConfig {
                half_width: 1e-3,
                n_samples: 256,
            };
            // the squared 2D kernel prefactor puts the image in Im C; a
            // quarter-wave path offset turns it back into the port signal
            c.z_o2 += WAVELENGTH / 4.0;
            ccd(c)
        }
        "fig2_phase" => ccd(imaging(
            name,
            Mode::Analytic,
            ObjectConfig::PhaseHoles {
                hole_width: SLIT_WIDTH,
                separation: SLIT_SPACING,
                phase: std::f64::consts::PI,
            },
        )),
        "fig3_incoherent" => {
            let mut c = imaging(name, Mode::Ensemble, slit());
            c.ensemble = Some(EnsembleSettings {
                n_realizations: 2000,
                seed: 1,
            });
            ccd(c)
        }
        "fig3_coherent" => {
            let mut c = imaging(name, Mode::Coherent, slit());
            c.source.coherent = Some(CoherentConfig::Pinhole { width: 100e-6 });
            c.outputs.push(output(OutputKind::ImagePgm, "intensity.pgm", Some(Quantity::Intensity)));
            ccd(c)
        }
        "fig4a" => fig4(name, 31.0),
        "fig4b" => {
            let mut c = imaging(name, Mode::Analytic, slit());
            c.outputs.push(output(OutputKind::ImagePgm, "pattern.pgm", Some(Quantity::Abs)));
            c
        }
        "fig4c" => fig4(name, 24.2),
        "fig4d" => fig4(name, 20.0),
        "fig4e" => fig4(name, 10.6),
        _ => return None,
    };
    Some(config)
}

pub fn builtin_scenarios() -> Vec<ScenarioConfig> {
    NAMES.iter().map(|n| builtin(n).expect("listed builtin")).collect()
}
