#![allow(dead_code)]

use revdiff_core::{
    double_slit, Complex64, Grid, InterferometerSpec, MediumSegment, OpticsContext, PathLedger, Transmittance,
};

pub const LAMBDA: f64 = 589.3e-9;
pub const AIR: f64 = 0.183;
pub const GLASS: f64 = 0.155;
pub const N_GLASS: f64 = 1.5163;
pub const SLIT_WIDTH: f64 = 125e-6;
pub const SLIT_SPACING: f64 = 300e-6;

pub fn ctx() -> OpticsContext {
    OpticsContext::new(LAMBDA).unwrap()
}

pub fn reference_arm() -> Vec<MediumSegment> {
    vec![
        MediumSegment::vacuum(AIR).unwrap(),
        MediumSegment::new(GLASS, N_GLASS).unwrap(),
    ]
}

pub fn reference_ledger() -> PathLedger {
    revdiff_core::ledger(&reference_arm()).unwrap()
}

pub fn slit() -> Transmittance {
    double_slit(SLIT_WIDTH, SLIT_SPACING).unwrap()
}

/// Object at `z_o1` with the detector placed for equal optical path.
pub fn spec_at(z_o1: f64, object: Transmittance, source_width: f64) -> InterferometerSpec {
    let z = reference_ledger().optical_path;
    InterferometerSpec::new(ctx(), z_o1, z - z_o1, reference_arm(), object, 1.0, source_width).unwrap()
}

pub fn imaging_spec(object: Transmittance, source_width: f64) -> InterferometerSpec {
    spec_at(reference_ledger().diffraction_length, object, source_width)
}

/// Cell-averaged transmittance: what the grid can represent of `T`.
pub fn band_limited(t: &Transmittance, grid: &Grid) -> Vec<f64> {
    const SUB: usize = 16;
    let dx = grid.spacing();
    grid.coords()
        .map(|x| {
            (0..SUB)
                .map(|k| t.eval(x + ((k as f64 + 0.5) / SUB as f64 - 0.5) * dx).re)
                .sum::<f64>()
                / SUB as f64
        })
        .collect()
}

pub fn gaussian(grid: &Grid, center: f64, sigma: f64) -> Vec<Complex64> {
    grid.coords()
        .map(|x| Complex64::new((-(x - center).powi(2) / (2.0 * sigma * sigma)).exp(), 0.0))
        .collect()
}

pub fn power(values: &[Complex64], dx: f64) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx
}
