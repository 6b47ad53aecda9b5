use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, OpticsError>;

#[derive(Debug, Error)]
pub enum OpticsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The Fresnel kernel has no finite value at zero diffraction length; the
    /// caller should use the delta (identity) path instead.
    #[error("degenerate kernel: diffraction length is zero, use the delta-kernel path")]
    DegenerateKernel,

    #[error("apertures overlap: width {width} m is not smaller than spacing {spacing} m")]
    OverlappingApertures { width: f64, spacing: f64 },

    #[error(
        "unequal optical paths: object arm {object_arm} m vs reference arm {reference_arm} m \
         differ by {mismatch} m, beyond the coherence tolerance {tolerance} m \
         (the equal-optical-path condition is required for interference)"
    )]
    UnequalPath {
        object_arm: f64,
        reference_arm: f64,
        mismatch: f64,
        tolerance: f64,
    },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("grid spacing {spacing} m does not resolve the object's smallest feature {feature} m (need spacing <= feature/4)")]
    Resolution { spacing: f64, feature: f64 },

    #[error("grids are incompatible: {0}")]
    GridMismatch(String),

    #[error("negative port intensity at sample {index}: background/2 = {half_background}, |Re correlation| = {interference}")]
    NegativeIntensity {
        index: usize,
        half_background: f64,
        interference: f64,
    },

    #[error("raster format: {0}")]
    RasterFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> OpticsError {
    OpticsError::InvalidArgument(msg.into())
}

/// Non-fatal numerical diagnostics attached to results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// The space-domain chirp is undersampled for the largest source-to-output
    /// offset, and the grid is too fine for the transfer-function form.
    Aliasing {
        diffraction_length: f64,
        max_offset: f64,
        clean_offset: f64,
    },
    /// Arms differ in optical path, but within the coherence tolerance.
    PathMismatch { mismatch: f64, tolerance: f64 },
    /// The finite source blurs features smaller than a few point-spread widths.
    Resolution { feature: f64, psf_width: f64 },
    /// The standard error exceeds the estimated mean at every sample.
    LowSignificance { n_realizations: usize },
    /// Grids with unequal spacing were bridged with direct quadrature.
    DirectFallback { reason: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Aliasing {
                diffraction_length,
                max_offset,
                clean_offset,
            } => write!(
                f,
                "aliasing: chirp for diffraction length {diffraction_length:.6e} m is undersampled \
                 beyond offset {clean_offset:.6e} m (largest offset {max_offset:.6e} m)"
            ),
            Warning::PathMismatch {
                mismatch,
                tolerance,
            } => write!(
                f,
                "optical path mismatch {mismatch:.6e} m (within coherence tolerance {tolerance:.6e} m)"
            ),
            Warning::Resolution { feature, psf_width } => write!(
                f,
                "object feature {feature:.6e} m is below 3x the source point-spread width {psf_width:.6e} m"
            ),
            Warning::LowSignificance { n_realizations } => write!(
                f,
                "standard error exceeds the mean everywhere after {n_realizations} realizations"
            ),
            Warning::DirectFallback { reason } => write!(f, "direct quadrature used: {reason}"),
        }
    }
}

pub(crate) fn push_unique(warnings: &mut Vec<Warning>, w: Warning) {
    if !warnings.contains(&w) {
        warnings.push(w);
    }
}
