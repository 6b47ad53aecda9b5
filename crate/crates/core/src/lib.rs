//! Scalar paraxial wave optics for an interferometer illuminated by
//! spatially incoherent light.
//!
//! The crate propagates sampled fields with the Fresnel impulse response,
//! tracks optical path and diffraction length through stacks of media, and
//! evaluates the first-order cross-correlation of the two interferometer
//! arms, both in closed form and by Monte-Carlo averaging over chaotic
//! source realizations. A diffraction length that turns negative inside
//! the correlation produces phase-reversed diffraction; where it vanishes
//! the object is imaged without a lens.

pub mod cascade;
pub mod ensemble;
pub mod error;
pub mod field;
pub mod field2d;
pub mod grid;
pub mod interferometer;
pub mod metrics;
pub mod optics;
pub mod propagate;
pub mod transmittance;

pub use cascade::{
    cascade_propagate, effective_diffraction_length, imaging_positions, ledger, Element, ElementChain,
    ImagingPositions, MediumSegment, PathLedger, DEFAULT_COHERENCE_TOLERANCE,
};
pub use ensemble::{
    run_coherent, run_ensemble, sample_source, CoherentSource, Ensemble, EnsembleConfig, EnsembleEstimate,
};
pub use error::{OpticsError, Result, Warning};
pub use field::{ComplexField, FieldRole};
pub use field2d::{propagate_2d, ComplexField2};
pub use grid::Grid;
pub use interferometer::{
    background_intensity, correlation_analytic, detector_ports, CorrelationResult, InterferometerSpec,
    PortIntensities,
};
pub use optics::OpticsContext;
pub use propagate::{propagate, propagate_to, Method, Propagated, Propagator, Regime};
pub use transmittance::{double_slit, phase_holes, raster_to_transmittance, uniform, Transmittance};

pub use num_complex::Complex64;
