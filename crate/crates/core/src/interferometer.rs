//! Two-arm interferometer driven by a spatially incoherent source.
//!
//! The interference term is `<E_r*(x) E_o(x)> = I_s ∫ h_r*(x, x0) h_o(x, x0) dx0`.
//! For an unbounded delta-correlated source the reference kernel folds into
//! the object arm and the term becomes a single Fresnel transform of `T` over
//! the effective diffraction length `Z_eff`:
//!
//! `I_s sqrt(k0 / (2 pi i s)) exp(i k0 dZ) ∫ T(x') H(x, x'; 0, Z_eff) dx'`
//!
//! with `s = z_o1 + z_o2 - Zbar` and `dZ = z_o1 + z_o2 - Z`. At `Z_eff = 0`
//! the transform is the identity and `T` is reproduced.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cascade::{
    check_equal_path, effective_diffraction_length_within, ledger, MediumSegment, PathLedger,
    DEFAULT_COHERENCE_TOLERANCE,
};
use crate::error::{invalid, push_unique, OpticsError, Result, Warning};
use crate::field::{ComplexField, FieldRole};
use crate::field2d::{propagate_2d, ComplexField2};
use crate::grid::Grid;
use crate::optics::OpticsContext;
use crate::propagate::{propagate, Method, Propagator};
use crate::transmittance::Transmittance;

#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerSpec {
    ctx: OpticsContext,
    z_o1: f64,
    z_o2: f64,
    reference_segments: Vec<MediumSegment>,
    object: Transmittance,
    source_intensity: f64,
    source_width: f64,
    coherence_tolerance: f64,
    reference: PathLedger,
    warnings: Vec<Warning>,
}

impl InterferometerSpec {
    pub fn new(
        ctx: OpticsContext,
        z_o1: f64,
        z_o2: f64,
        reference_segments: Vec<MediumSegment>,
        object: Transmittance,
        source_intensity: f64,
        source_width: f64,
    ) -> Result<Self> {
        Self::with_tolerance(
            ctx,
            z_o1,
            z_o2,
            reference_segments,
            object,
            source_intensity,
            source_width,
            DEFAULT_COHERENCE_TOLERANCE,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_tolerance(
        ctx: OpticsContext,
        z_o1: f64,
        z_o2: f64,
        reference_segments: Vec<MediumSegment>,
        object: Transmittance,
        source_intensity: f64,
        source_width: f64,
        coherence_tolerance: f64,
    ) -> Result<Self> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive, got {v}")))
            }
        };
        positive(z_o1, "z_o1")?;
        positive(z_o2, "z_o2")?;
        positive(source_intensity, "source intensity")?;
        positive(source_width, "source width")?;
        if !(coherence_tolerance >= 0.0) {
            return Err(invalid("coherence tolerance must be non-negative"));
        }
        let reference = ledger(&reference_segments)?;
        let mut warnings = Vec::new();
        if let Some(w) = check_equal_path(z_o1 + z_o2, &reference, coherence_tolerance)? {
            warnings.push(w);
        }
        Ok(Self {
            ctx,
            z_o1,
            z_o2,
            reference_segments,
            object,
            source_intensity,
            source_width,
            coherence_tolerance,
            reference,
            warnings,
        })
    }

    pub fn ctx(&self) -> &OpticsContext {
        &self.ctx
    }

    pub fn z_o1(&self) -> f64 {
        self.z_o1
    }

    pub fn z_o2(&self) -> f64 {
        self.z_o2
    }

    pub fn reference_segments(&self) -> &[MediumSegment] {
        &self.reference_segments
    }

    pub fn reference_ledger(&self) -> PathLedger {
        self.reference
    }

    pub fn object(&self) -> &Transmittance {
        &self.object
    }

    pub fn source_intensity(&self) -> f64 {
        self.source_intensity
    }

    pub fn source_width(&self) -> f64 {
        self.source_width
    }

    pub fn coherence_tolerance(&self) -> f64 {
        self.coherence_tolerance
    }

    /// `z_o1 + z_o2 - Z`.
    pub fn path_mismatch(&self) -> f64 {
        self.z_o1 + self.z_o2 - self.reference.optical_path
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn effective_diffraction_length(&self) -> Result<f64> {
        effective_diffraction_length_within(self.z_o1, self.z_o2, &self.reference, self.coherence_tolerance)
    }

    /// Width `lambda z_o1 / W` of the blur left by the finite source.
    pub fn psf_width(&self) -> f64 {
        self.ctx.wavelength() * self.z_o1 / self.source_width
    }

    /// Same spec with a different object.
    pub fn with_object(&self, object: Transmittance) -> Self {
        Self {
            object,
            ..self.clone()
        }
    }

    /// `I_s sqrt(k0 / (2 pi i s)) exp(i k0 dZ)`, the constant in front of the
    /// Fresnel transform of `T`.
    fn correlation_prefactor(&self) -> Result<Complex64> {
        let s = self.z_o1 + self.z_o2 - self.reference.diffraction_length;
        if s == 0.0 {
            return Err(OpticsError::DegenerateGeometry(
                "the arms diffract identically; there is no imaging plane".into(),
            ));
        }
        Ok(self.ctx.kernel_prefactor(s)? * self.ctx.path_phase(self.path_mismatch()) * self.source_intensity)
    }

    fn resolution_checks(&self, spacing: f64, warnings: &mut Vec<Warning>) -> Result<()> {
        if let Some(feature) = self.object.min_feature() {
            if spacing > feature / 4.0 {
                return Err(OpticsError::Resolution { spacing, feature });
            }
            let psf = self.psf_width();
            if feature < 3.0 * psf {
                push_unique(warnings, Warning::Resolution {
                    feature,
                    psf_width: psf,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CorrelationResult {
    pub grid: Grid,
    pub correlation: Vec<Complex64>,
    pub z_eff: f64,
    pub prefactor: Complex64,
    pub warnings: Vec<Warning>,
}

/// Closed-form interference term for an unbounded incoherent source.
pub fn correlation_analytic(spec: &InterferometerSpec, grid: &Grid) -> Result<CorrelationResult> {
    correlation_analytic_with(spec, grid, Method::Auto)
}

pub fn correlation_analytic_with(spec: &InterferometerSpec, grid: &Grid, method: Method) -> Result<CorrelationResult> {
    if spec.object.is_two_dimensional() {
        return Err(invalid("raster objects need correlation_analytic_2d"));
    }
    let mut warnings = spec.warnings.clone();
    spec.resolution_checks(grid.spacing(), &mut warnings)?;
    let z_eff = spec.effective_diffraction_length()?;
    let prefactor = spec.correlation_prefactor()?;

    let correlation = match (&spec.object, z_eff == 0.0) {
        (_, true) => spec.object.sample(grid).into_iter().map(|t| t * prefactor).collect(),
        // ∫ H dx' = 1 over the unbounded plane
        (Transmittance::Uniform(c), false) => vec![c * prefactor; grid.len()],
        (object, false) => {
            let field = ComplexField::new(*grid, object.sample(grid), FieldRole::Generic)?;
            let out = propagate(&spec.ctx, &field, 0.0, z_eff, method)?;
            for w in out.warnings {
                push_unique(&mut warnings, w);
            }
            out.field.into_values().into_iter().map(|v| v * prefactor).collect()
        }
    };
    Ok(CorrelationResult {
        grid: *grid,
        correlation,
        z_eff,
        prefactor,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct CorrelationResult2 {
    pub field: ComplexField2,
    pub z_eff: f64,
    pub prefactor: Complex64,
    pub warnings: Vec<Warning>,
}

/// Two-dimensional interference term; the kernel factors per axis so the
/// prefactor is squared while the path phase enters once.
pub fn correlation_analytic_2d(spec: &InterferometerSpec, grid_x: &Grid, grid_y: &Grid) -> Result<CorrelationResult2> {
    let mut warnings = spec.warnings.clone();
    spec.resolution_checks(grid_x.spacing().max(grid_y.spacing()), &mut warnings)?;
    let z_eff = spec.effective_diffraction_length()?;
    let one_axis = spec.correlation_prefactor()? / (spec.source_intensity * spec.ctx.path_phase(spec.path_mismatch()));
    let prefactor = one_axis * one_axis * spec.ctx.path_phase(spec.path_mismatch()) * spec.source_intensity;

    let samples = spec.object.sample_2d(grid_x, grid_y);
    let t = ComplexField2::new(*grid_x, *grid_y, samples)?;
    let field = if z_eff == 0.0 {
        t.scale(prefactor)
    } else if let Transmittance::Uniform(c) = spec.object {
        let n = t.values().len();
        ComplexField2::new(*grid_x, *grid_y, vec![c * prefactor; n])?
    } else {
        let (out, w) = propagate_2d(&spec.ctx, &t, 0.0, z_eff, Method::Auto)?;
        for w in w {
            push_unique(&mut warnings, w);
        }
        out.scale(prefactor)
    };
    Ok(CorrelationResult2 {
        field,
        z_eff,
        prefactor,
        warnings,
    })
}

/// Brute-force interference term for a source of finite extent sampled on
/// `source_grid`: `I_s Σ h_r*(x, x0) h_o(x, x0) dx0` with the object arm
/// `h_o(x, x0) = Σ H(x - x'; z_o2) T(x') H(x' - x0; z_o1) dx'` summed over
/// `object_grid`. Every hop uses direct quadrature.
pub fn correlation_finite_source(
    spec: &InterferometerSpec,
    source_grid: &Grid,
    object_grid: &Grid,
    detector_grid: &Grid,
) -> Result<Vec<Complex64>> {
    if spec.object.is_two_dimensional() {
        return Err(invalid("the finite-source oracle is one-dimensional"));
    }
    let ctx = &spec.ctx;
    let r = spec.reference;
    let t = spec.object.sample(object_grid);
    let to_detector = Propagator::new(ctx, object_grid, detector_grid, spec.z_o2, spec.z_o2, Method::Direct)?;
    let ref_pre = ctx.kernel_prefactor(r.diffraction_length)?;
    let obj_pre = ctx.kernel_prefactor(spec.z_o1)?;
    let dx0 = source_grid.spacing();

    let mut acc = vec![Complex64::new(0.0, 0.0); detector_grid.len()];
    for x0 in source_grid.coords() {
        // object plane illuminated by a unit point source at x0
        let lit: Vec<Complex64> = object_grid
            .coords()
            .zip(&t)
            .map(|(xp, tv)| {
                if tv.re == 0.0 && tv.im == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    tv * obj_pre * ctx.chirp(xp - x0, spec.z_o1, spec.z_o1)
                }
            })
            .collect();
        let h_o = to_detector.apply(&lit);
        for ((a, x), ho) in acc.iter_mut().zip(detector_grid.coords()).zip(h_o) {
            let h_r = ref_pre * ctx.chirp(x - x0, r.optical_path, r.diffraction_length);
            *a += h_r.conj() * ho;
        }
    }
    let scale = spec.source_intensity * dx0;
    Ok(acc.into_iter().map(|a| a * scale).collect())
}

/// Mean intensities of the two arms over the finite source aperture.
#[derive(Debug, Clone)]
pub struct ArmIntensities {
    pub reference: Vec<f64>,
    pub object: Vec<f64>,
    pub warnings: Vec<Warning>,
}

impl ArmIntensities {
    pub fn total(&self) -> Vec<f64> {
        self.reference.iter().zip(&self.object).map(|(a, b)| a + b).collect()
    }
}

/// Number of source samples for the object-arm background quadrature: the
/// object-plane phase across the support `d` turns over on the scale
/// `lambda z_o1 / d`, sampled four times per period.
fn background_source_samples(spec: &InterferometerSpec, support_width: f64) -> usize {
    let period = spec.ctx.wavelength() * spec.z_o1 / support_width.max(f64::MIN_POSITIVE);
    ((4.0 * spec.source_width / period).ceil() as usize).clamp(64, 8192)
}

/// `I_s ∫_W |h_r|^2 dx0` and `I_s ∫_W |h_o|^2 dx0` on `grid`. The reference
/// kernel has constant modulus, so its term is exactly `I_s W k0 / (2 pi |Zbar|)`.
pub fn arm_intensities(spec: &InterferometerSpec, grid: &Grid) -> Result<ArmIntensities> {
    if spec.object.is_two_dimensional() {
        return Err(invalid("raster objects need background_intensity_2d"));
    }
    let ctx = &spec.ctx;
    let zbar = spec.reference.diffraction_length;
    if zbar == 0.0 {
        return Err(OpticsError::DegenerateGeometry(
            "reference arm with zero diffraction length images the source; its intensity is unbounded".into(),
        ));
    }
    let i_s = spec.source_intensity;
    let w = spec.source_width;
    let reference = vec![i_s * w * ctx.k0() / (2.0 * PI * zbar.abs()); grid.len()];
    let mut warnings = spec.warnings.clone();

    let object = match &spec.object {
        Transmittance::Uniform(c) => {
            let level = c.norm_sqr() * i_s * w * ctx.k0() / (2.0 * PI * (spec.z_o1 + spec.z_o2));
            vec![level; grid.len()]
        }
        t => {
            let (lo, hi) = t.support().expect("bounded object");
            let object_grid = grid.window_covering(lo, hi, 2)?;
            let samples = t.sample(&object_grid);
            let dx = object_grid.spacing();
            // chirp at the object plane stays below Nyquist
            let needed = ctx.wavelength() * spec.z_o1 / (w + (hi - lo));
            if dx > needed {
                push_unique(&mut warnings, Warning::Aliasing {
                    diffraction_length: spec.z_o1,
                    max_offset: 0.5 * (w + (hi - lo)),
                    clean_offset: crate::propagate::clean_chirp_offset(ctx, dx, spec.z_o1),
                });
            }
            let to_detector = Propagator::new(ctx, &object_grid, grid, spec.z_o2, spec.z_o2, Method::Auto)?;
            for wn in to_detector.warnings() {
                push_unique(&mut warnings, wn.clone());
            }
            let m = background_source_samples(spec, hi - lo);
            let source = Grid::new(0.0, 0.5 * w, m)?;
            let pre = ctx.kernel_prefactor(spec.z_o1)?;
            let mut acc = vec![0.0; grid.len()];
            for x0 in source.coords() {
                let lit: Vec<Complex64> = object_grid
                    .coords()
                    .zip(&samples)
                    .map(|(xp, tv)| tv * pre * ctx.chirp(xp - x0, 0.0, spec.z_o1))
                    .collect();
                for (a, h) in acc.iter_mut().zip(to_detector.apply(&lit)) {
                    *a += h.norm_sqr();
                }
            }
            let scale = i_s * source.spacing();
            acc.into_iter().map(|a| a * scale).collect()
        }
    };
    Ok(ArmIntensities {
        reference,
        object,
        warnings,
    })
}

/// `<|E_r|^2> + <|E_o|^2>` on `grid`.
pub fn background_intensity(spec: &InterferometerSpec, grid: &Grid) -> Result<Vec<f64>> {
    Ok(arm_intensities(spec, grid)?.total())
}

/// Two-dimensional background for a square source `W × W`. The reference
/// term is exact; the object term uses the unbounded-source level
/// `I_s (k0 / (2 pi z_o2))^2 ∫∫ |T|^2`, which is flat.
pub fn background_intensity_2d(spec: &InterferometerSpec, grid_x: &Grid, grid_y: &Grid) -> Result<Vec<f64>> {
    let ctx = &spec.ctx;
    let zbar = spec.reference.diffraction_length;
    if zbar == 0.0 {
        return Err(OpticsError::DegenerateGeometry(
            "reference arm with zero diffraction length".into(),
        ));
    }
    let i_s = spec.source_intensity;
    let w = spec.source_width;
    let per_axis = |z: f64| ctx.k0() / (2.0 * PI * z.abs());
    let reference = i_s * (w * per_axis(zbar)).powi(2);
    let object = match &spec.object {
        Transmittance::Uniform(c) => c.norm_sqr() * i_s * (w * per_axis(spec.z_o1 + spec.z_o2)).powi(2),
        t => {
            let (lo, hi) = t.support().expect("bounded object");
            let fine = Grid::new(0.5 * (lo + hi), 0.5 * (hi - lo), 1024)?;
            let (ylo, yhi) = match t {
                Transmittance::Raster(m) => {
                    let h = 0.5 * m.height() as f64 * m.pitch();
                    (-h, h)
                }
                _ => (grid_y.first() - 0.5 * grid_y.spacing(), grid_y.last() + 0.5 * grid_y.spacing()),
            };
            let fine_y = Grid::new(0.5 * (ylo + yhi), 0.5 * (yhi - ylo), 1024)?;
            let area: f64 = t.sample_2d(&fine, &fine_y).iter().map(|v| v.norm_sqr()).sum::<f64>()
                * fine.spacing()
                * fine_y.spacing();
            i_s * per_axis(spec.z_o2).powi(2) * area
        }
    };
    Ok(vec![reference + object; grid_x.len() * grid_y.len()])
}

/// Intensities at the two outputs of a lossless symmetric splitter with
/// ports `(E_o ± E_r) / sqrt(2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PortIntensities {
    pub i_plus: Vec<f64>,
    pub i_minus: Vec<f64>,
    pub background: Vec<f64>,
}

impl PortIntensities {
    pub fn difference(&self) -> Vec<f64> {
        self.i_plus.iter().zip(&self.i_minus).map(|(a, b)| a - b).collect()
    }

    pub fn sum(&self) -> Vec<f64> {
        self.i_plus.iter().zip(&self.i_minus).map(|(a, b)| a + b).collect()
    }
}

/// `I_± = background / 2 ± Re<E_r* E_o>`.
pub fn detector_ports(correlation: &[Complex64], background: &[f64]) -> Result<PortIntensities> {
    if correlation.len() != background.len() {
        return Err(invalid(format!(
            "correlation has {} samples, background {}",
            correlation.len(),
            background.len()
        )));
    }
    let mut i_plus = Vec::with_capacity(background.len());
    let mut i_minus = Vec::with_capacity(background.len());
    for (index, (c, b)) in correlation.iter().zip(background).enumerate() {
        let half = 0.5 * b;
        if half < c.re.abs() {
            return Err(OpticsError::NegativeIntensity {
                index,
                half_background: half,
                interference: c.re.abs(),
            });
        }
        i_plus.push(half + c.re);
        i_minus.push(half - c.re);
    }
    Ok(PortIntensities {
        i_plus,
        i_minus,
        background: background.to_vec(),
    })
}
