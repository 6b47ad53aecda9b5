//! Successive diffraction through media: optical-path / diffraction-length
//! bookkeeping, chained propagation, imaging positions and the effective
//! diffraction length of the two-arm correlation.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

use crate::error::{invalid, OpticsError, Result, Warning};
use crate::field::ComplexField;
use crate::optics::OpticsContext;
use crate::propagate::{propagate, Method, Propagated, Regime};
use crate::transmittance::Transmittance;

/// Default allowance on the optical-path difference between the two arms.
/// The lamp's coherence length is not characterized; this is a knob.
pub const DEFAULT_COHERENCE_TOLERANCE: f64 = 1e-3;

/// Homogeneous slab of physical length `length` and refractive index
/// `index`. Negative indices model a negatively refracting medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumSegment {
    length: f64,
    index: f64,
}

impl MediumSegment {
    pub fn new(length: f64, index: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(invalid(format!("segment length must be positive, got {length}")));
        }
        if index == 0.0 || !index.is_finite() {
            return Err(invalid(format!("segment index must be finite and non-zero, got {index}")));
        }
        Ok(Self { length, index })
    }

    pub fn vacuum(length: f64) -> Result<Self> {
        Self::new(length, 1.0)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn index(&self) -> f64 {
        self.index
    }

    /// `(n l, l / n)`.
    pub fn ledger(&self) -> PathLedger {
        PathLedger {
            optical_path: self.index * self.length,
            diffraction_length: self.length / self.index,
        }
    }
}

/// Accumulated optical path `Z = Σ n l` and diffraction length `Zbar = Σ l / n`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathLedger {
    pub optical_path: f64,
    pub diffraction_length: f64,
}

impl PathLedger {
    pub fn new(optical_path: f64, diffraction_length: f64) -> Self {
        Self {
            optical_path,
            diffraction_length,
        }
    }
}

impl Add for PathLedger {
    type Output = PathLedger;

    fn add(self, rhs: PathLedger) -> PathLedger {
        PathLedger {
            optical_path: self.optical_path + rhs.optical_path,
            diffraction_length: self.diffraction_length + rhs.diffraction_length,
        }
    }
}

impl AddAssign for PathLedger {
    fn add_assign(&mut self, rhs: PathLedger) {
        *self = *self + rhs;
    }
}

impl Sum for PathLedger {
    fn sum<I: Iterator<Item = PathLedger>>(iter: I) -> Self {
        iter.fold(PathLedger::default(), |a, b| a + b)
    }
}

pub fn ledger(segments: &[MediumSegment]) -> Result<PathLedger> {
    if segments.is_empty() {
        return Err(invalid("ledger needs at least one segment"));
    }
    Ok(segments.iter().map(MediumSegment::ledger).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Segment(MediumSegment),
    Object(Transmittance),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementChain {
    elements: Vec<Element>,
}

impl ElementChain {
    pub fn new(elements: Vec<Element>) -> Result<Self> {
        if elements.is_empty() {
            return Err(invalid("element chain is empty"));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Ledger over all segments, ignoring objects.
    pub fn ledger(&self) -> PathLedger {
        self.elements
            .iter()
            .filter_map(|e| match e {
                Element::Segment(s) => Some(s.ledger()),
                Element::Object(_) => None,
            })
            .sum()
    }
}

/// Propagate through a chain of media and objects. Consecutive segments are
/// merged into one hop with their summed ledger, so a run whose diffraction
/// lengths cancel collapses to the delta kernel `exp(i k0 Z)`.
pub fn cascade_propagate(
    ctx: &OpticsContext,
    field: &ComplexField,
    chain: &ElementChain,
    method: Method,
) -> Result<Propagated> {
    let mut current = field.clone();
    let mut warnings: Vec<Warning> = Vec::new();
    let mut regime = Regime::Identity;
    let mut pending: Option<PathLedger> = None;

    let mut flush = |current: &mut ComplexField, pending: &mut Option<PathLedger>| -> Result<()> {
        if let Some(hop) = pending.take() {
            let out = propagate(ctx, current, hop.optical_path, hop.diffraction_length, method)?;
            for w in out.warnings {
                if !warnings.contains(&w) {
                    warnings.push(w);
                }
            }
            regime = out.regime;
            *current = out.field;
        }
        Ok(())
    };

    for element in chain.elements() {
        match element {
            Element::Segment(s) => {
                *pending.get_or_insert_with(PathLedger::default) += s.ledger();
            }
            Element::Object(t) => {
                flush(&mut current, &mut pending)?;
                let samples = t.sample(current.grid());
                current = current.multiply(&samples)?;
            }
        }
    }
    flush(&mut current, &mut pending)?;
    Ok(Propagated {
        field: current,
        regime,
        warnings,
    })
}

/// Check `|object_arm - Z| <= tolerance`; returns a warning for a mismatch
/// inside the tolerance that is larger than rounding.
pub fn check_equal_path(object_arm: f64, reference: &PathLedger, tolerance: f64) -> Result<Option<Warning>> {
    let mismatch = object_arm - reference.optical_path;
    if mismatch.abs() > tolerance {
        return Err(OpticsError::UnequalPath {
            object_arm,
            reference_arm: reference.optical_path,
            mismatch,
            tolerance,
        });
    }
    // placing the detector at Z - z_o1 can leave a last-bit residue
    let rounding = 4.0 * f64::EPSILON * object_arm.abs().max(reference.optical_path.abs());
    Ok((mismatch.abs() > rounding).then_some(Warning::PathMismatch {
        mismatch,
        tolerance,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagingPositions {
    /// Source-to-object distance, equal to the reference diffraction length.
    pub z_o1: f64,
    /// Object-to-detector distance, `Z - Zbar`.
    pub z_o2: f64,
}

/// Object placement that cancels diffraction between the arms.
pub fn imaging_positions(reference: &PathLedger, z_o: f64, tolerance: f64) -> Result<ImagingPositions> {
    check_equal_path(z_o, reference, tolerance)?;
    let z_o2 = reference.optical_path - reference.diffraction_length;
    if z_o2 < 0.0 || reference.diffraction_length <= 0.0 {
        return Err(OpticsError::DegenerateGeometry(format!(
            "no imaging position: Z = {} m, Zbar = {} m (need Z >= Zbar > 0)",
            reference.optical_path, reference.diffraction_length
        )));
    }
    Ok(ImagingPositions {
        z_o1: reference.diffraction_length,
        z_o2,
    })
}

/// `Z_eff` from `1/Z_eff = 1/z_o2 + 1/(z_o1 - Zbar)`; exactly 0 at the
/// imaging position. Under equal optical path the result is cross-checked
/// against `z_o2 (1 - z_o2 / z_o2_img)`.
pub fn effective_diffraction_length(z_o1: f64, z_o2: f64, reference: &PathLedger) -> Result<f64> {
    effective_diffraction_length_within(z_o1, z_o2, reference, DEFAULT_COHERENCE_TOLERANCE)
}

pub fn effective_diffraction_length_within(
    z_o1: f64,
    z_o2: f64,
    reference: &PathLedger,
    tolerance: f64,
) -> Result<f64> {
    if z_o2 == 0.0 {
        return Err(OpticsError::DegenerateGeometry(
            "object at the detector (z_o2 = 0)".into(),
        ));
    }
    if !(z_o1 > 0.0) || !(z_o2 > 0.0) {
        return Err(invalid(format!(
            "object distances must be positive, got z_o1 = {z_o1}, z_o2 = {z_o2}"
        )));
    }
    check_equal_path(z_o1 + z_o2, reference, tolerance)?;

    let detuning = z_o1 - reference.diffraction_length;
    if detuning == 0.0 {
        return Ok(0.0);
    }
    let inverse = 1.0 / z_o2 + 1.0 / detuning;
    if inverse == 0.0 {
        return Err(OpticsError::DegenerateGeometry(
            "the arms diffract identically, the effective diffraction length is unbounded".into(),
        ));
    }
    let z_eff = 1.0 / inverse;

    if z_o1 + z_o2 == reference.optical_path {
        let z_o2_img = reference.optical_path - reference.diffraction_length;
        if z_o2_img != 0.0 {
            let alt = effective_diffraction_length_equal_path(z_o2, z_o2_img);
            if (alt - z_eff).abs() > 1e-9 * z_o2.max(z_eff.abs()) {
                return Err(OpticsError::DegenerateGeometry(format!(
                    "effective diffraction length forms disagree: {z_eff} vs {alt}"
                )));
            }
        }
    }
    Ok(z_eff)
}

/// `z_o2 (1 - z_o2 / z_o2_img)`, valid under exact equal optical path.
pub fn effective_diffraction_length_equal_path(z_o2: f64, z_o2_img: f64) -> f64 {
    z_o2 * (1.0 - z_o2 / z_o2_img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::metrics::relative_l2;
    use crate::field::FieldRole;
    use num_complex::Complex64;

    const N_GLASS: f64 = 1.5163;

    fn reference_arm() -> Vec<MediumSegment> {
        vec![
            MediumSegment::vacuum(0.183).unwrap(),
            MediumSegment::new(0.155, N_GLASS).unwrap(),
        ]
    }

    #[test]
    fn glass_rod_reference_ledger() {
        let l = ledger(&reference_arm()).unwrap();
        assert!((l.optical_path * 100.0 - 41.80).abs() < 0.005, "{}", l.optical_path);
        assert!((l.diffraction_length * 100.0 - 28.52).abs() < 0.005, "{}", l.diffraction_length);
    }

    #[test]
    fn vacuum_ledger_is_symmetric() {
        let l = ledger(&[MediumSegment::vacuum(0.37).unwrap()]).unwrap();
        assert_eq!(l.optical_path, 0.37);
        assert_eq!(l.diffraction_length, 0.37);
    }

    #[test]
    fn opposite_indices_cancel() {
        let l = ledger(&[
            MediumSegment::new(0.1, 1.0).unwrap(),
            MediumSegment::new(0.1, -1.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(l, PathLedger::new(0.0, 0.0));
    }

    #[test]
    fn invalid_segments() {
        assert!(MediumSegment::new(0.1, 0.0).is_err());
        assert!(MediumSegment::new(0.0, 1.0).is_err());
        assert!(MediumSegment::new(-0.1, 1.0).is_err());
        assert!(ledger(&[]).is_err());
        assert!(ElementChain::new(vec![]).is_err());
    }

    #[test]
    fn imaging_position_of_glass_arm() {
        let l = ledger(&reference_arm()).unwrap();
        let p = imaging_positions(&l, 0.418, DEFAULT_COHERENCE_TOLERANCE).unwrap();
        assert!((p.z_o1 * 100.0 - 28.5).abs() < 0.05);
        assert!((p.z_o2 * 100.0 - 13.3).abs() < 0.05);
        // l (n - 1/n)
        let closed = 0.155 * (N_GLASS - 1.0 / N_GLASS);
        assert!((p.z_o2 - closed).abs() < 1e-15);
    }

    #[test]
    fn imaging_position_of_vacuum_arm_is_detector() {
        let l = ledger(&[MediumSegment::vacuum(0.4).unwrap()]).unwrap();
        let p = imaging_positions(&l, 0.4, 0.0).unwrap();
        assert_eq!(p.z_o2, 0.0);
    }

    #[test]
    fn imaging_position_approaches_detector_as_index_tends_to_one() {
        let mut last = f64::INFINITY;
        for n in [1.5, 1.1, 1.01, 1.001, 1.0001] {
            let l = ledger(&[MediumSegment::vacuum(0.2).unwrap(), MediumSegment::new(0.15, n).unwrap()]).unwrap();
            let p = imaging_positions(&l, l.optical_path, 0.0).unwrap();
            assert!(p.z_o2 < last);
            last = p.z_o2;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn unequal_path_rejected() {
        let l = ledger(&reference_arm()).unwrap();
        assert!(matches!(
            imaging_positions(&l, 0.43, DEFAULT_COHERENCE_TOLERANCE),
            Err(OpticsError::UnequalPath { .. })
        ));
        assert!(effective_diffraction_length(0.2, 0.25, &l).is_err());
    }

    #[test]
    fn detector_plane_object_is_degenerate() {
        let l = ledger(&reference_arm()).unwrap();
        assert!(matches!(
            effective_diffraction_length(l.optical_path, 0.0, &l),
            Err(OpticsError::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn imaging_point_is_exact_zero() {
        let l = ledger(&reference_arm()).unwrap();
        let z1 = l.diffraction_length;
        assert_eq!(effective_diffraction_length(z1, l.optical_path - z1, &l).unwrap(), 0.0);
    }

    #[test]
    fn sign_law() {
        let l = ledger(&reference_arm()).unwrap();
        let img = l.optical_path - l.diffraction_length;
        for k in 1..100 {
            let z1 = l.optical_path * k as f64 / 100.0;
            let z2 = l.optical_path - z1;
            let ze = effective_diffraction_length(z1, z2, &l).unwrap();
            if z2 < img {
                assert!(ze > 0.0, "z2 = {z2}");
            } else if z2 > img {
                assert!(ze < 0.0, "z2 = {z2}");
            }
        }
    }

    #[test]
    fn merged_segments_with_zero_length_are_identity() {
        let ctx = OpticsContext::new(589.3e-9).unwrap();
        let g = Grid::new(0.0, 1e-3, 256).unwrap();
        let f = ComplexField::from_fn(g, FieldRole::Generic, |x| {
            Complex64::new((-x * x / 1e-8).exp(), 0.0)
        })
        .unwrap();
        let chain = ElementChain::new(vec![
            Element::Segment(MediumSegment::new(0.1, 1.0).unwrap()),
            Element::Segment(MediumSegment::new(0.1, -1.0).unwrap()),
        ])
        .unwrap();
        let out = cascade_propagate(&ctx, &f, &chain, Method::Auto).unwrap();
        assert_eq!(out.regime, Regime::Identity);
        assert!(relative_l2(out.field.values(), f.values()) < 1e-15);
    }
}
