//! Single-hop paraxial propagation `E(x) = ∫ H(x, x'; Z, Zbar) E(x') dx'`.
//!
//! Three evaluation routes share one contract:
//! - direct midpoint quadrature of the kernel integral (the reference oracle);
//! - transfer-function form: multiply the spectrum by `exp(i k0 Z - i pi lambda Zbar f^2)`;
//! - impulse-response form: zero-padded linear convolution with the sampled
//!   kernel, which reproduces the direct sum exactly up to rounding.
//!
//! The transfer-function form is chosen when `N dx^2 >= lambda |Zbar|` and
//! the impulse-response form otherwise. `Zbar == 0` is the delta kernel and
//! reduces to a phase `exp(i k0 Z)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{push_unique, OpticsError, Result, Warning};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::optics::OpticsContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Direct,
    Fft,
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Identity,
    TransferFunction,
    ImpulseResponse,
    Direct,
}

/// Whether the transfer-function form is adequately sampled:
/// `N dx^2 >= lambda |Zbar|`.
pub fn transfer_function_preferred(ctx: &OpticsContext, grid: &Grid, zbar: f64) -> bool {
    let dx = grid.spacing();
    grid.len() as f64 * dx * dx >= ctx.wavelength() * zbar.abs()
}

/// Largest transverse offset for which the sampled space-domain chirp stays
/// below Nyquist: `lambda |Zbar| / (2 dx)`.
pub fn clean_chirp_offset(ctx: &OpticsContext, spacing: f64, zbar: f64) -> f64 {
    ctx.wavelength() * zbar.abs() / (2.0 * spacing)
}

fn aliasing_warning(ctx: &OpticsContext, spacing: f64, zbar: f64, max_offset: f64) -> Option<Warning> {
    let clean = clean_chirp_offset(ctx, spacing, zbar);
    (max_offset > clean).then_some(Warning::Aliasing {
        diffraction_length: zbar,
        max_offset,
        clean_offset: clean,
    })
}

fn max_offset(input: (f64, f64), output: &Grid) -> f64 {
    (output.last() - input.0).abs().max((input.1 - output.first()).abs())
}

enum Plan {
    Identity {
        phase: Complex64,
        shift: isize,
    },
    Transfer {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
        multiplier: Vec<Complex64>,
    },
    Convolution {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
        kernel_spectrum: Vec<Complex64>,
    },
    Direct {
        prefactor: Complex64,
    },
}

/// Precomputed propagation between two grids for fixed `(Z, Zbar)`;
/// reusable across many inputs and safe to share between threads.
pub struct Propagator {
    ctx: OpticsContext,
    input: Grid,
    output: Grid,
    optical_path: f64,
    diffraction_length: f64,
    plan: Plan,
    warnings: Vec<Warning>,
}

impl Propagator {
    pub fn new(
        ctx: &OpticsContext,
        input: &Grid,
        output: &Grid,
        optical_path: f64,
        diffraction_length: f64,
        method: Method,
    ) -> Result<Self> {
        if !optical_path.is_finite() || !diffraction_length.is_finite() {
            return Err(OpticsError::InvalidArgument(
                "propagation lengths must be finite".into(),
            ));
        }
        let same_spacing = input.same_spacing(output);
        let mut warnings = Vec::new();

        let plan = if diffraction_length == 0.0 {
            if !same_spacing {
                return Err(OpticsError::GridMismatch(
                    "the delta kernel needs grids with equal spacing".into(),
                ));
            }
            let frac = input.fractional_index(output.first());
            if (frac - frac.round()).abs() > 1e-6 {
                return Err(OpticsError::GridMismatch(
                    "the delta kernel needs output samples on input sample positions".into(),
                ));
            }
            Plan::Identity {
                phase: ctx.path_phase(optical_path),
                shift: frac.round() as isize,
            }
        } else {
            let same_grid = same_spacing
                && (input.first() - output.first()).abs() <= 1e-9 * input.spacing()
                && input.len() == output.len();
            let regime = match method {
                Method::Direct => Regime::Direct,
                Method::Fft | Method::Auto if same_spacing => {
                    if same_grid && transfer_function_preferred(ctx, input, diffraction_length) {
                        Regime::TransferFunction
                    } else {
                        Regime::ImpulseResponse
                    }
                }
                Method::Fft => {
                    return Err(OpticsError::GridMismatch(format!(
                        "fft propagation needs equal spacing, got {} and {}",
                        input.spacing(),
                        output.spacing()
                    )))
                }
                Method::Auto => {
                    warnings.push(Warning::DirectFallback {
                        reason: "input and output grids have different spacing".into(),
                    });
                    Regime::Direct
                }
            };
            if regime != Regime::TransferFunction {
                let span = max_offset((input.first(), input.last()), output);
                if let Some(w) = aliasing_warning(ctx, input.spacing(), diffraction_length, span) {
                    warnings.push(w);
                }
            }
            match regime {
                Regime::TransferFunction => transfer_plan(ctx, input, optical_path, diffraction_length)?,
                Regime::ImpulseResponse => {
                    convolution_plan(ctx, input, output, optical_path, diffraction_length)?
                }
                _ => Plan::Direct {
                    prefactor: ctx.kernel_prefactor(diffraction_length)?,
                },
            }
        };

        Ok(Self {
            ctx: *ctx,
            input: *input,
            output: *output,
            optical_path,
            diffraction_length,
            plan,
            warnings,
        })
    }

    pub fn regime(&self) -> Regime {
        match self.plan {
            Plan::Identity { .. } => Regime::Identity,
            Plan::Transfer { .. } => Regime::TransferFunction,
            Plan::Convolution { .. } => Regime::ImpulseResponse,
            Plan::Direct { .. } => Regime::Direct,
        }
    }

    pub fn input_grid(&self) -> &Grid {
        &self.input
    }

    pub fn output_grid(&self) -> &Grid {
        &self.output
    }

    /// Diagnostics computed from the full grid extents.
    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    /// Propagate raw samples laid out on the input grid.
    pub fn apply(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.input.len(), "input length mismatch");
        let n_in = self.input.len();
        let n_out = self.output.len();
        match &self.plan {
            Plan::Identity { phase, shift } => (0..n_out)
                .map(|i| {
                    let j = i as isize + shift;
                    if (0..n_in as isize).contains(&j) {
                        values[j as usize] * phase
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect(),
            Plan::Transfer {
                forward,
                inverse,
                multiplier,
            } => {
                let mut buf = values.to_vec();
                forward.process(&mut buf);
                for (b, m) in buf.iter_mut().zip(multiplier) {
                    *b *= m;
                }
                inverse.process(&mut buf);
                buf
            }
            Plan::Convolution {
                forward,
                inverse,
                kernel_spectrum,
            } => {
                let mut buf = vec![Complex64::new(0.0, 0.0); kernel_spectrum.len()];
                buf[..n_in].copy_from_slice(values);
                forward.process(&mut buf);
                for (b, k) in buf.iter_mut().zip(kernel_spectrum) {
                    *b *= k;
                }
                inverse.process(&mut buf);
                buf[n_in - 1..n_in - 1 + n_out].to_vec()
            }
            Plan::Direct { prefactor } => {
                let dx = self.input.spacing();
                let support: Vec<(f64, Complex64)> = values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
                    .map(|(j, v)| (self.input.coord(j), *v))
                    .collect();
                let scale = prefactor * dx;
                (0..n_out)
                    .into_par_iter()
                    .map(|i| {
                        let x = self.output.coord(i);
                        let sum: Complex64 = support
                            .iter()
                            .map(|&(xj, v)| {
                                self.ctx.chirp(x - xj, self.optical_path, self.diffraction_length) * v
                            })
                            .sum();
                        sum * scale
                    })
                    .collect()
            }
        }
    }
}

fn transfer_plan(ctx: &OpticsContext, grid: &Grid, z: f64, zbar: f64) -> Result<Plan> {
    let n = grid.len();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let df = 1.0 / (n as f64 * grid.spacing());
    let norm = 1.0 / n as f64;
    let multiplier = (0..n)
        .map(|k| {
            let f = if k < n.div_ceil(2) {
                k as f64
            } else {
                k as f64 - n as f64
            } * df;
            let phase = ctx.k0() * z - PI * ctx.wavelength() * zbar * f * f;
            Complex64::from_polar(norm, phase)
        })
        .collect();
    Ok(Plan::Transfer {
        forward,
        inverse,
        multiplier,
    })
}

fn convolution_plan(ctx: &OpticsContext, input: &Grid, output: &Grid, z: f64, zbar: f64) -> Result<Plan> {
    let (n_in, n_out) = (input.len(), output.len());
    let dx = input.spacing();
    let len = (n_in + n_out - 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);

    // kernel[k] = H at offset out.first - in.first + (k - (n_in - 1)) dx
    let origin = output.first() - input.first();
    let scale = ctx.kernel_prefactor(zbar)? * dx / len as f64;
    let mut kernel = vec![Complex64::new(0.0, 0.0); len];
    for (k, slot) in kernel.iter_mut().take(n_in + n_out - 1).enumerate() {
        let m = k as f64 - (n_in as f64 - 1.0);
        *slot = ctx.chirp(origin + m * dx, z, zbar) * scale;
    }
    forward.process(&mut kernel);
    Ok(Plan::Convolution {
        forward,
        inverse,
        kernel_spectrum: kernel,
    })
}

/// Result of a propagation with its evaluation route and diagnostics.
#[derive(Debug, Clone)]
pub struct Propagated {
    pub field: ComplexField,
    pub regime: Regime,
    pub warnings: Vec<Warning>,
}

/// Propagate `field` by optical path `z` and diffraction length `zbar`; the
/// output shares the input grid.
pub fn propagate(
    ctx: &OpticsContext,
    field: &ComplexField,
    z: f64,
    zbar: f64,
    method: Method,
) -> Result<Propagated> {
    propagate_to(ctx, field, field.grid(), z, zbar, method)
}

/// Propagate onto a different output grid. The FFT routes need equal
/// spacing; `Method::Auto` falls back to direct quadrature otherwise.
pub fn propagate_to(
    ctx: &OpticsContext,
    field: &ComplexField,
    output: &Grid,
    z: f64,
    zbar: f64,
    method: Method,
) -> Result<Propagated> {
    let prop = Propagator::new(ctx, field.grid(), output, z, zbar, method)?;
    let mut warnings: Vec<Warning> = prop
        .warnings()
        .iter()
        .filter(|w| !matches!(w, Warning::Aliasing { .. }))
        .cloned()
        .collect();
    if !matches!(prop.regime(), Regime::Identity | Regime::TransferFunction) {
        if let Some(support) = support_extent(field) {
            let span = max_offset(support, output);
            if let Some(w) = aliasing_warning(ctx, field.grid().spacing(), zbar, span) {
                push_unique(&mut warnings, w);
            }
        }
    }
    let values = prop.apply(field.values());
    Ok(Propagated {
        field: ComplexField::new(*output, values, field.role())?,
        regime: prop.regime(),
        warnings,
    })
}

/// Coordinates of the first and last non-zero samples.
pub fn support_extent(field: &ComplexField) -> Option<(f64, f64)> {
    let nz = |v: &&Complex64| v.re != 0.0 || v.im != 0.0;
    let first = field.values().iter().position(|v| nz(&v))?;
    let last = field.values().iter().rposition(|v| nz(&v))?;
    Some((field.grid().coord(first), field.grid().coord(last)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldRole;

    fn ctx() -> OpticsContext {
        OpticsContext::new(589.3e-9).unwrap()
    }

    fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    fn gaussian(grid: Grid, sigma: f64, x0: f64) -> ComplexField {
        ComplexField::from_fn(grid, FieldRole::Generic, |x| {
            Complex64::new((-(x - x0) * (x - x0) / (2.0 * sigma * sigma)).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn zero_length_is_identity() {
        let g = Grid::new(0.0, 1e-3, 64).unwrap();
        let f = gaussian(g, 1e-4, 1e-4);
        let out = propagate(&ctx(), &f, 0.0, 0.0, Method::Auto).unwrap();
        assert_eq!(out.regime, Regime::Identity);
        assert_eq!(out.field.values(), f.values());

        let out = propagate(&ctx(), &f, 0.25, 0.0, Method::Fft).unwrap();
        let phase = ctx().path_phase(0.25);
        for (a, b) in out.field.values().iter().zip(f.values()) {
            assert!((a - b * phase).norm() < 1e-15);
        }
    }

    #[test]
    fn regime_follows_sampling_rule() {
        let c = ctx();
        let g = Grid::new(0.0, 2e-3, 1024).unwrap();
        let dx = g.spacing();
        let critical = 1024.0 * dx * dx / c.wavelength();
        let f = gaussian(g, 1e-4, 0.0);
        let near = propagate(&c, &f, 0.0, 0.5 * critical, Method::Fft).unwrap();
        assert_eq!(near.regime, Regime::TransferFunction);
        let far = propagate(&c, &f, 0.0, 2.0 * critical, Method::Fft).unwrap();
        assert_eq!(far.regime, Regime::ImpulseResponse);
        let direct = propagate(&c, &f, 0.0, 2.0 * critical, Method::Direct).unwrap();
        assert_eq!(direct.regime, Regime::Direct);
    }

    #[test]
    fn impulse_response_reproduces_direct_sum() {
        let c = ctx();
        let g = Grid::new(0.0, 1e-3, 512).unwrap();
        let f = ComplexField::from_fn(g, FieldRole::Generic, |x| {
            if x.abs() < 2e-4 {
                Complex64::new(1.0, 0.3 * x / 2e-4)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        for zbar in [0.057, -0.133, 0.3] {
            let a = propagate(&c, &f, 0.1, zbar, Method::Fft).unwrap();
            assert_eq!(a.regime, Regime::ImpulseResponse);
            let b = propagate(&c, &f, 0.1, zbar, Method::Direct).unwrap();
            assert!(rel_l2(a.field.values(), b.field.values()) < 1e-10);
        }
    }

    #[test]
    fn offset_grids_share_the_kernel() {
        let c = ctx();
        let input = Grid::new(0.0, 1e-3, 200).unwrap();
        // shifted by a non-integer number of samples
        let output = Grid::from_spacing(input.first() + 37.4 * input.spacing(), input.spacing(), 150).unwrap();
        let f = gaussian(input, 5e-5, 1e-4);
        let a = propagate_to(&c, &f, &output, 0.0, 0.2, Method::Fft).unwrap();
        let b = propagate_to(&c, &f, &output, 0.0, 0.2, Method::Direct).unwrap();
        assert!(rel_l2(a.field.values(), b.field.values()) < 1e-10);
    }

    #[test]
    fn unequal_spacing_falls_back_to_direct() {
        let c = ctx();
        let input = Grid::new(0.0, 1e-3, 128).unwrap();
        let output = Grid::new(0.0, 1e-3, 100).unwrap();
        let f = gaussian(input, 1e-4, 0.0);
        assert!(matches!(
            propagate_to(&c, &f, &output, 0.0, 0.2, Method::Fft),
            Err(OpticsError::GridMismatch(_))
        ));
        let auto = propagate_to(&c, &f, &output, 0.0, 0.2, Method::Auto).unwrap();
        assert_eq!(auto.regime, Regime::Direct);
        assert!(auto
            .warnings
            .iter()
            .any(|w| matches!(w, Warning::DirectFallback { .. })));
    }

    #[test]
    fn coarse_grid_attaches_aliasing_warning() {
        let c = ctx();
        // just past the transfer-function limit the chirp aliases at the edges
        let g = Grid::new(0.0, 2.56e-3, 256).unwrap();
        let f = ComplexField::from_fn(g, FieldRole::Generic, |_| Complex64::new(1.0, 0.0)).unwrap();
        let zbar = 1.1 * 256.0 * g.spacing() * g.spacing() / c.wavelength();
        let out = propagate(&c, &f, 0.0, zbar, Method::Fft).unwrap();
        assert_eq!(out.regime, Regime::ImpulseResponse);
        assert!(out.warnings.iter().any(|w| matches!(w, Warning::Aliasing { .. })));
    }

    #[test]
    fn point_source_phase_law() {
        let c = ctx();
        let g = Grid::new(0.0, 1e-3, 256).unwrap();
        let j0 = 100;
        let x0 = g.coord(j0);
        let mut v = vec![Complex64::new(0.0, 0.0); 256];
        v[j0] = Complex64::new(1.0 / g.spacing(), 0.0);
        let f = ComplexField::new(g, v, FieldRole::Generic).unwrap();
        let (z, zbar) = (0.2, 0.15);
        let out = propagate(&c, &f, z, zbar, Method::Direct).unwrap();
        let pre_arg = c.kernel_prefactor(zbar).unwrap().arg();
        for (i, val) in out.field.values().iter().enumerate() {
            let x = g.coord(i);
            let want = c.k0() * z + c.k0() * (x - x0).powi(2) / (2.0 * zbar);
            let diff = (val.arg() - pre_arg - want).rem_euclid(2.0 * PI);
            let diff = diff.min(2.0 * PI - diff);
            assert!(diff < 1e-6, "sample {i}: phase off by {diff}");
        }
    }
}
