//! Monte-Carlo chaotic light: delta-correlated Gaussian source realizations
//! pushed through both arms and averaged, plus the deterministic coherent
//! illumination used for comparison.
//!
//! Realization `k` draws its source from a ChaCha stream selected by
//! `(master_seed, k)`, so any realization can be regenerated in isolation.
//! Realizations are grouped in fixed blocks whose partial sums are reduced
//! in index order; the estimate is therefore bitwise independent of the
//! number of worker threads.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{invalid, push_unique, OpticsError, Result, Warning};
use crate::field::{ComplexField, FieldRole};
use crate::field2d::{propagate_2d, ComplexField2};
use crate::grid::Grid;
use crate::interferometer::InterferometerSpec;
use crate::propagate::{propagate, Method, Propagator};
use crate::transmittance::Transmittance;

const BLOCK: usize = 16;

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub spec: InterferometerSpec,
    pub source_grid: Grid,
    pub detector_grid: Grid,
    pub n_realizations: usize,
    pub master_seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl EnsembleConfig {
    pub fn new(
        spec: InterferometerSpec,
        source_grid: Grid,
        detector_grid: Grid,
        n_realizations: usize,
        master_seed: u64,
    ) -> Result<Self> {
        if n_realizations == 0 {
            return Err(invalid("n_realizations must be at least 1"));
        }
        let w = spec.source_width();
        if (source_grid.width() - w).abs() > 1e-9 * w {
            return Err(invalid(format!(
                "source grid spans {} m but the source width is {w} m",
                source_grid.width()
            )));
        }
        if spec.object().is_two_dimensional() {
            return Err(invalid("ensemble simulation supports one-dimensional objects only"));
        }
        Ok(Self {
            spec,
            source_grid,
            detector_grid,
            n_realizations,
            master_seed,
            workers: None,
        })
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers.max(1));
        self
    }

    pub fn with_realizations(mut self, n: usize) -> Self {
        self.n_realizations = n.max(1);
        self
    }
}

/// One draw of the source: independent circular Gaussian samples with
/// variance `I_s / dx`, so that `Σ <E* E'> dx` reproduces `I_s δ`.
pub fn sample_source(config: &EnsembleConfig, realization_index: usize) -> Result<ComplexField> {
    if realization_index >= config.n_realizations {
        return Err(invalid(format!(
            "realization {realization_index} out of range (n_realizations = {})",
            config.n_realizations
        )));
    }
    Ok(draw_source(config, realization_index))
}

fn draw_source(config: &EnsembleConfig, realization_index: usize) -> ComplexField {
    let grid = config.source_grid;
    let sigma = (config.spec.source_intensity() / grid.spacing() / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    rng.set_stream(realization_index as u64);
    let values = (0..grid.len())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(sigma * re, sigma * im)
        })
        .collect();
    ComplexField::new(grid, values, FieldRole::Source).expect("finite Gaussian draws")
}

enum ObjectArm {
    /// `T = c` everywhere: one free hop over `z_o1 + z_o2`.
    Uniform { factor: Complex64, hop: Propagator },
    Masked {
        to_object: Propagator,
        mask: Vec<Complex64>,
        to_detector: Propagator,
    },
}

/// Fields of one realization at the detector.
#[derive(Debug, Clone)]
pub struct Realization {
    pub source: ComplexField,
    pub object: Vec<Complex64>,
    pub reference: Vec<Complex64>,
}

/// Propagators for both arms, built once per configuration.
pub struct Ensemble {
    config: EnsembleConfig,
    reference: Propagator,
    object: ObjectArm,
    warnings: Vec<Warning>,
}

fn aligned_cover(grid: &Grid, lo: f64, hi: f64, pad: isize) -> Result<Grid> {
    let dx = grid.spacing();
    let k_lo = ((lo - grid.first()) / dx).floor() as isize - pad;
    let k_hi = ((hi - grid.first()) / dx).ceil() as isize + pad;
    Grid::from_spacing(grid.first() + k_lo as f64 * dx, dx, (k_hi - k_lo + 1) as usize)
}

impl Ensemble {
    pub fn new(config: EnsembleConfig) -> Result<Self> {
        let spec = &config.spec;
        let ctx = spec.ctx();
        let r = spec.reference_ledger();
        let (src, det) = (&config.source_grid, &config.detector_grid);
        let mut warnings = spec.warnings().to_vec();

        let reference = Propagator::new(ctx, src, det, r.optical_path, r.diffraction_length, Method::Auto)?;
        let object = match spec.object() {
            Transmittance::Uniform(c) => {
                let z = spec.z_o1() + spec.z_o2();
                ObjectArm::Uniform {
                    factor: *c,
                    hop: Propagator::new(ctx, src, det, z, z, Method::Auto)?,
                }
            }
            t => {
                let (lo, hi) = t.support().ok_or_else(|| invalid("object support is unbounded"))?;
                let plane = aligned_cover(det, lo, hi, 2)?;
                let to_object = Propagator::new(ctx, src, &plane, spec.z_o1(), spec.z_o1(), Method::Auto)?;
                let to_detector = Propagator::new(ctx, &plane, det, spec.z_o2(), spec.z_o2(), Method::Auto)?;
                ObjectArm::Masked {
                    mask: t.sample(&plane),
                    to_object,
                    to_detector,
                }
            }
        };
        let mut props = vec![&reference];
        match &object {
            ObjectArm::Uniform { hop, .. } => props.push(hop),
            ObjectArm::Masked {
                to_object,
                to_detector,
                ..
            } => {
                props.push(to_object);
                props.push(to_detector);
            }
        }
        for p in props {
            for w in p.warnings() {
                push_unique(&mut warnings, w.clone());
            }
        }
        Ok(Self {
            config,
            reference,
            object,
            warnings,
        })
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn realization(&self, index: usize) -> Result<Realization> {
        let source = sample_source(&self.config, index)?;
        Ok(self.propagate_source(source))
    }

    fn propagate_source(&self, source: ComplexField) -> Realization {
        let reference = self.reference.apply(source.values());
        let object = match &self.object {
            ObjectArm::Uniform { factor, hop } => hop.apply(source.values()).into_iter().map(|v| v * factor).collect(),
            ObjectArm::Masked {
                to_object,
                mask,
                to_detector,
            } => {
                let mut lit = to_object.apply(source.values());
                for (v, t) in lit.iter_mut().zip(mask) {
                    *v *= t;
                }
                to_detector.apply(&lit)
            }
        };
        Realization {
            source,
            object,
            reference,
        }
    }

    fn block_sums(&self, block: usize) -> Sums {
        let n = self.config.detector_grid.len();
        let mut sums = Sums::zeros(n);
        let start = block * BLOCK;
        let end = (start + BLOCK).min(self.config.n_realizations);
        for k in start..end {
            let r = self.propagate_source(draw_source(&self.config, k));
            sums.add(&r);
        }
        sums
    }

    pub fn run(&self) -> Result<EnsembleEstimate> {
        let n_blocks = self.config.n_realizations.div_ceil(BLOCK);
        let collect = || -> Vec<Sums> { (0..n_blocks).into_par_iter().map(|b| self.block_sums(b)).collect() };
        let blocks = match self.config.workers {
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| OpticsError::InvalidArgument(format!("thread pool: {e}")))?
                .install(collect),
            None => collect(),
        };
        let mut total = Sums::zeros(self.config.detector_grid.len());
        for b in &blocks {
            total.merge(b);
        }
        Ok(total.finish(self.config.detector_grid, self.config.n_realizations, self.warnings.clone()))
    }
}

struct Sums {
    cross: Vec<Complex64>,
    cross_sq: Vec<f64>,
    intensity_o: Vec<f64>,
    intensity_r: Vec<f64>,
}

impl Sums {
    fn zeros(n: usize) -> Self {
        Self {
            cross: vec![Complex64::new(0.0, 0.0); n],
            cross_sq: vec![0.0; n],
            intensity_o: vec![0.0; n],
            intensity_r: vec![0.0; n],
        }
    }

    fn add(&mut self, r: &Realization) {
        for i in 0..self.cross.len() {
            let p = r.reference[i].conj() * r.object[i];
            self.cross[i] += p;
            self.cross_sq[i] += p.norm_sqr();
            self.intensity_o[i] += r.object[i].norm_sqr();
            self.intensity_r[i] += r.reference[i].norm_sqr();
        }
    }

    fn merge(&mut self, other: &Sums) {
        for i in 0..self.cross.len() {
            self.cross[i] += other.cross[i];
            self.cross_sq[i] += other.cross_sq[i];
            self.intensity_o[i] += other.intensity_o[i];
            self.intensity_r[i] += other.intensity_r[i];
        }
    }

    fn finish(self, grid: Grid, n: usize, mut warnings: Vec<Warning>) -> EnsembleEstimate {
        let nf = n as f64;
        let correlation_mean: Vec<Complex64> = self.cross.iter().map(|c| c / nf).collect();
        let standard_error: Vec<f64> = self
            .cross_sq
            .iter()
            .zip(&correlation_mean)
            .map(|(sq, m)| {
                if n < 2 {
                    return f64::INFINITY;
                }
                let var = ((sq - nf * m.norm_sqr()) / (nf - 1.0)).max(0.0);
                (var / nf).sqrt()
            })
            .collect();
        if standard_error.iter().zip(&correlation_mean).all(|(se, m)| *se > m.norm()) {
            warnings.push(Warning::LowSignificance { n_realizations: n });
        }
        EnsembleEstimate {
            grid,
            correlation_mean,
            intensity_o: self.intensity_o.iter().map(|v| v / nf).collect(),
            intensity_r: self.intensity_r.iter().map(|v| v / nf).collect(),
            standard_error,
            n_used: n,
            warnings,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleEstimate {
    pub grid: Grid,
    pub correlation_mean: Vec<Complex64>,
    pub intensity_o: Vec<f64>,
    pub intensity_r: Vec<f64>,
    /// Standard error of the complex mean at each sample.
    pub standard_error: Vec<f64>,
    pub n_used: usize,
    pub warnings: Vec<Warning>,
}

impl EnsembleEstimate {
    pub fn background(&self) -> Vec<f64> {
        self.intensity_o.iter().zip(&self.intensity_r).map(|(a, b)| a + b).collect()
    }
}

pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleEstimate> {
    Ensemble::new(config.clone())?.run()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoherentSource {
    PlaneWave,
    /// Uniform field truncated to `|x| < width / 2` (a square in 2D).
    Pinhole { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockedArm {
    #[default]
    None,
    Object,
    Reference,
}

#[derive(Debug, Clone)]
pub struct CoherentOutput {
    pub grid: Grid,
    pub object_field: Vec<Complex64>,
    pub reference_field: Vec<Complex64>,
    /// `|E_o + E_r|^2`.
    pub intensity: Vec<f64>,
    pub warnings: Vec<Warning>,
}

impl CoherentOutput {
    /// Deterministic cross term `E_r* E_o`.
    pub fn cross_term(&self) -> Vec<Complex64> {
        self.reference_field
            .iter()
            .zip(&self.object_field)
            .map(|(r, o)| r.conj() * o)
            .collect()
    }

    pub fn background(&self) -> Vec<f64> {
        self.reference_field
            .iter()
            .zip(&self.object_field)
            .map(|(r, o)| r.norm_sqr() + o.norm_sqr())
            .collect()
    }
}

/// Single deterministic field through both arms, no ensemble averaging.
pub fn run_coherent(spec: &InterferometerSpec, grid: &Grid, source: CoherentSource) -> Result<CoherentOutput> {
    run_coherent_blocked(spec, grid, source, BlockedArm::None)
}

pub fn run_coherent_blocked(
    spec: &InterferometerSpec,
    grid: &Grid,
    source: CoherentSource,
    blocked: BlockedArm,
) -> Result<CoherentOutput> {
    if spec.object().is_two_dimensional() {
        return Err(invalid("raster objects need run_coherent_2d"));
    }
    let ctx = spec.ctx();
    let r = spec.reference_ledger();
    let amplitude = spec.source_intensity().sqrt();
    let mut warnings = spec.warnings().to_vec();
    let mut absorb = |ws: Vec<Warning>| {
        for w in ws {
            push_unique(&mut warnings, w);
        }
    };

    let (object_field, reference_field) = match source {
        CoherentSource::PlaneWave => {
            // a plane wave through unobstructed media only gathers phase
            let reference = vec![ctx.path_phase(r.optical_path) * amplitude; grid.len()];
            let lit = ctx.path_phase(spec.z_o1()) * amplitude;
            let object = match spec.object() {
                Transmittance::Uniform(c) => vec![lit * c * ctx.path_phase(spec.z_o2()); grid.len()],
                t => {
                    let at_object = ComplexField::new(*grid, t.sample(grid), FieldRole::ObjectArm)?.scale(lit);
                    let out = propagate(ctx, &at_object, spec.z_o2(), spec.z_o2(), Method::Auto)?;
                    absorb(out.warnings);
                    out.field.into_values()
                }
            };
            (object, reference)
        }
        CoherentSource::Pinhole { width } => {
            if !(width > 0.0) {
                return Err(invalid(format!("pinhole width must be positive, got {width}")));
            }
            let field = ComplexField::from_fn(*grid, FieldRole::Source, |x| {
                if x.abs() < 0.5 * width {
                    Complex64::new(amplitude, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })?;
            if field.values().iter().all(|v| v.re == 0.0) {
                return Err(invalid("pinhole is narrower than the grid spacing"));
            }
            let reference = propagate(ctx, &field, r.optical_path, r.diffraction_length, Method::Auto)?;
            absorb(reference.warnings);
            let lit = propagate(ctx, &field, spec.z_o1(), spec.z_o1(), Method::Auto)?;
            absorb(lit.warnings);
            let masked = lit.field.multiply(&spec.object().sample(grid))?;
            let object = propagate(ctx, &masked, spec.z_o2(), spec.z_o2(), Method::Auto)?;
            absorb(object.warnings);
            (object.field.into_values(), reference.field.into_values())
        }
    };
    let zero = || vec![Complex64::new(0.0, 0.0); grid.len()];
    let (object_field, reference_field) = match blocked {
        BlockedArm::None => (object_field, reference_field),
        BlockedArm::Object => (zero(), reference_field),
        BlockedArm::Reference => (object_field, zero()),
    };
    let intensity = object_field
        .iter()
        .zip(&reference_field)
        .map(|(o, r)| (o + r).norm_sqr())
        .collect();
    Ok(CoherentOutput {
        grid: *grid,
        object_field,
        reference_field,
        intensity,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct CoherentOutput2 {
    pub object_field: ComplexField2,
    pub reference_field: ComplexField2,
    pub intensity: Vec<f64>,
    pub warnings: Vec<Warning>,
}

/// Two-dimensional coherent run for raster objects.
pub fn run_coherent_2d(
    spec: &InterferometerSpec,
    grid_x: &Grid,
    grid_y: &Grid,
    source: CoherentSource,
) -> Result<CoherentOutput2> {
    let ctx = spec.ctx();
    let r = spec.reference_ledger();
    let amplitude = spec.source_intensity().sqrt();
    let mut warnings = spec.warnings().to_vec();
    let n = grid_x.len() * grid_y.len();
    let t = ComplexField2::new(*grid_x, *grid_y, spec.object().sample_2d(grid_x, grid_y))?;

    let (object, reference) = match source {
        CoherentSource::PlaneWave => {
            let reference = ComplexField2::new(*grid_x, *grid_y, vec![ctx.path_phase(r.optical_path) * amplitude; n])?;
            let lit = t.scale(ctx.path_phase(spec.z_o1()) * amplitude);
            let (object, w) = propagate_2d(ctx, &lit, spec.z_o2(), spec.z_o2(), Method::Auto)?;
            warnings.extend(w);
            (object, reference)
        }
        CoherentSource::Pinhole { width } => {
            if !(width > 0.0) {
                return Err(invalid(format!("pinhole width must be positive, got {width}")));
            }
            let open = |x: f64| x.abs() < 0.5 * width;
            let ny = grid_y.len();
            let vals = (0..ny)
                .flat_map(|row| {
                    let y = grid_y.coord(ny - 1 - row);
                    grid_x.coords().map(move |x| {
                        if open(x) && open(y) {
                            Complex64::new(amplitude, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                })
                .collect();
            let src = ComplexField2::new(*grid_x, *grid_y, vals)?;
            let (reference, w1) = propagate_2d(ctx, &src, r.optical_path, r.diffraction_length, Method::Auto)?;
            let (lit, w2) = propagate_2d(ctx, &src, spec.z_o1(), spec.z_o1(), Method::Auto)?;
            let masked: Vec<Complex64> = lit.values().iter().zip(t.values()).map(|(a, b)| a * b).collect();
            let masked = ComplexField2::new(*grid_x, *grid_y, masked)?;
            let (object, w3) = propagate_2d(ctx, &masked, spec.z_o2(), spec.z_o2(), Method::Auto)?;
            warnings.extend(w1.into_iter().chain(w2).chain(w3));
            (object, reference)
        }
    };
    let mut dedup = Vec::new();
    for w in warnings {
        push_unique(&mut dedup, w);
    }
    let intensity = object
        .values()
        .iter()
        .zip(reference.values())
        .map(|(o, r)| (o + r).norm_sqr())
        .collect();
    Ok(CoherentOutput2 {
        object_field: object,
        reference_field: reference,
        intensity,
        warnings: dedup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::MediumSegment;
    use crate::optics::OpticsContext;
    use crate::transmittance::{double_slit, uniform};

    fn small_config(object: Transmittance, n: usize) -> EnsembleConfig {
        let ctx = OpticsContext::new(589.3e-9).unwrap();
        let segs = vec![
            MediumSegment::vacuum(0.183).unwrap(),
            MediumSegment::new(0.155, 1.5163).unwrap(),
        ];
        let zbar = 0.183 + 0.155 / 1.5163;
        let z = 0.183 + 0.155 * 1.5163;
        let spec = InterferometerSpec::new(ctx, zbar, z - zbar, segs, object, 1.0, 2.5e-3).unwrap();
        let source = Grid::new(0.0, 1.25e-3, 256).unwrap();
        let detector = Grid::new(0.0, 1.25e-3, 256).unwrap();
        EnsembleConfig::new(spec, source, detector, n, 7).unwrap()
    }

    #[test]
    fn source_is_reproducible_per_index() {
        let cfg = small_config(double_slit(125e-6, 300e-6).unwrap(), 10);
        let a = sample_source(&cfg, 3).unwrap();
        let b = sample_source(&cfg, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_source(&cfg, 4).unwrap());
        assert!(sample_source(&cfg, 10).is_err());
    }

    #[test]
    fn source_statistics() {
        let cfg = small_config(double_slit(125e-6, 300e-6).unwrap(), 400);
        let dx = cfg.source_grid.spacing();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut power = 0.0;
        let mut count = 0.0;
        for k in 0..400 {
            for v in sample_source(&cfg, k).unwrap().values() {
                sum += v;
                power += v.norm_sqr();
                count += 1.0;
            }
        }
        // 102400 draws
        let mean = sum / count;
        assert!(mean.norm() <= 3.0 * (1.0 / (dx * count)).sqrt());
        assert!((power / count * dx - 1.0).abs() < 0.02);
    }

    #[test]
    fn blocked_object_gives_zero_correlation() {
        let cfg = small_config(uniform(Complex64::new(0.0, 0.0)).unwrap(), 20);
        let est = run_ensemble(&cfg).unwrap();
        assert!(est.correlation_mean.iter().all(|c| c.norm() == 0.0));
        assert!(est.intensity_o.iter().all(|v| *v == 0.0));
        assert!(est.intensity_r.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn worker_count_does_not_change_the_estimate() {
        let cfg = small_config(double_slit(125e-6, 300e-6).unwrap(), 50);
        let one = run_ensemble(&cfg.clone().with_workers(1)).unwrap();
        let eight = run_ensemble(&cfg.with_workers(8)).unwrap();
        assert_eq!(one.correlation_mean, eight.correlation_mean);
        assert_eq!(one.standard_error, eight.standard_error);
        assert_eq!(one.intensity_o, eight.intensity_o);
    }

    #[test]
    fn source_grid_must_span_source_width() {
        let cfg = small_config(double_slit(125e-6, 300e-6).unwrap(), 5);
        let wrong = Grid::new(0.0, 1e-3, 256).unwrap();
        assert!(EnsembleConfig::new(cfg.spec.clone(), wrong, cfg.detector_grid, 5, 1).is_err());
        assert!(EnsembleConfig::new(cfg.spec.clone(), cfg.source_grid, cfg.detector_grid, 0, 1).is_err());
    }
}
