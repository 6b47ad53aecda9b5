//! Wavelength context and the paraxial free-space impulse response.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, OpticsError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticsContext {
    wavelength: f64,
    wavenumber: f64,
}

impl OpticsContext {
    pub fn new(wavelength: f64) -> Result<Self> {
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(invalid(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(Self {
            wavelength,
            wavenumber: 2.0 * PI / wavelength,
        })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Vacuum wavenumber `k0 = 2 pi / lambda`.
    pub fn k0(&self) -> f64 {
        self.wavenumber
    }

    /// `sqrt(k0 / (i 2 pi zbar))` on the principal branch. For `zbar < 0` this
    /// is the conjugate of the value at `-zbar`.
    pub fn kernel_prefactor(&self, zbar: f64) -> Result<Complex64> {
        if zbar == 0.0 {
            return Err(OpticsError::DegenerateKernel);
        }
        Ok(Complex64::new(0.0, -self.wavenumber / (2.0 * PI * zbar)).sqrt())
    }

    /// Global phase `exp(i k0 z)` accumulated over optical path `z`.
    pub fn path_phase(&self, optical_path: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.wavenumber * optical_path)
    }

    /// Impulse response `H(x, x0; Z, Zbar)` for optical path `Z` and
    /// diffraction length `Zbar`:
    ///
    /// `sqrt(k0/(i 2 pi Zbar)) exp[i k0 Z + i k0 (x - x0)^2 / (2 Zbar)]`.
    ///
    /// `Zbar == 0` is the delta kernel and has no pointwise value.
    pub fn fresnel_kernel(&self, x: f64, x0: f64, z: f64, zbar: f64) -> Result<Complex64> {
        let pre = self.kernel_prefactor(zbar)?;
        Ok(pre * self.chirp(x - x0, z, zbar))
    }

    /// `exp[i k0 Z + i k0 u^2 / (2 Zbar)]`, for `zbar != 0`.
    pub(crate) fn chirp(&self, offset: f64, z: f64, zbar: f64) -> Complex64 {
        let phase = self.wavenumber * (z + offset * offset / (2.0 * zbar));
        Complex64::from_polar(1.0, phase)
    }
}
