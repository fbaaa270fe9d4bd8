//! Plane-wave optics of a thin dielectric slab between two identical
//! mirrors: slab amplitude coefficients, cavity transmission, resonance
//! positions and finesse.
//!
//! The membrane position `z` is measured from the cavity centre. Mirror
//! losses are lumped into the intensity reflectivity.

mod dd;
mod kernel;
mod peak;
mod resonance;

pub use peak::{finesse_from_scan, transmission_peak, TransmissionPeak};
pub use resonance::{resonance_frequencies_ideal, resonance_shift_ideal};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use kernel::Kernel;

/// Dielectric slab of complex index `n_real + i n_imag`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalSlab {
    n_real: f64,
    n_imag: f64,
    thickness: f64,
    roughness: f64,
}

impl OpticalSlab {
    /// `thickness = 0` describes an empty cavity.
    pub fn new(n_real: f64, n_imag: f64, thickness: f64, roughness: f64) -> Result<Self> {
        if !(n_real.is_finite() && n_real >= 1.0) {
            return Err(Error::invalid(format!(
                "real index must be >= 1, got {n_real}"
            )));
        }
        if !(n_imag.is_finite() && n_imag >= 0.0) {
            return Err(Error::invalid(format!(
                "imaginary index must be >= 0, got {n_imag}"
            )));
        }
        if !(thickness.is_finite() && thickness >= 0.0) {
            return Err(Error::invalid(format!(
                "slab thickness must be >= 0, got {thickness}"
            )));
        }
        if !(roughness.is_finite() && roughness >= 0.0) {
            return Err(Error::invalid(format!(
                "optical roughness must be >= 0, got {roughness}"
            )));
        }
        Ok(OpticalSlab {
            n_real,
            n_imag,
            thickness,
            roughness,
        })
    }

    pub fn n_real(&self) -> f64 {
        self.n_real
    }

    pub fn n_imag(&self) -> f64 {
        self.n_imag
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn roughness(&self) -> f64 {
        self.roughness
    }

    pub fn with_losses(self, n_imag: f64, roughness: f64) -> Result<Self> {
        Self::new(self.n_real, n_imag, self.thickness, roughness)
    }

    /// Same slab without absorption.
    pub fn lossless(self) -> Self {
        OpticalSlab {
            n_imag: 0.0,
            ..self
        }
    }
}

/// Two identical mirrors of intensity reflectivity `R` a distance `L` apart,
/// probed near wavelength `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityConfig {
    length: f64,
    wavelength: f64,
    mirror_reflectivity: f64,
}

impl CavityConfig {
    pub fn new(length: f64, wavelength: f64, mirror_reflectivity: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid(format!(
                "cavity length must be positive, got {length}"
            )));
        }
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::invalid(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        if !(mirror_reflectivity > 0.0 && mirror_reflectivity < 1.0) {
            return Err(Error::invalid(format!(
                "mirror reflectivity must lie in (0, 1), got {mirror_reflectivity}"
            )));
        }
        Ok(CavityConfig {
            length,
            wavelength,
            mirror_reflectivity,
        })
    }

    /// Cavity whose mirrors reproduce the empty-cavity finesse `finesse`.
    pub fn from_empty_finesse(length: f64, wavelength: f64, finesse: f64) -> Result<Self> {
        Self::new(length, wavelength, mirror_r_from_finesse(finesse)?)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn mirror_reflectivity(&self) -> f64 {
        self.mirror_reflectivity
    }

    /// `2 pi / lambda` in rad/m.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Free spectral range `c / 2L` in Hz.
    pub fn free_spectral_range(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.length)
    }

    pub(crate) fn check_position(&self, z: f64) -> Result<()> {
        if !(z.is_finite() && z.abs() < 0.5 * self.length) {
            return Err(Error::invalid(format!(
                "membrane position {z:e} m lies outside the cavity (|z| < {:e} m)",
                0.5 * self.length
            )));
        }
        Ok(())
    }
}

/// Amplitude coefficients of a slab at one wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabCoefficients {
    /// Reflection, including the roughness factor.
    pub r_d: Complex64,
    pub t_d: Complex64,
    /// Phase thickness `n k L_d`.
    pub beta: Complex64,
}

impl SlabCoefficients {
    /// `arg r_d`; for a slab that does not reflect, half the argument of
    /// `t_d^2 + r_d^2`, which the ideal-case relation makes equivalent.
    pub fn reflection_phase(&self) -> f64 {
        if self.r_d.norm() > 0.0 {
            self.r_d.arg()
        } else {
            0.5 * (self.t_d * self.t_d + self.r_d * self.r_d).arg()
        }
    }
}

/// Reflection and transmission of the slab at normal incidence,
///
/// `r_d = (n^2 - 1) sin(beta) / (2 i n cos(beta) + (n^2 + 1) sin(beta))`,
/// `t_d = 2 n / (2 i n cos(beta) + (n^2 + 1) sin(beta))`,
///
/// with `r_d` multiplied by `exp(-(2 k sigma)^2 / 2)` for surface roughness.
/// In this phase convention a vanishing slab has `r_d = 0`, `t_d = -i`.
pub fn slab_coefficients(slab: &OpticalSlab, wavelength: f64) -> Result<SlabCoefficients> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::invalid(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    let k = dd::div(dd::pi() * 2.0, dd::dd(wavelength));
    let c = kernel::SlabKernel::new(slab).coefficients(k);
    Ok(SlabCoefficients {
        r_d: dd::to_c64(c.r_d),
        t_d: dd::to_c64(c.t_d),
        beta: dd::to_c64(c.beta),
    })
}

/// Intensity transmission of the cavity with the slab at `z`, at wavenumber
/// `k` (rad/m):
///
/// `T = |(1 - R) t_d|^2 / |1 + 2 r_d sqrt(R) cos(2kz) e^{ikL} + R (t_d^2 + r_d^2) e^{2ikL}|^2`.
pub fn cavity_transmission(cav: &CavityConfig, slab: &OpticalSlab, z: f64, k: f64) -> Result<f64> {
    cav.check_position(z)?;
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::invalid(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    let t = Kernel::new(cav, slab, z).transmission(dd::dd(k));
    Ok(t.hi() + t.lo())
}

/// `F = pi c tau / L` for an intensity ringdown time `tau`.
pub fn finesse_from_ringdown(tau: f64, length: f64) -> Result<f64> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::invalid(format!(
            "ringdown time must be positive, got {tau}"
        )));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::invalid(format!(
            "cavity length must be positive, got {length}"
        )));
    }
    Ok(PI * SPEED_OF_LIGHT * tau / length)
}

/// Inverts `F = pi sqrt(R) / (1 - R)` for the mirror reflectivity.
pub fn mirror_r_from_finesse(finesse: f64) -> Result<f64> {
    if !(finesse.is_finite() && finesse > 1.0) {
        return Err(Error::invalid(format!(
            "finesse must exceed 1, got {finesse}"
        )));
    }
    // F s^2 + pi s - F = 0 for s = sqrt(R), written without cancellation
    let s = 2.0 * finesse / (PI + (PI * PI + 4.0 * finesse * finesse).sqrt());
    Ok(s * s)
}

/// `F = pi sqrt(R) / (1 - R)`.
pub fn finesse_from_mirror_r(reflectivity: f64) -> Result<f64> {
    if !(reflectivity > 0.0 && reflectivity < 1.0) {
        return Err(Error::invalid(format!(
            "reflectivity must lie in (0, 1), got {reflectivity}"
        )));
    }
    Ok(PI * reflectivity.sqrt() / (1.0 - reflectivity))
}
