//! Mechanics of a circular membrane under tensile stress: drum-mode
//! frequencies, effective modal masses for point and Gaussian readout,
//! thermal displacement spectra and quality factors from ringdown.
//!
//! Mode shapes are the ideal clamped-edge solutions `J_m(alpha_mn r / R)`.
//! Clamping-induced shifts of the low-order modes are not modelled.

mod psd;
mod ringdown;

pub use psd::{synth_psd, SpectrumSeries};
pub use ringdown::{q_from_ringdown, QualityFactor, RingdownTrace};

use std::f64::consts::PI;

use crate::constants::BOLTZMANN;
use crate::error::{Error, Result};
use crate::special::{bessel_root, integrate_radial, j, BesselOrder, RootIndex};

/// Radius-to-thickness ratio below which the thin-membrane model is suspect.
pub const MIN_ASPECT_RATIO: f64 = 100.0;

/// Gaussian profile is truncated at this many widths; the neglected tail of
/// `exp(-2 r^2 / w^2)` is below 1e-55 of the peak.
const GAUSSIAN_CUTOFF_WIDTHS: f64 = 8.0;

/// Mechanical description of a circular membrane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembraneGeometry {
    radius: f64,
    thickness: f64,
    density: f64,
    stress: f64,
}

impl MembraneGeometry {
    /// All quantities in SI units: radius and thickness in m, density in
    /// kg/m^3, tensile stress in Pa.
    pub fn new(radius: f64, thickness: f64, density: f64, stress: f64) -> Result<Self> {
        for (name, v) in [
            ("radius", radius),
            ("thickness", thickness),
            ("density", density),
            ("stress", stress),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "membrane {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(MembraneGeometry {
            radius,
            thickness,
            density,
            stress,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn stress(&self) -> f64 {
        self.stress
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.radius / self.thickness
    }

    /// A warning when the membrane is too thick for the membrane model.
    pub fn aspect_warning(&self) -> Option<String> {
        (self.aspect_ratio() <= MIN_ASPECT_RATIO).then(|| {
            format!(
                "radius/thickness = {:.1} is not >> 1; bending stiffness is neglected by the membrane model",
                self.aspect_ratio()
            )
        })
    }
}

/// Drum mode `(m, n)`: `m` nodal diameters, `n`-th radial zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId {
    pub m: u32,
    n: RootIndex,
}

impl ModeId {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        Ok(ModeId {
            m,
            n: RootIndex::new(n)?,
        })
    }

    pub fn n(&self) -> u32 {
        self.n.get()
    }

    pub fn root_index(&self) -> RootIndex {
        self.n
    }

    /// `alpha_mn`, the n-th zero of `J_m`.
    pub fn alpha(&self) -> f64 {
        bessel_root(BesselOrder(self.m), self.n)
    }
}

impl std::fmt::Display for ModeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.m, self.n.get())
    }
}

/// Bath temperature for thermally driven motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalEnvironment {
    temperature: f64,
}

impl ThermalEnvironment {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::invalid(format!(
                "temperature must be >= 0 K, got {temperature}"
            )));
        }
        Ok(ThermalEnvironment { temperature })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn thermal_energy(&self) -> f64 {
        BOLTZMANN * self.temperature
    }
}

/// `f0 = sqrt(stress / density) / (2 pi R)`.
pub fn base_frequency(geom: &MembraneGeometry) -> f64 {
    (geom.stress / geom.density).sqrt() / (2.0 * PI * geom.radius)
}

/// `f_mn = f0 * alpha_mn`.
pub fn mode_frequency(geom: &MembraneGeometry, mode: ModeId) -> f64 {
    base_frequency(geom) * mode.alpha()
}

pub fn physical_mass(geom: &MembraneGeometry) -> f64 {
    geom.density * PI * geom.radius * geom.radius * geom.thickness
}

/// `M_0n / M = J_1(alpha_0n)^2`, the point-readout mass ratio.
pub fn point_mass_ratio(n: RootIndex) -> f64 {
    let alpha = bessel_root(BesselOrder(0), n);
    let j1 = j(1, alpha);
    j1 * j1
}

/// Effective mass of mode `(0, n)` for a displacement readout at the centre.
pub fn effective_mass_point(geom: &MembraneGeometry, n: RootIndex) -> f64 {
    physical_mass(geom) * point_mass_ratio(n)
}

/// Warns when the readout spot is large enough that the Gaussian
/// normalisation (which assumes the profile fits on the membrane) degrades.
pub fn gaussian_readout_warning(geom: &MembraneGeometry, width: f64) -> Option<String> {
    (width > 0.5 * geom.radius).then(|| {
        format!(
            "readout width {width:e} m exceeds R/2 = {:e} m; the Gaussian overlap normalisation assumes w << R",
            0.5 * geom.radius
        )
    })
}

/// Overlap of mode `(0, n)` with a centred Gaussian intensity profile of
/// 1/e^2 width `w`, normalised to 1 in the point limit:
/// `(4/w^2) int_0^R J_0(alpha r / R) exp(-2 r^2 / w^2) r dr`.
pub fn gaussian_overlap(geom: &MembraneGeometry, n: RootIndex, width: f64) -> Result<f64> {
    if !(width.is_finite() && width > 0.0 && width < geom.radius) {
        return Err(Error::invalid(format!(
            "readout width must satisfy 0 < w < R = {:e}, got {width:e}",
            geom.radius
        )));
    }
    let alpha = bessel_root(BesselOrder(0), n);
    let r_max = geom.radius.min(GAUSSIAN_CUTOFF_WIDTHS * width);
    let inv_w2 = 1.0 / (width * width);
    let k = alpha / geom.radius;
    let scale = 0.25 * width * width;
    let integral = integrate_radial(
        |r| j(0, k * r) * (-2.0 * r * r * inv_w2).exp() * r,
        0.0,
        r_max,
        1e-13 * scale,
    )?;
    Ok(4.0 * inv_w2 * integral)
}

/// Effective mass of mode `(0, n)` seen by a centred Gaussian readout of
/// 1/e^2 width `width`:
/// `M_0n = M (J_1(alpha_0n) / overlap)^2`.
pub fn effective_mass_gaussian(geom: &MembraneGeometry, n: RootIndex, width: f64) -> Result<f64> {
    let overlap = gaussian_overlap(geom, n, width)?;
    if overlap == 0.0 {
        return Err(Error::Domain(format!(
            "readout of width {width:e} m has no overlap with mode (0,{})",
            n.get()
        )));
    }
    let alpha = bessel_root(BesselOrder(0), n);
    let ratio = j(1, alpha) / overlap;
    Ok(physical_mass(geom) * ratio * ratio)
}

/// Effective mass for an optional readout width; `None` means a point readout.
pub fn effective_mass(geom: &MembraneGeometry, n: RootIndex, width: Option<f64>) -> Result<f64> {
    match width {
        Some(w) => effective_mass_gaussian(geom, n, w),
        None => Ok(effective_mass_point(geom, n)),
    }
}

/// Thermal displacement variance of a mode, `k_B T / (M_eff (2 pi f)^2)`,
/// which is the area under its peak in the displacement spectrum.
pub fn thermal_peak_area(
    effective_mass: f64,
    frequency: f64,
    env: &ThermalEnvironment,
) -> Result<f64> {
    if !(effective_mass.is_finite() && effective_mass > 0.0) {
        return Err(Error::invalid(format!(
            "effective mass must be positive, got {effective_mass}"
        )));
    }
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(Error::invalid(format!(
            "frequency must be positive, got {frequency}"
        )));
    }
    let omega = 2.0 * PI * frequency;
    Ok(env.thermal_energy() / (effective_mass * omega * omega))
}
