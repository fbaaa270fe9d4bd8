//! Resonance positions of the lossless membrane-in-the-middle cavity.
//!
//! Writing `t_d^2 + r_d^2 = e^{2 i psi}` and `rho = Re(r_d e^{-i psi})`
//! (`rho = ±|r_d|` when the slab is lossless), the transmission denominator
//! vanishes for `R -> 1` exactly when
//!
//! `kL = -psi ± acos(-rho cos 2kz) (mod 2 pi)`,
//!
//! i.e. when `G(k) = cos(kL + psi) + rho cos(2kz)` changes sign. Both
//! branches are found together as zeros of `G`, with `psi` and `rho`
//! evaluated at the trial wavenumber.

use std::f64::consts::PI;

use super::dd;
use super::kernel::SlabKernel;
use super::{CavityConfig, OpticalSlab};
use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

/// Sign changes of `G` are searched on this many subintervals of one free
/// spectral range; `G` has at most two zeros there.
const SCAN_INTERVALS: usize = 1024;
const MAX_BISECTIONS: usize = 200;

/// Resonance frequencies (Hz, increasing) within the free spectral range
/// `[q c/2L, (q+1) c/2L)` that contains `c / lambda`. The window holds zero,
/// one or two resonances. Requires a non-absorbing slab.
pub fn resonance_frequencies_ideal(
    cav: &CavityConfig,
    slab: &OpticalSlab,
    z: f64,
) -> Result<Vec<f64>> {
    let solver = Solver::new(cav, slab, z)?;
    let q = (SPEED_OF_LIGHT / cav.wavelength / cav.free_spectral_range()).floor();
    solver.window(q)
}

/// Offset (Hz) of the resonance nearest to the empty-cavity resonance
/// `q c / 2L` closest to `c / lambda`.
pub fn resonance_shift_ideal(cav: &CavityConfig, slab: &OpticalSlab, z: f64) -> Result<f64> {
    let solver = Solver::new(cav, slab, z)?;
    let fsr = cav.free_spectral_range();
    let q = (SPEED_OF_LIGHT / cav.wavelength / fsr).round();
    let mut all = solver.window(q - 1.0)?;
    all.extend(solver.window(q)?);
    let target = q * fsr;
    all.into_iter()
        .map(|nu| nu - target)
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .ok_or_else(|| {
            Error::Solver(
                "no resonance within one free spectral range of the empty-cavity mode".into(),
            )
        })
}

struct Solver {
    slab: SlabKernel,
    length: f64,
    z: f64,
    fsr: f64,
    /// `2 psi` at the nominal wavenumber, the branch used to unwrap `psi`.
    psi2_ref: f64,
}

impl Solver {
    fn new(cav: &CavityConfig, slab: &OpticalSlab, z: f64) -> Result<Self> {
        if slab.n_imag != 0.0 {
            return Err(Error::invalid(
                "ideal resonance positions require a non-absorbing slab (n_imag = 0)",
            ));
        }
        cav.check_position(z)?;
        let kernel = SlabKernel::new(slab);
        let k = dd::div(dd::pi() * 2.0, dd::dd(cav.wavelength));
        let c = kernel.coefficients(k);
        let (r, t) = (dd::to_c64(c.r_d), dd::to_c64(c.t_d));
        Ok(Solver {
            slab: kernel,
            length: cav.length,
            z,
            fsr: cav.free_spectral_range(),
            psi2_ref: (t * t + r * r).arg(),
        })
    }

    /// `G` at `kL = q pi + u`.
    fn g(&self, q: f64, u: f64) -> f64 {
        let k = dd::div(dd::pi() * q + u, dd::dd(self.length));
        let c = self.slab.coefficients(k);
        let (r, t) = (dd::to_c64(c.r_d), dd::to_c64(c.t_d));
        let psi2 =
            self.psi2_ref + ((t * t + r * r).arg() - self.psi2_ref + PI).rem_euclid(2.0 * PI) - PI;
        let psi = 0.5 * psi2;
        let rho = (r * num_complex::Complex64::from_polar(1.0, -psi)).re;
        let (_, cz) = dd::sin_cos(k * (2.0 * self.z));
        // cos(q pi + u + psi) = (-1)^q cos(u + psi)
        let sign = if q.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
        sign * (u + psi).cos() + rho * (cz.hi() + cz.lo())
    }

    fn window(&self, q: f64) -> Result<Vec<f64>> {
        let du = PI / SCAN_INTERVALS as f64;
        let mut out = Vec::new();
        let mut u0 = 0.0;
        let mut g0 = self.g(q, u0);
        for i in 1..=SCAN_INTERVALS {
            let u1 = i as f64 * du;
            let g1 = self.g(q, u1);
            if g0 == 0.0 {
                out.push(u0);
            } else if g1 != 0.0 && g0.signum() != g1.signum() {
                out.push(self.bisect(q, u0, u1, g0)?);
            }
            u0 = u1;
            g0 = g1;
        }
        // the window is half-open: a zero exactly at u = pi belongs to the next one
        out.retain(|&u| u < PI);
        Ok(out.into_iter().map(|u| (q + u / PI) * self.fsr).collect())
    }

    fn bisect(&self, q: f64, mut a: f64, mut b: f64, mut ga: f64) -> Result<f64> {
        for _ in 0..MAX_BISECTIONS {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                return Ok(m);
            }
            let gm = self.g(q, m);
            if gm == 0.0 {
                return Ok(m);
            }
            if gm.signum() == ga.signum() {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
        }
        Err(Error::Solver(format!(
            "resonance bisection did not converge in {MAX_BISECTIONS} steps"
        )))
    }
}
