//! Transmission peak search and finesse from the peak width.
//!
//! With `x = e^{ikL}` the transmission denominator is the quadratic
//! `1 + a x + b x^2`. Its two roots `x_j` (|x_j| > 1 for a lossy cavity) fix
//! two peaks per `2 pi` of `kL`, at `kL = arg x_j`, with full width
//! `2 (|x_j| - 1) / sqrt|x_j|` in `kL`. Those estimates seed a parabolic
//! refinement of `1/T` around each peak, whose half-maximum crossings are
//! then solved by regula falsi; the narrower peak is reported. All transmission
//! values are computed in double-double, and the crossings are measured as
//! offsets from the peak so that their f64 resolution is set by the width,
//! not by `k` itself.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::dd::{self, Dd};
use super::kernel::Kernel;
use super::{CavityConfig, OpticalSlab};
use crate::error::{Error, Result};

const MAX_SEED_UPDATES: usize = 50;

/// The transmission maximum used for a finesse measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionPeak {
    /// Free spectral range over full width at half maximum.
    pub finesse: f64,
    /// Wavenumber of the maximum in rad/m.
    pub wavenumber: f64,
    pub peak_transmission: f64,
    /// Full width at half maximum in rad/m.
    pub fwhm_wavenumber: f64,
}

/// Finesse of the narrowest transmission peak within one period of `kL`
/// around the nominal wavenumber.
pub fn finesse_from_scan(cav: &CavityConfig, slab: &OpticalSlab, z: f64) -> Result<f64> {
    transmission_peak(cav, slab, z).map(|p| p.finesse)
}

/// Locates the transmission peaks within one period of `kL` (two free
/// spectral ranges) around `2 pi / lambda` and returns the narrowest.
///
/// The two peaks of a period trade places when `z` moves by a quarter
/// wavelength, and away from the cavity centre their widths differ even for
/// a lossless slab. Taking the narrower one keeps the finesse continuous in
/// `z` and decreasing in the slab losses.
pub fn transmission_peak(
    cav: &CavityConfig,
    slab: &OpticalSlab,
    z: f64,
) -> Result<TransmissionPeak> {
    cav.check_position(z)?;
    let kernel = Kernel::new(cav, slab, z);
    let length = cav.length;
    let k_ref = dd::div(dd::pi() * 2.0, dd::dd(cav.wavelength));
    let refl = cav.mirror_reflectivity;
    let inverse = |k: Dd| -> Dd { dd::recip(kernel.transmission(k)) };

    let mut best: Option<TransmissionPeak> = None;
    for (offset, width) in pole_estimates(&kernel, k_ref, refl, length) {
        // the coefficients and cos(2kz) drift across the window, so the
        // estimate is re-evaluated at the seed until it stops moving
        let mut seed = k_ref + offset;
        let mut width = width;
        for _ in 0..MAX_SEED_UPDATES {
            let Some((step, w)) = pole_estimates(&kernel, seed, refl, length)
                .into_iter()
                .min_by(|p, q| p.0.abs().total_cmp(&q.0.abs()))
            else {
                break;
            };
            seed += step;
            width = w;
            if step.abs() <= 1e-3 * w {
                break;
            }
        }
        let peak = measure_peak(&inverse, seed, width, length)?;
        if best.map_or(true, |b| peak.fwhm_wavenumber < b.fwhm_wavenumber) {
            best = Some(peak);
        }
    }
    best.ok_or_else(|| {
        Error::PeakSearch("transmission has no resonance (no loss-limited root)".into())
    })
}

/// Refines the maximum of `1 / inverse` near `seed` and measures its full
/// width at half maximum. Offsets are taken from the seed and then from the
/// peak so that their f64 resolution is set by the width.
fn measure_peak(
    inverse: &impl Fn(Dd) -> Dd,
    seed: Dd,
    width: f64,
    length: f64,
) -> Result<TransmissionPeak> {
    let (centre, g_min) = refine_peak(&|e| inverse(seed + e), width)?;
    let k_peak = seed + centre;
    let half = g_min * 2.0;
    let excess = |eta: f64| -> f64 {
        let d = inverse(k_peak + eta) - half;
        d.hi() + d.lo()
    };
    let right = half_max_crossing(&excess, width)?;
    let left = half_max_crossing(&excess, -width)?;
    let fwhm = right - left;
    if !(fwhm > 0.0 && fwhm.is_finite()) {
        return Err(Error::PeakSearch(format!(
            "non-positive peak width {fwhm:e}"
        )));
    }
    let t_max = dd::recip(g_min);
    Ok(TransmissionPeak {
        finesse: PI / length / fwhm,
        wavenumber: k_peak.hi() + k_peak.lo(),
        peak_transmission: t_max.hi() + t_max.lo(),
        fwhm_wavenumber: fwhm,
    })
}

/// Wavenumber offsets from `k` and full widths of the peaks implied by the
/// roots of the transmission denominator evaluated at `k`.
fn pole_estimates(kernel: &Kernel, k: Dd, refl: f64, length: f64) -> Vec<(f64, f64)> {
    let coeffs = kernel.slab().coefficients(k);
    let (r, t) = (dd::to_c64(coeffs.r_d), dd::to_c64(coeffs.t_d));
    let (x, cz) = kernel.phases(k);
    let phase = dd::to_c64(x).arg();
    let a = r * (2.0 * refl.sqrt() * (cz.hi() + cz.lo()));
    let b = (t * t + r * r) * refl;
    quadratic_roots(a, b)
        .into_iter()
        .filter(|root| root.norm() > 1.0 && root.norm().is_finite())
        .map(|root| {
            let rho = root.norm();
            let offset = (root.arg() - phase + PI).rem_euclid(TAU) - PI;
            (offset / length, 2.0 * (rho - 1.0) / rho.sqrt() / length)
        })
        .collect()
}

/// Roots of `b x^2 + a x + 1`.
fn quadratic_roots(a: Complex64, b: Complex64) -> Vec<Complex64> {
    if b.norm() == 0.0 {
        return if a.norm() == 0.0 {
            vec![]
        } else {
            vec![-1.0 / a]
        };
    }
    let disc = (a * a - 4.0 * b).sqrt();
    // q = -(a + s disc) / 2 with the sign that avoids cancellation
    let q = if (a + disc).norm() >= (a - disc).norm() {
        -(a + disc) * 0.5
    } else {
        -(a - disc) * 0.5
    };
    if q.norm() == 0.0 {
        return vec![];
    }
    // roots of b x^2 + a x + 1 are q / b and 1 / q
    vec![q / b, 1.0 / q]
}

/// Minimises the inverse transmission `g` near zero by repeated three-point
/// parabola fits. Returns the offset of the minimum and `g` there.
fn refine_peak(g: &impl Fn(f64) -> Dd, width: f64) -> Result<(f64, Dd)> {
    let mut c = 0.0;
    let mut h = 0.25 * width;
    for _ in 0..100 {
        let (gm, g0, gp) = (g(c - h), g(c), g(c + h));
        let curv = (gp + gm - g0 * 2.0).hi();
        let slope = (gp - gm).hi();
        if !(curv > 0.0) {
            return golden_minimum(g, -3.0 * width, 3.0 * width, width);
        }
        let step = (-0.5 * h * slope / curv).clamp(-2.0 * width, 2.0 * width);
        c += step;
        if step.abs() <= 1e-12 * width {
            return Ok((c, g(c)));
        }
        h = (4.0 * step.abs()).clamp(1e-6 * width, 0.25 * width);
    }
    Err(Error::PeakSearch(
        "parabolic peak refinement did not settle".into(),
    ))
}

fn golden_minimum(g: &impl Fn(f64) -> Dd, mut a: f64, mut b: f64, width: f64) -> Result<(f64, Dd)> {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > 1e-12 * width {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
        if !(gc.hi().is_finite() && gd.hi().is_finite()) {
            return Err(Error::PeakSearch(
                "non-finite transmission during peak search".into(),
            ));
        }
    }
    let m = 0.5 * (a + b);
    Ok((m, g(m)))
}

/// Solves `excess(eta) = 0` on the side of the peak given by the sign of
/// `step`, where `excess(0) < 0`.
fn half_max_crossing(excess: &impl Fn(f64) -> f64, step: f64) -> Result<f64> {
    let mut a = 0.0;
    let mut fa = excess(a);
    let mut b = step;
    let mut fb = excess(b);
    let mut expansions = 0;
    while fb < 0.0 {
        a = b;
        fa = fb;
        b *= 2.0;
        fb = excess(b);
        expansions += 1;
        if expansions > 60 || !fb.is_finite() {
            return Err(Error::PeakSearch(
                "half-maximum crossing not bracketed".into(),
            ));
        }
    }
    if !(fa < 0.0) {
        return Err(Error::PeakSearch("peak lies below its half maximum".into()));
    }
    // Illinois variant of regula falsi
    let mut side = 0;
    for _ in 0..400 {
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a.min(b) && x < a.max(b)) {
            x = 0.5 * (a + b);
        }
        if x == a || x == b {
            break;
        }
        let fx = excess(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == (fb > 0.0) {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}
