//! Synthetic thermal displacement spectra.

use std::f64::consts::PI;

use super::{
    effective_mass, mode_frequency, thermal_peak_area, MembraneGeometry, ModeId, ThermalEnvironment,
};
use crate::error::{Error, Result};

/// One-sided displacement spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    frequencies: Vec<f64>,
    psd: Vec<f64>,
}

impl SpectrumSeries {
    pub fn new(frequencies: Vec<f64>, psd: Vec<f64>) -> Result<Self> {
        if frequencies.len() != psd.len() {
            return Err(Error::invalid("frequency and psd arrays differ in length"));
        }
        validate_grid(&frequencies)?;
        if psd.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("psd values must be finite and >= 0"));
        }
        Ok(SpectrumSeries { frequencies, psd })
    }

    /// Frequencies in Hz.
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Spectral density in m^2/Hz.
    pub fn psd(&self) -> &[f64] {
        &self.psd
    }

    /// Trapezoidal integral of the spectrum minus `floor` between `f_lo`
    /// and `f_hi`.
    pub fn band_variance(&self, f_lo: f64, f_hi: f64, floor: f64) -> f64 {
        self.frequencies
            .windows(2)
            .zip(self.psd.windows(2))
            .filter(|(f, _)| f[0] >= f_lo && f[1] <= f_hi)
            .map(|(f, s)| 0.5 * (s[0] + s[1] - 2.0 * floor) * (f[1] - f[0]))
            .sum()
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|f| !f.is_finite()) {
        return Err(Error::invalid("frequency grid must be finite"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("frequency grid must be strictly increasing"));
    }
    Ok(())
}

/// Sum of Lorentzian peaks plus a flat floor.
///
/// Each `(mode, Q)` contributes a peak at `f_mn` with full width `f_mn / Q`
/// and area equal to the thermal variance for the readout of width
/// `readout_width` (`None` for a point readout). Only axisymmetric modes are
/// accepted, since a centred readout does not couple to `m != 0`.
pub fn synth_psd(
    geom: &MembraneGeometry,
    modes: &[(ModeId, f64)],
    env: &ThermalEnvironment,
    readout_width: Option<f64>,
    freq_grid: &[f64],
    floor: f64,
) -> Result<SpectrumSeries> {
    validate_grid(freq_grid)?;
    if !(floor.is_finite() && floor >= 0.0) {
        return Err(Error::invalid(format!("floor must be >= 0, got {floor}")));
    }
    let mut peaks = Vec::with_capacity(modes.len());
    for &(mode, q) in modes {
        if mode.m != 0 {
            return Err(Error::invalid(format!(
                "mode {mode} has no displacement at the membrane centre"
            )));
        }
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::invalid(format!(
                "quality factor must be positive, got {q}"
            )));
        }
        let f0 = mode_frequency(geom, mode);
        let m_eff = effective_mass(geom, mode.root_index(), readout_width)?;
        let area = thermal_peak_area(m_eff, f0, env)?;
        peaks.push((f0, 0.5 * f0 / q, area));
    }
    let psd = freq_grid
        .iter()
        .map(|&f| {
            floor
                + peaks
                    .iter()
                    .map(|&(f0, hwhm, area)| area * hwhm / PI / ((f - f0) * (f - f0) + hwhm * hwhm))
                    .sum::<f64>()
        })
        .collect();
    SpectrumSeries::new(freq_grid.to_vec(), psd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::RootIndex;

    fn geom() -> MembraneGeometry {
        MembraneGeometry::new(0.75e-3, 100e-9, 3200.0, 1e9).unwrap()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn floor_only() {
        let env = ThermalEnvironment::new(300.0).unwrap();
        let s = synth_psd(&geom(), &[], &env, None, &grid(1e5, 2e5, 11), 3e-30).unwrap();
        assert!(s.psd().iter().all(|&v| v == 3e-30));
    }

    #[test]
    fn peak_area_and_position() {
        let g = geom();
        let env = ThermalEnvironment::new(300.0).unwrap();
        let mode = ModeId::new(0, 1).unwrap();
        let f0 = mode_frequency(&g, mode);
        let q = 1e3;
        // +-200 linewidths leaves ~0.3% of the Lorentzian area outside
        let half = 200.0 * f0 / q;
        let freqs = grid(f0 - half, f0 + half, 400_001);
        let s = synth_psd(&g, &[(mode, q)], &env, Some(0.15e-3), &freqs, 0.0).unwrap();
        let area = thermal_peak_area(
            super::super::effective_mass_gaussian(&g, RootIndex::new(1).unwrap(), 0.15e-3).unwrap(),
            f0,
            &env,
        )
        .unwrap();
        let got = s.band_variance(f64::MIN, f64::MAX, 0.0);
        assert!((got / area - 1.0).abs() < 0.01, "{got} vs {area}");
        let imax = s
            .psd()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!((freqs[imax] - f0).abs() <= freqs[1] - freqs[0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let env = ThermalEnvironment::new(300.0).unwrap();
        assert!(synth_psd(&geom(), &[], &env, None, &[2.0, 1.0], 0.0).is_err());
        let m11 = ModeId::new(1, 1).unwrap();
        assert!(synth_psd(&geom(), &[(m11, 1e3)], &env, None, &[1.0, 2.0], 0.0).is_err());
        let m01 = ModeId::new(0, 1).unwrap();
        assert!(synth_psd(&geom(), &[(m01, 0.0)], &env, None, &[1.0, 2.0], 0.0).is_err());
    }
}
