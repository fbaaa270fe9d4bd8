//! Membrane loss parameters from a finesse-versus-position scan.

use super::lm::{least_squares, FitConfig, FitResult, Observations};
use crate::error::{Error, Result};
use crate::optics::{finesse_from_scan, CavityConfig, OpticalSlab};

pub const FINESSE_PARAMS: [&str; 2] = ["n_imag", "roughness"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinesseScanPoint {
    /// Membrane position from the cavity centre in m.
    pub z: f64,
    pub finesse: f64,
    pub finesse_sigma: Option<f64>,
}

impl FinesseScanPoint {
    pub fn new(z: f64, finesse: f64, finesse_sigma: Option<f64>) -> Result<Self> {
        if !z.is_finite() {
            return Err(Error::invalid(format!("position must be finite, got {z}")));
        }
        if !(finesse.is_finite() && finesse > 1.0) {
            return Err(Error::invalid(format!(
                "finesse must exceed 1, got {finesse}"
            )));
        }
        if let Some(s) = finesse_sigma {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::invalid(format!(
                    "finesse uncertainty must be positive, got {s}"
                )));
            }
        }
        Ok(FinesseScanPoint {
            z,
            finesse,
            finesse_sigma,
        })
    }
}

/// Quantities held fixed while the losses are fitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedCavity {
    /// Membrane thickness in m.
    pub thickness: f64,
    pub n_real: f64,
    /// Mirror spacing in m.
    pub length: f64,
    pub wavelength: f64,
    pub empty_finesse: f64,
}

impl FixedCavity {
    pub fn cavity(&self) -> Result<CavityConfig> {
        CavityConfig::from_empty_finesse(self.length, self.wavelength, self.empty_finesse)
    }

    pub fn slab(&self, n_imag: f64, roughness: f64) -> Result<OpticalSlab> {
        OpticalSlab::new(self.n_real, n_imag, self.thickness, roughness)
    }
}

/// Starting point for the loss fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossGuess {
    pub n_imag: f64,
    /// Optical roughness in m.
    pub roughness: f64,
}

impl Default for LossGuess {
    fn default() -> Self {
        LossGuess {
            n_imag: 1e-6,
            roughness: 100e-12,
        }
    }
}

/// Variables the optimiser works in. `Log` keeps both losses positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parameterisation {
    #[default]
    Log,
    Linear,
}

/// Finesse at each position for the given losses.
pub fn finesse_curve(
    fixed: &FixedCavity,
    n_imag: f64,
    roughness: f64,
    positions: &[f64],
) -> Result<Vec<f64>> {
    let cav = fixed.cavity()?;
    let slab = fixed.slab(n_imag, roughness)?;
    positions
        .iter()
        .map(|&z| finesse_from_scan(&cav, &slab, z))
        .collect()
}

/// Fits the imaginary index and optical roughness of the membrane to a
/// finesse scan. Needs at least four positions spanning a quarter
/// wavelength. The returned parameters are always `n_imag` and `roughness`
/// (m), whatever the parameterisation.
pub fn fit_finesse_curve(
    data: &[FinesseScanPoint],
    fixed: &FixedCavity,
    guess: LossGuess,
    parameterisation: Parameterisation,
    cfg: &FitConfig,
) -> Result<FitResult> {
    if data.len() < 4 {
        return Err(Error::invalid(format!(
            "need at least 4 scan points, got {}",
            data.len()
        )));
    }
    let positions: Vec<f64> = data.iter().map(|p| p.z).collect();
    let lo = positions.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = positions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 0.25 * fixed.wavelength {
        return Err(Error::invalid(format!(
            "scan spans {:e} m, less than a quarter wavelength ({:e} m)",
            hi - lo,
            0.25 * fixed.wavelength
        )));
    }
    let cav = fixed.cavity()?;
    for z in &positions {
        cav.check_position(*z)?;
    }
    let values: Vec<f64> = data.iter().map(|p| p.finesse).collect();
    let observations = match data
        .iter()
        .map(|p| p.finesse_sigma)
        .collect::<Option<Vec<f64>>>()
    {
        Some(s) => Observations::with_sigmas(values, s)?,
        None if data.iter().any(|p| p.finesse_sigma.is_some()) => {
            return Err(Error::invalid(
                "finesse uncertainties must be given for all points or none",
            ));
        }
        None => Observations::new(values)?,
    };

    let fit = match parameterisation {
        Parameterisation::Log => {
            if !(guess.n_imag > 0.0 && guess.roughness > 0.0) {
                return Err(Error::invalid(
                    "log parameterisation needs positive initial losses",
                ));
            }
            let model = |p: &[f64]| finesse_curve(fixed, p[0].exp(), p[1].exp(), &positions);
            let theta0 = [guess.n_imag.ln(), guess.roughness.ln()];
            least_squares(model, &observations, &theta0, cfg)?
                .transformed(&[(f64::exp, f64::exp), (f64::exp, f64::exp)])
        }
        Parameterisation::Linear => {
            if !(guess.n_imag >= 0.0 && guess.roughness >= 0.0) {
                return Err(Error::invalid("initial losses must be non-negative"));
            }
            let model = |p: &[f64]| finesse_curve(fixed, p[0], p[1], &positions);
            least_squares(model, &observations, &[guess.n_imag, guess.roughness], cfg)?
        }
    };
    Ok(fit.with_names(&FINESSE_PARAMS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::finite_difference_jacobian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fixed(thickness: f64) -> FixedCavity {
        FixedCavity {
            thickness,
            n_real: 2.021,
            length: 9.03e-2,
            wavelength: 1064e-9,
            empty_finesse: 53518.0,
        }
    }

    fn positions(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| i as f64 * 1064e-9 / 2.0 / n as f64)
            .collect()
    }

    fn scan(fixed: &FixedCavity, n_imag: f64, roughness: f64) -> Vec<FinesseScanPoint> {
        let z = positions(40);
        let f = finesse_curve(fixed, n_imag, roughness, &z).unwrap();
        z.iter()
            .zip(f)
            .map(|(&z, f)| FinesseScanPoint::new(z, f, None).unwrap())
            .collect()
    }

    #[test]
    fn round_trip_circular_membrane() {
        let fx = fixed(97e-9);
        let data = scan(&fx, 1.97e-6, 287e-12);
        let fit = fit_finesse_curve(
            &data,
            &fx,
            LossGuess::default(),
            Parameterisation::Log,
            &FitConfig::default(),
        )
        .unwrap();
        assert!(fit.converged, "{fit:?}");
        assert!((fit.params[0] / 1.97e-6 - 1.0).abs() < 1e-4, "{fit:?}");
        assert!((fit.params[1] / 287e-12 - 1.0).abs() < 1e-4, "{fit:?}");
    }

    #[test]
    fn round_trip_thin_membrane() {
        let fx = fixed(50e-9);
        let data = scan(&fx, 1.0e-5, 280e-12);
        let fit = fit_finesse_curve(
            &data,
            &fx,
            LossGuess::default(),
            Parameterisation::Log,
            &FitConfig::default(),
        )
        .unwrap();
        assert!(fit.converged, "{fit:?}");
        assert!((fit.params[0] / 1.0e-5 - 1.0).abs() < 1e-4, "{fit:?}");
        assert!((fit.params[1] / 280e-12 - 1.0).abs() < 1e-4, "{fit:?}");
    }

    #[test]
    fn log_and_linear_agree() {
        let fx = fixed(97e-9);
        let data = scan(&fx, 1.97e-6, 287e-12);
        let cfg = FitConfig::default();
        let guess = LossGuess {
            n_imag: 1.5e-6,
            roughness: 250e-12,
        };
        let log = fit_finesse_curve(&data, &fx, guess, Parameterisation::Log, &cfg).unwrap();
        let lin = fit_finesse_curve(&data, &fx, guess, Parameterisation::Linear, &cfg).unwrap();
        for i in 0..2 {
            assert!(
                (log.params[i] / lin.params[i] - 1.0).abs() < 1e-3,
                "{log:?} {lin:?}"
            );
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let fx = fixed(97e-9);
        let z = positions(8);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let theta = [rng.gen_range(0.5e-6..2e-5), rng.gen_range(50e-12..400e-12)];
            let model = |p: &[f64]| finesse_curve(&fx, p[0], p[1], &z);
            let jac = finite_difference_jacobian(model, &theta).unwrap();
            for j in 0..2 {
                let h = 1e-6 * theta[j];
                let (mut up, mut down) = (theta, theta);
                up[j] += h;
                down[j] -= h;
                let fu = finesse_curve(&fx, up[0], up[1], &z).unwrap();
                let fd = finesse_curve(&fx, down[0], down[1], &z).unwrap();
                for i in 0..z.len() {
                    let oracle = (fu[i] - fd[i]) / (up[j] - down[j]);
                    assert!(
                        (jac[i][j] / oracle - 1.0).abs() < 1e-6,
                        "theta {theta:?} row {i} col {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_short_or_narrow_scans() {
        let fx = fixed(97e-9);
        let data = scan(&fx, 1.97e-6, 287e-12);
        let cfg = FitConfig::default();
        assert!(fit_finesse_curve(
            &data[..3],
            &fx,
            LossGuess::default(),
            Parameterisation::Log,
            &cfg
        )
        .is_err());
        // first ten points cover lambda/8
        assert!(fit_finesse_curve(
            &data[..10],
            &fx,
            LossGuess::default(),
            Parameterisation::Log,
            &cfg
        )
        .is_err());
        let zero = LossGuess {
            n_imag: 0.0,
            roughness: 1e-10,
        };
        assert!(fit_finesse_curve(&data, &fx, zero, Parameterisation::Log, &cfg).is_err());
        let mut mixed = data.clone();
        mixed[0].finesse_sigma = Some(10.0);
        assert!(fit_finesse_curve(
            &mixed,
            &fx,
            LossGuess::default(),
            Parameterisation::Log,
            &cfg
        )
        .is_err());
        assert!(FinesseScanPoint::new(0.0, 0.5, None).is_err());
    }

    #[test]
    fn weighted_fit_uses_given_uncertainties() {
        let fx = fixed(97e-9);
        let mut data = scan(&fx, 1.97e-6, 287e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in &mut data {
            p.finesse_sigma = Some(0.01 * p.finesse);
            p.finesse *= 1.0 + 0.01 * rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
        let fit = fit_finesse_curve(
            &data,
            &fx,
            LossGuess::default(),
            Parameterisation::Log,
            &FitConfig::default(),
        )
        .unwrap();
        assert!(fit.weighted);
        for (i, truth) in [1.97e-6, 287e-12].iter().enumerate() {
            assert!(
                (fit.params[i] - truth).abs() < 4.0 * fit.sigmas[i],
                "{fit:?}"
            );
        }
    }
}
