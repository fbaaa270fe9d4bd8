//! Base-frequency extrapolation from measured drum modes.

use super::lm::{least_squares, FitConfig, FitResult, Observations};
use crate::error::{Error, Result};
use crate::mechanics::ModeId;

pub const ASYMPTOTE_PARAMS: [&str; 2] = ["f0", "boundary_coeff"];

/// Fits `f_mn / alpha_mn = f0 (1 + b / alpha_mn)`.
///
/// The correction term vanishes for high modes, so `f0` is the asymptote of
/// the scaled frequencies. Needs at least three modes.
pub fn fit_f0_asymptote(modes: &[(ModeId, f64)], cfg: &FitConfig) -> Result<FitResult> {
    if modes.len() < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 modes, got {}",
            modes.len()
        )));
    }
    if modes.iter().any(|(_, f)| !(f.is_finite() && *f > 0.0)) {
        return Err(Error::invalid("mode frequencies must be positive"));
    }
    let alphas: Vec<f64> = modes.iter().map(|(m, _)| m.alpha()).collect();
    let scaled: Vec<f64> = modes.iter().zip(&alphas).map(|((_, f), a)| f / a).collect();
    let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
    let data = Observations::new(scaled)?;
    let model = |p: &[f64]| -> Result<Vec<f64>> {
        Ok(alphas.iter().map(|a| p[0] * (1.0 + p[1] / a)).collect())
    };
    Ok(least_squares(model, &data, &[mean, 0.0], cfg)?.with_names(&ASYMPTOTE_PARAMS))
}
