//! Single-exponential decay `A0 exp(-t / tau) + offset`.

use super::lm::{least_squares, FitConfig, FitResult, Observations};
use crate::error::{Error, Result};

pub const MIN_DECAY_SAMPLES: usize = 8;

/// Parameter names in [`FitResult`] order.
pub const DECAY_PARAMS: [&str; 3] = ["a0", "tau", "offset"];

/// Fits `A0 exp(-t / tau) + offset`.
///
/// The starting point comes from a log-linear regression of the data with a
/// provisional offset just below the minimum. Rising, flat or otherwise
/// non-decaying traces give [`Error::FitFailure`].
pub fn fit_exponential_decay(
    times: &[f64],
    values: &[f64],
    sigmas: Option<&[f64]>,
    cfg: &FitConfig,
) -> Result<FitResult> {
    if times.len() != values.len() {
        return Err(Error::invalid("times and values differ in length"));
    }
    if times.len() < MIN_DECAY_SAMPLES {
        return Err(Error::invalid(format!(
            "need at least {MIN_DECAY_SAMPLES} samples, got {}",
            times.len()
        )));
    }
    if times.iter().chain(values).any(|v| !v.is_finite()) {
        return Err(Error::invalid("trace contains non-finite values"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("times must be strictly increasing"));
    }
    let data = match sigmas {
        Some(s) => Observations::with_sigmas(values.to_vec(), s.to_vec())?,
        None => Observations::new(values.to_vec())?,
    };

    let (a0, tau, offset) = initial_guess(times, values)?;
    let model = |p: &[f64]| -> Result<Vec<f64>> {
        Ok(times
            .iter()
            .map(|t| p[0] * (-t / p[1]).exp() + p[2])
            .collect())
    };
    let fit = least_squares(model, &data, &[a0, tau, offset], cfg)?.with_names(&DECAY_PARAMS);

    let span = times[times.len() - 1] - times[0];
    let (a0, tau) = (fit.params[0], fit.params[1]);
    if !(tau > 0.0) {
        return Err(Error::FitFailure(format!(
            "fitted decay time {tau:e} s is not positive"
        )));
    }
    if !(a0 > 0.0) {
        return Err(Error::FitFailure(format!(
            "fitted amplitude {a0:e} is not positive"
        )));
    }
    if tau > 1e6 * span {
        return Err(Error::FitFailure(format!(
            "fitted decay time {tau:e} s diverges against a {span:e} s trace"
        )));
    }
    Ok(fit)
}

fn initial_guess(times: &[f64], values: &[f64]) -> Result<(f64, f64, f64)> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    if !(range > 0.0) || range <= 1e-12 * hi.abs().max(lo.abs()) {
        return Err(Error::FitFailure("trace is constant".into()));
    }
    let offset = lo - 1e-3 * range;
    // weighted by (y - offset)^2 so the noisy tail does not dominate
    let (mut sw, mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &v) in times.iter().zip(values) {
        let d = v - offset;
        let w = d * d;
        let y = d.ln();
        sw += w;
        st += w * t;
        sy += w * y;
        stt += w * t * t;
        sty += w * t * y;
    }
    let denom = sw * stt - st * st;
    let slope = (sw * sty - st * sy) / denom;
    let intercept = (sy - slope * st) / sw;
    if !(slope < 0.0) || !slope.is_finite() {
        return Err(Error::FitFailure("trace does not decay".into()));
    }
    Ok((intercept.exp(), -1.0 / slope, offset))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn trace(a0: f64, tau: f64, offset: f64, n: usize, span: f64) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..n).map(|i| span * i as f64 / (n - 1) as f64).collect();
        let y = t.iter().map(|t| a0 * (-t / tau).exp() + offset).collect();
        (t, y)
    }

    #[test]
    fn noiseless_round_trip() {
        let tau = 5.131e-6;
        let (t, y) = trace(1.0, tau, 0.0, 200, 5.0 * tau);
        let fit = fit_exponential_decay(&t, &y, None, &FitConfig::default()).unwrap();
        assert!(fit.converged);
        assert!(
            (fit.params[1] / tau - 1.0).abs() < 1e-9,
            "{}",
            fit.params[1]
        );
        assert!((fit.params[0] - 1.0).abs() < 1e-9);
        assert!(fit.params[2].abs() < 1e-9);
    }

    #[test]
    fn with_offset() {
        let (t, y) = trace(2.5, 0.3, 0.7, 100, 2.0);
        let fit = fit_exponential_decay(&t, &y, None, &FitConfig::default()).unwrap();
        assert!((fit.params[1] / 0.3 - 1.0).abs() < 1e-9);
        assert!((fit.params[2] - 0.7).abs() < 1e-9);
    }

    #[test]
    fn degenerate_traces_fail() {
        let t: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let flat = vec![0.4; 20];
        assert!(matches!(
            fit_exponential_decay(&t, &flat, None, &FitConfig::default()),
            Err(Error::FitFailure(_))
        ));
        let rising: Vec<f64> = t.iter().map(|t| (t / 5.0).exp()).collect();
        assert!(matches!(
            fit_exponential_decay(&t, &rising, None, &FitConfig::default()),
            Err(Error::FitFailure(_))
        ));
        assert!(fit_exponential_decay(&t[..5], &flat[..5], None, &FitConfig::default()).is_err());
    }

    #[test]
    fn noisy_fits_cover_truth() {
        let tau = 5.131e-6;
        let (t, clean) = trace(1.0, tau, 0.0, 200, 5.0 * tau);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let mut hits = 0;
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y: Vec<f64> = clean.iter().map(|v| v + noise.sample(&mut rng)).collect();
            let fit = fit_exponential_decay(&t, &y, None, &FitConfig::default()).unwrap();
            if (fit.params[1] - tau).abs() <= 3.0 * fit.sigmas[1] {
                hits += 1;
            }
        }
        assert!(hits >= 95, "{hits}/100");
    }
}
