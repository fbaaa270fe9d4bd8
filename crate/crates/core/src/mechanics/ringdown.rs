//! Mechanical quality factor from an amplitude ringdown.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fit::{fit_exponential_decay, FitConfig, FitResult, MIN_DECAY_SAMPLES};

/// Amplitude samples of a freely decaying resonance.
#[derive(Debug, Clone, PartialEq)]
pub struct RingdownTrace {
    times: Vec<f64>,
    amplitudes: Vec<f64>,
    drive_frequency: f64,
}

impl RingdownTrace {
    pub fn new(times: Vec<f64>, amplitudes: Vec<f64>, drive_frequency: f64) -> Result<Self> {
        if times.len() != amplitudes.len() {
            return Err(Error::invalid("times and amplitudes differ in length"));
        }
        if times.len() < MIN_DECAY_SAMPLES {
            return Err(Error::invalid(format!(
                "ringdown needs at least {MIN_DECAY_SAMPLES} samples"
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("ringdown times must be strictly increasing"));
        }
        if !(drive_frequency.is_finite() && drive_frequency > 0.0) {
            return Err(Error::invalid(format!(
                "drive frequency must be positive, got {drive_frequency}"
            )));
        }
        Ok(RingdownTrace {
            times,
            amplitudes,
            drive_frequency,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn drive_frequency(&self) -> f64 {
        self.drive_frequency
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityFactor {
    pub q: f64,
    pub q_sigma: f64,
    /// Amplitude decay time in s.
    pub tau: f64,
    pub tau_sigma: f64,
    pub fit: FitResult,
}

/// Fits the amplitude decay and converts it with `Q = pi f tau`.
pub fn q_from_ringdown(trace: &RingdownTrace, cfg: &FitConfig) -> Result<QualityFactor> {
    let fit = fit_exponential_decay(&trace.times, &trace.amplitudes, None, cfg)?;
    let (tau, tau_sigma) = (fit.params[1], fit.sigmas[1]);
    let scale = PI * trace.drive_frequency;
    Ok(QualityFactor {
        q: scale * tau,
        q_sigma: scale * tau_sigma,
        tau,
        tau_sigma,
        fit,
    })
}
