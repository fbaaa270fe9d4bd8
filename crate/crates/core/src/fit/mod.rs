//! Nonlinear least squares and the model fits built on it.

mod asymptote;
mod decay;
mod finesse;
mod lm;

pub use asymptote::{fit_f0_asymptote, ASYMPTOTE_PARAMS};
pub use decay::{fit_exponential_decay, DECAY_PARAMS, MIN_DECAY_SAMPLES};
pub use finesse::{
    finesse_curve, fit_finesse_curve, FinesseScanPoint, FixedCavity, LossGuess, Parameterisation,
    FINESSE_PARAMS,
};
pub use lm::{
    finite_difference_jacobian, least_squares, FitConfig, FitResult, Observations, Termination,
};
