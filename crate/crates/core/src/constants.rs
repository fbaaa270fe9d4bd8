//! Physical constants (exact SI values) and reference numbers.

/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Speed of light in vacuum in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Effective mass of the odd modes of a square membrane, as a fraction of the
/// physical mass, for a centred point readout. Used only as a comparison
/// figure; square membranes are not modelled.
pub const SQUARE_ODD_MODE_MASS_RATIO: f64 = 0.25;
