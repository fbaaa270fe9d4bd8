//! Shared fixtures for the benchmarks: the circular SiN membrane and the
//! 9 cm cavity it was measured in.

use membrane_cavity::fit::FixedCavity;
use membrane_cavity::MembraneGeometry;

pub fn membrane() -> MembraneGeometry {
    MembraneGeometry::new(0.75e-3, 100e-9, 3200.0, 1e9).expect("valid geometry")
}

pub fn cavity() -> FixedCavity {
    FixedCavity {
        thickness: 97e-9,
        n_real: 2.021,
        length: 9.03e-2,
        wavelength: 1064e-9,
        empty_finesse: 53518.0,
    }
}

/// Positions over half a wavelength, `count` of them.
pub fn positions(count: usize) -> Vec<f64> {
    let lambda = cavity().wavelength;
    (0..count)
        .map(|i| i as f64 * 0.5 * lambda / count as f64)
        .collect()
}
