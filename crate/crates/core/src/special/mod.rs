//! Special functions used by the membrane model: `J_m`, its zeros, and
//! adaptive quadrature for the readout overlap integrals.

mod bessel;
mod quadrature;
mod roots;

pub use bessel::{bessel_j, BesselOrder, SERIES_CROSSOVER};
pub use quadrature::{integrate_radial, MAX_SUBINTERVALS};
pub use roots::{bessel_root, bessel_roots, RootIndex};

pub(crate) use bessel::j;
