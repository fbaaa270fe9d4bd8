// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod fit;
pub mod mechanics;
pub mod optics;
pub mod special;

pub use error::{Error, Result};
pub use fit::{FitConfig, FitResult};
pub use mechanics::{MembraneGeometry, ModeId, ThermalEnvironment};
pub use optics::{CavityConfig, OpticalSlab};
