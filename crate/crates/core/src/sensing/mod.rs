//! Inversion of spectra for microwave parameters, and the lineshape
//! asymmetry as a frequency discriminator.

mod discriminator;
mod fit;
pub mod simplex;

pub use discriminator::*;
pub use fit::*;
