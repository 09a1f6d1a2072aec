//! Closed-loop (Δ-type) coherent population trapping.
//!
//! Steady-state spectra of a three-level atom whose two ground states are
//! coupled both optically (through a common excited state) and directly by
//! a microwave, Doppler averaging over a warm vapor, probe propagation
//! through the cell, and inversion of measured spectra for the microwave
//! parameters.
//!
//! The numerical core is generic over [`scalar::Real`]; the aliases below
//! fix it to `f64`.

pub mod analytic;
pub mod atomic;
pub mod bloch;
pub mod constants;
pub mod doppler;
pub mod error;
pub mod linalg;
pub mod propagation;
pub mod scalar;
pub mod sensing;
pub mod spectra;

pub use error::{Error, Result};

pub use atomic::{AtomSpec, HalfInt, MwCoupling, MwFieldLab};
pub use doppler::ThermalSpec;
pub use propagation::CellSpec;

pub type FieldConfig = bloch::FieldConfig<f64>;
pub type DecayRates = bloch::DecayRates<f64>;
pub type DensityMatrix = bloch::DensityMatrix<f64>;
pub type Liouvillian = bloch::Liouvillian<f64>;
pub type AnalyticParams = analytic::AnalyticParams<f64>;
pub type Mat3 = linalg::Mat3<f64>;
pub type Mat9 = linalg::Mat9<f64>;
