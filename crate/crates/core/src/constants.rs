//! CODATA 2018 constants in SI units.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Bohr magneton, J/T.
pub const MU_B: f64 = 9.274_010_078_3e-24;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability, N/A².
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Speed of light, m/s.
pub const C: f64 = 299_792_458.0;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;

/// `2π`.
pub const TAU: f64 = std::f64::consts::TAU;
