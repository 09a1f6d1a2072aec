use serde::{Deserialize, Serialize};

use super::angmom::HalfInt;
use crate::constants::{AMU, C, TAU};

/// Atomic species data for the effective three-level system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub name: String,
    /// kg
    pub mass: f64,
    /// rad/s
    pub ground_hyperfine_splitting: f64,
    pub nuclear_spin: HalfInt,
    pub electron_spin: HalfInt,
    /// C·m
    pub dipole_moment: f64,
    /// m
    pub optical_wavelength: f64,
    /// rad/s
    pub natural_linewidth: f64,
}

const RB85_MASS_U: f64 = 84.911_789_738;
const RB85_HFS_HZ: f64 = 3.035_74e9;

impl AtomSpec {
    /// ⁸⁵Rb on the D1 line (795 nm).
    pub fn rb85_d1() -> Self {
        AtomSpec {
            name: "rb85-d1".into(),
            mass: RB85_MASS_U * AMU,
            ground_hyperfine_splitting: TAU * RB85_HFS_HZ,
            nuclear_spin: HalfInt::from_twice(5),
            electron_spin: HalfInt::HALF,
            dipole_moment: 2.5377e-29,
            optical_wavelength: 794.979e-9,
            natural_linewidth: TAU * 5.75e6,
        }
    }

    /// ⁸⁵Rb on the D2 line (780 nm).
    pub fn rb85_d2() -> Self {
        AtomSpec {
            name: "rb85-d2".into(),
            dipole_moment: 3.5842e-29,
            optical_wavelength: 780.241e-9,
            natural_linewidth: TAU * 6.0666e6,
            ..Self::rb85_d1()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "rb85-d1" | "rb85" => Some(Self::rb85_d1()),
            "rb85-d2" => Some(Self::rb85_d2()),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["rb85-d1", "rb85-d2"]
    }

    /// Ground hyperfine levels `|I−J| ..= I+J`.
    pub fn hyperfine_levels(&self) -> Vec<HalfInt> {
        let lo = (self.nuclear_spin - self.electron_spin).abs().twice();
        let hi = (self.nuclear_spin + self.electron_spin).twice();
        (lo..=hi).step_by(2).map(HalfInt::from_twice).collect()
    }

    /// Optical wavenumber, rad/m.
    pub fn optical_wavenumber(&self) -> f64 {
        TAU / self.optical_wavelength
    }

    /// Optical angular frequency, rad/s.
    pub fn optical_angular_frequency(&self) -> f64 {
        C * self.optical_wavenumber()
    }

    /// Wavenumber of a field resonant with the ground splitting, rad/m.
    pub fn microwave_wavenumber(&self) -> f64 {
        self.ground_hyperfine_splitting / C
    }
}

impl Default for AtomSpec {
    fn default() -> Self {
        Self::rb85_d1()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rb85_levels() {
        let a = AtomSpec::default();
        assert_eq!(a.hyperfine_levels(), vec![HalfInt::int(2), HalfInt::int(3)]);
        assert!((a.ground_hyperfine_splitting / TAU - 3.035_74e9).abs() < 1.0);
        assert!((a.microwave_wavenumber() - 63.625).abs() < 0.01);
    }

    #[test]
    fn presets_resolve() {
        for n in AtomSpec::preset_names() {
            assert_eq!(&AtomSpec::preset(n).unwrap().name, n);
        }
        assert!(AtomSpec::preset("cs133").is_none());
    }
}
