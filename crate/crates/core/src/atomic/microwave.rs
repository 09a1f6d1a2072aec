//! Microwave magnetic-dipole coupling between the ground hyperfine levels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::angmom::{hyperfine_element, HalfInt, SpinOp};
use super::atom::AtomSpec;
use crate::constants::{C, HBAR, MU_0, MU_B, TAU};
use crate::error::{Error, Result};

/// `2μ_B/ħ`, rad/(s·T).
pub const GAMMA_E: f64 = 2.0 * MU_B / HBAR;

/// Laboratory microwave settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MwFieldLab {
    /// dBm
    pub power: f64,
    /// m
    pub distance: f64,
    /// linear
    pub antenna_gain: f64,
    /// `(B_x', B_y', B_z')` amplitudes, T.
    pub amplitudes: [f64; 3],
    /// `(φ_x', φ_y', φ_z')`, rad.
    pub phases: [f64; 3],
}

impl MwFieldLab {
    pub fn validate(&self) -> Result<()> {
        if self.amplitudes.iter().any(|b| !(*b >= 0.0)) {
            return Err(Error::Domain("field amplitudes must be non-negative".into()));
        }
        if self.phases.iter().any(|p| !(0.0..TAU).contains(p)) {
            return Err(Error::Domain("field phases must lie in [0, 2π)".into()));
        }
        Ok(())
    }

    /// Field with amplitude `b` along z' only.
    pub fn along_z(b: f64) -> Self {
        MwFieldLab { power: f64::NAN, distance: f64::NAN, antenna_gain: 1.0, amplitudes: [0.0, 0.0, b], phases: [0.0; 3] }
    }
}

/// How the `|2,0⟩ ↔ |3,0⟩` matrix element enters the π Rabi frequency.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixElement {
    /// Hyperfine matrix element of `J_z'`.
    #[default]
    Hyperfine,
    /// Matrix element replaced by 1, `Ωπ = (2μ_B/ħ)B_z'`.
    Unity,
}

/// `(Ω−, Ωπ, Ω+)` for the transitions from `|F_lo, 0⟩` to `|F_hi, −1, 0, +1⟩`.
pub fn mw_rabi_frequencies(field: &MwFieldLab, atom: &AtomSpec, convention: MatrixElement) -> Result<[Complex64; 3]> {
    field.validate()?;
    let levels = atom.hyperfine_levels();
    let (lo, hi) = match levels.as_slice() {
        [lo, .., hi] if lo != hi => (*lo, *hi),
        _ => return Err(Error::Domain("atom has a single ground hyperfine level".into())),
    };
    let [bx, by, bz] = field.amplitudes;
    let [px, py, pz] = field.phases;
    let ex = Complex64::from_polar(bx, -px);
    let ey = Complex64::from_polar(by, -py);
    let ez = Complex64::from_polar(bz, -pz);
    let i = Complex64::i();
    let b_plus = 0.5 * (ex - i * ey);
    let b_minus = 0.5 * (ex + i * ey);

    let (ni, ne) = (atom.nuclear_spin, atom.electron_spin);
    let el = |m2: i32, op| hyperfine_element(ni, ne, lo, HalfInt::ZERO, hi, HalfInt::int(m2), op);
    let (e_minus, e_plus, e_pi) = match convention {
        MatrixElement::Hyperfine => (el(-1, SpinOp::JMinus)?, el(1, SpinOp::JPlus)?, el(0, SpinOp::Jz)?),
        MatrixElement::Unity => (el(-1, SpinOp::JMinus)?, el(1, SpinOp::JPlus)?, 1.0),
    };
    Ok([
        GAMMA_E * b_minus * e_minus,
        GAMMA_E * ez * e_pi,
        GAMMA_E * b_plus * e_plus,
    ])
}

/// Far-field magnetic amplitude at `distance` from an isotropic radiator
/// with `gain`, T.
pub fn far_field_b(power_dbm: f64, distance: f64, gain: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::Domain(format!("distance must be positive, got {distance} m")));
    }
    if !(gain > 0.0) {
        return Err(Error::Domain(format!("antenna gain must be positive, got {gain}")));
    }
    let watts = 1e-3 * 10f64.powf(power_dbm / 10.0);
    let intensity = gain * watts / (2.0 * TAU * distance * distance);
    Ok((2.0 * MU_0 * intensity / C).sqrt())
}

/// `|Ωπ|` for a microwave of `power` dBm radiated from `distance`, with the
/// field taken along the quantization axis.
pub fn dbm_to_rabi(power: f64, distance: f64, gain: f64, atom: &AtomSpec) -> Result<f64> {
    let b = far_field_b(power, distance, gain)?;
    let [_, pi, _] = mw_rabi_frequencies(&MwFieldLab::along_z(b), atom, MatrixElement::Hyperfine)?;
    Ok(pi.norm())
}

/// Mapping from a microwave power setting to the π Rabi frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum MwCoupling {
    /// Isotropic far field, see [`dbm_to_rabi`].
    FarField { distance: f64, gain: f64 },
    /// `Ωπ = rabi_at_0dbm · 10^(P/20)`, for a calibrated setup.
    Calibrated { rabi_at_0dbm: f64 },
}

impl MwCoupling {
    pub fn rabi(&self, power_dbm: f64, atom: &AtomSpec) -> Result<f64> {
        match *self {
            MwCoupling::FarField { distance, gain } => dbm_to_rabi(power_dbm, distance, gain, atom),
            MwCoupling::Calibrated { rabi_at_0dbm } => {
                if !(rabi_at_0dbm >= 0.0) {
                    return Err(Error::Domain("calibrated Rabi frequency must be non-negative".into()));
                }
                Ok(rabi_at_0dbm * 10f64.powf(power_dbm / 20.0))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unity_convention_at_one_microtesla() {
        let [_, pi, _] = mw_rabi_frequencies(&MwFieldLab::along_z(1e-6), &AtomSpec::default(), MatrixElement::Unity).unwrap();
        assert!((pi.norm() / TAU - 27_992.5).abs() < 1.0, "{}", pi.norm() / TAU);
    }

    #[test]
    fn polarization_selects_transitions() {
        let atom = AtomSpec::default();
        let x = MwFieldLab { amplitudes: [1e-6, 0.0, 0.0], ..MwFieldLab::along_z(0.0) };
        let [m, pi, p] = mw_rabi_frequencies(&x, &atom, MatrixElement::Hyperfine).unwrap();
        assert_eq!(pi.norm(), 0.0);
        assert!(m.norm() > 0.0 && p.norm() > 0.0);
        let z = MwFieldLab::along_z(1e-6);
        let [m, _, p] = mw_rabi_frequencies(&z, &atom, MatrixElement::Hyperfine).unwrap();
        assert_eq!((m.norm(), p.norm()), (0.0, 0.0));
    }

    #[test]
    fn power_and_distance_scaling() {
        let atom = AtomSpec::default();
        let a = dbm_to_rabi(-10.0, 1.0, 1.0, &atom).unwrap();
        let b = dbm_to_rabi(10.0, 1.0, 1.0, &atom).unwrap();
        assert!((b / a - 10.0).abs() < 1e-12);
        let far = dbm_to_rabi(-10.0, 2.0, 1.0, &atom).unwrap();
        assert!((a / far - 2.0).abs() < 1e-12);
        assert!(dbm_to_rabi(0.0, 0.0, 1.0, &atom).is_err());
    }

    #[test]
    fn calibrated_coupling() {
        let c = MwCoupling::Calibrated { rabi_at_0dbm: 100.0 };
        let atom = AtomSpec::default();
        assert!((c.rabi(20.0, &atom).unwrap() - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn bad_phase_rejected() {
        let f = MwFieldLab { phases: [0.0, 7.0, 0.0], ..MwFieldLab::along_z(1e-6) };
        assert!(mw_rabi_frequencies(&f, &AtomSpec::default(), MatrixElement::Hyperfine).is_err());
    }
}
