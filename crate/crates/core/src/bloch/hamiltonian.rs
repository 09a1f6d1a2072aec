use num_complex::Complex;

use super::{FieldConfig, A, B, C};
use crate::linalg::Mat3;
use crate::scalar::Real;

/// Rotating-frame Hamiltonian (units of ħ) for an atom moving with
/// longitudinal velocity `v`.
///
/// Diagonal `(0, Δ_p − k_p v − s, Δ_c − k_c v + s)` where `s` is the
/// microwave light shift; couplings `Ω_p` on `|b⟩⟨a|`, `Ω_c` on `|c⟩⟨a|`
/// and `Ω_μ e^{iφ}` on `|b⟩⟨c|`.
pub fn build_hamiltonian<T: Real>(f: &FieldConfig<T>, v: T) -> Mat3<T> {
    let s = f.mw_light_shift();
    let re = |x: T| Complex::new(x, T::zero());
    let mut h = Mat3::zeros();
    h[(B, B)] = re(f.delta_p - f.k_p * v - s);
    h[(C, C)] = re(f.delta_c - f.k_c * v + s);
    h[(B, A)] = f.omega_p;
    h[(A, B)] = f.omega_p.conj();
    h[(C, A)] = f.omega_c;
    h[(A, C)] = f.omega_c.conj();
    let m = f.mw_coupling();
    h[(B, C)] = m;
    h[(C, B)] = m.conj();
    h
}
