use num_complex::Complex;

use super::{DecayRates, DensityMatrix, FieldConfig};
use crate::linalg::Mat3;
use crate::scalar::Real;

/// `dρ/dt` written out component by component, for an atom at rest with
/// relative loop phase `phi_r`.
///
/// Independent of the superoperator assembly; the two must agree.
pub fn bloch_rhs<T: Real>(rho: &DensityMatrix<T>, f: &FieldConfig<T>, d: &DecayRates<T>, phi_r: T) -> Mat3<T> {
    let r = |i: usize, j: usize| rho.get(i, j);
    let i = Complex::new(T::zero(), T::one());
    let half = T::lit(0.5);
    let s = f.mw_light_shift();
    let db = f.delta_p - s;
    let dc = f.delta_c + s;
    let (op, oc) = (f.omega_p, f.omega_c);
    let m = Complex::from_polar(f.omega_mu, phi_r);
    let ga = d.gamma_ab + d.gamma_ac;

    let aa = -i * (op.conj() * r(1, 0) + oc.conj() * r(2, 0) - op * r(0, 1) - oc * r(0, 2)) - r(0, 0) * ga;
    let bb = -i * (op * r(0, 1) + m * r(2, 1) - op.conj() * r(1, 0) - m.conj() * r(1, 2)) + r(0, 0) * d.gamma_ab
        + r(2, 2) * d.gamma_bc
        - r(1, 1) * d.gamma_cb;
    let cc = -i * (oc * r(0, 2) + m.conj() * r(1, 2) - oc.conj() * r(2, 0) - m * r(2, 1)) + r(0, 0) * d.gamma_ac
        + r(1, 1) * d.gamma_cb
        - r(2, 2) * d.gamma_bc;
    let ab = -i * (op.conj() * (r(1, 1) - r(0, 0)) + oc.conj() * r(2, 1) - r(0, 1) * db - m.conj() * r(0, 2))
        - r(0, 1) * (half * (ga + d.gamma_cb + d.gamma_c));
    let ac = -i * (oc.conj() * (r(2, 2) - r(0, 0)) + op.conj() * r(1, 2) - m * r(0, 1) - r(0, 2) * dc)
        - r(0, 2) * (half * (ga + d.gamma_bc + d.gamma_c));
    let bc = -i * (op * r(0, 2) + r(1, 2) * (db - dc) + m * (r(2, 2) - r(1, 1)) - oc.conj() * r(1, 0))
        - r(1, 2) * (half * (d.gamma_bc + d.gamma_cb) + T::lit(2.0) * d.gamma_c);

    let mut out = Mat3::zeros();
    out[(0, 0)] = aa;
    out[(1, 1)] = bb;
    out[(2, 2)] = cc;
    out[(0, 1)] = ab;
    out[(0, 2)] = ac;
    out[(1, 2)] = bc;
    out[(1, 0)] = ab.conj();
    out[(2, 0)] = ac.conj();
    out[(2, 1)] = bc.conj();
    out
}
