use num_complex::Complex;

use super::{DecayRates, A, B, C};
use crate::linalg::{kron3, Mat3, Mat9};
use crate::scalar::Real;

/// Superoperator on column-stacked density matrices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Liouvillian<T>(pub Mat9<T>);

impl<T: Real> Liouvillian<T> {
    pub fn apply(&self, v: &[Complex<T>; 9]) -> [Complex<T>; 9] {
        self.0.mul_vec(v)
    }
}

/// `√γ_bc|b⟩⟨c|, √γ_cb|c⟩⟨b|, √γ_ab|b⟩⟨a|, √γ_ac|c⟩⟨a|, √γ_c(|b⟩⟨b| − |c⟩⟨c|)`.
pub fn lindblad_operators<T: Real>(d: &DecayRates<T>) -> [Mat3<T>; 5] {
    let op = |i: usize, j: usize, g: T| {
        let mut m = Mat3::zeros();
        m[(i, j)] = Complex::new(g.sqrt(), T::zero());
        m
    };
    let mut dephase = op(B, B, d.gamma_c);
    dephase[(C, C)] = -dephase[(B, B)];
    [op(B, C, d.gamma_bc), op(C, B, d.gamma_cb), op(B, A, d.gamma_ab), op(C, A, d.gamma_ac), dephase]
}

/// `L = −i(𝟙⊗H − Hᵀ⊗𝟙) + Σ_k [c̄_k⊗c_k − ½(𝟙⊗c_k†c_k) − ½((c_k†c_k)ᵀ⊗𝟙)]`.
pub fn build_liouvillian<T: Real>(h: &Mat3<T>, decays: &DecayRates<T>) -> Liouvillian<T> {
    let id = Mat3::identity();
    let minus_i = Complex::new(T::zero(), -T::one());
    let mut l = (kron3(&id, h) - kron3(&h.transpose(), &id)).scale(minus_i);
    let half = T::lit(0.5);
    for c in lindblad_operators(decays) {
        if c.max_abs() == T::zero() {
            continue;
        }
        let cdc = c.adjoint() * c;
        l = l + kron3(&c.conj(), &c) - (kron3(&id, &cdc) + kron3(&cdc.transpose(), &id)).scale_real(half);
    }
    Liouvillian(l)
}
