use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues3, Mat3};
use crate::scalar::Real;

/// Amplitudes, detunings and phases of the probe, coupling and microwave
/// fields. Detunings follow the Hamiltonian sign: `H_bb = Δ_p − k_p·v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig<T> {
    /// rad/s
    pub omega_p: Complex<T>,
    /// rad/s
    pub omega_c: Complex<T>,
    /// rad/s
    pub omega_mu: T,
    /// rad/s
    pub delta_p: T,
    /// rad/s
    pub delta_c: T,
    /// Microwave detuning from the hyperfine splitting, rad/s. Enters via
    /// the off-resonant dressing of the ground levels.
    pub delta_mu: T,
    /// rad
    pub phi_mu: T,
    /// rad/m
    pub k_p: T,
    /// rad/m
    pub k_c: T,
    /// rad/m
    pub k_mu: T,
    /// m
    pub x: T,
    /// m
    pub z: T,
    /// Include the microwave light shift of the ground levels.
    pub mw_dressing: bool,
}

impl<T: Real> Default for FieldConfig<T> {
    fn default() -> Self {
        FieldConfig {
            omega_p: Complex::zero(),
            omega_c: Complex::zero(),
            omega_mu: T::zero(),
            delta_p: T::zero(),
            delta_c: T::zero(),
            delta_mu: T::zero(),
            phi_mu: T::zero(),
            k_p: T::zero(),
            k_c: T::zero(),
            k_mu: T::zero(),
            x: T::zero(),
            z: T::zero(),
            mw_dressing: true,
        }
    }
}

impl<T: Real> FieldConfig<T> {
    /// Sets `Δ_p = −δ/2`, `Δ_c = +δ/2` for a two-photon detuning `δ`
    /// (positive when the probe–coupling difference exceeds the splitting).
    pub fn with_two_photon_detuning(mut self, delta: T) -> Self {
        let half = T::lit(0.5) * delta;
        self.delta_p = -half;
        self.delta_c = half;
        self
    }

    /// `Δ_c − Δ_p`.
    pub fn two_photon_detuning(&self) -> T {
        self.delta_c - self.delta_p
    }

    /// `Δk = k_p − k_c`.
    pub fn delta_k(&self) -> T {
        self.k_p - self.k_c
    }

    /// `Δk·z + k_μ·x + φ_μ`.
    pub fn loop_phase(&self) -> T {
        self.delta_k() * self.z + self.k_mu * self.x + self.phi_mu
    }

    /// `Ω_μ e^{iφ}` at the configured position.
    pub fn mw_coupling(&self) -> Complex<T> {
        Complex::from_polar(self.omega_mu, self.loop_phase())
    }

    /// Level repulsion of the two ground states by an off-resonant
    /// microwave, `sgn(Δ_μ)(√(Δ_μ² + 4Ω_μ²) − |Δ_μ|)/2`. Zero on resonance.
    pub fn mw_light_shift(&self) -> T {
        if !self.mw_dressing || self.delta_mu.is_zero() || self.omega_mu.is_zero() {
            return T::zero();
        }
        let d = self.delta_mu.abs();
        let four = T::lit(4.0);
        let s = T::lit(0.5) * ((d * d + four * self.omega_mu * self.omega_mu).sqrt() - d);
        s * self.delta_mu.signum()
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega_p.re,
            self.omega_p.im,
            self.omega_c.re,
            self.omega_c.im,
            self.omega_mu,
            self.delta_p,
            self.delta_c,
            self.delta_mu,
            self.phi_mu,
            self.k_p,
            self.k_c,
            self.k_mu,
            self.x,
            self.z,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("field parameters must be finite".into()));
        }
        if self.k_p < T::zero() || self.k_c < T::zero() || self.k_mu < T::zero() {
            return Err(Error::Domain("wavenumbers must be non-negative".into()));
        }
        if self.omega_mu < T::zero() {
            return Err(Error::Domain("microwave Rabi amplitude must be non-negative".into()));
        }
        Ok(())
    }
}

/// Relaxation rates of the Lindblad operators, rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRates<T> {
    /// `|a⟩ → |b⟩`
    pub gamma_ab: T,
    /// `|a⟩ → |c⟩`
    pub gamma_ac: T,
    /// `|c⟩ → |b⟩`
    pub gamma_bc: T,
    /// `|b⟩ → |c⟩`
    pub gamma_cb: T,
    /// ground-state dephasing
    pub gamma_c: T,
}

impl<T: Real> DecayRates<T> {
    /// Excited decay `γ` split equally, symmetric ground exchange `γ_g`.
    pub fn symmetric(gamma_excited: T, gamma_ground: T) -> Self {
        DecayRates {
            gamma_ab: gamma_excited,
            gamma_ac: gamma_excited,
            gamma_bc: gamma_ground,
            gamma_cb: gamma_ground,
            gamma_c: T::zero(),
        }
    }

    pub fn as_array(&self) -> [T; 5] {
        [self.gamma_ab, self.gamma_ac, self.gamma_bc, self.gamma_cb, self.gamma_c]
    }

    pub fn min_nonzero(&self) -> Option<T> {
        self.as_array().into_iter().filter(|g| *g > T::zero()).reduce(T::min)
    }

    pub fn validate(&self) -> Result<()> {
        if self.as_array().iter().any(|g| !(g.is_finite() && *g >= T::zero())) {
            return Err(Error::Domain("decay rates must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// 3×3 density matrix over `(|a⟩, |b⟩, |c⟩)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix<T>(pub Mat3<T>);

impl<T: Real> DensityMatrix<T> {
    /// `|i⟩⟨i|`.
    pub fn pure(i: usize) -> Self {
        let mut m = Mat3::zeros();
        m.0[i][i] = Complex::new(T::one(), T::zero());
        DensityMatrix(m)
    }

    /// Equal mixture of the two ground states.
    pub fn ground_mixture() -> Self {
        let h = Complex::new(T::lit(0.5), T::zero());
        DensityMatrix(Mat3::from_diagonal([Complex::zero(), h, h]))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.0 .0[i][j]
    }

    pub fn rho_ba(&self) -> Complex<T> {
        self.get(1, 0)
    }

    pub fn populations(&self) -> [T; 3] {
        [self.0 .0[0][0].re, self.0 .0[1][1].re, self.0 .0[2][2].re]
    }

    pub fn trace(&self) -> Complex<T> {
        self.0.trace()
    }

    /// `(ρ + ρ†)/2`.
    pub fn hermitized(&self) -> Self {
        DensityMatrix((self.0 + self.0.adjoint()).scale_real(T::lit(0.5)))
    }

    pub fn hermiticity_defect(&self) -> T {
        self.0.hermiticity_defect()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [T; 3] {
        hermitian_eigenvalues3(&self.hermitized().0)
    }

    pub fn vectorize(&self) -> Vec<Complex<T>> {
        self.0.vectorize()
    }

    pub fn from_vector(v: &[Complex<T>]) -> Self {
        DensityMatrix(Mat3::unvectorize(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_photon_constraint() {
        let f = FieldConfig::<f64>::default().with_two_photon_detuning(3.0);
        assert_eq!(f.delta_p, -f.delta_c);
        assert_eq!(f.two_photon_detuning(), 3.0);
    }

    #[test]
    fn light_shift_sign_and_limits() {
        let mut f = FieldConfig::<f64> { omega_mu: 2.0, delta_mu: 0.0, ..Default::default() };
        assert_eq!(f.mw_light_shift(), 0.0);
        f.delta_mu = 1e6;
        let s = f.mw_light_shift();
        assert!(s > 0.0 && (s - 4.0 / 1e6).abs() < 1e-9);
        f.delta_mu = -1e6;
        assert_eq!(f.mw_light_shift(), -s);
        f.mw_dressing = false;
        assert_eq!(f.mw_light_shift(), 0.0);
    }

    #[test]
    fn negative_wavenumber_rejected() {
        let f = FieldConfig::<f64> { k_p: -1.0, ..Default::default() };
        assert!(f.validate().is_err());
    }

    #[test]
    fn decay_helpers() {
        let d = DecayRates::<f64> { gamma_c: 0.0, ..DecayRates::symmetric(3.0, 0.5) };
        assert_eq!(d.min_nonzero(), Some(0.5));
        assert!(DecayRates { gamma_ab: -1.0, ..d }.validate().is_err());
    }
}
