//! Closed-form weak-probe coherence, susceptibility, absorption and
//! cell output.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bloch::{build_hamiltonian, DecayRates, FieldConfig, B, C};
use crate::constants::{C as LIGHT_SPEED, EPSILON_0, HBAR};
use crate::doppler::{doppler_average, ThermalSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which relaxation rate is used for the optical coherence `γ_ba`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaBa {
    /// `γ_ba = γ_ab`.
    #[default]
    GammaAb,
    /// `γ_ba = (γ_ab + γ_ac + γ_cb)/2`, the decay of `ρ_ba` in the master
    /// equation.
    Lindblad,
}

/// Parameters of the closed-form expressions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParams<T> {
    pub omega_p0: Complex<T>,
    pub omega_c: Complex<T>,
    pub omega_mu: Complex<T>,
    /// Optical detuning entering `Γ⁰_ba = ½γ_c + γ_ba − iΔ_p`, rad/s.
    pub delta_p: T,
    /// Ground-coherence detuning entering `Γ⁰_bc = ½γ_bc + 2γ_c − iΔ_μ`, rad/s.
    pub delta_mu: T,
    pub gamma_bc: T,
    pub gamma_ba: T,
    pub gamma_c: T,
    /// rad/m
    pub delta_k: T,
    /// rad/m
    pub k_mu: T,
    pub phi_mu: T,
    pub eta: T,
    /// atoms/m³
    pub density: T,
    /// m
    pub length: T,
    /// m
    pub z0: T,
    /// m
    pub x: T,
    /// Probe carrier, rad/s.
    pub omega_probe: T,
    /// C·m
    pub dipole: T,
}

impl<T: Real> Default for AnalyticParams<T> {
    fn default() -> Self {
        AnalyticParams {
            omega_p0: Complex::zero(),
            omega_c: Complex::zero(),
            omega_mu: Complex::zero(),
            delta_p: T::zero(),
            delta_mu: T::zero(),
            gamma_bc: T::zero(),
            gamma_ba: T::zero(),
            gamma_c: T::zero(),
            delta_k: T::zero(),
            k_mu: T::zero(),
            phi_mu: T::zero(),
            eta: T::one(),
            density: T::zero(),
            length: T::zero(),
            z0: T::zero(),
            x: T::zero(),
            omega_probe: T::zero(),
            dipole: T::zero(),
        }
    }
}

impl<T: Real> AnalyticParams<T> {
    /// Reduced parameters seen by an atom with velocity `v` in the model
    /// described by `fields` and `decays`. The loop phase is referenced to
    /// `z = 0`, so `coherence_rho_ba(p, fields.z)` reproduces the local
    /// phase.
    pub fn from_model(fields: &FieldConfig<T>, decays: &DecayRates<T>, v: T, gamma_ba: GammaBa) -> Self {
        let h = build_hamiltonian(fields, v);
        let hbb = h[(B, B)].re;
        let hcc = h[(C, C)].re;
        let gba = match gamma_ba {
            GammaBa::GammaAb => decays.gamma_ab,
            GammaBa::Lindblad => T::lit(0.5) * (decays.gamma_ab + decays.gamma_ac + decays.gamma_cb),
        };
        AnalyticParams {
            omega_p0: fields.omega_p,
            omega_c: fields.omega_c,
            omega_mu: Complex::new(fields.omega_mu, T::zero()),
            delta_p: -hbb,
            delta_mu: hcc - hbb,
            gamma_bc: decays.gamma_bc + decays.gamma_cb,
            gamma_ba: gba,
            gamma_c: decays.gamma_c,
            delta_k: fields.delta_k(),
            k_mu: fields.k_mu,
            phi_mu: fields.phi_mu,
            x: fields.x,
            ..Default::default()
        }
    }

    /// Sets the medium: efficiency, density, cell length and entry, probe
    /// carrier frequency and transition dipole.
    pub fn with_medium(mut self, eta: T, density: T, length: T, z0: T, omega_probe: T, dipole: T) -> Self {
        self.eta = eta;
        self.density = density;
        self.length = length;
        self.z0 = z0;
        self.omega_probe = omega_probe;
        self.dipole = dipole;
        self
    }

    /// `Γ⁰_bc = ½γ_bc + 2γ_c − iΔ_μ`.
    pub fn gamma_bc0(&self) -> Complex<T> {
        Complex::new(T::lit(0.5) * self.gamma_bc + T::lit(2.0) * self.gamma_c, -self.delta_mu)
    }

    /// `Γ⁰_ba = ½γ_c + γ_ba − iΔ_p`.
    pub fn gamma_ba0(&self) -> Complex<T> {
        Complex::new(T::lit(0.5) * self.gamma_c + self.gamma_ba, -self.delta_p)
    }

    /// `Γ⁰_bc Γ⁰_ba + |Ω_c|²`.
    pub fn denominator(&self) -> Complex<T> {
        self.gamma_bc0() * self.gamma_ba0() + self.omega_c.norm_sqr()
    }

    fn checked_denominator(&self) -> Result<Complex<T>> {
        let d = self.denominator();
        let scale = self.gamma_bc0().norm() * self.gamma_ba0().norm() + self.omega_c.norm_sqr();
        if d.norm() <= T::epsilon() * scale || d.is_zero() || !(d.re.is_finite() && d.im.is_finite()) {
            return Err(Error::Singularity(format!(
                "Γ⁰_bc Γ⁰_ba + |Ω_c|² vanishes (Δ_p = {}, Δ_μ = {}, γ_bc = {}, γ_c = {}, |Ω_c| = {})",
                self.delta_p,
                self.delta_mu,
                self.gamma_bc,
                self.gamma_c,
                self.omega_c.norm()
            )));
        }
        Ok(d)
    }

    /// `ω_p N d² / (2 ε₀ c ħ)`, 1/(m·s).
    pub fn propagation_prefactor(&self) -> T {
        self.omega_probe * self.density * self.dipole * self.dipole
            / T::lit(2.0 * EPSILON_0 * LIGHT_SPEED * HBAR)
    }
}

/// `ρ_ba` at longitudinal position `z`.
pub fn coherence_rho_ba<T: Real>(p: &AnalyticParams<T>, z: T) -> Result<Complex<T>> {
    let d = p.checked_denominator()?;
    let i = Complex::new(T::zero(), T::one());
    let phase = Complex::from_polar(T::one(), p.delta_k * z + p.k_mu * p.x + p.phi_mu);
    Ok((i * p.gamma_bc0() * p.omega_p0 - p.omega_c * p.omega_mu * phase) / d)
}

/// `χ = −N d² ρ_ab / (ħ ε₀ Ω_p*)`.
///
/// With a real probe amplitude this is the usual `ρ_ab/Ω_p`; the conjugate
/// keeps `χ` independent of the probe's phase reference.
pub fn susceptibility<T: Real>(rho_ab: Complex<T>, p: &AnalyticParams<T>) -> Result<Complex<T>> {
    if p.omega_p0.is_zero() {
        return Err(Error::Division("susceptibility undefined for zero probe amplitude".into()));
    }
    let k = p.density * p.dipole * p.dipole / T::lit(HBAR * EPSILON_0);
    Ok(-(rho_ab / p.omega_p0.conj()) * k)
}

/// `α = η κ Γ⁰_bc / (Γ⁰_bc Γ⁰_ba + |Ω_c|²)` in 1/m, with `κ` the
/// propagation prefactor.
pub fn absorption_alpha<T: Real>(p: &AnalyticParams<T>) -> Result<Complex<T>> {
    let d = p.checked_denominator()?;
    Ok(p.gamma_bc0() / d * (p.eta * p.propagation_prefactor()))
}

/// `β = η κ Ω_c Ω_μ / (Γ⁰_bc Γ⁰_ba + |Ω_c|²)`, rad/(s·m). Amplitude of the
/// microwave-driven source in `∂Ω_p/∂z = −αΩ_p − iβ e^{iφ(z)}`.
pub fn source_beta<T: Real>(p: &AnalyticParams<T>) -> Result<Complex<T>> {
    let d = p.checked_denominator()?;
    Ok(p.omega_c * p.omega_mu / d * (p.eta * p.propagation_prefactor()))
}

/// `e^w − 1` without cancellation near `w = 0`.
pub fn exp_m1<T: Real>(w: Complex<T>) -> Complex<T> {
    let (s, c) = w.im.sin_cos();
    let half_sin = (T::lit(0.5) * w.im).sin();
    let rot_m1 = Complex::new(-T::lit(2.0) * half_sin * half_sin, s);
    Complex::new(c, s) * w.re.exp_m1() + rot_m1
}

/// `(e^w − 1)/w`, continuous through `w = 0`.
pub fn exprel<T: Real>(w: Complex<T>) -> Complex<T> {
    if w.norm() < T::lit(1e-5) {
        return Complex::<T>::one() + w * T::lit(0.5) + w * w / T::lit(6.0);
    }
    exp_m1(w) / w
}

/// Probe linear response of the medium: `∂Ω_p/∂z = −αΩ_p − iβ e^{iφ(z)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearResponse<T> {
    /// 1/m
    pub alpha: Complex<T>,
    /// rad/(s·m)
    pub beta: Complex<T>,
}

impl<T: Real> LinearResponse<T> {
    pub fn from_params(p: &AnalyticParams<T>) -> Result<Self> {
        Ok(LinearResponse { alpha: absorption_alpha(p)?, beta: source_beta(p)? })
    }

    /// Thermal average of `α` and `β` over the longitudinal velocity.
    pub fn doppler_averaged(
        fields: &FieldConfig<T>,
        decays: &DecayRates<T>,
        gamma_ba: GammaBa,
        thermal: &ThermalSpec,
        medium: impl Fn(AnalyticParams<T>) -> AnalyticParams<T> + Sync,
    ) -> Result<Self> {
        let at = |v: T| medium(AnalyticParams::from_model(fields, decays, v, gamma_ba));
        let alpha = doppler_average(thermal, |v| absorption_alpha(&at(v)))?;
        let beta = doppler_average(thermal, |v| source_beta(&at(v)))?;
        Ok(LinearResponse { alpha, beta })
    }

    /// Field at `z0 + length` for entry field `omega_in`.
    pub fn propagate(&self, omega_in: Complex<T>, p: &AnalyticParams<T>) -> Complex<T> {
        let i = Complex::new(T::zero(), T::one());
        let l = p.length;
        let w = self.alpha + i * p.delta_k;
        let mw_phase = Complex::from_polar(T::one(), p.k_mu * p.x + p.phi_mu);
        let entry_phase = Complex::from_polar(T::one(), p.delta_k * p.z0);
        let decay = (-self.alpha * l).exp();
        decay * (omega_in - i * self.beta * entry_phase * mw_phase * exprel(w * l) * l)
    }
}

/// `Ω_p(x, z₀ + L)` from the closed-form solution of the propagation
/// equation with the microwave phase `e^{i(k_μx + φ_μ)}` multiplying the
/// source term.
pub fn propagate_closed_form<T: Real>(p: &AnalyticParams<T>) -> Result<Complex<T>> {
    if !(p.length >= T::zero()) {
        return Err(Error::Domain("cell length must be non-negative".into()));
    }
    Ok(LinearResponse::from_params(p)?.propagate(p.omega_p0, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TAU;

    fn fig3() -> AnalyticParams<f64> {
        AnalyticParams {
            omega_p0: Complex::new(TAU * 20e6, 0.0),
            omega_c: Complex::new(TAU * 20e6, 0.0),
            gamma_bc: TAU * 15e3,
            gamma_ba: 0.5 * TAU * 6.06e6,
            ..Default::default()
        }
    }

    #[test]
    fn lambda_limit_formula() {
        let p = AnalyticParams { delta_p: 1e6, ..fig3() };
        let r: Complex<f64> = coherence_rho_ba(&p, 0.0).unwrap();
        let want = Complex::<f64>::i() * p.gamma_bc0() * p.omega_p0 / p.denominator();
        assert!((r - want).norm() <= 1e-15 * want.norm());
        let none = AnalyticParams { omega_p0: Complex::zero(), ..p };
        assert_eq!(coherence_rho_ba(&none, 0.0).unwrap(), Complex::zero());
    }

    #[test]
    fn singular_denominator() {
        let p = AnalyticParams::<f64> { gamma_ba: 0.0, gamma_bc: 0.0, ..Default::default() };
        assert!(matches!(coherence_rho_ba(&p, 0.0), Err(Error::Singularity(_))));
    }

    #[test]
    fn exprel_is_continuous() {
        for dir in [Complex::new(1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(-0.6, 0.8)] {
            let lo = exprel(dir * 0.999_999e-5);
            let hi = exprel(dir * 1.000_001e-5);
            // slope ½ times the 2e-11 gap
            assert!((hi - lo).norm() < 1e-14 + 2e-11, "{dir}");
        }
        assert_eq!(exprel(Complex::<f64>::zero()), Complex::one());
        let w = Complex::new(0.3, -2.0);
        assert!((exprel(w) - (w.exp() - 1.0) / w).norm() < 1e-15);
        let tiny = Complex::new(1e-9, 1e-9);
        assert!((exp_m1(tiny) - (tiny + tiny * tiny * 0.5)).norm() < 1e-26);
    }

    #[test]
    fn susceptibility_linear_and_absorptive() {
        let p = AnalyticParams { density: 1e17, dipole: 2.5e-29, delta_p: 0.5 * TAU * 6.06e6, omega_c: Complex::zero(), ..fig3() };
        let rho = coherence_rho_ba(&AnalyticParams { omega_p0: Complex::new(1.0, 0.0), ..p }, 0.0).unwrap();
        let chi = susceptibility(rho.conj(), &AnalyticParams { omega_p0: Complex::new(1.0, 0.0), ..p }).unwrap();
        assert!(chi.im > 0.0);
        let chi2 = susceptibility(rho.conj(), &AnalyticParams { omega_p0: Complex::new(1.0, 0.0), density: 2e17, ..p }).unwrap();
        assert!((chi2 - chi * 2.0).norm() < 1e-12 * chi.norm());
        assert!(susceptibility(rho, &AnalyticParams { omega_p0: Complex::zero(), ..p }).is_err());
    }

    #[test]
    fn beer_lambert_without_microwave() {
        let p = fig3().with_medium(1.0, 1e16, 0.03, 0.0, TAU * 377e12, 2.5e-29);
        let a = absorption_alpha(&p).unwrap();
        let out = propagate_closed_form(&p).unwrap();
        let want = (-a * 0.03).exp() * p.omega_p0;
        assert!((out - want).norm() <= 4.0 * f64::EPSILON * want.norm());
        let zero_len = AnalyticParams { length: 0.0, omega_mu: Complex::new(1e3, 0.0), ..p };
        assert_eq!(propagate_closed_form(&zero_len).unwrap(), p.omega_p0);
    }

    #[test]
    fn strong_coupling_is_transparent() {
        let weak = absorption_alpha(&fig3().with_medium(1.0, 1e16, 0.03, 0.0, 2e15, 2.5e-29)).unwrap();
        let strong = absorption_alpha(&AnalyticParams { omega_c: Complex::new(1e12, 0.0), ..fig3().with_medium(1.0, 1e16, 0.03, 0.0, 2e15, 2.5e-29) }).unwrap();
        assert!(strong.norm() < 1e-6 * weak.norm());
    }
}
