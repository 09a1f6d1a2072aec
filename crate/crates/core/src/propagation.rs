//! Probe propagation through the vapor cell, slice by slice.

use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::analytic::{coherence_rho_ba, AnalyticParams, GammaBa};
use crate::atomic::AtomSpec;
use crate::bloch::{DecayRates, FieldConfig};
use crate::constants::{C, EPSILON_0, HBAR};
use crate::doppler::{doppler_average, doppler_averaged_steady_state, ThermalSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Vapor cell geometry and density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    /// m
    pub length: f64,
    /// m
    pub z0: f64,
    pub slices: usize,
    /// atoms/m³
    pub density: f64,
    /// m
    pub x: f64,
    /// Overlap efficiency in `(0, 1]`.
    pub eta: f64,
}

impl Default for CellSpec {
    fn default() -> Self {
        CellSpec { length: 0.03, z0: 0.0, slices: 100, density: 0.0, x: 0.0, eta: 1.0 }
    }
}

impl CellSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Domain(format!("cell length must be positive, got {} m", self.length)));
        }
        if self.slices < 1 {
            return Err(Error::Domain("at least one slice required".into()));
        }
        if !(self.density >= 0.0 && self.density.is_finite()) {
            return Err(Error::Domain("density must be non-negative".into()));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Domain(format!("η must lie in (0, 1], got {}", self.eta)));
        }
        if !self.z0.is_finite() || !self.x.is_finite() {
            return Err(Error::Domain("cell position must be finite".into()));
        }
        Ok(())
    }

    /// `η ω_p N d² / (2 ε₀ c ħ)`, 1/(m·s).
    pub fn coupling(&self, atom: &AtomSpec) -> f64 {
        self.eta * atom.optical_angular_frequency() * self.density * atom.dipole_moment.powi(2) / (2.0 * EPSILON_0 * C * HBAR)
    }
}

/// Output of a slice-by-slice integration.
#[derive(Clone, Debug, PartialEq)]
pub struct SveaResult<T> {
    pub omega_out: Complex<T>,
    /// `(z, Ω_p(z))` at every slice boundary, entry included.
    pub profile: Vec<(T, Complex<T>)>,
    /// Largest per-slice relative change of `|Ω_p|`.
    pub max_step_change: T,
}

impl<T: Real> SveaResult<T> {
    /// True when every slice changed `|Ω_p|` by less than 5%.
    pub fn resolved(&self) -> bool {
        self.max_step_change < T::lit(0.05)
    }

    /// `z, re, im, abs2` rows.
    pub fn write_profile_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["z[m]", "re_omega_p[rad/s]", "im_omega_p[rad/s]", "abs2_omega_p[rad2/s2]"])
            .map_err(|e| Error::Io(e.to_string()))?;
        for (z, o) in &self.profile {
            w.write_record([z.as_f64(), o.re.as_f64(), o.im.as_f64(), o.norm_sqr().as_f64()].map(|v| format!("{v:e}")))
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Integrates `∂Ω_p/∂z = i·κ·⟨ρ_ba⟩(z, Ω_p)` across the cell with the
/// explicit midpoint rule, `κ` in 1/(m·s).
pub fn integrate_svea<T, F>(omega_in: Complex<T>, cell: &CellSpec, kappa: T, source: F) -> Result<SveaResult<T>>
where
    T: Real,
    F: Fn(T, Complex<T>) -> Result<Complex<T>>,
{
    cell.validate()?;
    let i = Complex::new(T::zero(), T::one());
    let h = T::lit(cell.length / cell.slices as f64);
    let half = T::lit(0.5) * h;
    let z0 = T::lit(cell.z0);
    let mut omega = omega_in;
    let mut profile = Vec::with_capacity(cell.slices + 1);
    profile.push((z0, omega));
    let mut max_change = T::zero();
    for s in 0..cell.slices {
        let z = z0 + h * T::lit(s as f64);
        let wrap = |e: Error| match e {
            Error::Propagation { .. } => e,
            other => Error::Propagation { slice: s, reason: other.to_string() },
        };
        let k1 = i * source(z, omega).map_err(wrap)? * kappa;
        let k2 = i * source(z + half, omega + k1 * half).map_err(wrap)? * kappa;
        let next = omega + k2 * h;
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(Error::Propagation { slice: s, reason: "non-finite field".into() });
        }
        let prev = omega.norm();
        if prev > T::zero() {
            max_change = max_change.max((next.norm() - prev).abs() / prev);
        }
        omega = next;
        profile.push((z + h, omega));
    }
    Ok(SveaResult { omega_out: omega, profile, max_step_change: max_change })
}

/// Propagation with the Doppler-averaged steady-state coherence of the full
/// model as source. `Ω_c` and `Ω_μ` are uniform; the loop phase follows
/// the local `z`.
pub fn propagate_svea<T: Real>(
    omega_in: Complex<T>,
    cell: &CellSpec,
    fields: &FieldConfig<T>,
    decays: &DecayRates<T>,
    thermal: &ThermalSpec,
    atom: &AtomSpec,
) -> Result<SveaResult<T>> {
    let kappa = T::lit(cell.coupling(atom));
    let x = T::lit(cell.x);
    integrate_svea(omega_in, cell, kappa, |z, om| {
        let local = FieldConfig { omega_p: om, z, x, ..*fields };
        Ok(doppler_averaged_steady_state(&local, decays, thermal)?.rho_ba())
    })
}

/// Propagation with the closed-form coherence, Doppler averaged, as source.
pub fn propagate_svea_analytic<T: Real>(
    omega_in: Complex<T>,
    cell: &CellSpec,
    fields: &FieldConfig<T>,
    decays: &DecayRates<T>,
    thermal: &ThermalSpec,
    atom: &AtomSpec,
    gamma_ba: GammaBa,
) -> Result<SveaResult<T>> {
    let kappa = T::lit(cell.coupling(atom));
    let x = T::lit(cell.x);
    integrate_svea(omega_in, cell, kappa, |z, om| {
        let local = FieldConfig { omega_p: om, x, ..*fields };
        doppler_average(thermal, |v| {
            let p = AnalyticParams::from_model(&local, decays, v, gamma_ba);
            coherence_rho_ba(&p, z)
        })
    })
}

/// `|Ω_out / Ω_in|²`.
pub fn transmission<T: Real>(omega_out: Complex<T>, omega_in: Complex<T>) -> Result<T> {
    if omega_in.norm() == T::zero() {
        return Err(Error::Division("transmission undefined for zero input field".into()));
    }
    Ok((omega_out / omega_in).norm_sqr())
}
