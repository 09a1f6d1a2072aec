use num_complex::Complex;

use super::sweep::{Backend, Observable, SweepSpec, SweptParameter};
use crate::analytic::GammaBa;
use crate::atomic::{AtomSpec, MwCoupling};
use crate::bloch::{DecayRates, FieldConfig};
use crate::constants::TAU;
use crate::doppler::ThermalSpec;
use crate::propagation::CellSpec;

/// Loop phase used by the presets. At `5π/4` the dispersive microwave term
/// pulls the line blue and the dressing shift of a detuned microwave adds
/// to or subtracts from that pull, depending on the sign of `Δ_μ`.
pub const PRESET_LOOP_PHASE: f64 = 5.0 * std::f64::consts::FRAC_PI_4;

/// Excited-state decay `Γ_c`, rad/s.
pub const GAMMA_EXCITED: f64 = TAU * 6.06e6;

/// How `Γ_c` is distributed over the two optical decay channels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExcitedSplit {
    /// `γ_ab = γ_ac = Γ_c / 2`.
    #[default]
    Half,
    /// `γ_ab = γ_ac = Γ_c`.
    Full,
}

/// Optical wavenumbers for a probe on the lower ground level:
/// `k_p − k_c = ω_hfs/c`, `k_μ = ω_hfs/c`.
pub fn wavenumbers(atom: &AtomSpec) -> (f64, f64, f64) {
    let k_p = atom.optical_wavenumber();
    let dk = atom.microwave_wavenumber();
    (k_p, k_p - dk, dk)
}

fn base_fields(atom: &AtomSpec, omega: f64) -> FieldConfig<f64> {
    let (k_p, k_c, k_mu) = wavenumbers(atom);
    FieldConfig {
        omega_p: Complex::new(omega, 0.0),
        omega_c: Complex::new(omega, 0.0),
        phi_mu: PRESET_LOOP_PHASE,
        k_p,
        k_c,
        k_mu,
        ..Default::default()
    }
}

impl SweepSpec {
    /// Strong-field spectrum: `Ω_p = Ω_c = 2π×20 MHz`, `Γ_c = 2π×6.06 MHz`,
    /// `γ_bc = γ_cb = 2π×15 kHz`, 330 K, `δ` over ±2π×30 MHz.
    pub fn fig3() -> Self {
        Self::fig3_with(ExcitedSplit::Half)
    }

    pub fn fig3_with(split: ExcitedSplit) -> Self {
        let atom = AtomSpec::rb85_d1();
        let g = match split {
            ExcitedSplit::Half => 0.5 * GAMMA_EXCITED,
            ExcitedSplit::Full => GAMMA_EXCITED,
        };
        SweepSpec {
            parameter: SweptParameter::TwoPhotonDetuning,
            start: -TAU * 30e6,
            stop: TAU * 30e6,
            points: 201,
            fields: base_fields(&atom, TAU * 20e6),
            decays: DecayRates::symmetric(g, TAU * 15e3),
            thermal: ThermalSpec::new(330.0, atom.mass),
            cell: CellSpec { density: 1.5e17, ..CellSpec::default() },
            coupling: MwCoupling::Calibrated { rabi_at_0dbm: TAU * 16e3 },
            atom,
            backend: Backend::Numeric,
            observable: Observable::ImRhoBa,
            gamma_ba: GammaBa::GammaAb,
        }
    }

    /// Laboratory geometry: 30 mm cell at 57 °C, antenna 1 m away, weak
    /// optical fields, transmission over ±2π×50 kHz.
    pub fn lab() -> Self {
        let atom = AtomSpec::rb85_d1();
        SweepSpec {
            parameter: SweptParameter::TwoPhotonDetuning,
            start: -TAU * 50e3,
            stop: TAU * 50e3,
            points: 201,
            fields: base_fields(&atom, TAU * 100e3),
            decays: DecayRates::symmetric(0.5 * GAMMA_EXCITED, TAU * 15e3),
            thermal: ThermalSpec::new(273.15 + 57.0, atom.mass),
            cell: CellSpec { length: 0.03, density: 1.5e17, ..CellSpec::default() },
            coupling: MwCoupling::FarField { distance: 1.0, gain: 1.0 },
            atom,
            backend: Backend::Analytic,
            observable: Observable::Transmission,
            gamma_ba: GammaBa::GammaAb,
        }
    }

    /// Narrow-line configuration for microwave sensing: the `lab` optics
    /// with a calibrated microwave (`2π×2 kHz` at 0 dBm, well below the
    /// 27 kHz linewidth over −22 to 2 dBm), `Ω_μ = 2π×10 kHz`,
    /// `Δ_μ = 2π×1 kHz`, observable `Im ρ_ba`.
    pub fn sensing() -> Self {
        let mut s = Self::lab();
        s.coupling = MwCoupling::Calibrated { rabi_at_0dbm: TAU * 2e3 };
        s.fields.omega_mu = TAU * 10e3;
        s.fields.delta_mu = TAU * 1e3;
        s.observable = Observable::ImRhoBa;
        s
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "fig3" => Some(Self::fig3()),
            "lab" => Some(Self::lab()),
            "sensing" => Some(Self::sensing()),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["fig3", "lab", "sensing"]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for n in SweepSpec::preset_names() {
            SweepSpec::preset(n).unwrap().validate().unwrap();
        }
        let f = SweepSpec::fig3();
        assert_eq!(f.decays.gamma_ab, f.decays.gamma_ac);
        assert!((f.fields.delta_k() - f.atom.microwave_wavenumber()).abs() < 1e-6);
        assert_eq!(SweepSpec::fig3_with(ExcitedSplit::Full).decays.gamma_ab, GAMMA_EXCITED);
    }
}
