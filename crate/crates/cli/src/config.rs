//! TOML run configuration.
//!
//! A file names a preset and overrides any part of it. Every physical
//! quantity is a string with its unit; unknown keys are errors.

use std::path::{Path, PathBuf};

use deltacpt::analytic::GammaBa;
use deltacpt::doppler::{Quadrature, SpeedConvention};
use deltacpt::sensing::{Bound, FreeParameter};
use deltacpt::spectra::{wavenumbers, Backend, ExcitedSplit, Observable, SweepSpec, SweptParameter, GAMMA_EXCITED};
use deltacpt::{AtomSpec, MwCoupling};
use num_complex::Complex;
use serde::Deserialize;

use crate::units::{
    Angle, Density, Dimension, Dipole, Frequency, Length, Mass, Power, Quantity, Temperature, Wavenumber,
};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// One of [`SweepSpec::preset_names`]; `fig3` when absent.
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub atom: Option<AtomSection>,
    pub sweep: Option<SweepSection>,
    pub fields: Option<FieldsSection>,
    pub decays: Option<DecaysSection>,
    pub thermal: Option<ThermalSection>,
    pub cell: Option<CellSection>,
    pub microwave: Option<MicrowaveSection>,
    pub noise: Option<NoiseSection>,
    pub power_map: Option<PowerMapSection>,
    pub shift_table: Option<ShiftSection>,
    pub fit: Option<FitSection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSection {
    pub preset: Option<String>,
    pub mass: Option<Mass>,
    pub hyperfine_splitting: Option<Frequency>,
    pub dipole_moment: Option<Dipole>,
    pub optical_wavelength: Option<Length>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterName {
    #[serde(alias = "probe_two_photon_detuning")]
    TwoPhotonDetuning,
    #[serde(alias = "mw_power_dbm", alias = "mw_power_dBm")]
    MwPower,
    MwDetuning,
}

impl From<ParameterName> for SweptParameter {
    fn from(p: ParameterName) -> Self {
        match p {
            ParameterName::TwoPhotonDetuning => SweptParameter::TwoPhotonDetuning,
            ParameterName::MwPower => SweptParameter::MwPowerDbm,
            ParameterName::MwDetuning => SweptParameter::MwDetuning,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendName {
    Analytic,
    #[serde(alias = "full_numeric")]
    Numeric,
}

impl From<BackendName> for Backend {
    fn from(b: BackendName) -> Self {
        match b {
            BackendName::Analytic => Backend::Analytic,
            BackendName::Numeric => Backend::Numeric,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: Option<ParameterName>,
    /// `dBm` for a power sweep, a frequency otherwise.
    pub start: Option<Quantity>,
    pub stop: Option<Quantity>,
    pub points: Option<usize>,
    pub backend: Option<BackendName>,
    pub observable: Option<Observable>,
    pub gamma_ba: Option<GammaBa>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsSection {
    pub omega_p: Option<Frequency>,
    pub omega_p_phase: Option<Angle>,
    pub omega_c: Option<Frequency>,
    pub omega_c_phase: Option<Angle>,
    pub omega_mu: Option<Frequency>,
    /// Sets `Ω_μ` through the microwave coupling model.
    pub mw_power: Option<Power>,
    pub delta_p: Option<Frequency>,
    pub delta_c: Option<Frequency>,
    pub delta_mu: Option<Frequency>,
    pub phi_mu: Option<Angle>,
    pub k_p: Option<Wavenumber>,
    pub k_c: Option<Wavenumber>,
    pub k_mu: Option<Wavenumber>,
    pub x: Option<Length>,
    pub z: Option<Length>,
    pub mw_dressing: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaysSection {
    /// `half` or `full`: sets `γ_ab = γ_ac` to `Γ_c/2` or `Γ_c`.
    pub excited_split: Option<SplitName>,
    pub gamma_ab: Option<Frequency>,
    pub gamma_ac: Option<Frequency>,
    pub gamma_bc: Option<Frequency>,
    pub gamma_cb: Option<Frequency>,
    pub gamma_c: Option<Frequency>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitName {
    Half,
    Full,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalSection {
    pub temperature: Option<Temperature>,
    pub nodes: Option<usize>,
    pub cutoff: Option<f64>,
    pub convention: Option<SpeedConvention>,
    pub quadrature: Option<Quadrature>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSection {
    pub length: Option<Length>,
    pub z0: Option<Length>,
    pub slices: Option<usize>,
    pub density: Option<Density>,
    pub x: Option<Length>,
    pub eta: Option<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingModel {
    Calibrated,
    FarField,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicrowaveSection {
    pub model: Option<CouplingModel>,
    pub rabi_at_0dbm: Option<Frequency>,
    pub distance: Option<Length>,
    pub gain: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// Standard deviation in observable units.
    pub sigma: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerMapSection {
    pub powers: Vec<Power>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSection {
    pub detunings: Vec<Frequency>,
    pub powers: Vec<Power>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeEntry {
    pub parameter: FreeParameter,
    pub lower: Quantity,
    pub upper: Quantity,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    /// Observed spectrum, relative to the configuration file.
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub free: Vec<FreeEntry>,
    pub grid_points: Option<usize>,
    pub rel_tol: Option<f64>,
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Relative to the configuration file.
    pub dir: Option<PathBuf>,
}

/// Settings for `fit`, in internal units.
#[derive(Clone, Debug, PartialEq)]
pub struct FitSettings {
    pub data: Option<PathBuf>,
    pub free: Vec<Bound>,
    pub grid_points: Option<usize>,
    pub rel_tol: Option<f64>,
    pub max_iterations: Option<usize>,
}

/// Fully resolved configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub preset: String,
    pub spec: SweepSpec,
    pub seed: u64,
    pub noise_sigma: f64,
    pub powers: Option<Vec<f64>>,
    pub shift_detunings: Vec<f64>,
    pub shift_powers: Vec<f64>,
    pub fit: FitSettings,
    pub output_dir: Option<PathBuf>,
}

/// Input problem with enough context to locate it.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn key_err(key: &str, msg: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("{key}: {msg}"))
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string().trim_end().to_string()))?;
        raw.resolve(base_dir)
    }
}

impl RawConfig {
    pub fn resolve(self, base_dir: &Path) -> Result<RunConfig, ConfigError> {
        let preset = self.preset.unwrap_or_else(|| "fig3".into());
        let mut spec = SweepSpec::preset(&preset).ok_or_else(|| {
            key_err("preset", format!("unknown preset {preset:?}, expected one of {:?}", SweepSpec::preset_names()))
        })?;

        if let Some(a) = self.atom {
            apply_atom(&mut spec, a)?;
        }
        if let Some(m) = self.microwave {
            apply_microwave(&mut spec, m)?;
        }
        if let Some(f) = self.fields {
            apply_fields(&mut spec, f)?;
        }
        if let Some(d) = self.decays {
            apply_decays(&mut spec, d);
        }
        if let Some(t) = self.thermal {
            let th = &mut spec.thermal;
            set(&mut th.temperature, t.temperature.map(|v| v.0));
            set(&mut th.nodes, t.nodes);
            set(&mut th.cutoff, t.cutoff);
            set(&mut th.convention, t.convention);
            set(&mut th.quadrature, t.quadrature);
        }
        if let Some(c) = self.cell {
            let cell = &mut spec.cell;
            set(&mut cell.length, c.length.map(|v| v.0));
            set(&mut cell.z0, c.z0.map(|v| v.0));
            set(&mut cell.slices, c.slices);
            set(&mut cell.density, c.density.map(|v| v.0));
            set(&mut cell.x, c.x.map(|v| v.0));
            set(&mut cell.eta, c.eta);
        }
        if let Some(s) = self.sweep {
            apply_sweep(&mut spec, s)?;
        }
        spec.validate().map_err(|e| ConfigError(format!("configuration rejected: {e}")))?;

        let noise_sigma = self.noise.map_or(0.0, |n| n.sigma);
        if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
            return Err(key_err("noise.sigma", "must be a finite non-negative number"));
        }

        let fit = match self.fit {
            Some(f) => FitSettings {
                data: f.data.map(|p| base_dir.join(p)),
                free: f
                    .free
                    .iter()
                    .enumerate()
                    .map(|(i, e)| free_bound(i, e))
                    .collect::<Result<_, _>>()?,
                grid_points: f.grid_points,
                rel_tol: f.rel_tol,
                max_iterations: f.max_iterations,
            },
            None => FitSettings {
                data: None,
                free: vec![
                    Bound::new(FreeParameter::MwRabi, 0.0, Dimension::Frequency.si(20e3, "Hz")),
                    Bound::new(FreeParameter::MwDetuning, Dimension::Frequency.si(-5e3, "Hz"), Dimension::Frequency.si(5e3, "Hz")),
                ],
                grid_points: None,
                rel_tol: None,
                max_iterations: None,
            },
        };
        let (shift_detunings, shift_powers) = match self.shift_table {
            Some(s) => (s.detunings.iter().map(|d| d.0).collect(), s.powers.iter().map(|p| p.0).collect()),
            None => (Vec::new(), Vec::new()),
        };

        Ok(RunConfig {
            preset,
            spec,
            seed: self.seed.unwrap_or(0),
            noise_sigma,
            powers: self.power_map.map(|p| p.powers.iter().map(|x| x.0).collect()),
            shift_detunings,
            shift_powers,
            fit,
            output_dir: self.output.and_then(|o| o.dir).map(|d| base_dir.join(d)),
        })
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl Dimension {
    fn si(self, value: f64, unit: &str) -> f64 {
        Quantity { value, unit: unit.into() }.to(self).expect("built-in unit")
    }
}

fn apply_atom(spec: &mut SweepSpec, a: AtomSection) -> Result<(), ConfigError> {
    if let Some(name) = &a.preset {
        spec.atom = AtomSpec::preset(name).ok_or_else(|| {
            key_err("atom.preset", format!("unknown atom {name:?}, expected one of {:?}", AtomSpec::preset_names()))
        })?;
    }
    let atom = &mut spec.atom;
    set(&mut atom.mass, a.mass.map(|v| v.0));
    set(&mut atom.ground_hyperfine_splitting, a.hyperfine_splitting.map(|v| v.0));
    set(&mut atom.dipole_moment, a.dipole_moment.map(|v| v.0));
    set(&mut atom.optical_wavelength, a.optical_wavelength.map(|v| v.0));
    // quantities derived from the atom follow it unless set explicitly later
    spec.thermal.mass = spec.atom.mass;
    let (k_p, k_c, k_mu) = wavenumbers(&spec.atom);
    spec.fields.k_p = k_p;
    spec.fields.k_c = k_c;
    spec.fields.k_mu = k_mu;
    Ok(())
}

fn apply_microwave(spec: &mut SweepSpec, m: MicrowaveSection) -> Result<(), ConfigError> {
    let model = m.model.unwrap_or(match spec.coupling {
        MwCoupling::Calibrated { .. } => CouplingModel::Calibrated,
        MwCoupling::FarField { .. } => CouplingModel::FarField,
    });
    spec.coupling = match (model, spec.coupling) {
        (CouplingModel::Calibrated, current) => {
            if m.distance.is_some() || m.gain.is_some() {
                return Err(key_err("microwave", "distance and gain apply to the far_field model only"));
            }
            let old = match current {
                MwCoupling::Calibrated { rabi_at_0dbm } => Some(rabi_at_0dbm),
                MwCoupling::FarField { .. } => None,
            };
            let rabi_at_0dbm = m
                .rabi_at_0dbm
                .map(|v| v.0)
                .or(old)
                .ok_or_else(|| key_err("microwave.rabi_at_0dbm", "required for the calibrated model"))?;
            MwCoupling::Calibrated { rabi_at_0dbm }
        }
        (CouplingModel::FarField, current) => {
            if m.rabi_at_0dbm.is_some() {
                return Err(key_err("microwave.rabi_at_0dbm", "applies to the calibrated model only"));
            }
            let (d0, g0) = match current {
                MwCoupling::FarField { distance, gain } => (Some(distance), Some(gain)),
                MwCoupling::Calibrated { .. } => (None, Some(1.0)),
            };
            let distance = m
                .distance
                .map(|v| v.0)
                .or(d0)
                .ok_or_else(|| key_err("microwave.distance", "required for the far_field model"))?;
            MwCoupling::FarField { distance, gain: m.gain.or(g0).unwrap_or(1.0) }
        }
    };
    Ok(())
}

fn apply_fields(spec: &mut SweepSpec, f: FieldsSection) -> Result<(), ConfigError> {
    let fl = &mut spec.fields;
    let polar = |old: Complex<f64>, mag: Option<Frequency>, phase: Option<Angle>| {
        Complex::from_polar(mag.map_or(old.norm(), |m| m.0), phase.map_or(old.arg(), |p| p.0))
    };
    fl.omega_p = polar(fl.omega_p, f.omega_p, f.omega_p_phase);
    fl.omega_c = polar(fl.omega_c, f.omega_c, f.omega_c_phase);
    match (f.omega_mu, f.mw_power) {
        (Some(_), Some(_)) => return Err(key_err("fields", "give omega_mu or mw_power, not both")),
        (Some(o), None) => fl.omega_mu = o.0,
        (None, Some(p)) => {
            fl.omega_mu = spec.coupling.rabi(p.0, &spec.atom).map_err(|e| key_err("fields.mw_power", e))?;
        }
        (None, None) => {}
    }
    set(&mut fl.delta_p, f.delta_p.map(|v| v.0));
    set(&mut fl.delta_c, f.delta_c.map(|v| v.0));
    set(&mut fl.delta_mu, f.delta_mu.map(|v| v.0));
    set(&mut fl.phi_mu, f.phi_mu.map(|v| v.0));
    set(&mut fl.k_p, f.k_p.map(|v| v.0));
    set(&mut fl.k_c, f.k_c.map(|v| v.0));
    set(&mut fl.k_mu, f.k_mu.map(|v| v.0));
    set(&mut fl.x, f.x.map(|v| v.0));
    set(&mut fl.z, f.z.map(|v| v.0));
    set(&mut fl.mw_dressing, f.mw_dressing);
    Ok(())
}

fn apply_decays(spec: &mut SweepSpec, d: DecaysSection) {
    let r = &mut spec.decays;
    if let Some(split) = d.excited_split {
        let g = match ExcitedSplit::from(split) {
            ExcitedSplit::Half => 0.5 * GAMMA_EXCITED,
            ExcitedSplit::Full => GAMMA_EXCITED,
        };
        r.gamma_ab = g;
        r.gamma_ac = g;
    }
    set(&mut r.gamma_ab, d.gamma_ab.map(|v| v.0));
    set(&mut r.gamma_ac, d.gamma_ac.map(|v| v.0));
    set(&mut r.gamma_bc, d.gamma_bc.map(|v| v.0));
    set(&mut r.gamma_cb, d.gamma_cb.map(|v| v.0));
    set(&mut r.gamma_c, d.gamma_c.map(|v| v.0));
}

impl From<SplitName> for ExcitedSplit {
    fn from(s: SplitName) -> Self {
        match s {
            SplitName::Half => ExcitedSplit::Half,
            SplitName::Full => ExcitedSplit::Full,
        }
    }
}

fn apply_sweep(spec: &mut SweepSpec, s: SweepSection) -> Result<(), ConfigError> {
    if let Some(p) = s.parameter {
        let p = SweptParameter::from(p);
        if p != spec.parameter && (s.start.is_none() || s.stop.is_none()) {
            return Err(key_err("sweep", "changing the parameter needs both start and stop"));
        }
        spec.parameter = p;
    }
    let dim = match spec.parameter {
        SweptParameter::MwPowerDbm => Dimension::Power,
        _ => Dimension::Frequency,
    };
    if let Some(q) = &s.start {
        spec.start = q.finite(dim).map_err(|e| key_err("sweep.start", e))?;
    }
    if let Some(q) = &s.stop {
        spec.stop = q.finite(dim).map_err(|e| key_err("sweep.stop", e))?;
    }
    set(&mut spec.points, s.points);
    set(&mut spec.backend, s.backend.map(Backend::from));
    set(&mut spec.observable, s.observable);
    set(&mut spec.gamma_ba, s.gamma_ba);
    Ok(())
}

fn free_bound(i: usize, e: &FreeEntry) -> Result<Bound, ConfigError> {
    let dim = match e.parameter {
        FreeParameter::MwRabi | FreeParameter::MwDetuning | FreeParameter::GroundRelaxation => Dimension::Frequency,
        FreeParameter::AmplitudeScale | FreeParameter::BaselineOffset => Dimension::Dimensionless,
    };
    let lower = e.lower.finite(dim).map_err(|m| key_err(&format!("fit.free[{i}].lower"), m))?;
    let upper = e.upper.finite(dim).map_err(|m| key_err(&format!("fit.free[{i}].upper"), m))?;
    if !(lower < upper) {
        return Err(key_err(&format!("fit.free[{i}]"), "lower must be below upper"));
    }
    Ok(Bound::new(e.parameter, lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use deltacpt::constants::TAU;

    fn parse(s: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::parse(s, Path::new("/cfg"))
    }

    #[test]
    fn empty_file_is_the_fig3_preset() {
        let c = parse("").unwrap();
        assert_eq!(c.spec, SweepSpec::fig3());
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn overrides_with_units() {
        let c = parse(
            r#"
preset = "lab"
[fields]
omega_p = "200 kHz"
phi_mu = "0.5 pi"
[thermal]
temperature = "60 degC"
nodes = 32
[sweep]
start = "-40 kHz"
stop = "40 kHz"
points = 41
backend = "full_numeric"
[output]
dir = "out"
"#,
        )
        .unwrap();
        assert_eq!(c.spec.fields.omega_p.re, TAU * 200e3);
        assert!((c.spec.thermal.temperature - 333.15).abs() < 1e-9);
        assert_eq!(c.spec.thermal.nodes, 32);
        assert!((c.spec.start / (-TAU * 40e3) - 1.0).abs() < 1e-15);
        assert_eq!(c.spec.points, 41);
        assert_eq!(c.spec.backend, Backend::Numeric);
        assert_eq!(c.output_dir, Some(PathBuf::from("/cfg/out")));
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse("[fields]\nomega_q = \"1 MHz\"\n").unwrap_err().0;
        assert!(e.contains("omega_q"), "{e}");
        assert!(e.contains("line 2"), "{e}");
    }

    #[test]
    fn missing_or_wrong_unit_is_an_error() {
        assert!(parse("[fields]\nomega_p = 20e6\n").unwrap_err().0.contains("unit"));
        assert!(parse("[fields]\nomega_p = \"20 dBm\"\n").is_err());
        assert!(parse("[sweep]\nparameter = \"mw_power\"\nstart = \"-10 MHz\"\nstop = \"0 dBm\"\n").is_err());
    }

    #[test]
    fn power_sweep_and_lists() {
        let c = parse(
            r#"
[sweep]
parameter = "mw_power_dBm"
start = "-20 dBm"
stop = "0 dBm"
[power_map]
powers = ["0 dBm", "-10 dBm"]
[shift_table]
detunings = ["500 Hz"]
powers = ["-inf dBm"]
"#,
        )
        .unwrap();
        assert_eq!(c.spec.parameter, SweptParameter::MwPowerDbm);
        assert_eq!(c.powers, Some(vec![0.0, -10.0]));
        assert_eq!(c.shift_powers, vec![f64::NEG_INFINITY]);
    }

    #[test]
    fn mw_power_uses_the_coupling() {
        let c = parse("preset = \"sensing\"\n[fields]\nmw_power = \"0 dBm\"\n").unwrap();
        assert!((c.spec.fields.omega_mu - TAU * 2e3).abs() < 1e-9);
        assert!(parse("[fields]\nmw_power = \"0 dBm\"\nomega_mu = \"1 kHz\"\n").is_err());
    }

    #[test]
    fn fit_bounds() {
        let c = parse(
            r#"
[fit]
data = "obs.csv"
free = [
  { parameter = "mw_rabi", lower = "0 Hz", upper = "20 kHz" },
  { parameter = "amplitude_scale", lower = 0.5, upper = 2 },
]
"#,
        )
        .unwrap();
        assert_eq!(c.fit.data, Some(PathBuf::from("/cfg/obs.csv")));
        assert!((c.fit.free[0].upper / (TAU * 20e3) - 1.0).abs() < 1e-15);
        assert_eq!(c.fit.free[1].upper, 2.0);
        assert!(parse("[[fit.free]]\nparameter = \"mw_rabi\"\nlower = 0\nupper = 1\n").is_err());
    }

    #[test]
    fn invalid_physics_rejected() {
        assert!(parse("[sweep]\npoints = 2\n").is_err());
        assert!(parse("preset = \"nope\"\n").unwrap_err().0.contains("preset"));
        assert!(parse("[atom]\npreset = \"cs133\"\n").is_err());
    }

    #[test]
    fn atom_change_updates_wavenumbers() {
        let c = parse("[atom]\npreset = \"rb85-d2\"\n").unwrap();
        assert!((c.spec.fields.k_p - TAU / 780.241e-9).abs() < 1e-3);
    }
}
