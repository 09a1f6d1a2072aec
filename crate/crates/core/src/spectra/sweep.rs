use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{coherence_rho_ba, AnalyticParams, GammaBa, LinearResponse};
use crate::atomic::{AtomSpec, MwCoupling};
use crate::bloch::{DecayRates, FieldConfig};
use crate::doppler::{doppler_average, doppler_averaged_steady_state, ThermalSpec};
use crate::error::{Error, Result};
use crate::propagation::{propagate_svea, transmission, CellSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    /// `δ`, rad/s, with `Δ_p = −δ/2`, `Δ_c = δ/2`.
    TwoPhotonDetuning,
    /// Microwave power, dBm, mapped through the coupling model.
    MwPowerDbm,
    /// `Δ_μ`, rad/s.
    MwDetuning,
}

impl SweptParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweptParameter::TwoPhotonDetuning => "two_photon_detuning",
            SweptParameter::MwPowerDbm => "mw_power",
            SweptParameter::MwDetuning => "mw_detuning",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            SweptParameter::MwPowerDbm => "dBm",
            _ => "rad/s",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Doppler-averaged closed-form coherence.
    #[default]
    Analytic,
    /// Doppler-averaged steady state of the full master equation.
    Numeric,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Analytic => "analytic",
            Backend::Numeric => "numeric",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `Im ⟨ρ_ba⟩`.
    #[default]
    ImRhoBa,
    /// `|Ω_out/Ω_in|²` after the cell.
    Transmission,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::ImRhoBa => "im_rho_ba",
            Observable::Transmission => "transmission",
        }
    }
}

/// Everything needed to compute one spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweptParameter,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub fields: FieldConfig<f64>,
    pub decays: DecayRates<f64>,
    pub thermal: ThermalSpec,
    pub cell: CellSpec,
    pub atom: AtomSpec,
    pub coupling: MwCoupling,
    pub backend: Backend,
    pub observable: Observable,
    pub gamma_ba: GammaBa,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points < 5 {
            return Err(Error::InvalidSpec(format!("at least 5 sweep points required, got {}", self.points)));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || !(self.start < self.stop) {
            return Err(Error::InvalidSpec(format!("sweep needs start < stop, got [{}, {}]", self.start, self.stop)));
        }
        self.fields.validate()?;
        self.decays.validate()?;
        self.thermal.validate()?;
        if self.observable == Observable::Transmission {
            self.cell.validate()?;
        }
        Ok(())
    }

    /// Uniform axis from `start` to `stop`.
    pub fn axis(&self) -> Vec<f64> {
        let n = self.points;
        let h = (self.stop - self.start) / (n - 1) as f64;
        (0..n).map(|i| if i == n - 1 { self.stop } else { self.start + h * i as f64 }).collect()
    }

    /// Field configuration at axis value `x`.
    pub fn fields_at(&self, x: f64) -> Result<FieldConfig<f64>> {
        let mut f = self.fields;
        match self.parameter {
            SweptParameter::TwoPhotonDetuning => f = f.with_two_photon_detuning(x),
            SweptParameter::MwPowerDbm => f.omega_mu = self.coupling.rabi(x, &self.atom)?,
            SweptParameter::MwDetuning => f.delta_mu = x,
        }
        Ok(f)
    }

    /// Observable at axis value `x`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let f = self.fields_at(x)?;
        let wrap = |e: Error| Error::Backend { axis: x, source: Box::new(e) };
        let y = match (self.backend, self.observable) {
            (Backend::Numeric, Observable::ImRhoBa) => {
                doppler_averaged_steady_state(&f, &self.decays, &self.thermal).map_err(wrap)?.rho_ba().im
            }
            (Backend::Analytic, Observable::ImRhoBa) => {
                let z = f.z;
                doppler_average(&self.thermal, |v| {
                    coherence_rho_ba(&AnalyticParams::from_model(&f, &self.decays, v, self.gamma_ba), z)
                })
                .map_err(wrap)?
                .im
            }
            (Backend::Numeric, Observable::Transmission) => {
                let out = propagate_svea(f.omega_p, &self.cell, &f, &self.decays, &self.thermal, &self.atom).map_err(wrap)?;
                transmission(out.omega_out, f.omega_p).map_err(wrap)?
            }
            (Backend::Analytic, Observable::Transmission) => {
                let medium = |p: AnalyticParams<f64>| self.medium(p);
                let resp = LinearResponse::doppler_averaged(&f, &self.decays, self.gamma_ba, &self.thermal, medium).map_err(wrap)?;
                let base = self.medium(AnalyticParams::from_model(&f, &self.decays, 0.0, self.gamma_ba));
                let out = resp.propagate(f.omega_p, &base);
                transmission(out, f.omega_p).map_err(wrap)?
            }
        };
        if !y.is_finite() {
            return Err(wrap(Error::Evaluation { velocity: f64::NAN }));
        }
        Ok(y)
    }

    fn medium(&self, p: AnalyticParams<f64>) -> AnalyticParams<f64> {
        let c = &self.cell;
        AnalyticParams { x: c.x, ..p }.with_medium(
            c.eta,
            c.density,
            c.length,
            c.z0,
            self.atom.optical_angular_frequency(),
            self.atom.dipole_moment,
        )
    }

    /// Observable on an arbitrary axis, points evaluated in parallel.
    pub fn evaluate_axis(&self, axis: &[f64]) -> Result<Vec<f64>> {
        axis.par_iter().map(|&x| self.evaluate(x)).collect()
    }

    /// Flat `key → value` record of every fixed parameter.
    pub fn provenance(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        if let Ok(v) = serde_json::to_value(self) {
            flatten("", &v, &mut out);
        }
        out
    }
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut BTreeMap<String, String>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        serde_json::Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        serde_json::Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        serde_json::Value::String(s) => {
            out.insert(prefix.to_string(), s.clone());
        }
        other => {
            out.insert(prefix.to_string(), other.to_string());
        }
    }
}

/// Sampled observable versus a swept parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub parameter: SweptParameter,
    pub observable: Observable,
    pub backend: Backend,
    pub axis: Vec<f64>,
    pub values: Vec<f64>,
    pub provenance: BTreeMap<String, String>,
}

impl Spectrum {
    /// Checks the axis is strictly increasing and every value finite.
    pub fn validate(&self) -> Result<()> {
        if self.axis.len() != self.values.len() {
            return Err(Error::Data(format!("{} axis points but {} values", self.axis.len(), self.values.len())));
        }
        if let Some(i) = self.axis.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Data(format!("axis not strictly increasing at row {}", i + 2)));
        }
        if let Some(i) = self.values.iter().chain(&self.axis).position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite entry at position {}", i % self.axis.len().max(1) + 1)));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        match self.axis.as_slice() {
            [a, .., b] => (b - a) / (self.axis.len() - 1) as f64,
            _ => f64::NAN,
        }
    }
}

/// Evaluates `spec` at every axis point. Output is identical for identical
/// input regardless of thread count.
pub fn sweep(spec: &SweepSpec) -> Result<Spectrum> {
    spec.validate()?;
    let axis = spec.axis();
    let values = spec.evaluate_axis(&axis)?;
    Ok(Spectrum {
        parameter: spec.parameter,
        observable: spec.observable,
        backend: spec.backend,
        axis,
        values,
        provenance: spec.provenance(),
    })
}

/// One spectrum per microwave power, ascending in power. The swept
/// parameter of `base` is kept; `Ω_μ` follows the coupling model.
pub fn power_map(powers: &[f64], base: &SweepSpec) -> Result<Vec<(f64, Spectrum)>> {
    if powers.is_empty() {
        return Err(Error::InvalidSpec("power list is empty".into()));
    }
    if base.parameter == SweptParameter::MwPowerDbm {
        return Err(Error::InvalidSpec("power map needs a sweep over a parameter other than power".into()));
    }
    let mut sorted = powers.to_vec();
    if sorted.iter().any(|p| p.is_nan()) {
        return Err(Error::InvalidSpec("power list contains NaN".into()));
    }
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    sorted
        .into_iter()
        .map(|p| {
            let mut spec = base.clone();
            spec.fields.omega_mu = base.coupling.rabi(p, &base.atom)?;
            Ok((p, sweep(&spec)?))
        })
        .collect()
}
