use serde::{Deserialize, Serialize};

use super::metrics::{lineshape_metrics, LineshapeMetrics};
use super::sweep::{sweep, SweepSpec, SweptParameter};
use crate::error::{Error, Result};

/// One `(Δ_μ, power)` entry. Failed cells keep their error text and carry
/// no shift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftCell {
    /// rad/s
    pub detuning: f64,
    /// dBm; `−∞` stands for no microwave.
    pub power: f64,
    /// rad/s
    pub omega_mu: f64,
    /// Centre minus the reference centre, axis units.
    pub shift: Option<f64>,
    pub metrics: Option<LineshapeMetrics>,
    pub error: Option<String>,
}

impl ShiftCell {
    pub fn is_valid(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftTable {
    /// Metrics of the `Ω_μ = 0` spectrum.
    pub reference: LineshapeMetrics,
    /// Row-major in detuning, then ascending power.
    pub cells: Vec<ShiftCell>,
}

impl ShiftTable {
    pub fn get(&self, detuning: f64, power: f64) -> Option<&ShiftCell> {
        self.cells.iter().find(|c| c.detuning == detuning && c.power == power)
    }

    pub fn invalid_cells(&self) -> usize {
        self.cells.iter().filter(|c| !c.is_valid()).count()
    }
}

fn rabi(base: &SweepSpec, power: f64) -> Result<f64> {
    if power == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if !power.is_finite() {
        return Err(Error::InvalidSpec(format!("power must be finite or −∞, got {power}")));
    }
    base.coupling.rabi(power, &base.atom)
}

/// Resonance centre shift versus microwave detuning and power, relative to
/// the spectrum of `base` with `Ω_μ = 0`. `base` must sweep the two-photon
/// detuning. A failure of the reference is fatal; failures in individual
/// cells are recorded in the table.
pub fn shift_vs_power(detunings: &[f64], powers: &[f64], base: &SweepSpec) -> Result<ShiftTable> {
    if base.parameter != SweptParameter::TwoPhotonDetuning {
        return Err(Error::InvalidSpec("shift table needs a two-photon detuning sweep".into()));
    }
    if detunings.is_empty() || powers.is_empty() {
        return Err(Error::InvalidSpec("shift table needs at least one detuning and one power".into()));
    }
    if detunings.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidSpec("detunings must be finite".into()));
    }
    let mut powers = powers.to_vec();
    if powers.iter().any(|p| p.is_nan()) {
        return Err(Error::InvalidSpec("power list contains NaN".into()));
    }
    powers.sort_by(f64::total_cmp);
    powers.dedup();

    let mut reference_spec = base.clone();
    reference_spec.fields.omega_mu = 0.0;
    let reference = lineshape_metrics(&sweep(&reference_spec)?)?;

    let mut cells = Vec::with_capacity(detunings.len() * powers.len());
    for &detuning in detunings {
        for &power in &powers {
            let run = || -> Result<(f64, LineshapeMetrics)> {
                let omega_mu = rabi(base, power)?;
                let mut spec = base.clone();
                spec.fields.omega_mu = omega_mu;
                spec.fields.delta_mu = detuning;
                Ok((omega_mu, lineshape_metrics(&sweep(&spec)?)?))
            };
            cells.push(match run() {
                Ok((omega_mu, m)) => ShiftCell {
                    detuning,
                    power,
                    omega_mu,
                    shift: Some(m.center - reference.center),
                    metrics: Some(m),
                    error: None,
                },
                Err(e) => ShiftCell {
                    detuning,
                    power,
                    omega_mu: rabi(base, power).unwrap_or(f64::NAN),
                    shift: None,
                    metrics: None,
                    error: Some(e.to_string()),
                },
            });
        }
    }
    Ok(ShiftTable { reference, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TAU;
    use crate::spectra::Observable;

    fn narrow() -> SweepSpec {
        let mut s = SweepSpec::sensing();
        s.observable = Observable::ImRhoBa;
        s.points = 101;
        s
    }

    #[test]
    fn no_microwave_means_no_shift() {
        let t = shift_vs_power(&[-TAU * 500.0, TAU * 500.0], &[f64::NEG_INFINITY], &narrow()).unwrap();
        for c in &t.cells {
            assert_eq!(c.omega_mu, 0.0);
            assert_eq!(c.shift, Some(0.0), "{c:?}");
        }
    }

    #[test]
    fn bad_cells_are_recorded() {
        let t = shift_vs_power(&[0.0], &[0.0, f64::INFINITY], &narrow()).unwrap();
        assert_eq!(t.cells.len(), 2);
        assert!(t.cells[0].is_valid());
        assert!(!t.cells[1].is_valid());
        assert_eq!(t.invalid_cells(), 1);
    }

    #[test]
    fn rejects_other_axes() {
        let mut b = narrow();
        b.parameter = SweptParameter::MwDetuning;
        assert!(shift_vs_power(&[0.0], &[0.0], &b).is_err());
        assert!(shift_vs_power(&[], &[0.0], &narrow()).is_err());
    }
}
