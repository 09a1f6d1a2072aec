//! Maxwell–Boltzmann averaging over the longitudinal velocity.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{steady_state_at, DecayRates, DensityMatrix, FieldConfig};
use crate::constants::K_B;
use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::scalar::{pairwise_sum, Real};

/// Definition of the characteristic thermal speed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedConvention {
    /// `√(3 k_B T / m)`
    #[default]
    Sqrt3,
    /// `√(2 k_B T / m)`, the most probable speed.
    Sqrt2,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    #[default]
    GaussHermite,
    /// Uniform grid on `[−cutoff·v_mp, cutoff·v_mp]`.
    Trapezoid,
}

/// Thermal velocity distribution and its quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalSpec {
    /// K
    pub temperature: f64,
    /// kg
    pub mass: f64,
    pub nodes: usize,
    /// multiples of `v_mp`, trapezoid only
    pub cutoff: f64,
    pub convention: SpeedConvention,
    pub quadrature: Quadrature,
}

impl ThermalSpec {
    pub fn new(temperature: f64, mass: f64) -> Self {
        ThermalSpec {
            temperature,
            mass,
            nodes: 64,
            cutoff: 5.0,
            convention: SpeedConvention::Sqrt3,
            quadrature: Quadrature::GaussHermite,
        }
    }

    pub fn with_nodes(self, nodes: usize) -> Self {
        ThermalSpec { nodes, ..self }
    }

    /// Characteristic speed `v_mp`, m/s.
    pub fn v_mp(&self) -> f64 {
        let factor = match self.convention {
            SpeedConvention::Sqrt3 => 3.0,
            SpeedConvention::Sqrt2 => 2.0,
        };
        (factor * K_B * self.temperature / self.mass).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::Domain(format!("temperature must be non-negative, got {} K", self.temperature)));
        }
        if !(self.mass > 0.0) {
            return Err(Error::Domain("atomic mass must be positive".into()));
        }
        if self.nodes < 3 {
            return Err(Error::Domain(format!("at least 3 quadrature nodes required, got {}", self.nodes)));
        }
        if !(self.cutoff >= 3.0) {
            return Err(Error::Domain(format!("velocity cutoff must be at least 3 v_mp, got {}", self.cutoff)));
        }
        Ok(())
    }

    /// Velocities (m/s) and normalized weights, velocities ascending.
    pub fn nodes_and_weights(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let vmp = self.v_mp();
        if vmp == 0.0 {
            return Ok(vec![(0.0, 1.0)]);
        }
        let unit = match self.quadrature {
            Quadrature::GaussHermite => gauss_hermite(self.nodes),
            Quadrature::Trapezoid => trapezoid_gaussian(self.nodes, self.cutoff),
        };
        Ok(unit.into_iter().map(|(u, w)| (u * vmp, w)).collect())
    }
}

/// Nodes and weights for `∫ f(u) e^{−u²} du / √π`, ascending in `u`.
///
/// Golub–Welsch: nodes are the eigenvalues of the Jacobi matrix of the
/// Hermite recurrence, weights the squared first eigenvector components.
/// Results are cached per node count.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&n) {
        return hit.as_ref().clone();
    }
    let rule = Arc::new(golub_welsch(n));
    cache.lock().unwrap_or_else(|e| e.into_inner()).insert(n, rule.clone());
    rule.as_ref().clone()
}

fn golub_welsch(n: usize) -> Vec<(f64, f64)> {
    if n == 0 {
        return Vec::new();
    }
    let jacobi = DMatrix::<f64>::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut raw: Vec<(f64, f64)> =
        (0..n).map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2))).collect();
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    // exact mirror symmetry, so odd integrands cancel
    let mut out = raw.clone();
    for i in 0..n {
        let j = n - 1 - i;
        let u = 0.5 * (raw[j].0 - raw[i].0);
        let w = 0.5 * (raw[i].1 + raw[j].1);
        out[i] = (-u, w);
        out[j] = (u, w);
    }
    let total = pairwise_sum(&out.iter().map(|p| p.1).collect::<Vec<_>>());
    out.into_iter().map(|(u, w)| (u, w / total)).collect()
}

fn trapezoid_gaussian(n: usize, cutoff: f64) -> Vec<(f64, f64)> {
    let h = 2.0 * cutoff / (n - 1) as f64;
    let raw: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let u = -cutoff + h * i as f64;
            let end = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            (u, end * (-u * u).exp())
        })
        .collect();
    let total = pairwise_sum(&raw.iter().map(|p| p.1).collect::<Vec<_>>());
    raw.into_iter().map(|(u, w)| (u, w / total)).collect()
}

/// Thermal average of a matrix-valued function of velocity. Node
/// evaluations run in parallel; the weighted sum is reduced pairwise in
/// node order.
pub fn doppler_average_matrix<T, F>(thermal: &ThermalSpec, evaluate: F) -> Result<Mat3<T>>
where
    T: Real,
    F: Fn(T) -> Result<Mat3<T>> + Sync,
{
    let nodes = thermal.nodes_and_weights()?;
    let terms = nodes
        .par_iter()
        .map(|&(v, w)| {
            let m = evaluate(T::lit(v))?;
            if !m.is_finite() {
                return Err(Error::Evaluation { velocity: v });
            }
            Ok(m.scale_real(T::lit(w)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Mat3::from_fn(|i, j| pairwise_sum(&terms.iter().map(|m| m.0[i][j]).collect::<Vec<_>>())))
}

/// `∫ f(v) e^{−(v/v_mp)²} dv / ∫ e^{−(v/v_mp)²} dv`.
pub fn doppler_average<T, F>(thermal: &ThermalSpec, evaluate: F) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(T) -> Result<Complex<T>> + Sync,
{
    let nodes = thermal.nodes_and_weights()?;
    let terms = nodes
        .par_iter()
        .map(|&(v, w)| {
            let y = evaluate(T::lit(v))?;
            if !(y.re.is_finite() && y.im.is_finite()) {
                return Err(Error::Evaluation { velocity: v });
            }
            Ok(y * T::lit(w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

/// Elementwise thermal average of the steady state.
pub fn doppler_averaged_steady_state<T: Real>(
    fields: &FieldConfig<T>,
    decays: &DecayRates<T>,
    thermal: &ThermalSpec,
) -> Result<DensityMatrix<T>> {
    fields.validate()?;
    decays.validate()?;
    let m = doppler_average_matrix(thermal, |v| steady_state_at(fields, decays, v).map(|r| r.0))?;
    Ok(DensityMatrix(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::AtomSpec;

    fn thermal() -> ThermalSpec {
        ThermalSpec::new(330.0, AtomSpec::default().mass)
    }

    #[test]
    fn hermite_moments() {
        for n in [3, 4, 17, 64, 128, 256, 512] {
            let gh = gauss_hermite(n);
            let m0: f64 = gh.iter().map(|p| p.1).sum();
            let m2: f64 = gh.iter().map(|p| p.1 * p.0 * p.0).sum();
            let m4: f64 = gh.iter().map(|p| p.1 * p.0.powi(4)).sum();
            assert!((m0 - 1.0).abs() < 1e-13, "n={n} m0={m0}");
            assert!((m2 - 0.5).abs() < 1e-13, "n={n} m2={m2}");
            assert!((m4 - 0.75).abs() < 1e-12, "n={n} m4={m4}");
            assert!(gh.windows(2).all(|w| w[1].0 > w[0].0), "n={n} nodes not distinct");
        }
    }

    #[test]
    fn constant_and_odd_integrands() {
        let t = thermal();
        let c = Complex::new(0.3, -1.2);
        assert!((doppler_average(&t, |_| Ok(c)).unwrap() - c).norm() <= 4.0 * f64::EPSILON * c.norm());
        let odd = doppler_average(&t, |v: f64| Ok(Complex::new(v, 0.0))).unwrap();
        assert!(odd.norm() < 1e-12);
    }

    #[test]
    fn second_moment() {
        let t = thermal();
        let vmp = t.v_mp();
        let m2 = doppler_average(&t, |v: f64| Ok(Complex::new(v * v, 0.0))).unwrap();
        assert!((m2.re / (vmp * vmp / 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_backend_agrees() {
        let t = ThermalSpec { quadrature: Quadrature::Trapezoid, nodes: 401, ..thermal() };
        let vmp = t.v_mp();
        let m2 = doppler_average(&t, |v: f64| Ok(Complex::new(v * v, 0.0))).unwrap();
        assert!((m2.re / (vmp * vmp / 2.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn non_finite_reports_velocity() {
        let t = thermal();
        let e = doppler_average(&t, |v: f64| Ok(Complex::new(if v > 0.0 { f64::NAN } else { 0.0 }, 0.0))).unwrap_err();
        assert!(matches!(e, Error::Evaluation { velocity } if velocity > 0.0));
    }

    #[test]
    fn speed_conventions() {
        let t = thermal();
        let t2 = ThermalSpec { convention: SpeedConvention::Sqrt2, ..t };
        assert!((t.v_mp() / t2.v_mp() - 1.5f64.sqrt()).abs() < 1e-14);
        assert!(ThermalSpec { nodes: 2, ..t }.validate().is_err());
    }
}
