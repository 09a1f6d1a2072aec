use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::simplex::nelder_mead;
use crate::error::{Error, Result};
use crate::spectra::{Spectrum, SweepSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeParameter {
    /// `Ω_μ`, rad/s
    MwRabi,
    /// `Δ_μ`, rad/s
    MwDetuning,
    /// `γ_bc = γ_cb`, rad/s
    GroundRelaxation,
    /// Multiplies the model observable.
    AmplitudeScale,
    /// Added to the scaled model observable.
    BaselineOffset,
}

impl FreeParameter {
    pub fn name(self) -> &'static str {
        match self {
            FreeParameter::MwRabi => "mw_rabi",
            FreeParameter::MwDetuning => "mw_detuning",
            FreeParameter::GroundRelaxation => "ground_relaxation",
            FreeParameter::AmplitudeScale => "amplitude_scale",
            FreeParameter::BaselineOffset => "baseline_offset",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            FreeParameter::MwRabi | FreeParameter::MwDetuning | FreeParameter::GroundRelaxation => "rad/s",
            FreeParameter::AmplitudeScale | FreeParameter::BaselineOffset => "1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub parameter: FreeParameter,
    pub lower: f64,
    pub upper: f64,
}

impl Bound {
    pub fn new(parameter: FreeParameter, lower: f64, upper: f64) -> Self {
        Bound { parameter, lower, upper }
    }

    fn to_physical(&self, u: f64) -> f64 {
        self.lower + u * (self.upper - self.lower)
    }
}

/// Observed spectrum, forward model and the box to search.
#[derive(Clone, Debug, PartialEq)]
pub struct FitProblem {
    pub observed: Spectrum,
    /// Forward model; its axis settings are ignored in favour of the
    /// observed axis.
    pub model: SweepSpec,
    pub free: Vec<Bound>,
    /// Grid points per dimension in the coarse stage.
    pub grid_points: usize,
    pub rel_tol: f64,
    pub max_iterations: usize,
}

impl FitProblem {
    pub fn new(observed: Spectrum, model: SweepSpec, free: Vec<Bound>) -> Self {
        FitProblem { observed, model, free, grid_points: 8, rel_tol: 1e-8, max_iterations: 500 }
    }

    pub fn validate(&self) -> Result<()> {
        self.observed.validate()?;
        if self.free.is_empty() {
            return Err(Error::InvalidSpec("no free parameters".into()));
        }
        for (i, b) in self.free.iter().enumerate() {
            if !(b.lower.is_finite() && b.upper.is_finite() && b.lower < b.upper) {
                return Err(Error::InvalidSpec(format!("{}: bounds must be finite with lower < upper", b.parameter.name())));
            }
            if self.free[..i].iter().any(|o| o.parameter == b.parameter) {
                return Err(Error::InvalidSpec(format!("{} listed twice", b.parameter.name())));
            }
        }
        if self.observed.axis.len() < 5 * self.free.len() {
            return Err(Error::InvalidSpec(format!(
                "{} points is fewer than 5 per free parameter ({})",
                self.observed.axis.len(),
                self.free.len()
            )));
        }
        if self.observed.parameter != self.model.parameter {
            return Err(Error::InvalidSpec(format!(
                "observed axis is {}, model sweeps {}",
                self.observed.parameter.name(),
                self.model.parameter.name()
            )));
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidSpec("coarse grid needs at least 2 points per dimension".into()));
        }
        Ok(())
    }

    /// Model observable on the observed axis at physical parameter values
    /// `x`, ordered as `free`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut spec = self.model.clone();
        let (mut scale, mut offset) = (1.0, 0.0);
        for (b, &v) in self.free.iter().zip(x) {
            match b.parameter {
                FreeParameter::MwRabi => spec.fields.omega_mu = v,
                FreeParameter::MwDetuning => spec.fields.delta_mu = v,
                FreeParameter::GroundRelaxation => {
                    spec.decays.gamma_bc = v;
                    spec.decays.gamma_cb = v;
                }
                FreeParameter::AmplitudeScale => scale = v,
                FreeParameter::BaselineOffset => offset = v,
            }
        }
        spec.fields.validate()?;
        spec.decays.validate()?;
        let y = spec.evaluate_axis(&self.observed.axis)?;
        Ok(y.into_iter().map(|v| scale * v + offset).collect())
    }

    /// Sum of squared differences; infinite when the model fails.
    pub fn residual(&self, x: &[f64]) -> f64 {
        match self.forward(x) {
            Ok(y) => {
                let r: f64 = y.iter().zip(&self.observed.values).map(|(m, o)| (m - o).powi(2)).sum();
                if r.is_finite() {
                    r
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    }

    fn physical(&self, u: &[f64]) -> Vec<f64> {
        self.free.iter().zip(u).map(|(b, &t)| b.to_physical(t)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub parameter: FreeParameter,
    pub value: f64,
    pub unit: String,
    /// One standard deviation from the curvature of the residual surface.
    pub uncertainty: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub estimates: Vec<Estimate>,
    pub residual: f64,
    /// Lowest residual on the coarse grid.
    pub grid_residual: f64,
    /// The simplex stage met its tolerance within the iteration limit.
    pub converged: bool,
    /// The simplex stage lowered the residual below the grid seed.
    pub improved_on_seed: bool,
    pub iterations: usize,
    pub evaluations: usize,
}

impl FitResult {
    pub fn get(&self, p: FreeParameter) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.parameter == p)
    }

    /// Plain-text summary.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "converged: {}", self.converged);
        let _ = writeln!(s, "improved on grid seed: {}", self.improved_on_seed);
        let _ = writeln!(s, "iterations: {}", self.iterations);
        let _ = writeln!(s, "residual: {:e} (grid {:e})", self.residual, self.grid_residual);
        for e in &self.estimates {
            match e.uncertainty {
                Some(u) => {
                    let _ = writeln!(s, "{} = {:e} ± {:e} {}", e.parameter.name(), e.value, u, e.unit);
                }
                None => {
                    let _ = writeln!(s, "{} = {:e} {} (uncertainty unavailable)", e.parameter.name(), e.value, e.unit);
                }
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit result serializes")
    }
}

fn grid_points(d: usize, g: usize) -> Vec<Vec<f64>> {
    let total = g.pow(d as u32);
    (0..total)
        .map(|mut k| {
            (0..d)
                .map(|_| {
                    let i = k % g;
                    k /= g;
                    i as f64 / (g - 1) as f64
                })
                .collect()
        })
        .collect()
}

/// Covariance `2 σ² H⁻¹` with `σ² = S/(n − p)` and `H` the Hessian of the
/// residual `S` by central differences in physical units.
fn uncertainties(p: &FitProblem, x: &[f64], s: f64) -> Vec<Option<f64>> {
    let d = x.len();
    let n = p.observed.axis.len();
    let none = vec![None; d];
    if n <= d {
        return none;
    }
    let h: Vec<f64> = p.free.iter().map(|b| 1e-4 * (b.upper - b.lower)).collect();
    // keep every stencil point inside the box
    let c: Vec<f64> = p
        .free
        .iter()
        .zip(x)
        .zip(&h)
        .map(|((b, &v), &hi)| v.clamp(b.lower + 2.0 * hi, b.upper - 2.0 * hi))
        .collect();
    let f = |dx: &[(usize, f64)]| {
        let mut y = c.clone();
        for &(i, t) in dx {
            y[i] += t;
        }
        p.residual(&y)
    };
    let f0 = f(&[]);
    let mut hess = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        hess[(i, i)] = (f(&[(i, h[i])]) - 2.0 * f0 + f(&[(i, -h[i])])) / (h[i] * h[i]);
        for j in 0..i {
            let v = (f(&[(i, h[i]), (j, h[j])]) - f(&[(i, h[i]), (j, -h[j])]) - f(&[(i, -h[i]), (j, h[j])])
                + f(&[(i, -h[i]), (j, -h[j])]))
                / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    if !hess.iter().all(|v| v.is_finite()) {
        return none;
    }
    let Some(inv) = hess.clone().cholesky().map(|ch| ch.inverse()) else {
        return none;
    };
    let sigma2 = s / (n - d) as f64;
    (0..d)
        .map(|i| {
            let v = 2.0 * sigma2 * inv[(i, i)];
            (v >= 0.0 && v.is_finite()).then(|| v.sqrt())
        })
        .collect()
}

/// Coarse grid over the bound box, then simplex refinement from the best
/// grid point. The returned residual never exceeds the best grid residual.
pub fn fit(problem: &FitProblem) -> Result<FitResult> {
    problem.validate()?;
    let d = problem.free.len();
    let grid = grid_points(d, problem.grid_points);
    let scores: Vec<f64> = grid.par_iter().map(|u| problem.residual(&problem.physical(u))).collect();
    let (seed_index, &grid_residual) =
        scores.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("grid is non-empty");
    if !grid_residual.is_finite() {
        return Err(Error::InvalidSpec("forward model failed at every grid point".into()));
    }
    let seed = grid[seed_index].clone();
    let floor = f64::EPSILON * problem.observed.values.iter().map(|v| v * v).sum::<f64>();
    let evaluations = std::cell::Cell::new(grid.len());
    let objective = |u: &[f64]| {
        evaluations.set(evaluations.get() + 1);
        problem.residual(&problem.physical(u))
    };
    let step = 0.5 / (problem.grid_points - 1) as f64;
    let r = nelder_mead(objective, &seed, step, problem.rel_tol, floor, problem.max_iterations);
    let (u, residual) = if r.value <= grid_residual { (r.point, r.value) } else { (seed, grid_residual) };
    let x = problem.physical(&u);
    let unc = uncertainties(problem, &x, residual);
    let estimates = problem
        .free
        .iter()
        .zip(&x)
        .zip(unc)
        .map(|((b, &value), uncertainty)| Estimate {
            parameter: b.parameter,
            value: value.clamp(b.lower, b.upper),
            unit: b.parameter.unit().to_string(),
            uncertainty,
        })
        .collect();
    Ok(FitResult {
        estimates,
        residual,
        grid_residual,
        converged: r.converged,
        improved_on_seed: residual < grid_residual,
        iterations: r.iterations,
        evaluations: evaluations.get(),
    })
}
