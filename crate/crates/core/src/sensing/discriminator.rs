use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::constants::TAU;
use crate::error::{Error, Result};
use crate::spectra::{lineshape_metrics, sweep, LineshapeMetrics, Spectrum, SweepSpec, SweptParameter};

/// Finite-difference step in `Δ_μ` for [`discriminator_slope`], rad/s.
pub const SLOPE_STEP: f64 = TAU * 10.0;

/// Probe positions for the asymmetry metric: the centre and width of the
/// resonance without microwave.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shoulders {
    pub center: f64,
    pub fwhm: f64,
}

impl Shoulders {
    pub fn from_metrics(m: &LineshapeMetrics) -> Self {
        Shoulders { center: m.center, fwhm: m.fwhm }
    }

    /// Reference resonance of `spec` with `Ω_μ = 0`.
    pub fn reference(spec: &SweepSpec) -> Result<Self> {
        let mut s = spec.clone();
        s.fields.omega_mu = 0.0;
        Ok(Self::from_metrics(&lineshape_metrics(&sweep(&s)?)?))
    }
}

/// `(y(c + w/2) − y(c − w/2)) / (peak − baseline)` for the spectrum of
/// `spec`, with `c` and `w` fixed by `shoulders`.
pub fn asymmetry(spec: &SweepSpec, shoulders: Shoulders) -> Result<f64> {
    if spec.parameter != SweptParameter::TwoPhotonDetuning {
        return Err(Error::InvalidSpec("asymmetry needs a two-photon detuning sweep".into()));
    }
    let m = lineshape_metrics(&sweep(spec)?)?;
    let h = 0.5 * shoulders.fwhm;
    let hi = spec.evaluate(shoulders.center + h)?;
    let lo = spec.evaluate(shoulders.center - h)?;
    Ok((hi - lo) / m.height())
}

/// Small-signal gain `dA/dΔ_μ` at `Δ_μ = 0` for microwave power `power`
/// (dBm), by central differences with step [`SLOPE_STEP`]. Units 1/(rad/s).
///
/// The asymmetry vanishes at `Δ_μ = 0` only for a loop phase of `π/2`
/// modulo `π`; elsewhere the microwave skews the line even on resonance.
pub fn discriminator_slope(spec: &SweepSpec, power: f64) -> Result<f64> {
    let shoulders = Shoulders::reference(spec)?;
    let mut s = spec.clone();
    s.fields.omega_mu = spec.coupling.rabi(power, &spec.atom)?;
    let at = |d: f64| {
        let mut t = s.clone();
        t.fields.delta_mu = d;
        asymmetry(&t, shoulders)
    };
    Ok((at(SLOPE_STEP)? - at(-SLOPE_STEP)?) / (2.0 * SLOPE_STEP))
}

/// Copy of `s` with independent Gaussian noise of standard deviation
/// `sigma` added to every value. Same seed, same noise.
pub fn with_noise(s: &Spectrum, sigma: f64, seed: u64) -> Result<Spectrum> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("noise level must be non-negative, got {sigma}")));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Domain(format!("noise level {sigma}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = s.clone();
    for v in &mut out.values {
        *v += normal.sample(&mut rng);
    }
    out.provenance.insert("noise.sigma".into(), sigma.to_string());
    out.provenance.insert("noise.seed".into(), seed.to_string());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SweepSpec {
        let mut s = SweepSpec::sensing();
        s.fields.phi_mu = std::f64::consts::FRAC_PI_2;
        s.points = 81;
        s.thermal = s.thermal.with_nodes(16);
        s
    }

    #[test]
    fn no_microwave_no_slope() {
        let mut s = spec();
        s.coupling = crate::atomic::MwCoupling::Calibrated { rabi_at_0dbm: 0.0 };
        assert_eq!(discriminator_slope(&s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn asymmetry_is_odd_in_detuning() {
        let s = spec();
        let sh = Shoulders::reference(&s).unwrap();
        let at = |d: f64| {
            let mut t = s.clone();
            t.fields.delta_mu = d;
            asymmetry(&t, sh).unwrap()
        };
        let (p, m) = (at(TAU * 300.0), at(-TAU * 300.0));
        assert!(p * m < 0.0, "{p} {m}");
    }

    #[test]
    fn gain_grows_with_power() {
        let s = spec();
        let g: Vec<f64> = [-22.0, -10.0, 2.0].iter().map(|&p| discriminator_slope(&s, p).unwrap().abs()).collect();
        assert!(g[0] < g[1] && g[1] < g[2], "{g:?}");
    }

    #[test]
    fn noise_is_reproducible() {
        let s = sweep(&spec()).unwrap();
        let a = with_noise(&s, 1e-6, 7).unwrap();
        assert_eq!(a, with_noise(&s, 1e-6, 7).unwrap());
        assert_ne!(a.values, with_noise(&s, 1e-6, 8).unwrap().values);
        assert!(with_noise(&s, -1.0, 0).is_err());
    }
}
