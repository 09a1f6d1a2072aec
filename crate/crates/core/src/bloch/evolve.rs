use num_complex::Complex;

use super::{DensityMatrix, Liouvillian};
use crate::error::{Error, Result};
use crate::linalg::expm;
use crate::scalar::Real;

/// `exp(L t) vec(ρ₀)`, by scaling and squaring.
pub fn time_evolve<T: Real>(rho0: &DensityMatrix<T>, l: &Liouvillian<T>, t: T) -> Result<DensityMatrix<T>> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::Domain(format!("evolution time must be finite and non-negative, got {t}")));
    }
    if t == T::zero() {
        return Ok(*rho0);
    }
    let prop = expm(&l.0.scale(Complex::new(t, T::zero())))
        .ok_or_else(|| Error::Integration("matrix exponential did not converge".into()))?;
    let v: [Complex<T>; 9] = rho0
        .vectorize()
        .try_into()
        .map_err(|_| Error::Integration("bad state dimension".into()))?;
    Ok(DensityMatrix::from_vector(&prop.mul_vec(&v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{build_liouvillian, DecayRates};
    use crate::linalg::Mat3;

    #[test]
    fn single_channel_decay() {
        let g = 0.7;
        let d = DecayRates { gamma_ab: g, gamma_ac: 0.0, gamma_bc: 0.0, gamma_cb: 0.0, gamma_c: 0.0 };
        let l = build_liouvillian(&Mat3::<f64>::zeros(), &d);
        let rho0 = DensityMatrix::pure(0);
        for t in [0.0, 0.3, 2.0, 10.0] {
            let r = time_evolve(&rho0, &l, t).unwrap();
            assert!((r.populations()[0] - (-g * t).exp()).abs() < 1e-13);
            assert!((r.trace().re - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_generator_is_identity() {
        let l = build_liouvillian(&Mat3::<f64>::zeros(), &DecayRates::symmetric(0.0, 0.0));
        let rho0 = DensityMatrix::ground_mixture();
        assert_eq!(time_evolve(&rho0, &l, 5.0).unwrap(), rho0);
        assert!(time_evolve(&rho0, &l, -1.0).is_err());
    }
}
