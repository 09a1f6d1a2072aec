use num_complex::Complex;
use num_traits::Zero;

use super::{DensityMatrix, Liouvillian};
use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::scalar::Real;

/// Unique `ρ` with `L vec(ρ) = 0`, `tr ρ = 1`.
///
/// The `ρ_aa` row of `L` is replaced by the trace constraint (scaled to the
/// magnitude of `L`), the 9×9 system is solved by LU, and the residual of
/// the discarded row is checked before Hermitizing.
pub fn steady_state<T: Real>(l: &Liouvillian<T>) -> Result<DensityMatrix<T>> {
    let scale = l.0.max_abs();
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(Error::DegenerateSteadyState("Liouvillian is zero or not finite".into()));
    }
    let mut a = l.0;
    let one = Complex::new(scale, T::zero());
    for j in 0..9 {
        a[(0, j)] = if j % 4 == 0 { one } else { Complex::zero() };
    }
    let mut b = [Complex::zero(); 9];
    b[0] = one;
    let lu = Lu::factor(&a, T::lit(64.0) * T::epsilon())
        .ok_or_else(|| Error::DegenerateSteadyState("kernel dimension exceeds one".into()))?;
    let x = lu.solve(&b);
    let r = l.apply(&x);
    let res = r.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let xmax = x.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    if !(res <= T::lit(1e-8) * scale * xmax) {
        return Err(Error::DegenerateSteadyState(format!("residual {} exceeds tolerance", res.as_f64() / scale.as_f64())));
    }
    Ok(DensityMatrix::from_vector(&x).hermitized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{build_hamiltonian, build_liouvillian, DecayRates, FieldConfig};
    use crate::linalg::Mat3;

    #[test]
    fn ground_exchange_equalizes() {
        let l = build_liouvillian(&Mat3::<f64>::zeros(), &DecayRates::symmetric(1.0, 0.2));
        let rho = steady_state(&l).unwrap();
        let p = rho.populations();
        assert!(p[0].abs() < 1e-14);
        assert!((p[1] - 0.5).abs() < 1e-14 && (p[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn dark_state_without_ground_relaxation() {
        let f = FieldConfig::<f64> {
            omega_p: Complex::new(2.0, 0.0),
            omega_c: Complex::new(1.0, 0.0),
            ..Default::default()
        };
        let l = build_liouvillian(&build_hamiltonian(&f, 0.0), &DecayRates::symmetric(1.0, 0.0));
        let rho = steady_state(&l).unwrap();
        assert!(rho.populations()[0] < 1e-12);
        assert!(rho.rho_ba().im.abs() < 1e-12);
    }

    #[test]
    fn degenerate_kernel_reported() {
        let l = build_liouvillian(&Mat3::<f64>::from_diagonal([0.0, 1.0, 2.0].map(|x| Complex::new(x, 0.0))), &DecayRates::symmetric(0.0, 0.0));
        assert!(matches!(steady_state(&l), Err(Error::DegenerateSteadyState(_))));
        let zero = build_liouvillian(&Mat3::<f64>::zeros(), &DecayRates::symmetric(0.0, 0.0));
        assert!(steady_state(&zero).is_err());
    }
}
