//! Dense complex linear algebra for the small fixed-size systems of the
//! three-level problem (3×3 operators and 9×9 superoperators).

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Square complex matrix of compile-time dimension `N`, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMatrix<T, const N: usize>(pub [[Complex<T>; N]; N]);

pub type Mat3<T> = CMatrix<T, 3>;
pub type Mat9<T> = CMatrix<T, 9>;

impl<T: Real, const N: usize> CMatrix<T, N> {
    pub fn zeros() -> Self {
        CMatrix([[Complex::zero(); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = Complex::one();
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_diagonal(d: [Complex<T>; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn trace(&self) -> Complex<T> {
        (0..N).fold(Complex::zero(), |acc, i| acc + self.0[i][i])
    }

    pub fn mul_vec(&self, v: &[Complex<T>; N]) -> [Complex<T>; N] {
        let mut out = [Complex::zero(); N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).fold(Complex::zero(), |acc, k| acc + self.0[i][k] * v[k]);
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> T {
        (0..N)
            .map(|j| (0..N).fold(T::zero(), |acc, i| acc + self.0[i][j].norm()))
            .fold(T::zero(), T::max)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|r| r.iter()).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entry modulus of `self - self†`.
    pub fn hermiticity_defect(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    /// Column-stacked vectorization: element `(i, j)` lands at `i + N·j`.
    pub fn vectorize(&self) -> Vec<Complex<T>> {
        let mut v = Vec::with_capacity(N * N);
        for j in 0..N {
            for i in 0..N {
                v.push(self.0[i][j]);
            }
        }
        v
    }

    /// Inverse of [`CMatrix::vectorize`].
    pub fn unvectorize(v: &[Complex<T>]) -> Self {
        assert_eq!(v.len(), N * N, "vector length must be N²");
        Self::from_fn(|i, j| v[i + N * j])
    }
}

impl<T: Real, const N: usize> Index<(usize, usize)> for CMatrix<T, N> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.0[i][j]
    }
}

impl<T: Real, const N: usize> IndexMut<(usize, usize)> for CMatrix<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.0[i][j]
    }
}

impl<T: Real, const N: usize> Add for CMatrix<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<T: Real, const N: usize> Sub for CMatrix<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<T: Real, const N: usize> Mul for CMatrix<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] = out.0[i][j] + a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

/// Kronecker product of two 3×3 matrices; row index `3·i_a + i_b`.
pub fn kron3<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat9<T> {
    Mat9::from_fn(|r, c| a.0[r / 3][c / 3] * b.0[r % 3][c % 3])
}

/// LU factorization with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu<T, const N: usize> {
    lu: CMatrix<T, N>,
    perm: [usize; N],
}

impl<T: Real, const N: usize> Lu<T, N> {
    /// Factorizes `a`; returns `None` when a pivot falls below
    /// `rel_tol · max|a|`.
    pub fn factor(a: &CMatrix<T, N>, rel_tol: T) -> Option<Self> {
        let mut lu = *a;
        let mut perm = [0usize; N];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        let scale = a.max_abs();
        if scale.is_zero() || !scale.is_finite() {
            return None;
        }
        let tiny = rel_tol * scale;
        for k in 0..N {
            let (piv, pmax) = (k..N)
                .map(|i| (i, lu.0[i][k].norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmax > tiny) {
                return None;
            }
            if piv != k {
                lu.0.swap(piv, k);
                perm.swap(piv, k);
            }
            let inv = lu.0[k][k].inv();
            for i in (k + 1)..N {
                let f = lu.0[i][k] * inv;
                lu.0[i][k] = f;
                if f.is_zero() {
                    continue;
                }
                for j in (k + 1)..N {
                    let u = lu.0[k][j];
                    lu.0[i][j] = lu.0[i][j] - f * u;
                }
            }
        }
        Some(Lu { lu, perm })
    }

    pub fn solve(&self, b: &[Complex<T>; N]) -> [Complex<T>; N] {
        let mut y = [Complex::zero(); N];
        for i in 0..N {
            let mut s = b[self.perm[i]];
            for (j, yj) in y.iter().enumerate().take(i) {
                s = s - self.lu.0[i][j] * *yj;
            }
            y[i] = s;
        }
        let mut x = [Complex::zero(); N];
        for i in (0..N).rev() {
            let mut s = y[i];
            for (j, xj) in x.iter().enumerate().skip(i + 1) {
                s = s - self.lu.0[i][j] * *xj;
            }
            x[i] = s / self.lu.0[i][i];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: &CMatrix<T, N>) -> CMatrix<T, N> {
        let mut out = CMatrix::zeros();
        for j in 0..N {
            let col: [Complex<T>; N] = std::array::from_fn(|i| b.0[i][j]);
            let x = self.solve(&col);
            for i in 0..N {
                out.0[i][j] = x[i];
            }
        }
        out
    }
}

/// Matrix exponential by scaling and squaring with a diagonal [6/6] Padé
/// approximant. Returns `None` if the input is not finite.
pub fn expm<T: Real, const N: usize>(a: &CMatrix<T, N>) -> Option<CMatrix<T, N>> {
    if !a.is_finite() {
        return None;
    }
    let norm = a.norm_one();
    let half = T::lit(0.5);
    let mut squarings = 0i32;
    if norm > half {
        let s = (norm / half).log2().ceil();
        squarings = s.to_i32()?.max(0);
    }
    let scaled = a.scale_real(T::lit(2.0).powi(-squarings));

    // Padé [6/6] coefficients c_k = (12-k)! 6! / (12! k! (6-k)!).
    const COEFFS: [f64; 7] = [
        1.0,
        0.5,
        5.0 / 44.0,
        1.0 / 66.0,
        1.0 / 792.0,
        1.0 / 15_840.0,
        1.0 / 665_280.0,
    ];
    let id = CMatrix::<T, N>::identity();
    let mut num = id.scale_real(T::lit(COEFFS[0]));
    let mut den = num;
    let mut power = id;
    for (k, &c) in COEFFS.iter().enumerate().skip(1) {
        power = power * scaled;
        let term = power.scale_real(T::lit(c));
        num = num + term;
        if k % 2 == 0 {
            den = den + term;
        } else {
            den = den - term;
        }
    }
    let lu = Lu::factor(&den, T::epsilon())?;
    let mut result = lu.solve_matrix(&num);
    for _ in 0..squarings {
        result = result * result;
    }
    result.is_finite().then_some(result)
}

/// Eigenvalues of a Hermitian 3×3 matrix in ascending order, from the
/// trigonometric solution of the characteristic cubic.
pub fn hermitian_eigenvalues3<T: Real>(m: &Mat3<T>) -> [T; 3] {
    let a00 = m.0[0][0].re;
    let a11 = m.0[1][1].re;
    let a22 = m.0[2][2].re;
    let p1 = m.0[0][1].norm_sqr() + m.0[0][2].norm_sqr() + m.0[1][2].norm_sqr();
    let three = T::lit(3.0);
    let q = (a00 + a11 + a22) / three;
    let p2 = (a00 - q).powi(2) + (a11 - q).powi(2) + (a22 - q).powi(2) + T::lit(2.0) * p1;
    let p = (p2 / T::lit(6.0)).sqrt();
    if p <= T::epsilon() * (q.abs() + T::min_positive_value()) || p.is_zero() {
        let mut d = [a00, a11, a22];
        d.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        return d;
    }
    let b = CMatrix::<T, 3>::from_fn(|i, j| {
        let shift = if i == j { Complex::new(q, T::zero()) } else { Complex::zero() };
        (m.0[i][j] - shift) / p
    });
    let det = b.0[0][0] * (b.0[1][1] * b.0[2][2] - b.0[1][2] * b.0[2][1])
        - b.0[0][1] * (b.0[1][0] * b.0[2][2] - b.0[1][2] * b.0[2][0])
        + b.0[0][2] * (b.0[1][0] * b.0[2][1] - b.0[1][1] * b.0[2][0]);
    let r = (det.re / T::lit(2.0)).max(-T::one()).min(T::one());
    let phi = r.acos() / three;
    let two = T::lit(2.0);
    let hi = q + two * p * phi.cos();
    let lo = q + two * p * (phi + T::TAU() / three).cos();
    let mid = three * q - hi - lo;
    [lo, mid, hi]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lu_solves_small_system() {
        let a = Mat3::<f64>::from_fn(|i, j| c((i + 2 * j) as f64 + if i == j { 5.0 } else { 0.0 }, (i as f64) - (j as f64)));
        let x = [c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)];
        let b = a.mul_vec(&x);
        let lu = Lu::factor(&a, 1e-14).unwrap();
        let got = lu.solve(&b);
        for k in 0..3 {
            assert!((got[k] - x[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = Mat3::<f64>::from_fn(|i, _| c(i as f64 + 1.0, 0.0));
        assert!(Lu::factor(&a, 1e-12).is_none());
        assert!(Lu::factor(&Mat3::<f64>::zeros(), 1e-12).is_none());
    }

    #[test]
    fn expm_of_diagonal_and_rotation() {
        let d = Mat3::<f64>::from_diagonal([c(-1.0, 0.0), c(0.0, 2.0), c(3.0, -1.0)]);
        let e = expm(&d).unwrap();
        for i in 0..3 {
            assert!((e.0[i][i] - d.0[i][i].exp()).norm() < 1e-12 * d.0[i][i].exp().norm().max(1.0));
        }
        // exp of a real antisymmetric generator is a rotation.
        let theta = 40.0;
        let mut g = Mat3::<f64>::zeros();
        g.0[0][1] = c(-theta, 0.0);
        g.0[1][0] = c(theta, 0.0);
        let r = expm(&g).unwrap();
        assert!((r.0[0][0].re - theta.cos()).abs() < 1e-11);
        assert!((r.0[1][0].re - theta.sin()).abs() < 1e-11);
        assert!((r.0[2][2].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        assert_eq!(expm(&Mat9::<f64>::zeros()).unwrap(), Mat9::identity());
    }

    #[test]
    fn vectorization_is_column_major() {
        let m = Mat3::<f64>::from_fn(|i, j| c((10 * i + j) as f64, 0.0));
        let v = m.vectorize();
        assert_eq!(v[1].re, 10.0);
        assert_eq!(v[3].re, 1.0);
        assert_eq!(Mat3::unvectorize(&v), m);
    }

    #[test]
    fn kron_identity_blocks() {
        let a = Mat3::<f64>::from_fn(|i, j| c((i * 3 + j) as f64, 0.0));
        let k = kron3(&Mat3::identity(), &a);
        assert_eq!(k.0[4][5], a.0[1][2]);
        assert_eq!(k.0[0][3], c(0.0, 0.0));
    }

    #[test]
    fn eigenvalues_of_hermitian_matrix() {
        let m = Mat3::<f64>::from_fn(|i, j| match (i, j) {
            (0, 0) => c(2.0, 0.0),
            (1, 1) => c(-1.0, 0.0),
            (2, 2) => c(0.5, 0.0),
            (0, 1) => c(0.3, 0.4),
            (1, 0) => c(0.3, -0.4),
            (1, 2) => c(0.0, 0.7),
            (2, 1) => c(0.0, -0.7),
            _ => c(0.0, 0.0),
        });
        let ev = hermitian_eigenvalues3(&m);
        assert!((ev.iter().sum::<f64>() - 1.5).abs() < 1e-12);
        for &l in &ev {
            // det(m - l) = 0
            let s = m - Mat3::identity().scale_real(l);
            let det = s.0[0][0] * (s.0[1][1] * s.0[2][2] - s.0[1][2] * s.0[2][1])
                - s.0[0][1] * (s.0[1][0] * s.0[2][2] - s.0[1][2] * s.0[2][0])
                + s.0[0][2] * (s.0[1][0] * s.0[2][1] - s.0[1][1] * s.0[2][0]);
            assert!(det.norm() < 1e-10, "{det}");
        }
        assert!(ev[0] <= ev[1] && ev[1] <= ev[2]);
        let d = hermitian_eigenvalues3(&Mat3::<f64>::identity());
        assert_eq!(d, [1.0, 1.0, 1.0]);
    }
}
