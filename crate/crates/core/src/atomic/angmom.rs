//! Angular momentum coupling with exact rational arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Integer or half-integer quantum number, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);

    /// `n / 2`.
    pub const fn from_twice(n: i32) -> Self {
        HalfInt(n)
    }

    pub const fn int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// Parses `"5/2"`, `"-1/2"` or `"3"`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, "2")) => n.trim().parse().ok().map(HalfInt),
            Some(_) => None,
            None => s.parse::<i32>().ok().map(HalfInt::int),
        }
    }

    /// `-j, -j+1, ..., j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        (-self.0..=self.0).step_by(2).map(HalfInt)
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

fn factorial(n: i32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `(a + b + c)/2`-style combination that must be a non-negative integer.
fn nat(twice: i32) -> Option<i32> {
    (twice >= 0 && twice % 2 == 0).then_some(twice / 2)
}

fn check_projection(j: HalfInt, m: HalfInt, name: &str) -> Result<()> {
    if j.0 < 0 {
        return Err(Error::Domain(format!("{name}: negative angular momentum {j}")));
    }
    if (j.0 - m.0) % 2 != 0 {
        return Err(Error::Domain(format!("{name}: projection {m} has the wrong parity for j = {j}")));
    }
    if m.0.abs() > j.0 {
        return Err(Error::Domain(format!("{name}: |m| = {} exceeds j = {j}", m.abs())));
    }
    Ok(())
}

/// Exact form of a Clebsch–Gordan coefficient: `sign · sqrt(square)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCg {
    pub negative: bool,
    pub square: BigRational,
}

impl ExactCg {
    fn zero() -> Self {
        ExactCg { negative: false, square: BigRational::zero() }
    }

    pub fn to_f64(&self) -> f64 {
        let mag = self.square.to_f64().unwrap_or(f64::NAN).sqrt();
        if self.negative {
            -mag
        } else {
            mag
        }
    }
}

/// `⟨j1 m1; j2 m2 | J M⟩` in the Condon–Shortley convention, exactly.
///
/// Racah's single-sum formula; the sum and the prefactor are kept as big
/// rationals so nothing cancels in floating point.
pub fn cg_exact(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> Result<ExactCg> {
    check_projection(j1, m1, "j1")?;
    check_projection(j2, m2, "j2")?;
    check_projection(j, m, "J")?;
    if (j1.0 + j2.0 + j.0) % 2 != 0 {
        return Err(Error::Domain(format!("j1 + j2 + J = {} is not an integer", j1 + j2 + j)));
    }
    if m1.0 + m2.0 != m.0 {
        return Ok(ExactCg::zero());
    }
    let (Some(a), Some(b), Some(c)) = (nat(j.0 + j1.0 - j2.0), nat(j.0 - j1.0 + j2.0), nat(j1.0 + j2.0 - j.0)) else {
        // Triangle rule violated.
        return Ok(ExactCg::zero());
    };
    let big = |x: i32| BigInt::from(x);
    let half = |x: i32| x / 2;
    let jj = half(j1.0 + j2.0 + j.0);

    let num = big(j.0 + 1)
        * factorial(a)
        * factorial(b)
        * factorial(c)
        * factorial(half(j.0 + m.0))
        * factorial(half(j.0 - m.0))
        * factorial(half(j1.0 - m1.0))
        * factorial(half(j1.0 + m1.0))
        * factorial(half(j2.0 - m2.0))
        * factorial(half(j2.0 + m2.0));
    let prefactor = BigRational::new(num, factorial(jj + 1));

    let mut sum = BigRational::zero();
    for k in 0.. {
        let d = [
            k,
            c - k,
            half(j1.0 - m1.0) - k,
            half(j2.0 + m2.0) - k,
            half(j.0 - j2.0 + m1.0) + k,
            half(j.0 - j1.0 - m2.0) + k,
        ];
        if d[1] < 0 || d[2] < 0 || d[3] < 0 {
            break;
        }
        if d[4] < 0 || d[5] < 0 {
            continue;
        }
        let den = d.iter().fold(BigInt::one(), |acc, &x| acc * factorial(x));
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(ExactCg { negative: sum.is_negative(), square: &sum * &sum * prefactor })
}

/// `⟨j1 m1; j2 m2 | J M⟩` converted to the working scalar.
pub fn cg_coefficient<T: Real>(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> Result<T> {
    Ok(T::lit(cg_exact(j1, m1, j2, m2, j, m)?.to_f64()))
}

/// Spin operators acting on the electronic angular momentum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpinOp {
    JPlus,
    JMinus,
    Jz,
}

/// `⟨j m'| op |j m⟩` for a single angular momentum.
pub fn spin_element(j: HalfInt, m_out: HalfInt, op: SpinOp, m_in: HalfInt) -> f64 {
    let (jf, mf) = (j.as_f64(), m_in.as_f64());
    match op {
        SpinOp::Jz if m_out == m_in => mf,
        SpinOp::JPlus if m_out.0 == m_in.0 + 2 => (jf * (jf + 1.0) - mf * (mf + 1.0)).sqrt(),
        SpinOp::JMinus if m_out.0 == m_in.0 - 2 => (jf * (jf + 1.0) - mf * (mf - 1.0)).sqrt(),
        _ => 0.0,
    }
}

/// `⟨F2 m2| op |F1 m1⟩` in the hyperfine manifold of nuclear spin `i` and
/// electronic angular momentum `j`, with `op` acting on `j` only.
pub fn hyperfine_element(
    i: HalfInt,
    j: HalfInt,
    f1: HalfInt,
    m1: HalfInt,
    f2: HalfInt,
    m2: HalfInt,
    op: SpinOp,
) -> Result<f64> {
    let allowed = |f: HalfInt| f.0 >= (i.0 - j.0).abs() && f.0 <= i.0 + j.0 && (f.0 - i.0 - j.0) % 2 == 0;
    for f in [f1, f2] {
        if !allowed(f) {
            return Err(Error::Domain(format!("F = {f} is not a hyperfine level of I = {i}, J = {j}")));
        }
    }
    check_projection(f1, m1, "F1")?;
    check_projection(f2, m2, "F2")?;

    let mut acc = 0.0;
    for mi in i.projections() {
        let mj_in = m1 - mi;
        let mj_out = m2 - mi;
        if mj_in.abs().0 > j.0 || mj_out.abs().0 > j.0 {
            continue;
        }
        let s = spin_element(j, mj_out, op, mj_in);
        if s == 0.0 {
            continue;
        }
        let a = cg_exact(i, mi, j, mj_out, f2, m2)?.to_f64();
        let b = cg_exact(i, mi, j, mj_in, f1, m1)?.to_f64();
        acc += a * s * b;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: i32) -> HalfInt {
        HalfInt::from_twice(n)
    }

    #[test]
    fn two_spin_singlet_triplet() {
        let v: f64 = cg_coefficient(h(1), h(1), h(1), h(-1), h(2), h(0)).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        let s: f64 = cg_coefficient(h(1), h(1), h(1), h(-1), h(0), h(0)).unwrap();
        assert!((s - 0.5f64.sqrt()).abs() < 1e-15);
        let s2: f64 = cg_coefficient(h(1), h(-1), h(1), h(1), h(0), h(0)).unwrap();
        assert!((s2 + 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(cg_coefficient::<f64>(h(1), h(1), h(1), h(1), h(2), h(0)).unwrap(), 0.0);
    }

    #[test]
    fn exact_square_is_rational() {
        // ⟨1 0; 1 0 | 2 0⟩ = sqrt(2/3)
        let c = cg_exact(h(2), h(0), h(2), h(0), h(4), h(0)).unwrap();
        assert_eq!(c.square, BigRational::new(2.into(), 3.into()));
        assert!(!c.negative);
    }

    #[test]
    fn invalid_quantum_numbers() {
        assert!(cg_exact(h(1), h(0), h(1), h(1), h(2), h(1)).is_err());
        assert!(cg_exact(h(1), h(3), h(1), h(1), h(2), h(4)).is_err());
        assert!(cg_exact(h(1), h(1), h(1), h(1), h(1), h(2)).is_err());
    }

    #[test]
    fn triangle_violation_is_zero() {
        let c: f64 = cg_coefficient(h(1), h(1), h(1), h(-1), h(4), h(0)).unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn halfint_parse_and_display() {
        assert_eq!(HalfInt::parse("5/2"), Some(h(5)));
        assert_eq!(HalfInt::parse("-3"), Some(h(-6)));
        assert_eq!(HalfInt::parse("1/3"), None);
        assert_eq!(h(5).to_string(), "5/2");
        assert_eq!(h(-4).to_string(), "-2");
        assert_eq!(h(3).projections().count(), 4);
    }

    #[test]
    fn hyperfine_jz_conserves_m() {
        let (i, j) = (h(5), h(1));
        assert_eq!(hyperfine_element(i, j, h(4), h(0), h(6), h(2), SpinOp::Jz).unwrap(), 0.0);
        let pi = hyperfine_element(i, j, h(4), h(0), h(6), h(0), SpinOp::Jz).unwrap();
        assert!(pi.abs() > 0.4 && pi.abs() < 0.6, "{pi}");
        assert!(hyperfine_element(i, j, h(2), h(0), h(6), h(0), SpinOp::Jz).is_err());
    }
}
