//! Coefficient domains: exact Gaussian rationals and double-precision complex.
//!
//! Every solver in this crate is generic over [`Coeff`]. The exact domain is
//! the oracle; the float domain exists for norm scans where singular values
//! are needed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficient ring used by polynomials, solvers, and series.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// Exact domains admit fraction-free elimination and cleared pipelines.
    const EXACT: bool = false;
    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    /// Multiplicative inverse; `None` for zero (or a non-finite float).
    fn inv(&self) -> Option<Self>;
    /// Magnitude estimate used for pivot selection and reports.
    fn pivot_mag(&self) -> f64;
    /// True when the value is meaningfully zero for the domain
    /// (exact zero, or below `tol` in float mode).
    fn is_zero_tol(&self, tol: f64) -> bool;
    /// Float modes must stay finite after public operations.
    fn is_finite(&self) -> bool;
    /// Common clearing factor for a coefficient list: multiplying every
    /// value by it makes products accumulate without per-operation
    /// normalization (the lcm of denominators, for exact scalars). `None`
    /// means no clearing is useful.
    fn clearing_factor<'a>(vals: impl Iterator<Item = &'a Self>) -> Option<Self>
    where
        Self: 'a,
    {
        let _ = vals;
        None
    }
    /// Division known to be exact in the domain (used by fraction-free
    /// elimination, where quotients are minors). The default falls back to
    /// inverse multiplication.
    fn exact_div(&self, d: &Self) -> Self {
        match d.inv() {
            Some(i) => self.clone() * i,
            None => Self::zero(),
        }
    }
}

/// Exact Gaussian rational `re + i*im` with reduced `BigRational` parts.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exact {
    pub re: BigRational,
    pub im: BigRational,
}

impl Exact {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Exact { re, im }
    }

    pub fn from_ints(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Exact {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn real(r: BigRational) -> Self {
        Exact {
            re: r,
            im: BigRational::zero(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// |self|^2 as an exact nonnegative rational.
    pub fn norm_sq_rational(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        Exact {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        Exact {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        // (a+bi)(c+di) = ac-bd + (ad+bc)i; skip the imaginary work for the
        // common all-real case.
        if self.im.is_zero() && rhs.im.is_zero() {
            return Exact {
                re: self.re * rhs.re,
                im: BigRational::zero(),
            };
        }
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        Exact { re, im }
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Coeff for Exact {
    const EXACT: bool = true;
    fn zero() -> Self {
        Exact::real(BigRational::zero())
    }
    fn one() -> Self {
        Exact::real(BigRational::one())
    }
    fn i() -> Self {
        Exact::new(BigRational::zero(), BigRational::one())
    }
    fn from_rational(r: &BigRational) -> Self {
        Exact::real(r.clone())
    }
    fn from_i64(v: i64) -> Self {
        Exact::real(BigRational::from(BigInt::from(v)))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn conj(&self) -> Self {
        Exact {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            return None;
        }
        let n = self.norm_sq_rational();
        Some(Exact {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }
    fn pivot_mag(&self) -> f64 {
        // Cheap surrogate: exact pivoting only needs nonzero/zero, but a
        // rough size keeps numerators from ballooning.
        let d = self.re.abs() + self.im.abs();
        d.to_f64().unwrap_or(if d.is_zero() { 0.0 } else { 1.0 })
    }
    fn is_zero_tol(&self, _tol: f64) -> bool {
        Coeff::is_zero(self)
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn clearing_factor<'a>(vals: impl Iterator<Item = &'a Self>) -> Option<Self> {
        use num_integer::Integer;
        let mut l = BigInt::one();
        let mut max_bits = 0u64;
        for v in vals {
            for d in [v.re.denom(), v.im.denom()] {
                if !d.is_one() {
                    max_bits = max_bits.max(d.bits());
                    l = l.lcm(d);
                }
            }
        }
        // clearing only pays off while the denominators share structure;
        // an lcm much larger than any single denominator would inflate the
        // integer work instead
        if l.is_one() || l.bits() > max_bits + max_bits / 2 + 16 {
            None
        } else {
            Some(Exact::real(BigRational::from(l)))
        }
    }
    fn exact_div(&self, d: &Self) -> Self {
        // integer-by-real-integer divisions avoid the gcd machinery; any
        // other shape falls back to inverse multiplication
        if d.im.is_zero()
            && d.re.denom().is_one()
            && self.re.denom().is_one()
            && self.im.denom().is_one()
            && !d.re.numer().is_zero()
        {
            use num_integer::Integer;
            let dn = d.re.numer();
            let (qr, rr) = self.re.numer().div_rem(dn);
            let (qi, ri) = self.im.numer().div_rem(dn);
            if rr.is_zero() && ri.is_zero() {
                return Exact::new(BigRational::from(qr), BigRational::from(qi));
            }
        }
        match d.clone().inv() {
            Some(i) => self.clone() * i,
            None => Coeff::zero(),
        }
    }
}

/// Complex double. Plain struct instead of `num_complex` to keep the trait
/// impls local.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl Cx {
    pub fn new(re: f64, im: f64) -> Self {
        Cx { re, im }
    }
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl fmt::Debug for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.re, self.im)
    }
}

impl Add for Cx {
    type Output = Cx;
    fn add(self, rhs: Cx) -> Cx {
        Cx::new(self.re + rhs.re, self.im + rhs.im)
    }
}
impl Sub for Cx {
    type Output = Cx;
    fn sub(self, rhs: Cx) -> Cx {
        Cx::new(self.re - rhs.re, self.im - rhs.im)
    }
}
impl Mul for Cx {
    type Output = Cx;
    fn mul(self, rhs: Cx) -> Cx {
        Cx::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}
impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx::new(-self.re, -self.im)
    }
}

impl Coeff for Cx {
    fn zero() -> Self {
        Cx::new(0.0, 0.0)
    }
    fn one() -> Self {
        Cx::new(1.0, 0.0)
    }
    fn i() -> Self {
        Cx::new(0.0, 1.0)
    }
    fn from_rational(r: &BigRational) -> Self {
        Cx::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Cx::new(v as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn conj(&self) -> Self {
        Cx::new(self.re, -self.im)
    }
    fn inv(&self) -> Option<Self> {
        let n = self.re * self.re + self.im * self.im;
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(Cx::new(self.re / n, -self.im / n))
    }
    fn pivot_mag(&self) -> f64 {
        self.abs()
    }
    fn is_zero_tol(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Parse "num/den" (or plain "num") into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from(n))
    }
}

/// Render a rational as "num/den" ("num" when the denominator is 1).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_inverse_round_trips() {
        let x = Exact::new(
            BigRational::new(BigInt::from(3), BigInt::from(7)),
            BigRational::new(BigInt::from(-2), BigInt::from(5)),
        );
        let y = x.clone().inv().unwrap();
        assert_eq!(x * y, Coeff::one());
    }

    #[test]
    fn rational_string_round_trip() {
        for s in ["3/4", "-7/2", "0", "12"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
        assert!(parse_rational("1/0").is_none());
    }
}
