//! Multi-indices, bidegree keys, and the Bishop data of a quadric model.

use crate::error::{Error, Result};
use crate::scalar::format_rational;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Exponent vector in `N` variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = vec![0; n];
        v[k] = 1;
        MultiIndex(v)
    }

    pub fn len_vars(&self) -> usize {
        self.0.len()
    }

    /// |I| = sum of exponents.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0[k]
    }

    pub fn bumped(&self, k: usize, delta: i64) -> Option<MultiIndex> {
        let mut v = self.0.clone();
        let cur = v[k] as i64 + delta;
        if cur < 0 {
            return None;
        }
        v[k] = cur as u32;
        Some(MultiIndex(v))
    }

    /// I! as a big integer.
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &e in &self.0 {
            for f in 2..=e as u64 {
                acc *= f;
            }
        }
        acc
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Bidegree key `(I; J)` of a monomial `z^I zbar^J` (or `z^I xi^J`).
///
/// The derived ordering is the lexicographic order on the concatenated
/// exponent vector `(z_1..z_N; zbar_1..zbar_N)`; every basis listing in the
/// crate uses it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Key {
    pub zi: MultiIndex,
    pub zj: MultiIndex,
}

impl Key {
    pub fn new(zi: MultiIndex, zj: MultiIndex) -> Self {
        debug_assert_eq!(zi.len_vars(), zj.len_vars());
        Key { zi, zj }
    }

    pub fn degree(&self) -> u32 {
        self.zi.total() + self.zj.total()
    }

    pub fn swapped(&self) -> Key {
        Key {
            zi: self.zj.clone(),
            zj: self.zi.clone(),
        }
    }

    /// I! * J! as a big integer.
    pub fn factorial(&self) -> BigInt {
        self.zi.factorial() * self.zj.factorial()
    }

    /// Parity class of I - J componentwise mod 2, packed into a bitmask.
    ///
    /// Multiplication by the model quadric and the Fischer trace both shift
    /// I - J by even vectors, so the trace-multiplication operator is block
    /// diagonal over these classes.
    pub fn parity_class(&self) -> u32 {
        let mut mask = 0u32;
        for (k, (&a, &b)) in self.zi.0.iter().zip(self.zj.0.iter()).enumerate() {
            if (a + b) & 1 == 1 {
                mask |= 1 << k;
            }
        }
        mask
    }
}

impl fmt::Debug for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?};{:?}", self.zi, self.zj)
    }
}

/// All exponent vectors in `n` variables of total degree `d`, in the
/// canonical lexicographic order (largest first coordinate first).
pub fn multi_indices(n: usize, d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, pos: usize, rem: u32) {
        if pos + 1 == cur.len() {
            cur[pos] = rem;
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for v in (0..=rem).rev() {
            cur[pos] = v;
            rec(out, cur, pos + 1, rem - v);
        }
    }
    if n == 0 {
        if d == 0 {
            out.push(MultiIndex(vec![]));
        }
        return out;
    }
    rec(&mut out, &mut cur, 0, d);
    out
}

/// All bidegree keys with |I| + |J| = degree, ordered lexicographically.
pub fn keys_of_degree(n: usize, degree: u32) -> Vec<Key> {
    let mut out = Vec::new();
    for di in (0..=degree).rev() {
        for zi in multi_indices(n, di) {
            for zj in multi_indices(n, degree - di) {
                out.push(Key::new(zi.clone(), zj));
            }
        }
    }
    out.sort();
    out
}

/// All keys with |I| = di and |J| = dj (one bidegree slice), ordered.
pub fn keys_of_bidegree(n: usize, di: u32, dj: u32) -> Vec<Key> {
    let mut out = Vec::new();
    for zi in multi_indices(n, di) {
        for zj in multi_indices(n, dj) {
            out.push(Key::new(zi.clone(), zj));
        }
    }
    out.sort();
    out
}

/// Bishop data of the quadric model: dimension, invariants, and the count of
/// leading nonzero invariants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BishopData {
    pub n: usize,
    /// Exact invariants; the first `k0` are nonzero, the rest vanish.
    pub lambda: Vec<BigRational>,
    pub k0: usize,
}

impl BishopData {
    /// Builds the data, checking the elliptic-regime constraints:
    /// every invariant in [0, 1/2), not all zero, nonzero ones first.
    pub fn new(lambda: Vec<BigRational>) -> Result<Self> {
        Self::with_regime(lambda, false)
    }

    /// Segre regime: lambda_1 > 0 and the rest nonnegative (no upper bound).
    pub fn new_segre(lambda: Vec<BigRational>) -> Result<Self> {
        Self::with_regime(lambda, true)
    }

    fn with_regime(lambda: Vec<BigRational>, segre: bool) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidInput("empty Bishop data".into()));
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for (k, l) in lambda.iter().enumerate() {
            if l.is_negative() {
                return Err(Error::InvalidInput(format!(
                    "lambda_{} = {} is negative",
                    k + 1,
                    format_rational(l)
                )));
            }
            if !segre && *l >= half {
                return Err(Error::InvalidInput(format!(
                    "lambda_{} = {} outside [0, 1/2)",
                    k + 1,
                    format_rational(l)
                )));
            }
        }
        if lambda.iter().all(|l| l.is_zero()) {
            return Err(Error::InvalidInput(
                "all Bishop invariants vanish".into(),
            ));
        }
        if segre && lambda[0].is_zero() {
            return Err(Error::InvalidInput(
                "Segre regime requires lambda_1 > 0".into(),
            ));
        }
        let k0 = lambda.iter().take_while(|l| !l.is_zero()).count();
        if lambda[k0..].iter().any(|l| !l.is_zero()) {
            return Err(Error::InvalidInput(
                "nonzero invariants must be listed first".into(),
            ));
        }
        Ok(BishopData {
            n: lambda.len(),
            lambda,
            k0,
        })
    }

    /// Convenience constructor from (num, den) pairs.
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
                .collect(),
        )
    }

    pub fn lambda_is_zero(&self, k: usize) -> bool {
        self.lambda[k].is_zero()
    }
}

/// Number of monomials of degree `d` in `v` variables: C(d + v - 1, v - 1).
pub fn monomial_count(v: usize, d: u32) -> usize {
    if v == 0 {
        return usize::from(d == 0);
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for k in 1..v {
        num *= BigInt::from(d as u64 + k as u64);
        den *= BigInt::from(k as u64);
    }
    let q = num / den;
    q.to_string().parse().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_counts_match_enumeration() {
        for n in 1..=3usize {
            for d in 0..=6u32 {
                assert_eq!(multi_indices(n, d).len(), monomial_count(n, d));
                assert_eq!(
                    keys_of_degree(n, d).len(),
                    monomial_count(2 * n, d),
                    "n={n} d={d}"
                );
            }
        }
    }

    #[test]
    fn keys_are_sorted_and_unique() {
        let keys = keys_of_degree(2, 4);
        for w in keys.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn bishop_data_validation() {
        assert!(BishopData::from_pairs(&[(1, 4), (0, 1)]).is_ok());
        // all zero rejected
        assert!(BishopData::from_pairs(&[(0, 1)]).is_err());
        // out of range
        assert!(BishopData::from_pairs(&[(1, 2)]).is_err());
        // zero before nonzero rejected
        assert!(BishopData::from_pairs(&[(0, 1), (1, 4)]).is_err());
        // Segre regime admits lambda >= 1/2
        let one = BigRational::one();
        assert!(BishopData::new_segre(vec![one]).is_ok());
    }

    #[test]
    fn parity_class_is_stable_under_even_shifts() {
        let k = Key::new(MultiIndex(vec![2, 1]), MultiIndex(vec![0, 3]));
        let shifted = Key::new(MultiIndex(vec![4, 1]), MultiIndex(vec![0, 5]));
        assert_eq!(k.parity_class(), shifted.parity_class());
    }
}
