//! Sparse homogeneous polynomials in `(z, zbar)` or `(z, xi)`, the model
//! quadric, the Fischer differential operator, and the Fischer pairing.

use crate::error::{Error, Result};
use crate::multi_index::{keys_of_degree, BishopData, Key, MultiIndex};
use crate::scalar::{format_rational, parse_rational, Coeff, Cx, Exact};
use num_rational::BigRational;
use num_traits::Zero as _;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Which pair of variables the second index block refers to.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum VarKind {
    /// `(z, zbar)`: the real setting, conjugation acts on coefficients.
    Conjugate,
    /// `(z, xi)`: the complexified Segre setting, no conjugation.
    Independent,
}

/// Homogeneous polynomial of fixed total degree. Zero coefficients are never
/// stored; two values compare equal iff their term maps agree.
#[derive(Clone, PartialEq, Debug)]
pub struct HomPoly<C: Coeff> {
    n: usize,
    degree: u32,
    kind: VarKind,
    terms: BTreeMap<Key, C>,
}

impl<C: Coeff> HomPoly<C> {
    pub fn zero(n: usize, degree: u32, kind: VarKind) -> Self {
        HomPoly {
            n,
            degree,
            kind,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(n: usize, kind: VarKind, key: Key, c: C) -> Self {
        let mut p = HomPoly::zero(n, key.degree(), kind);
        p.add_term(key, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Key, C)>>(
        n: usize,
        degree: u32,
        kind: VarKind,
        it: I,
    ) -> Result<Self> {
        let mut p = HomPoly::zero(n, degree, kind);
        for (k, c) in it {
            if k.zi.len_vars() != n {
                return Err(Error::DimensionMismatch(format!(
                    "key {:?} in ambient N={}",
                    k, n
                )));
            }
            if k.degree() != degree {
                return Err(Error::DegreeMismatch(format!(
                    "key {:?} in degree-{} polynomial",
                    k, degree
                )));
            }
            p.add_term(k, c);
        }
        Ok(p)
    }

    pub fn ambient_n(&self) -> usize {
        self.n
    }
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn kind(&self) -> VarKind {
        self.kind
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Key, &C)> {
        self.terms.iter()
    }
    pub fn coeff(&self, key: &Key) -> C {
        self.terms.get(key).cloned().unwrap_or_else(C::zero)
    }

    /// Adds `c` to the coefficient at `key`, pruning zeros.
    pub fn add_term(&mut self, key: Key, c: C) {
        debug_assert_eq!(key.degree(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = HomPoly::zero(self.n, self.degree, self.kind);
        if s.is_zero() {
            return out;
        }
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-C::one())
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "N={} vs N={}",
                self.n, other.n
            )));
        }
        if self.kind != other.kind {
            return Err(Error::KindMismatch(format!(
                "{:?} vs {:?}",
                self.kind, other.kind
            )));
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "{} vs {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    /// Product; degrees add. Denominators are cleared first so the inner
    /// accumulation runs on integral coefficients (one normalization per
    /// output term instead of one per term product).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "N={} vs N={}",
                self.n, other.n
            )));
        }
        if self.kind != other.kind {
            return Err(Error::KindMismatch(format!(
                "{:?} vs {:?}",
                self.kind, other.kind
            )));
        }
        let da = C::clearing_factor(self.terms.values());
        let db = C::clearing_factor(other.terms.values());
        let a = match &da {
            Some(d) => self.scale(d),
            None => self.clone(),
        };
        let b = match &db {
            Some(d) => other.scale(d),
            None => other.clone(),
        };
        let mut out = HomPoly::zero(self.n, self.degree + other.degree, self.kind);
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                let zi = MultiIndex(
                    ka.zi
                        .0
                        .iter()
                        .zip(&kb.zi.0)
                        .map(|(x, y)| x + y)
                        .collect(),
                );
                let zj = MultiIndex(
                    ka.zj
                        .0
                        .iter()
                        .zip(&kb.zj.0)
                        .map(|(x, y)| x + y)
                        .collect(),
                );
                out.add_term(Key::new(zi, zj), ca.clone() * cb.clone());
            }
        }
        let back = match (da, db) {
            (None, None) => None,
            (Some(d), None) | (None, Some(d)) => d.inv(),
            (Some(d1), Some(d2)) => (d1 * d2).inv(),
        };
        Ok(match back {
            Some(f) => out.scale(&f),
            None => out,
        })
    }

    /// The Fischer differential operator of the model:
    /// `tr f = sum_k d2f/dz_k dzbar_k + sum_k lambda_k (d2f/dz_k^2 + d2f/dzbar_k^2)`.
    ///
    /// Returns the zero polynomial of degree `max(degree, 2) - 2` when the
    /// input has degree < 2.
    pub fn trace(&self, b: &BishopData) -> Result<Self> {
        if b.n != self.n {
            return Err(Error::DimensionMismatch(format!(
                "poly N={} vs Bishop N={}",
                self.n, b.n
            )));
        }
        let out_deg = self.degree.saturating_sub(2);
        let mut out = HomPoly::zero(self.n, out_deg, self.kind);
        if self.degree < 2 {
            return Ok(out);
        }
        for (key, c) in &self.terms {
            for k in 0..self.n {
                let ik = key.zi.get(k) as i64;
                let jk = key.zj.get(k) as i64;
                // mixed second derivative
                if ik >= 1 && jk >= 1 {
                    let nk = Key::new(
                        key.zi.bumped(k, -1).unwrap(),
                        key.zj.bumped(k, -1).unwrap(),
                    );
                    out.add_term(nk, c.clone() * C::from_i64(ik * jk));
                }
                if !b.lambda_is_zero(k) {
                    let lam = C::from_rational(&b.lambda[k]);
                    if ik >= 2 {
                        let nk = Key::new(key.zi.bumped(k, -2).unwrap(), key.zj.clone());
                        out.add_term(nk, c.clone() * C::from_i64(ik * (ik - 1)) * lam.clone());
                    }
                    if jk >= 2 {
                        let nk = Key::new(key.zi.clone(), key.zj.bumped(k, -2).unwrap());
                        out.add_term(nk, c.clone() * C::from_i64(jk * (jk - 1)) * lam);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Conjugate-swap involution: conjugate coefficients (Conjugate kind
    /// only) and exchange the two index blocks. Fixed points are the
    /// real-valued polynomials.
    pub fn bar(&self) -> Self {
        let mut out = HomPoly::zero(self.n, self.degree, self.kind);
        for (k, c) in &self.terms {
            let c = match self.kind {
                VarKind::Conjugate => c.conj(),
                VarKind::Independent => c.clone(),
            };
            out.add_term(k.swapped(), c);
        }
        out
    }

    /// Plain variable swap `z <-> xi` with no coefficient conjugation.
    pub fn swap_vars(&self) -> Self {
        let mut out = HomPoly::zero(self.n, self.degree, self.kind);
        for (k, c) in &self.terms {
            out.add_term(k.swapped(), c.clone());
        }
        out
    }

    pub fn is_bar_symmetric(&self) -> bool {
        *self == self.bar()
    }

    /// Fischer pairing `<f, g> = sum I! J! f_{I;J} conj(g_{I;J})`.
    pub fn fischer_inner(&self, other: &Self) -> Result<C> {
        self.check_shape(other)?;
        let mut acc = C::zero();
        for (k, a) in &self.terms {
            if let Some(b) = other.terms.get(k) {
                let w = C::from_rational(&BigRational::from(k.factorial()));
                acc = acc + a.clone() * b.conj() * w;
            }
        }
        Ok(acc)
    }

    /// The quadratic Fischer energy `sum (I;J)! |c|^2` (no square root; the
    /// Pythagoras identity only holds for the quadratic form).
    pub fn fischer_energy(&self) -> C {
        let mut acc = C::zero();
        for (k, c) in &self.terms {
            let w = C::from_rational(&BigRational::from(k.factorial()));
            acc = acc + c.clone() * c.conj() * w;
        }
        acc
    }

    /// Coefficient-wise real part `(c + conj c)/2` (keeps monomials).
    pub fn re_coeff_part(&self) -> Self {
        let half = C::from_rational(&BigRational::new(1.into(), 2.into()));
        let mut out = HomPoly::zero(self.n, self.degree, self.kind);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), (c.clone() + c.conj()) * half.clone());
        }
        out
    }

    /// Coefficient-wise imaginary part `(c - conj c)/2i` (keeps monomials).
    pub fn im_coeff_part(&self) -> Self {
        let half = C::from_rational(&BigRational::new(1.into(), 2.into()));
        let mhalf_i = -(C::i() * half);
        let mut out = HomPoly::zero(self.n, self.degree, self.kind);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), (c.clone() - c.conj()) * mhalf_i.clone());
        }
        out
    }

    /// Second partial derivative; each factor picks a block (0 = first
    /// variable block, 1 = second) and a coordinate.
    pub fn second_partial(&self, ba: usize, a: usize, bb: usize, b: usize) -> Self {
        let out_deg = self.degree.saturating_sub(2);
        let mut out = HomPoly::zero(self.n, out_deg, self.kind);
        if self.degree < 2 {
            return out;
        }
        for (key, c) in &self.terms {
            let first = |k: &Key, blk: usize, v: usize| -> Option<(Key, i64)> {
                let e = if blk == 0 { k.zi.get(v) } else { k.zj.get(v) } as i64;
                if e < 1 {
                    return None;
                }
                let nk = if blk == 0 {
                    Key::new(k.zi.bumped(v, -1)?, k.zj.clone())
                } else {
                    Key::new(k.zi.clone(), k.zj.bumped(v, -1)?)
                };
                Some((nk, e))
            };
            if let Some((k1, e1)) = first(key, ba, a) {
                if let Some((k2, e2)) = first(&k1, bb, b) {
                    out.add_term(k2, c.clone() * C::from_i64(e1 * e2));
                }
            }
        }
        out
    }

    /// The sub-polynomial supported on keys whose other block vanishes
    /// (`block = 0`: pure-z part, `block = 1`: pure second-block part).
    pub fn pure_part(&self, block: usize) -> Self {
        let mut out = HomPoly::zero(self.n, self.degree, self.kind);
        for (k, c) in &self.terms {
            let other = if block == 0 {
                k.zj.total()
            } else {
                k.zi.total()
            };
            if other == 0 {
                out.add_term(k.clone(), c.clone());
            }
        }
        out
    }

    /// Reinterpret `(z, zbar)` as `(z, xi)`.
    pub fn complexify(&self) -> Self {
        let mut out = self.clone();
        out.kind = VarKind::Independent;
        out
    }

    /// Substitute `xi -> zbar`, returning to the Conjugate kind.
    pub fn restrict_to_real(&self) -> Self {
        let mut out = self.clone();
        out.kind = VarKind::Conjugate;
        out
    }

    pub fn max_coeff_mag(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.pivot_mag())
            .fold(0.0, f64::max)
    }

    /// Dense coefficient vector with respect to a basis listing.
    pub fn to_dense(&self, basis: &[Key]) -> Vec<C> {
        basis.iter().map(|k| self.coeff(k)).collect()
    }

    pub fn from_dense(n: usize, degree: u32, kind: VarKind, basis: &[Key], v: &[C]) -> Self {
        let mut out = HomPoly::zero(n, degree, kind);
        for (k, c) in basis.iter().zip(v) {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl HomPoly<Exact> {
    pub fn to_float(&self) -> HomPoly<Cx> {
        let mut out = HomPoly::zero(self.n, self.degree, self.kind);
        for (k, c) in &self.terms {
            let (re, im) = c.to_f64_pair();
            out.add_term(k.clone(), Cx::new(re, im));
        }
        out
    }
}

/// The model quadric `Q = sum z_k zbar_k + sum lambda_k (z_k^2 + zbar_k^2)`
/// (with `xi` in place of `zbar` for the Independent kind).
pub fn quadric<C: Coeff>(b: &BishopData, kind: VarKind) -> HomPoly<C> {
    let n = b.n;
    let mut q = HomPoly::zero(n, 2, kind);
    for k in 0..n {
        q.add_term(
            Key::new(MultiIndex::unit(n, k), MultiIndex::unit(n, k)),
            C::one(),
        );
        if !b.lambda_is_zero(k) {
            let lam = C::from_rational(&b.lambda[k]);
            let mut zi2 = MultiIndex::zero(n);
            zi2.0[k] = 2;
            q.add_term(Key::new(zi2.clone(), MultiIndex::zero(n)), lam.clone());
            q.add_term(Key::new(MultiIndex::zero(n), zi2), lam);
        }
    }
    q
}

/// Canonical JSON form of a homogeneous polynomial.
#[derive(Serialize, Deserialize)]
pub struct HomPolyJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub degree: u32,
    pub kind: String,
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
pub struct TermJson {
    #[serde(rename = "I")]
    pub i: Vec<u32>,
    #[serde(rename = "J")]
    pub j: Vec<u32>,
    pub re: serde_json::Value,
    pub im: serde_json::Value,
}

fn kind_str(kind: VarKind) -> &'static str {
    match kind {
        VarKind::Conjugate => "conjugate",
        VarKind::Independent => "independent",
    }
}

fn kind_from_str(s: &str) -> Result<VarKind> {
    match s {
        "conjugate" => Ok(VarKind::Conjugate),
        "independent" => Ok(VarKind::Independent),
        other => Err(Error::InvalidInput(format!("unknown kind {other:?}"))),
    }
}

impl HomPoly<Exact> {
    pub fn to_json(&self) -> HomPolyJson {
        HomPolyJson {
            n: self.n,
            degree: self.degree,
            kind: kind_str(self.kind).to_string(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TermJson {
                    i: k.zi.0.clone(),
                    j: k.zj.0.clone(),
                    re: serde_json::Value::String(format_rational(&c.re)),
                    im: serde_json::Value::String(format_rational(&c.im)),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &HomPolyJson) -> Result<Self> {
        let kind = kind_from_str(&j.kind)?;
        let mut p = HomPoly::zero(j.n, j.degree, kind);
        for t in &j.terms {
            let re = rational_from_value(&t.re)?;
            let im = rational_from_value(&t.im)?;
            let key = Key::new(MultiIndex(t.i.clone()), MultiIndex(t.j.clone()));
            if key.zi.len_vars() != j.n || key.zj.len_vars() != j.n {
                return Err(Error::DimensionMismatch("term index length".into()));
            }
            if key.degree() != j.degree {
                return Err(Error::DegreeMismatch(format!(
                    "term {:?} in degree-{} polynomial",
                    key, j.degree
                )));
            }
            p.add_term(key, Exact::new(re, im));
        }
        Ok(p)
    }
}

impl HomPoly<Cx> {
    pub fn to_json(&self) -> HomPolyJson {
        HomPolyJson {
            n: self.n,
            degree: self.degree,
            kind: kind_str(self.kind).to_string(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TermJson {
                    i: k.zi.0.clone(),
                    j: k.zj.0.clone(),
                    re: serde_json::json!(c.re),
                    im: serde_json::json!(c.im),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &HomPolyJson) -> Result<Self> {
        let kind = kind_from_str(&j.kind)?;
        let mut p = HomPoly::zero(j.n, j.degree, kind);
        for t in &j.terms {
            let re = float_from_value(&t.re)?;
            let im = float_from_value(&t.im)?;
            let key = Key::new(MultiIndex(t.i.clone()), MultiIndex(t.j.clone()));
            if key.degree() != j.degree {
                return Err(Error::DegreeMismatch("term degree".into()));
            }
            p.add_term(key, Cx::new(re, im));
        }
        Ok(p)
    }
}

fn rational_from_value(v: &serde_json::Value) -> Result<BigRational> {
    match v {
        serde_json::Value::String(s) => {
            parse_rational(s).ok_or_else(|| Error::InvalidInput(format!("bad rational {s:?}")))
        }
        serde_json::Value::Number(n) if n.is_i64() => Ok(BigRational::from(
            num_bigint::BigInt::from(n.as_i64().unwrap()),
        )),
        other => Err(Error::InvalidInput(format!(
            "expected rational string, got {other}"
        ))),
    }
}

fn float_from_value(v: &serde_json::Value) -> Result<f64> {
    match v {
        serde_json::Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::InvalidInput("bad float".into())),
        serde_json::Value::String(s) => parse_rational(s)
            .and_then(|r| num_traits::ToPrimitive::to_f64(&r))
            .ok_or_else(|| Error::InvalidInput(format!("bad float {s:?}"))),
        other => Err(Error::InvalidInput(format!("expected float, got {other}"))),
    }
}

/// Exact polynomial with all coefficients real (as rationals).
pub fn is_real_coefficient(p: &HomPoly<Exact>) -> bool {
    p.terms().all(|(_, c)| c.im.is_zero())
}

/// Basis listing shared by tests and solvers.
pub fn basis_of_degree(n: usize, degree: u32) -> Vec<Key> {
    keys_of_degree(n, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi_index::keys_of_degree;
    use num_bigint::BigInt;

    fn b1(num: i64, den: i64) -> BishopData {
        BishopData::from_pairs(&[(num, den)]).unwrap()
    }

    fn mono(n: usize, zi: &[u32], zj: &[u32]) -> HomPoly<Exact> {
        HomPoly::monomial(
            n,
            VarKind::Conjugate,
            Key::new(MultiIndex(zi.to_vec()), MultiIndex(zj.to_vec())),
            Exact::from_ints(1, 1),
        )
    }

    #[test]
    fn quadric_matches_model_pattern() {
        // N=1, lambda=0 would be rejected by BishopData (not all zero), so
        // exercise the stated examples directly.
        let b = BishopData::from_pairs(&[(1, 4), (0, 1)]).unwrap();
        let q: HomPoly<Exact> = quadric(&b, VarKind::Conjugate);
        // z1 zbar1 + z2 zbar2 + 1/4 (z1^2 + zbar1^2)
        assert_eq!(q.num_terms(), 4);
        assert_eq!(
            q.coeff(&Key::new(MultiIndex(vec![1, 0]), MultiIndex(vec![1, 0]))),
            Exact::from_ints(1, 1)
        );
        assert_eq!(
            q.coeff(&Key::new(MultiIndex(vec![2, 0]), MultiIndex(vec![0, 0]))),
            Exact::from_ints(1, 4)
        );

        let bs = b1(1, 4);
        let qs: HomPoly<Exact> = quadric(&bs, VarKind::Independent);
        assert_eq!(qs.num_terms(), 3);
        assert_eq!(qs.kind(), VarKind::Independent);
    }

    #[test]
    fn mul_examples() {
        let z1 = mono(1, &[1], &[0]);
        let zb1 = mono(1, &[0], &[1]);
        let p = z1.mul(&zb1).unwrap();
        assert_eq!(p.coeff(&Key::new(MultiIndex(vec![1]), MultiIndex(vec![1]))),
            Exact::from_ints(1, 1));

        // (z1 + zbar1)^2 = z1^2 + 2 z1 zbar1 + zbar1^2
        let s = z1.add(&zb1).unwrap();
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq.coeff(&Key::new(MultiIndex(vec![2]), MultiIndex(vec![0]))),
            Exact::from_ints(1, 1));
        assert_eq!(sq.coeff(&Key::new(MultiIndex(vec![1]), MultiIndex(vec![1]))),
            Exact::from_ints(2, 1));

        let zero = HomPoly::<Exact>::zero(1, 3, VarKind::Conjugate);
        assert!(z1.mul(&zero).unwrap().is_zero());
    }

    #[test]
    fn trace_examples() {
        // tr(Q) = N + 4 sum lambda_k^2
        let b = BishopData::from_pairs(&[(1, 4), (3, 10)]).unwrap();
        let q: HomPoly<Exact> = quadric(&b, VarKind::Conjugate);
        let t = q.trace(&b).unwrap();
        assert_eq!(t.degree(), 0);
        let expect = BigRational::from(BigInt::from(2))
            + BigRational::new(BigInt::from(4), BigInt::from(16))
            + BigRational::new(BigInt::from(4 * 9), BigInt::from(100));
        assert_eq!(
            t.coeff(&Key::new(MultiIndex(vec![0, 0]), MultiIndex(vec![0, 0]))),
            Exact::real(expect)
        );

        // N=3: tr(z1 z2 z3) = 0 for any lambda
        let b3 = BishopData::from_pairs(&[(1, 5), (1, 4), (2, 5)]).unwrap();
        let p = mono(3, &[1, 1, 1], &[0, 0, 0]);
        assert!(p.trace(&b3).unwrap().is_zero());

        // N=1: tr(z^2) = 2 lambda
        let b = b1(1, 4);
        let p = mono(1, &[2], &[0]);
        let t = p.trace(&b).unwrap();
        assert_eq!(
            t.coeff(&Key::new(MultiIndex(vec![0]), MultiIndex(vec![0]))),
            Exact::from_ints(2, 4)
        );

        // degree < 2 is well-typed and zero
        let lin = mono(1, &[1], &[0]);
        assert!(lin.trace(&b).unwrap().is_zero());
    }

    #[test]
    fn fischer_inner_examples() {
        let z2 = mono(1, &[2], &[0]);
        assert_eq!(z2.fischer_inner(&z2).unwrap(), Exact::from_ints(2, 1));

        let z = mono(1, &[1], &[0]);
        let zb = mono(1, &[0], &[1]);
        assert_eq!(z.fischer_inner(&zb).unwrap(), Exact::from_ints(0, 1));

        let m = mono(2, &[1, 0], &[0, 1]);
        assert_eq!(m.fischer_inner(&m).unwrap(), Exact::from_ints(1, 1));
    }

    #[test]
    fn fischer_energy_examples() {
        let zero = HomPoly::<Exact>::zero(1, 4, VarKind::Conjugate);
        assert!(zero.fischer_energy().is_zero());

        let z3 = mono(1, &[3], &[0]);
        assert_eq!(z3.fischer_energy(), Exact::from_ints(6, 1));

        let two_z = mono(1, &[1], &[0]).scale(&Exact::from_ints(2, 1));
        assert_eq!(two_z.fischer_energy(), Exact::from_ints(4, 1));
    }

    #[test]
    fn pythagoras_for_orthogonal_parts() {
        let f = mono(2, &[2, 0], &[1, 0]);
        let g = mono(2, &[0, 1], &[0, 2]).scale(&Exact::from_ints(3, 7));
        assert!(f.fischer_inner(&g).unwrap().is_zero());
        let sum = f.add(&g).unwrap();
        assert_eq!(
            sum.fischer_energy(),
            f.fischer_energy() + g.fischer_energy()
        );
    }

    #[test]
    fn adjointness_on_monomial_bases() {
        // <A Q, B> = <A, tr B> for all monomials A of degree p-2, B of
        // degree p; exhaustive at small sizes here, the full N<=3 sweep
        // lives in the integration tests.
        for (n, p) in [(1usize, 4u32), (2, 3), (2, 4)] {
            let b = if n == 1 {
                b1(2, 5)
            } else {
                BishopData::from_pairs(&[(1, 4), (3, 10)]).unwrap()
            };
            let q: HomPoly<Exact> = quadric(&b, VarKind::Conjugate);
            for ka in keys_of_degree(n, p - 2) {
                let a = HomPoly::monomial(n, VarKind::Conjugate, ka, Exact::from_ints(1, 1));
                let aq = a.mul(&q).unwrap();
                for kb in keys_of_degree(n, p) {
                    let bb =
                        HomPoly::monomial(n, VarKind::Conjugate, kb, Exact::from_ints(1, 1));
                    let lhs = aq.fischer_inner(&bb).unwrap();
                    let rhs = a.fischer_inner(&bb.trace(&b).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn bar_and_reality() {
        let p = mono(1, &[3], &[0])
            .add(&mono(1, &[0], &[3]))
            .unwrap();
        assert!(p.is_bar_symmetric());
        let q = mono(1, &[3], &[0]).scale(&Exact::i());
        assert!(!q.is_bar_symmetric());
    }

    #[test]
    fn json_round_trip() {
        let p = mono(2, &[2, 0], &[0, 1]).scale(&Exact::new(
            BigRational::new(BigInt::from(3), BigInt::from(4)),
            BigRational::new(BigInt::from(-1), BigInt::from(2)),
        ));
        let j = serde_json::to_string(&p.to_json()).unwrap();
        let back: HomPolyJson = serde_json::from_str(&j).unwrap();
        assert_eq!(HomPoly::<Exact>::from_json(&back).unwrap(), p);
    }
}
