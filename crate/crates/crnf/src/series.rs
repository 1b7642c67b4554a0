//! Degree-graded truncated series in `(z, zbar)` (or `(z, xi)`) and the
//! substitution machinery used by the transform equations.

use crate::error::Result;
use crate::multi_index::{Key, MultiIndex};
use crate::poly::{HomPoly, VarKind};
use crate::scalar::Coeff;
use std::collections::BTreeMap;

/// Finite sum of homogeneous parts, hard-truncated at `trunc`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graded<C: Coeff> {
    pub n: usize,
    pub kind: VarKind,
    pub trunc: u32,
    parts: BTreeMap<u32, HomPoly<C>>,
}

impl<C: Coeff> Graded<C> {
    pub fn zero(n: usize, kind: VarKind, trunc: u32) -> Self {
        Graded {
            n,
            kind,
            trunc,
            parts: BTreeMap::new(),
        }
    }

    pub fn one(n: usize, kind: VarKind, trunc: u32) -> Self {
        Graded::from_poly(
            HomPoly::monomial(
                n,
                kind,
                Key::new(MultiIndex::zero(n), MultiIndex::zero(n)),
                C::one(),
            ),
            trunc,
        )
    }

    pub fn from_poly(p: HomPoly<C>, trunc: u32) -> Self {
        let mut g = Graded::zero(p.ambient_n(), p.kind(), trunc);
        g.add_poly(&p);
        g
    }

    pub fn part(&self, degree: u32) -> HomPoly<C> {
        self.parts
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| HomPoly::zero(self.n, degree, self.kind))
    }

    pub fn parts(&self) -> impl Iterator<Item = (&u32, &HomPoly<C>)> {
        self.parts.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.values().all(|p| p.is_zero())
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.parts
            .iter()
            .find(|(_, p)| !p.is_zero())
            .map(|(d, _)| *d)
    }

    pub fn add_poly(&mut self, p: &HomPoly<C>) {
        if p.is_zero() || p.degree() > self.trunc {
            return;
        }
        let entry = self
            .parts
            .entry(p.degree())
            .or_insert_with(|| HomPoly::zero(self.n, p.degree(), self.kind));
        *entry = entry.add(p).expect("graded shape");
        if entry.is_zero() {
            self.parts.remove(&p.degree());
        }
    }

    pub fn add(&self, other: &Graded<C>) -> Graded<C> {
        let mut out = self.clone();
        for (_, p) in other.parts() {
            out.add_poly(p);
        }
        out
    }

    pub fn sub(&self, other: &Graded<C>) -> Graded<C> {
        let mut out = self.clone();
        for (_, p) in other.parts() {
            out.add_poly(&p.neg());
        }
        out
    }

    pub fn scale(&self, s: &C) -> Graded<C> {
        let mut out = Graded::zero(self.n, self.kind, self.trunc);
        for (_, p) in self.parts() {
            out.add_poly(&p.scale(s));
        }
        out
    }

    pub fn mul(&self, other: &Graded<C>) -> Result<Graded<C>> {
        let mut out = Graded::zero(self.n, self.kind, self.trunc);
        for (da, pa) in self.parts() {
            if pa.is_zero() {
                continue;
            }
            for (db, pb) in other.parts() {
                if da + db > self.trunc {
                    break;
                }
                out.add_poly(&pa.mul(pb)?);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Graded<C>> {
        let mut out = Graded::one(self.n, self.kind, self.trunc);
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Kind-appropriate involution applied partwise (conjugate-swap or
    /// variable swap).
    pub fn bar(&self) -> Graded<C> {
        let mut out = Graded::zero(self.n, self.kind, self.trunc);
        for (_, p) in self.parts() {
            out.add_poly(&p.bar());
        }
        out
    }

    pub fn swap_vars(&self) -> Graded<C> {
        let mut out = Graded::zero(self.n, self.kind, self.trunc);
        for (_, p) in self.parts() {
            out.add_poly(&p.swap_vars());
        }
        out
    }

    pub fn retruncate(&self, trunc: u32) -> Graded<C> {
        let mut out = Graded::zero(self.n, self.kind, trunc);
        for (_, p) in self.parts() {
            out.add_poly(p);
        }
        out
    }
}

/// Cache of monomial products `prod fz[k]^{i_k} prod fj[k]^{j_k}` shared
/// across every substitution with the same component series. Each cached
/// entry costs one series multiplication (prefix recursion), so composing a
/// polynomial is one multiplication per distinct monomial overall.
pub struct ProductCache<'a, C: Coeff> {
    fz: &'a [Graded<C>],
    fj: &'a [Graded<C>],
    trunc: u32,
    map: std::collections::HashMap<Key, Graded<C>>,
}

impl<'a, C: Coeff> ProductCache<'a, C> {
    pub fn new(fz: &'a [Graded<C>], fj: &'a [Graded<C>], trunc: u32) -> Self {
        ProductCache {
            fz,
            fj,
            trunc,
            map: std::collections::HashMap::new(),
        }
    }

    fn product(&mut self, key: &Key) -> Result<Graded<C>> {
        if key.degree() == 0 {
            return Ok(Graded::one(self.fz[0].n, self.fz[0].kind, self.trunc));
        }
        if let Some(g) = self.map.get(key) {
            return Ok(g.clone());
        }
        // strip the last nonzero exponent and recurse
        let n = key.zi.len_vars();
        let (blk, idx) = {
            let mut found = (0usize, 0usize);
            for k in (0..n).rev() {
                if key.zj.get(k) > 0 {
                    found = (1, k);
                    break;
                }
                if key.zi.get(k) > 0 {
                    found = (0, k);
                    break;
                }
            }
            found
        };
        let prev = if blk == 0 {
            Key::new(key.zi.bumped(idx, -1).unwrap(), key.zj.clone())
        } else {
            Key::new(key.zi.clone(), key.zj.bumped(idx, -1).unwrap())
        };
        let base = if blk == 0 { &self.fz[idx] } else { &self.fj[idx] };
        let g = self.product(&prev)?.mul(base)?;
        self.map.insert(key.clone(), g.clone());
        Ok(g)
    }

    /// Substitutes the cached component series into `p`.
    pub fn compose(&mut self, p: &HomPoly<C>) -> Result<Graded<C>> {
        let mut out = Graded::zero(self.fz[0].n, self.fz[0].kind, self.trunc);
        for (key, c) in p.terms() {
            let g = self.product(key)?;
            out = out.add(&g.scale(c));
        }
        Ok(out)
    }
}

/// Substitutes vector series into a polynomial: for `p = sum c z^I zbar^J`
/// computes `sum c prod fz[k]^{i_k} prod fj[k]^{j_k}` truncated.
pub fn compose<C: Coeff>(
    p: &HomPoly<C>,
    fz: &[Graded<C>],
    fj: &[Graded<C>],
    trunc: u32,
) -> Result<Graded<C>> {
    let n = p.ambient_n();
    assert_eq!(fz.len(), n);
    assert_eq!(fj.len(), n);
    ProductCache::new(fz, fj, trunc).compose(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi_index::BishopData;
    use crate::poly::quadric;
    use crate::scalar::Exact;

    #[test]
    fn graded_mul_truncates() {
        let b = BishopData::from_pairs(&[(1, 4)]).unwrap();
        let q: HomPoly<Exact> = quadric(&b, VarKind::Conjugate);
        let g = Graded::from_poly(q, 5);
        let g2 = g.mul(&g).unwrap();
        assert!(!g2.part(4).is_zero());
        let g3 = g2.mul(&g).unwrap();
        assert!(g3.is_zero());
    }

    #[test]
    fn compose_identity_is_identity() {
        let n = 2;
        let kind = VarKind::Conjugate;
        let idz: Vec<Graded<Exact>> = (0..n)
            .map(|k| {
                Graded::from_poly(
                    HomPoly::monomial(
                        n,
                        kind,
                        Key::new(MultiIndex::unit(n, k), MultiIndex::zero(n)),
                        Exact::from_ints(1, 1),
                    ),
                    6,
                )
            })
            .collect();
        let idj: Vec<Graded<Exact>> = (0..n)
            .map(|k| {
                Graded::from_poly(
                    HomPoly::monomial(
                        n,
                        kind,
                        Key::new(MultiIndex::zero(n), MultiIndex::unit(n, k)),
                        Exact::from_ints(1, 1),
                    ),
                    6,
                )
            })
            .collect();
        let b = BishopData::from_pairs(&[(1, 4), (3, 10)]).unwrap();
        let q: HomPoly<Exact> = quadric(&b, kind);
        let composed = compose(&q, &idz, &idj, 6).unwrap();
        assert_eq!(composed.part(2), q);
    }
}
