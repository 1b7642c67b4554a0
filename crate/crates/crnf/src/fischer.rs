//! Fischer decompositions with respect to the model quadric, iterated
//! chains, the index sets S and T_k, and the normalization bases.
//!
//! The single decomposition `P = A*Q + C`, `tr(C) = 0` is computed by solving
//! the square linear map `A -> tr(A*Q)` on the coefficient space of degree
//! `deg P - 2` with right-hand side `tr(P)`; adjointness of multiplication by
//! `Q` and `tr` under the Fischer pairing makes the map invertible. The map
//! preserves the parity class of `I - J` (all its monomial shifts are even),
//! so the solver factors one small block per class instead of the full space.

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::multi_index::{keys_of_degree, multi_indices, BishopData, Key, MultiIndex};
use crate::poly::{quadric, HomPoly, VarKind};
use crate::scalar::Coeff;
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

/// Result of a single Fischer decomposition `P = A*Q + C` with `tr(C) = 0`.
#[derive(Clone, Debug)]
pub struct DecompResult<C: Coeff> {
    pub a: HomPoly<C>,
    pub c: HomPoly<C>,
}

/// Flavor of the iterated decomposition / normalization space.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Flavor {
    /// Generators from `z^I` (the G-spaces).
    G,
    /// Generators from `(zbar_l + 2 lambda_l z_l) z^J` (the F-spaces).
    F,
}

/// One parity-class block of the trace-multiplication operator at a fixed
/// degree: basis keys, key-to-position map, and the inverse in cleared form
/// (`inv = inv_num / inv_den`, with integral `inv_num` for exact scalars so
/// solves run without per-operation normalization).
struct ClassBlock<C: Coeff> {
    keys: Vec<Key>,
    pos: HashMap<Key, usize>,
    inv_num: Mat<C>,
    inv_den: C,
}

/// Solver for `A -> tr(A*Q)` on a fixed degree. Parity classes are factored
/// lazily on first use; `decompose` then costs one small back-substitution
/// per touched class.
pub struct DecompSolver<C: Coeff> {
    b: BishopData,
    kind: VarKind,
    /// Degree of the unknown quotient `A`.
    pub a_degree: u32,
    q: HomPoly<C>,
    class_keys: HashMap<u32, Vec<Key>>,
    key_pos: HashMap<Key, (u32, usize)>,
    classes: RefCell<HashMap<u32, Rc<ClassBlock<C>>>>,
}

impl<C: Coeff> DecompSolver<C> {
    /// Builds the solver for targets of degree `p >= 2` (so `deg A = p - 2`).
    pub fn new(b: &BishopData, kind: VarKind, p: u32) -> Result<Self> {
        if p < 2 {
            return Err(Error::DegreeMismatch(format!(
                "decompose needs degree >= 2, got {p}"
            )));
        }
        let a_degree = p - 2;
        let q = quadric::<C>(b, kind);
        let mut class_keys: HashMap<u32, Vec<Key>> = HashMap::new();
        for key in keys_of_degree(b.n, a_degree) {
            class_keys.entry(key.parity_class()).or_default().push(key);
        }
        let mut key_pos = HashMap::new();
        for (cl, keys) in &class_keys {
            for (i, k) in keys.iter().enumerate() {
                key_pos.insert(k.clone(), (*cl, i));
            }
        }
        Ok(DecompSolver {
            b: b.clone(),
            kind,
            a_degree,
            q,
            class_keys,
            key_pos,
            classes: RefCell::new(HashMap::new()),
        })
    }

    fn class_block(&self, class: u32) -> Result<Rc<ClassBlock<C>>> {
        if let Some(b) = self.classes.borrow().get(&class) {
            return Ok(b.clone());
        }
        let keys = self.class_keys[&class].clone();
        let pos: HashMap<Key, usize> = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        let dim = keys.len();
        let mut m = Mat::<C>::zeros(dim, dim);
        for (col, key) in keys.iter().enumerate() {
            let mono = HomPoly::monomial(self.b.n, self.kind, key.clone(), C::one());
            let image = mono.mul(&self.q)?.trace(&self.b)?;
            for (k, c) in image.terms() {
                let row = *pos.get(k).expect("image stays in the parity class");
                m[(row, col)] = c.clone();
            }
        }
        let inv = m.inverse().map_err(|_| {
            Error::Singular(format!(
                "trace-multiplication operator singular on class {class:#b} at degree {}",
                self.a_degree
            ))
        })?;
        let mut entries = Vec::new();
        for r in 0..dim {
            for c in 0..dim {
                entries.push(inv[(r, c)].clone());
            }
        }
        let (inv_num, inv_den) = match C::clearing_factor(entries.iter()) {
            Some(d) => (
                Mat::from_fn(dim, dim, |r, c| inv[(r, c)].clone() * d.clone()),
                d,
            ),
            None => (inv, C::one()),
        };
        let block = Rc::new(ClassBlock {
            keys,
            pos,
            inv_num,
            inv_den,
        });
        self.classes.borrow_mut().insert(class, block.clone());
        Ok(block)
    }

    /// Unique `(A, C)` with `P = A*Q + C` and `tr(C) = 0`.
    pub fn decompose(&self, p: &HomPoly<C>) -> Result<DecompResult<C>> {
        if p.ambient_n() != self.b.n {
            return Err(Error::DimensionMismatch(format!(
                "P has N={}, solver N={}",
                p.ambient_n(),
                self.b.n
            )));
        }
        if p.kind() != self.kind {
            return Err(Error::KindMismatch("decompose".into()));
        }
        if p.degree() != self.a_degree + 2 {
            return Err(Error::DegreeMismatch(format!(
                "P degree {} vs solver target degree {}",
                p.degree(),
                self.a_degree + 2
            )));
        }
        let rhs = p.trace(&self.b)?;
        let mut a = HomPoly::zero(self.b.n, self.a_degree, self.kind);
        // Group the right-hand side by parity class and apply each cached
        // cleared inverse to its slice (one normalization per output entry).
        let mut slices: HashMap<u32, Vec<(usize, C)>> = HashMap::new();
        for (k, c) in rhs.terms() {
            let (class, idx) = *self.key_pos.get(k).expect("rhs key in operator range");
            slices.entry(class).or_default().push((idx, c.clone()));
        }
        for (class, entries) in slices {
            let block = self.class_block(class)?;
            let dim = block.keys.len();
            let den_inv = block.inv_den.inv().expect("nonzero denominator");
            let mut x = vec![C::zero(); dim];
            for (col_pos, coeff) in entries {
                for r in 0..dim {
                    let add = block.inv_num[(r, col_pos)].clone() * coeff.clone();
                    if !add.is_zero() {
                        x[r] = x[r].clone() + add;
                    }
                }
            }
            for (r, v) in x.into_iter().enumerate() {
                if !v.is_zero() {
                    a.add_term(block.keys[r].clone(), v * den_inv.clone());
                }
            }
        }
        let c = p.sub(&a.mul(&self.q)?)?;
        Ok(DecompResult { a, c })
    }

    /// Dense matrix of the operator on the full degree-`a_degree` space in
    /// the canonical key order (test surface for the block-system module).
    pub fn operator_matrix(&self) -> Result<Mat<C>> {
        let basis = keys_of_degree(self.b.n, self.a_degree);
        let pos: HashMap<Key, usize> = basis
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        let mut m = Mat::zeros(basis.len(), basis.len());
        for (col, key) in basis.iter().enumerate() {
            let mono = HomPoly::monomial(self.b.n, self.kind, key.clone(), C::one());
            let image = mono.mul(&self.q)?.trace(&self.b)?;
            for (k, c) in image.terms() {
                m[(pos[k], col)] = c.clone();
            }
        }
        Ok(m)
    }
}

/// Convenience single-shot decomposition.
pub fn decompose<C: Coeff>(p: &HomPoly<C>, b: &BishopData) -> Result<DecompResult<C>> {
    DecompSolver::new(b, p.kind(), p.degree())?.decompose(p)
}

/// Iterated Fischer decomposition. `quotients[k]` is `P_{k+1}`, and
/// `remainders[k]` is the trace-free `R_{k+1}`, so
/// `P = sum_k remainders[k] * Q^k + quotients.last() * Q^depth`.
#[derive(Clone, Debug)]
pub struct FischerChain<C: Coeff> {
    pub quotients: Vec<HomPoly<C>>,
    pub remainders: Vec<HomPoly<C>>,
}

impl<C: Coeff> FischerChain<C> {
    pub fn depth(&self) -> usize {
        self.remainders.len()
    }

    /// Reassembles the original polynomial (exact identity in exact mode).
    pub fn reassemble(&self, b: &BishopData, kind: VarKind) -> Result<HomPoly<C>> {
        let q = quadric::<C>(b, kind);
        let mut acc: Option<HomPoly<C>> = None;
        let mut qpow: Option<HomPoly<C>> = None;
        for r in &self.remainders {
            let term = match &qpow {
                None => r.clone(),
                Some(qp) => r.mul(qp)?,
            };
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
            qpow = Some(match qpow {
                None => q.clone(),
                Some(qp) => qp.mul(&q)?,
            });
        }
        if let (Some(last), Some(qp)) = (self.quotients.last(), &qpow) {
            let tail = last.mul(qp)?;
            acc = Some(match acc {
                None => tail,
                Some(a) => a.add(&tail)?,
            });
        }
        acc.ok_or_else(|| Error::InvalidInput("empty chain".into()))
    }
}

/// Runs the iterated decomposition: the G-chain continues while the current
/// degree is >= 2, the F-chain while it is >= 3 (depths floor(p/2) and
/// floor((p-1)/2)).
pub fn chain<C: Coeff>(p: &HomPoly<C>, b: &BishopData, flavor: Flavor) -> Result<FischerChain<C>> {
    if p.degree() < 1 {
        return Err(Error::DegreeMismatch("chain needs degree >= 1".into()));
    }
    let stop = match flavor {
        Flavor::G => 2,
        Flavor::F => 3,
    };
    let mut quotients = Vec::new();
    let mut remainders = Vec::new();
    let mut cur = p.clone();
    while cur.degree() >= stop {
        let d = decompose(&cur, b)?;
        quotients.push(d.a.clone());
        remainders.push(d.c);
        cur = d.a;
    }
    Ok(FischerChain {
        quotients,
        remainders,
    })
}

/// Membership in S: `tr(z^I) = 0`, i.e. every coordinate with a nonzero
/// invariant has exponent <= 1.
pub fn in_s(i: &MultiIndex, b: &BishopData) -> bool {
    debug_assert!(i.total() >= 3);
    (0..b.n).all(|k| b.lambda_is_zero(k) || i.get(k) <= 1)
}

/// Membership in T_l: `tr((zbar_l + 2 lambda_l z_l) z^J) = 0`. Closed form:
/// `j_l = 0` and `j_m <= 1` for every `m` with a nonzero invariant. The
/// symbolic cross-check lives in the tests.
pub fn in_t(j: &MultiIndex, l: usize, b: &BishopData) -> bool {
    debug_assert!(j.total() >= 2);
    j.get(l) == 0 && (0..b.n).all(|k| b.lambda_is_zero(k) || j.get(k) <= 1)
}

/// Symbolic evaluation of the S-membership predicate (oracle for `in_s`).
pub fn in_s_symbolic<C: Coeff>(i: &MultiIndex, b: &BishopData, kind: VarKind) -> Result<bool> {
    let p = HomPoly::<C>::monomial(b.n, kind, Key::new(i.clone(), MultiIndex::zero(b.n)), C::one());
    Ok(p.trace(b)?.is_zero())
}

/// Symbolic evaluation of the T_l-membership predicate (oracle for `in_t`).
pub fn in_t_symbolic<C: Coeff>(
    j: &MultiIndex,
    l: usize,
    b: &BishopData,
    kind: VarKind,
) -> Result<bool> {
    Ok(paired_target::<C>(j, l, b, kind)?.trace(b)?.is_zero())
}

/// The F-flavor generator source `(zbar_l + 2 lambda_l z_l) z^J`.
pub fn paired_target<C: Coeff>(
    j: &MultiIndex,
    l: usize,
    b: &BishopData,
    kind: VarKind,
) -> Result<HomPoly<C>> {
    if l >= b.n {
        return Err(Error::InvalidInput(format!("coordinate {l} out of range")));
    }
    let n = b.n;
    let mut p = HomPoly::zero(n, j.total() + 1, kind);
    p.add_term(Key::new(j.clone(), MultiIndex::unit(n, l)), C::one());
    if !b.lambda_is_zero(l) {
        let two_lam = C::from_i64(2) * C::from_rational(&b.lambda[l]);
        p.add_term(
            Key::new(j.bumped(l, 1).unwrap(), MultiIndex::zero(n)),
            two_lam,
        );
    }
    Ok(p)
}

/// Identity of one generator in a normalization basis.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorId {
    /// `C_I` from `decompose(z^I)`, `I` not in S.
    CUpper(MultiIndex),
    /// Conjugate (or variable-swapped) partner of `CUpper`.
    CBar(MultiIndex),
    /// Raw trace-free monomial `z^I`, `I` in S.
    SMono(MultiIndex),
    /// Its partner `zbar^I`.
    SBar(MultiIndex),
    /// `C_{l,J}` from `decompose((zbar_l + 2 lambda_l z_l) z^J)`, `J` not in T_l.
    CPaired(usize, MultiIndex),
    /// Its partner.
    CPairedBar(usize, MultiIndex),
    /// Raw trace-free `zbar_l z^J`, `J` in T_l.
    TMono(usize, MultiIndex),
    /// Its partner `z_l zbar^J`.
    TBar(usize, MultiIndex),
}

/// One spanning generator: the trace-free polynomial plus, when it came
/// from a decomposition, the quotient of that decomposition (needed to
/// propagate absorptions down the chain).
pub struct Generator<C: Coeff> {
    pub id: GeneratorId,
    pub poly: HomPoly<C>,
    pub quotient: Option<HomPoly<C>>,
}

/// Normalization basis at one degree: the spanning generators plus the list
/// of excluded (S- or T-) monomial labels.
pub struct NormBasis<C: Coeff> {
    pub degree: u32,
    pub flavor: Flavor,
    pub generators: Vec<Generator<C>>,
    pub excluded: Vec<GeneratorId>,
}

/// Builds the basis of normalization generators at degree `p` (`p >= 3`).
///
/// For every basis the "bar" partner is produced with the kind-appropriate
/// involution: conjugate-swap in the real setting, plain variable swap in
/// the Segre setting (where both partners carry independent coefficients).
pub fn norm_basis<C: Coeff>(
    p: u32,
    b: &BishopData,
    kind: VarKind,
    flavor: Flavor,
) -> Result<NormBasis<C>> {
    if p < 3 {
        return Err(Error::DegreeMismatch(format!(
            "normalization bases start at degree 3, got {p}"
        )));
    }
    let solver = DecompSolver::<C>::new(b, kind, p)?;
    let mut generators = Vec::new();
    let mut excluded = Vec::new();
    match flavor {
        Flavor::G => {
            for i in multi_indices(b.n, p) {
                let zi = HomPoly::monomial(
                    b.n,
                    kind,
                    Key::new(i.clone(), MultiIndex::zero(b.n)),
                    C::one(),
                );
                if in_s(&i, b) {
                    excluded.push(GeneratorId::SMono(i.clone()));
                    generators.push(Generator {
                        id: GeneratorId::SMono(i.clone()),
                        poly: zi.clone(),
                        quotient: None,
                    });
                    generators.push(Generator {
                        id: GeneratorId::SBar(i.clone()),
                        poly: zi.bar(),
                        quotient: None,
                    });
                } else {
                    let d = solver.decompose(&zi)?;
                    generators.push(Generator {
                        id: GeneratorId::CBar(i.clone()),
                        poly: d.c.bar(),
                        quotient: Some(d.a.bar()),
                    });
                    generators.push(Generator {
                        id: GeneratorId::CUpper(i.clone()),
                        poly: d.c,
                        quotient: Some(d.a),
                    });
                }
            }
        }
        Flavor::F => {
            for l in 0..b.n {
                for j in multi_indices(b.n, p - 1) {
                    if in_t(&j, l, b) {
                        // zbar_l z^J is itself trace free
                        let m = HomPoly::monomial(
                            b.n,
                            kind,
                            Key::new(j.clone(), MultiIndex::unit(b.n, l)),
                            C::one(),
                        );
                        excluded.push(GeneratorId::TMono(l, j.clone()));
                        generators.push(Generator {
                            id: GeneratorId::TMono(l, j.clone()),
                            poly: m.clone(),
                            quotient: None,
                        });
                        generators.push(Generator {
                            id: GeneratorId::TBar(l, j.clone()),
                            poly: m.bar(),
                            quotient: None,
                        });
                    } else {
                        let t = paired_target::<C>(&j, l, b, kind)?;
                        let d = solver.decompose(&t)?;
                        generators.push(Generator {
                            id: GeneratorId::CPairedBar(l, j.clone()),
                            poly: d.c.bar(),
                            quotient: Some(d.a.bar()),
                        });
                        generators.push(Generator {
                            id: GeneratorId::CPaired(l, j.clone()),
                            poly: d.c,
                            quotient: Some(d.a),
                        });
                    }
                }
            }
        }
    }
    Ok(NormBasis {
        degree: p,
        flavor,
        generators,
        excluded,
    })
}

impl<C: Coeff> NormBasis<C> {
    /// Gram matrix under the Fischer pairing; linear independence of the
    /// generators is equivalent to full rank.
    pub fn gram(&self) -> Result<Mat<C>> {
        let g = &self.generators;
        let mut m = Mat::zeros(g.len(), g.len());
        for (r, gr) in g.iter().enumerate() {
            for (c, gc) in g.iter().enumerate() {
                m[(r, c)] = gc.poly.fischer_inner(&gr.poly)?;
            }
        }
        Ok(m)
    }

    /// Verifies full rank of the Gram matrix; reports rank deficiency as the
    /// paper-level independence claim failing at this degree.
    pub fn check_independence(&self) -> Result<()> {
        let g = self.gram()?;
        let rank = g.rank();
        if rank != self.generators.len() {
            return Err(Error::RankDeficient {
                degree: self.degree,
                detail: format!("rank {} of {} generators", rank, self.generators.len()),
            });
        }
        Ok(())
    }

    /// Splits `r` into a generator combination plus a Fischer-orthogonal
    /// rest: returns the coefficient vector and the remainder.
    pub fn project(&self, r: &HomPoly<C>) -> Result<(Vec<C>, HomPoly<C>)> {
        let g = &self.generators;
        if g.is_empty() {
            return Ok((Vec::new(), r.clone()));
        }
        let gram = self.gram()?;
        let rhs: Vec<C> = g
            .iter()
            .map(|gi| r.fischer_inner(&gi.poly))
            .collect::<Result<_>>()?;
        let coeffs = gram.solve_vec(&rhs).map_err(|_| Error::RankDeficient {
            degree: self.degree,
            detail: "Gram solve failed".into(),
        })?;
        let mut rest = r.clone();
        for (x, gi) in coeffs.iter().zip(g) {
            rest = rest.sub(&gi.poly.scale(x))?;
        }
        Ok((coeffs, rest))
    }
}

/// Per-(model, kind) cache of solvers, generator bases, and system
/// inverses. Everything cached depends only on the invariants, not on the
/// data being decomposed, so one engine serves a whole pipeline run.
pub struct Engine<C: Coeff> {
    pub b: BishopData,
    pub kind: VarKind,
    solvers: RefCell<HashMap<u32, Rc<DecompSolver<C>>>>,
    bases: RefCell<HashMap<(u32, bool), Rc<CachedBasis<C>>>>,
}

/// A normalization basis with its precomputed projection systems.
pub struct CachedBasis<C: Coeff> {
    pub basis: NormBasis<C>,
    /// Inverse of the Gram matrix `pair(gen_c, gen_r)`.
    pub gram_inv: Mat<C>,
    /// Absorber polynomials (differ from the condition generators only on
    /// the F side at T-indices) and the inverse of
    /// `pair(absorber_c, gen_r)`.
    pub absorbers: Vec<HomPoly<C>>,
    pub absorber_inv: Mat<C>,
}

impl<C: Coeff> Engine<C> {
    pub fn new(b: BishopData, kind: VarKind) -> Self {
        Engine {
            b,
            kind,
            solvers: RefCell::new(HashMap::new()),
            bases: RefCell::new(HashMap::new()),
        }
    }

    /// Cached solver for targets of degree `p`.
    pub fn solver(&self, p: u32) -> Result<Rc<DecompSolver<C>>> {
        if let Some(s) = self.solvers.borrow().get(&p) {
            return Ok(s.clone());
        }
        let s = Rc::new(DecompSolver::new(&self.b, self.kind, p)?);
        self.solvers.borrow_mut().insert(p, s.clone());
        Ok(s)
    }

    pub fn decompose(&self, p: &HomPoly<C>) -> Result<DecompResult<C>> {
        self.solver(p.degree())?.decompose(p)
    }

    /// Cached basis + projection systems at one degree.
    pub fn basis(&self, p: u32, flavor: Flavor) -> Result<Rc<CachedBasis<C>>> {
        let key = (p, flavor == Flavor::F);
        if let Some(bb) = self.bases.borrow().get(&key) {
            return Ok(bb.clone());
        }
        let basis = norm_basis::<C>(p, &self.b, self.kind, flavor)?;
        let gram = basis.gram()?;
        let gram_inv = gram.inverse().map_err(|_| Error::RankDeficient {
            degree: p,
            detail: "generator Gram matrix singular".into(),
        })?;
        let absorbers: Vec<HomPoly<C>> = basis
            .generators
            .iter()
            .map(|g| match &g.id {
                GeneratorId::TMono(l, j) => paired_target::<C>(j, *l, &self.b, self.kind),
                GeneratorId::TBar(l, j) => {
                    Ok(paired_target::<C>(j, *l, &self.b, self.kind)?.bar())
                }
                _ => Ok(g.poly.clone()),
            })
            .collect::<Result<_>>()?;
        let m = basis.generators.len();
        let mut sys: Mat<C> = Mat::zeros(m, m);
        for (row, cond) in basis.generators.iter().enumerate() {
            for (col, a) in absorbers.iter().enumerate() {
                sys[(row, col)] = a.fischer_inner(&cond.poly)?;
            }
        }
        let absorber_inv = if m == 0 {
            sys
        } else {
            sys.inverse().map_err(|_| Error::RankDeficient {
                degree: p,
                detail: "absorber system singular".into(),
            })?
        };
        let cb = Rc::new(CachedBasis {
            basis,
            gram_inv,
            absorbers,
            absorber_inv,
        });
        self.bases.borrow_mut().insert(key, cb.clone());
        Ok(cb)
    }
}

impl<C: Coeff> CachedBasis<C> {
    /// Oblique projection of `r` onto the absorber span with the condition
    /// generators as test functionals: returns coefficients and the
    /// condition-orthogonal leftover.
    pub fn absorb(&self, r: &HomPoly<C>) -> Result<(Vec<C>, HomPoly<C>)> {
        let g = &self.basis.generators;
        if g.is_empty() {
            return Ok((Vec::new(), r.clone()));
        }
        let rhs: Vec<C> = g
            .iter()
            .map(|gi| r.fischer_inner(&gi.poly))
            .collect::<Result<_>>()?;
        let coeffs = self.absorber_inv.matvec(&rhs);
        let mut rest = r.clone();
        for (x, a) in coeffs.iter().zip(&self.absorbers) {
            if !x.is_zero() {
                rest = rest.sub(&a.scale(x))?;
            }
        }
        Ok((coeffs, rest))
    }
}

/// Report from `is_normalized`: violating pairings with magnitudes.
#[derive(Debug, Clone)]
pub struct NormReport {
    pub ok: bool,
    pub violations: Vec<(u32, String, f64)>,
}

/// Checks that every chain remainder of `p` is Fischer-orthogonal to all
/// normalization generators at its degree (degrees >= 3; lower levels carry
/// no generator conditions). `tol` is 0.0 in exact mode.
pub fn is_normalized<C: Coeff>(
    p: &HomPoly<C>,
    b: &BishopData,
    flavor: Flavor,
    tol: f64,
) -> Result<NormReport> {
    let mut violations = Vec::new();
    if p.is_zero() {
        return Ok(NormReport {
            ok: true,
            violations,
        });
    }
    let ch = chain(p, b, flavor)?;
    for r in &ch.remainders {
        if r.degree() < 3 || r.is_zero() {
            continue;
        }
        let basis = norm_basis::<C>(r.degree(), b, p.kind(), flavor)?;
        for g in &basis.generators {
            let ip = r.fischer_inner(&g.poly)?;
            if !ip.is_zero_tol(tol) {
                violations.push((r.degree(), format!("{:?}", g.id), ip.pivot_mag()));
            }
        }
    }
    Ok(NormReport {
        ok: violations.is_empty(),
        violations,
    })
}
