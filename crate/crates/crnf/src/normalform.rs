//! The degree-by-degree partial normal-form algorithm and the manifold
//! transform machinery.
//!
//! Terms are processed by weight `r = m + 2n`, exactly in the order the
//! construction determines them: the antisymmetric (G) side first, then the
//! symmetric (F) side, with the even/odd special cases at the deepest chain
//! levels. The same cascade serves the real setting (`bar` = conjugate swap)
//! and the complexified Segre setting (`bar` = variable swap, independent
//! partner tables); only the assembly of the transform equations differs.

use crate::error::{Error, Result};
use crate::fischer::{Flavor, GeneratorId};
use crate::matrix::Mat;
use crate::multi_index::{multi_indices, BishopData, Key, MultiIndex};
use crate::poly::{is_real_coefficient, quadric, HomPoly, VarKind};
use crate::scalar::{Coeff, Exact};
use crate::series::{compose, Graded};
use num_rational::BigRational;
use std::collections::BTreeMap;

/// Truncated defining series `w = Q + sum_{k>=3} phi_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSeries<C: Coeff> {
    pub b: BishopData,
    pub phi: BTreeMap<u32, HomPoly<C>>,
    pub max_degree: u32,
}

impl<C: Coeff> ManifoldSeries<C> {
    /// Validates shape: conjugate kind, degrees in `3..=max_degree`, every
    /// part real-valued (bar-symmetric).
    pub fn new(
        b: BishopData,
        phi: BTreeMap<u32, HomPoly<C>>,
        max_degree: u32,
    ) -> Result<Self> {
        for (d, p) in &phi {
            if *d < 3 || *d > max_degree {
                return Err(Error::DegreeMismatch(format!(
                    "phi_{d} outside 3..={max_degree}"
                )));
            }
            if p.degree() != *d || p.ambient_n() != b.n || p.kind() != VarKind::Conjugate {
                return Err(Error::InvalidInput(format!("phi_{d} has the wrong shape")));
            }
            if !p.is_bar_symmetric() {
                return Err(Error::InvalidInput(format!("phi_{d} is not real-valued")));
            }
        }
        Ok(ManifoldSeries {
            b,
            phi,
            max_degree,
        })
    }

    pub fn model(b: BishopData, max_degree: u32) -> Self {
        ManifoldSeries {
            b,
            phi: BTreeMap::new(),
            max_degree,
        }
    }

    pub fn phi_part(&self, d: u32) -> HomPoly<C> {
        self.phi
            .get(&d)
            .cloned()
            .unwrap_or_else(|| HomPoly::zero(self.b.n, d, VarKind::Conjugate))
    }

    /// `w = Q + sum phi` as a graded series.
    pub fn w_series(&self, trunc: u32) -> Graded<C> {
        let mut w = Graded::from_poly(quadric::<C>(&self.b, VarKind::Conjugate), trunc);
        for (_, p) in &self.phi {
            w.add_poly(p);
        }
        w
    }

    /// Largest `d` with `phi_d != 0`, or `None` for the pure model.
    pub fn error_order(&self) -> Option<u32> {
        self.phi
            .iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(d, _)| *d)
            .min()
    }
}

/// Coefficient tables of the normalizing map
/// `(z, w) -> (F(z, w), G(z, w))`, graded by weight `m + 2n`.
///
/// `g[(m, n)]` is the z-homogeneous part `G_{m,n}`, `f[(m, n)]` the vector
/// `F_{m,n}`; the identity parts `G_{0,1} = 1`, `F_{1,0} = z` are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalTransform<C: Coeff> {
    pub n: usize,
    pub kind: VarKind,
    pub max_weight: u32,
    pub g: BTreeMap<(u32, u32), HomPoly<C>>,
    pub f: BTreeMap<(u32, u32), Vec<HomPoly<C>>>,
}

/// A z-homogeneous polynomial (second index block zero).
pub fn z_poly<C: Coeff>(n: usize, kind: VarKind, terms: &[(MultiIndex, C)]) -> HomPoly<C> {
    let deg = terms.first().map(|(i, _)| i.total()).unwrap_or(0);
    let mut p = HomPoly::zero(n, deg, kind);
    for (i, c) in terms {
        p.add_term(Key::new(i.clone(), MultiIndex::zero(n)), c.clone());
    }
    p
}

impl<C: Coeff> FormalTransform<C> {
    pub fn identity(n: usize, kind: VarKind, max_weight: u32) -> Self {
        let mut g = BTreeMap::new();
        g.insert(
            (0, 1),
            z_poly(n, kind, &[(MultiIndex::zero(n), C::one())]),
        );
        let mut f = BTreeMap::new();
        f.insert(
            (1, 0),
            (0..n)
                .map(|k| z_poly(n, kind, &[(MultiIndex::unit(n, k), C::one())]))
                .collect(),
        );
        FormalTransform {
            n,
            kind,
            max_weight,
            g,
            f,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.g.iter().all(|(&(m, n), p)| (m, n) == (0, 1) || p.is_zero())
            && self.f.iter().all(|(&(m, n), v)| {
                (m, n) == (1, 0) || v.iter().all(|p| p.is_zero())
            })
    }

    fn add_g(&mut self, m: u32, n: u32, p: HomPoly<C>) {
        if p.is_zero() {
            return;
        }
        let e = self
            .g
            .entry((m, n))
            .or_insert_with(|| HomPoly::zero(self.n, m, self.kind));
        *e = e.add(&p).expect("g shape");
    }

    fn add_f(&mut self, m: u32, n: u32, comps: Vec<HomPoly<C>>) {
        let e = self.f.entry((m, n)).or_insert_with(|| {
            (0..self.n)
                .map(|_| HomPoly::zero(self.n, m, self.kind))
                .collect()
        });
        for (a, b) in e.iter_mut().zip(comps) {
            *a = a.add(&b).expect("f shape");
        }
    }

    /// `G(z, w)` composed with a graded series `w`.
    pub fn g_series(&self, w: &Graded<C>) -> Result<Graded<C>> {
        let mut out = Graded::zero(w.n, w.kind, w.trunc);
        for (&(_, nw), p) in &self.g {
            if p.is_zero() {
                continue;
            }
            let t = Graded::from_poly(p.clone(), w.trunc).mul(&w.pow(nw)?)?;
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Component series `F^{(k)}(z, w)` composed with `w`.
    pub fn f_component_series(&self, w: &Graded<C>) -> Result<Vec<Graded<C>>> {
        let mut out = vec![Graded::zero(w.n, w.kind, w.trunc); self.n];
        for (&(_, nw), comps) in &self.f {
            let wp = w.pow(nw)?;
            for (k, p) in comps.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                out[k] = out[k].add(&Graded::from_poly(p.clone(), w.trunc).mul(&wp)?);
            }
        }
        Ok(out)
    }

    /// Checks the (o)-normalization: `Re F_{1,n} = 0` for all `n >= 1` and
    /// `F_{0,n}^{(k)} = 0` for `k > k0`, `n >= 2`.
    pub fn satisfies_o(&self, b: &BishopData) -> bool {
        for (&(m, n), comps) in &self.f {
            if m == 1 && n >= 1 {
                if comps.iter().any(|p| !p.re_coeff_part().is_zero()) {
                    return false;
                }
            }
            if m == 0 && n >= 2 {
                for (k, p) in comps.iter().enumerate() {
                    if k >= b.k0 && !p.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// The weight-r cascade (shared by the real and Segre pipelines)
// ---------------------------------------------------------------------------

/// Everything one weight step determines.
pub(crate) struct StepOut<C: Coeff> {
    /// `(m, n) -> G_{m,n}` (upper/z side).
    pub g_upper: BTreeMap<(u32, u32), HomPoly<C>>,
    /// Partner table (`G~` in the Segre setting; conjugate data in the real
    /// one, stored in the same z-variable representation).
    pub g_lower: BTreeMap<(u32, u32), HomPoly<C>>,
    pub f_upper: BTreeMap<(u32, u32), Vec<HomPoly<C>>>,
    pub f_lower: BTreeMap<(u32, u32), Vec<HomPoly<C>>>,
    /// Symmetric normal-form part at this weight.
    pub phi1: HomPoly<C>,
    /// Antisymmetric normal-form part (vanishes for real-valued input).
    pub phi2: HomPoly<C>,
}

fn scale_i_half<C: Coeff>() -> C {
    // 1/(2i) = -i/2
    let half = C::from_rational(&BigRational::new(1.into(), 2.into()));
    -(C::i() * half)
}

/// Extracts the z-side / second-side coefficient polys absorbed by one
/// generator projection, together with the quotient correction.
struct Absorbed<C: Coeff> {
    upper: HomPoly<C>,
    lower: HomPoly<C>,
    quotient_correction: HomPoly<C>,
    leftover: HomPoly<C>,
}

/// Projects a trace-free remainder onto the G-generator family and splits
/// coefficients into the transform data.
fn absorb_g_level<C: Coeff>(
    rem: &HomPoly<C>,
    cb: &crate::fischer::CachedBasis<C>,
    b: &BishopData,
    kind: VarKind,
) -> Result<Absorbed<C>> {
    let n = b.n;
    let d = rem.degree();
    let (coeffs, leftover) = cb.absorb(rem)?;
    let mut upper = HomPoly::zero(n, d, kind);
    let mut lower = HomPoly::zero(n, d, kind);
    let mut corr = HomPoly::zero(n, d.saturating_sub(2), kind);
    let two_i = C::i() + C::i();
    for (g, c) in cb.basis.generators.iter().zip(&coeffs) {
        if c.is_zero() {
            continue;
        }
        match &g.id {
            GeneratorId::CUpper(i) | GeneratorId::SMono(i) => {
                upper.add_term(
                    Key::new(i.clone(), MultiIndex::zero(n)),
                    two_i.clone() * c.clone(),
                );
            }
            GeneratorId::CBar(i) | GeneratorId::SBar(i) => {
                lower.add_term(
                    Key::new(i.clone(), MultiIndex::zero(n)),
                    -(two_i.clone() * c.clone()),
                );
            }
            _ => unreachable!("G basis"),
        }
        if let Some(q) = &g.quotient {
            corr = corr.add(&q.scale(c))?;
        }
    }
    Ok(Absorbed {
        upper,
        lower,
        quotient_correction: corr,
        leftover,
    })
}

/// Splits one F-level absorption into transform components, the quotient
/// correction, and the condition-orthogonal leftover.
#[allow(clippy::type_complexity)]
fn absorb_f_level<C: Coeff>(
    rem: &HomPoly<C>,
    cb: &crate::fischer::CachedBasis<C>,
    b: &BishopData,
    kind: VarKind,
) -> Result<(
    BTreeMap<usize, HomPoly<C>>, // upper F components (z polys, by l)
    BTreeMap<usize, HomPoly<C>>, // lower (partner) components
    HomPoly<C>,                  // quotient correction
    HomPoly<C>,                  // leftover (Fischer-orthogonal to conditions)
)> {
    let n = b.n;
    let d = rem.degree();
    let (coeffs, leftover) = cb.absorb(rem)?;
    let mut upper: BTreeMap<usize, HomPoly<C>> = BTreeMap::new();
    let mut lower: BTreeMap<usize, HomPoly<C>> = BTreeMap::new();
    let mut corr = HomPoly::zero(n, d.saturating_sub(2), kind);
    let zp = |poly: &mut BTreeMap<usize, HomPoly<C>>, l: usize, j: &MultiIndex, c: &C| {
        let e = poly
            .entry(l)
            .or_insert_with(|| HomPoly::zero(n, d - 1, kind));
        e.add_term(Key::new(j.clone(), MultiIndex::zero(n)), c.clone());
    };
    for (g, c) in cb.basis.generators.iter().zip(&coeffs) {
        if c.is_zero() {
            continue;
        }
        match &g.id {
            GeneratorId::CPaired(l, j) | GeneratorId::TMono(l, j) => zp(&mut upper, *l, j, c),
            GeneratorId::CPairedBar(l, j) | GeneratorId::TBar(l, j) => zp(&mut lower, *l, j, c),
            _ => unreachable!(),
        }
        if let Some(q) = &g.quotient {
            corr = corr.add(&q.scale(c))?;
        }
    }
    Ok((upper, lower, corr, leftover))
}

/// The antisymmetric-side cascade: determines the G tables from `x2` and
/// returns the leftover levels (the antisymmetric normal-form content).
fn phase_g<C: Coeff>(
    x2: &HomPoly<C>,
    r: u32,
    eng: &crate::fischer::Engine<C>,
) -> Result<(
    BTreeMap<(u32, u32), HomPoly<C>>,
    BTreeMap<(u32, u32), HomPoly<C>>,
    Vec<HomPoly<C>>, // leftover per level j (degree r - 2j), trace free
    Option<C>,       // bottom constant c_minus (r even)
)> {
    let b = &eng.b;
    let kind = eng.kind;
    let n = b.n;
    let two_i = C::i() + C::i();
    let mut gu = BTreeMap::new();
    let mut gl = BTreeMap::new();
    let mut leftovers = Vec::new();
    let mut bottom = None;
    if x2.is_zero() {
        // real-valued data: the antisymmetric side carries nothing
        if r % 2 == 0 {
            bottom = Some(C::zero());
        }
        return Ok((gu, gl, leftovers, bottom));
    }
    let mut cur = x2.clone();
    let mut j = 0u32;
    loop {
        let d = r - 2 * j;
        if d >= 3 {
            let dec = eng.decompose(&cur)?;
            let cb = eng.basis(d, Flavor::G)?;
            let abs = absorb_g_level(&dec.c, &cb, b, kind)?;
            if !abs.upper.is_zero() {
                gu.insert((d, j), abs.upper);
            }
            if !abs.lower.is_zero() {
                gl.insert((d, j), abs.lower);
            }
            leftovers.push(abs.leftover);
            cur = dec.a.sub(&abs.quotient_correction)?;
        } else if d == 2 {
            // absorb the pure parts directly; the mixed remainder stays
            let mut upper = HomPoly::zero(n, 2, kind);
            let mut lower = HomPoly::zero(n, 2, kind);
            let mut stripped = cur.clone();
            for i in multi_indices(n, 2) {
                let kz = Key::new(i.clone(), MultiIndex::zero(n));
                let kj = Key::new(MultiIndex::zero(n), i.clone());
                let u = cur.coeff(&kz);
                let v = cur.coeff(&kj);
                if !u.is_zero() {
                    upper.add_term(kz.clone(), two_i.clone() * u.clone());
                    stripped.add_term(kz, -u);
                }
                if !v.is_zero() {
                    lower.add_term(
                        Key::new(i.clone(), MultiIndex::zero(n)),
                        -(two_i.clone() * v.clone()),
                    );
                    stripped.add_term(kj, -v);
                }
            }
            if !upper.is_zero() {
                gu.insert((2, j), upper);
            }
            if !lower.is_zero() {
                gl.insert((2, j), lower);
            }
            let dec = eng.decompose(&stripped)?;
            leftovers.push(dec.c);
            cur = dec.a;
        } else if d == 1 {
            let mut upper = HomPoly::zero(n, 1, kind);
            let mut lower = HomPoly::zero(n, 1, kind);
            for k in 0..n {
                let kz = Key::new(MultiIndex::unit(n, k), MultiIndex::zero(n));
                let kj = Key::new(MultiIndex::zero(n), MultiIndex::unit(n, k));
                let u = cur.coeff(&kz);
                let v = cur.coeff(&kj);
                if !u.is_zero() {
                    upper.add_term(kz, two_i.clone() * u);
                }
                if !v.is_zero() {
                    lower.add_term(
                        Key::new(MultiIndex::unit(n, k), MultiIndex::zero(n)),
                        -(two_i.clone() * v),
                    );
                }
            }
            if !upper.is_zero() {
                gu.insert((1, j), upper);
            }
            if !lower.is_zero() {
                gl.insert((1, j), lower);
            }
            break;
        } else {
            bottom = Some(cur.coeff(&Key::new(MultiIndex::zero(n), MultiIndex::zero(n))));
            break;
        }
        j += 1;
    }
    Ok((gu, gl, leftovers, bottom))
}

/// Kernel operators of the even special case:
/// `D_ab = d2/dz_a dzbar_b + lambda_a d2/dz_a dz_b + lambda_a d2/dzbar_a dzbar_b`.
fn coreo_op<C: Coeff>(p: &HomPoly<C>, b: &BishopData, a: usize, bb: usize) -> HomPoly<C> {
    let mut out = p.second_partial(0, a, 1, bb);
    if !b.lambda_is_zero(a) {
        let lam = C::from_rational(&b.lambda[a]);
        out = out
            .add(&p.second_partial(0, a, 0, bb).scale(&lam))
            .and_then(|o| o.add(&p.second_partial(1, a, 1, bb).scale(&lam)))
            .expect("shape");
    }
    out
}

/// Image of the even-case coupling for a real parameter matrix `B`:
/// `i sum_{l,m} B_{lm} [z_m zbar_l - z_l zbar_m + 2 lambda_l (z_l z_m - zbar_l zbar_m)]`.
fn even_case_image<C: Coeff>(bmat: &[Vec<C>], b: &BishopData, kind: VarKind) -> HomPoly<C> {
    let n = b.n;
    let i = C::i();
    let mut out = HomPoly::zero(n, 2, kind);
    for l in 0..n {
        for m in 0..n {
            let c = bmat[l][m].clone();
            if c.is_zero() {
                continue;
            }
            let ic = i.clone() * c;
            let mut zi = MultiIndex::zero(n);
            zi.0[m] += 1;
            let mut zj = MultiIndex::zero(n);
            zj.0[l] += 1;
            out.add_term(Key::new(zi, zj), ic.clone());
            let mut zi = MultiIndex::zero(n);
            zi.0[l] += 1;
            let mut zj = MultiIndex::zero(n);
            zj.0[m] += 1;
            out.add_term(Key::new(zi, zj), -ic.clone());
            if !b.lambda_is_zero(l) {
                let two_lam =
                    C::from_i64(2) * C::from_rational(&b.lambda[l]) * ic.clone();
                let mut zi = MultiIndex::zero(n);
                zi.0[l] += 1;
                zi.0[m] += 1;
                out.add_term(Key::new(zi.clone(), MultiIndex::zero(n)), two_lam.clone());
                out.add_term(Key::new(MultiIndex::zero(n), zi), -two_lam);
            }
        }
    }
    out
}

/// Solves the even special case: find the real matrix `B` (the imaginary
/// part of `F_{1,n}`) so that the kernel conditions hold on the degree-2
/// leftover. Free directions are set to zero; inconsistency is an error.
fn solve_even_case<C: Coeff>(
    r2: &HomPoly<C>,
    b: &BishopData,
    kind: VarKind,
) -> Result<(Vec<Vec<C>>, HomPoly<C>)> {
    let n = b.n;
    let nn = n * n;
    // condition values of a degree-2 poly: D_ab applied to the
    // imaginary-coefficient part
    let cond = |p: &HomPoly<C>| -> Vec<C> {
        let y = p.im_coeff_part();
        let mut out = Vec::with_capacity(nn);
        for a in 0..n {
            for bb in 0..n {
                let v = coreo_op(&y, b, a, bb);
                out.push(v.coeff(&Key::new(MultiIndex::zero(n), MultiIndex::zero(n))));
            }
        }
        out
    };
    let mut sys: Mat<C> = Mat::zeros(nn, nn);
    for l in 0..n {
        for m in 0..n {
            let mut unit = vec![vec![C::zero(); n]; n];
            unit[l][m] = C::one();
            let img = even_case_image(&unit, b, kind);
            let col = cond(&img);
            for (row, v) in col.into_iter().enumerate() {
                sys[(row, l * n + m)] = v;
            }
        }
    }
    let rhs = cond(r2);
    // solve with free variables pinned to zero (deterministic); report
    // inconsistency
    let mut aug: Mat<C> = Mat::zeros(nn, nn + 1);
    for r in 0..nn {
        for c in 0..nn {
            aug[(r, c)] = sys[(r, c)].clone();
        }
        aug[(r, nn)] = rhs[r].clone();
    }
    let pivots = aug.rref();
    if pivots.contains(&nn) {
        return Err(Error::Singular(
            "even-case kernel conditions inconsistent".into(),
        ));
    }
    let mut x = vec![C::zero(); nn];
    for (prow, &pcol) in pivots.iter().enumerate() {
        x[pcol] = aug[(prow, nn)].clone();
    }
    let bmat: Vec<Vec<C>> = (0..n)
        .map(|l| (0..n).map(|m| x[l * n + m].clone()).collect())
        .collect();
    let img = even_case_image(&bmat, b, kind);
    Ok((bmat, r2.sub(&img)?))
}

/// The symmetric-side cascade: determines the F tables (and the bottom
/// `G_{0, r/2}` pair) from `w1`; returns the symmetric leftovers.
#[allow(clippy::type_complexity)]
fn phase_f<C: Coeff>(
    w1: &HomPoly<C>,
    r: u32,
    eng: &crate::fischer::Engine<C>,
    g_deg3_leftover: Option<&HomPoly<C>>,
) -> Result<(
    BTreeMap<(u32, u32), Vec<HomPoly<C>>>,
    BTreeMap<(u32, u32), Vec<HomPoly<C>>>,
    Vec<HomPoly<C>>, // leftovers per level
    Option<C>,       // bottom constant c_plus (r even)
)> {
    let b = &eng.b;
    let kind = eng.kind;
    let n = b.n;
    let mut fu: BTreeMap<(u32, u32), Vec<HomPoly<C>>> = BTreeMap::new();
    let mut fl: BTreeMap<(u32, u32), Vec<HomPoly<C>>> = BTreeMap::new();
    let mut leftovers: Vec<HomPoly<C>> = Vec::new();
    let mut bottom = None;
    let mut cur = w1.clone();
    let mut j = 0u32;
    let mut ell3: Option<HomPoly<C>> = None; // degree-3 leftover, odd case
    loop {
        let d = r - 2 * j;
        if d >= 3 {
            let dec = eng.decompose(&cur)?;
            let cb = eng.basis(d, Flavor::F)?;
            let (upper, lower, corr, leftover) = absorb_f_level(&dec.c, &cb, b, kind)?;
            if !upper.is_empty() {
                let mut comps: Vec<HomPoly<C>> =
                    (0..n).map(|_| HomPoly::zero(n, d - 1, kind)).collect();
                for (l, p) in upper {
                    comps[l] = comps[l].add(&p)?;
                }
                fu.insert((d - 1, j), comps);
            }
            if !lower.is_empty() {
                let mut comps: Vec<HomPoly<C>> =
                    (0..n).map(|_| HomPoly::zero(n, d - 1, kind)).collect();
                for (l, p) in lower {
                    comps[l] = comps[l].add(&p)?;
                }
                fl.insert((d - 1, j), comps);
            }
            if d == 3 {
                ell3 = Some(leftover.clone());
            }
            leftovers.push(leftover);
            cur = dec.a.sub(&corr)?;
        } else if d == 2 {
            let dec = eng.decompose(&cur)?;
            let (bmat, leftover) = solve_even_case(&dec.c, b, kind)?;
            // F_{1,j} = i B z (upper), partner = -i B z
            let nonzero = bmat.iter().any(|row| row.iter().any(|c| !c.is_zero()));
            if nonzero {
                let i = C::i();
                let mk = |sign: C| -> Vec<HomPoly<C>> {
                    (0..n)
                        .map(|l| {
                            let mut p = HomPoly::zero(n, 1, kind);
                            for (m, c) in bmat[l].iter().enumerate() {
                                p.add_term(
                                    Key::new(MultiIndex::unit(n, m), MultiIndex::zero(n)),
                                    sign.clone() * c.clone(),
                                );
                            }
                            p
                        })
                        .collect()
                };
                fu.insert((1, j), mk(i.clone()));
                fl.insert((1, j), mk(-i));
            }
            leftovers.push(leftover);
            cur = dec.a;
        } else if d == 1 {
            // odd bottom: solve the 2x2 systems for (a_k, a~_k), k < k0.
            // The cubic conditions see the full normal-form chain content
            // at degree 3, which is the symmetric leftover minus i times
            // the antisymmetric one.
            let mut ell3 = ell3.unwrap_or_else(|| HomPoly::zero(n, 3, kind));
            if let Some(g3) = g_deg3_leftover {
                ell3 = ell3.sub(&g3.scale(&C::i()))?;
            }
            let y3 = ell3.im_coeff_part();
            let mut a_vec = vec![C::zero(); n];
            let mut at_vec = vec![C::zero(); n];
            let mut after = cur.clone();
            for k in 0..b.k0 {
                let kz = Key::new(MultiIndex::unit(n, k), MultiIndex::zero(n));
                let kj = Key::new(MultiIndex::zero(n), MultiIndex::unit(n, k));
                let xz = cur.coeff(&kz);
                let xj = cur.coeff(&kj);
                // cubic-coefficient conditions on the degree-3 quotient
                let mut z3 = MultiIndex::zero(n);
                z3.0[k] = 3;
                let y_z3 = y3.coeff(&Key::new(z3.clone(), MultiIndex::zero(n)));
                let y_j3 = y3.coeff(&Key::new(MultiIndex::zero(n), z3));
                let lam_inv = C::from_rational(&b.lambda[k])
                    .inv()
                    .expect("lambda_k nonzero for k < k0");
                // targets: kill the symmetric bottom part and the cubic
                // imaginary parts of the quotient
                let sz = xz.re_coeff_part_scalar()
                    + C::i() * (xz.im_coeff_part_scalar() + y_z3 * lam_inv.clone());
                let sj = xj.re_coeff_part_scalar()
                    + C::i() * (xj.im_coeff_part_scalar() + y_j3 * lam_inv);
                // [2 lambda, 1; 1, 2 lambda] (a, a~) = (sz, sj)
                let two_lam = C::from_i64(2) * C::from_rational(&b.lambda[k]);
                let det = two_lam.clone() * two_lam.clone() - C::one();
                let det_inv = det.inv().ok_or_else(|| {
                    Error::Singular("odd-case 2x2 system singular (lambda = 1/2?)".into())
                })?;
                let ak = (two_lam.clone() * sz.clone() - sj.clone()) * det_inv.clone();
                let atk = (two_lam.clone() * sj - sz) * det_inv;
                a_vec[k] = ak.clone();
                at_vec[k] = atk.clone();
                // subtract the absorbed bottom image
                after.add_term(kz, -(two_lam.clone() * ak.clone() + atk.clone()));
                after.add_term(kj, -(ak + two_lam * atk));
            }
            if a_vec.iter().any(|c| !c.is_zero()) {
                fu.insert(
                    (0, j),
                    (0..n)
                        .map(|k| {
                            let mut p = HomPoly::zero(n, 0, kind);
                            p.add_term(
                                Key::new(MultiIndex::zero(n), MultiIndex::zero(n)),
                                a_vec[k].clone(),
                            );
                            p
                        })
                        .collect(),
                );
                fl.insert(
                    (0, j),
                    (0..n)
                        .map(|k| {
                            let mut p = HomPoly::zero(n, 0, kind);
                            p.add_term(
                                Key::new(MultiIndex::zero(n), MultiIndex::zero(n)),
                                at_vec[k].clone(),
                            );
                            p
                        })
                        .collect(),
                );
            }
            leftovers.push(after);
            break;
        } else {
            bottom = Some(cur.coeff(&Key::new(MultiIndex::zero(n), MultiIndex::zero(n))));
            break;
        }
        j += 1;
    }
    Ok((fu, fl, leftovers, bottom))
}

/// Reassembles the normal-form content from per-level leftovers:
/// `sum_j leftovers[j] * Q^j`.
fn assemble_levels<C: Coeff>(
    levels: &[HomPoly<C>],
    b: &BishopData,
    kind: VarKind,
    r: u32,
) -> Result<HomPoly<C>> {
    let q = quadric::<C>(b, kind);
    let mut acc = HomPoly::zero(b.n, r, kind);
    let mut qpow: Option<HomPoly<C>> = None;
    for lv in levels {
        let term = match &qpow {
            None => lv.clone(),
            Some(qp) => lv.mul(qp)?,
        };
        acc = acc.add(&term)?;
        qpow = Some(match qpow {
            None => q.clone(),
            Some(qp) => qp.mul(&q)?,
        });
    }
    Ok(acc)
}

/// Runs one full weight step on the pair of known targets.
///
/// `v_upper`/`v_lower` are the weight-`r` residuals of the two transform
/// equations with the current tables (for the real pipeline the lower one is
/// `bar` of the upper). Returns the new transform data and the normal-form
/// parts for this weight.
pub(crate) fn weight_step<C: Coeff>(
    v_upper: &HomPoly<C>,
    v_lower: &HomPoly<C>,
    r: u32,
    eng: &crate::fischer::Engine<C>,
) -> Result<StepOut<C>> {
    let b = &eng.b;
    let kind = eng.kind;
    let n = b.n;
    let half = C::from_rational(&BigRational::new(1.into(), 2.into()));
    // equations: sum G Q^n - Lin - phi = -K per side; combine
    let x2 = v_upper
        .sub(v_lower)?
        .scale(&scale_i_half::<C>())
        .scale(&-C::one());
    let x1 = v_upper.add(v_lower)?.scale(&half).scale(&-C::one());
    let (mut gu, mut gl, g_leftovers, c_minus) = phase_g(&x2, r, eng)?;
    // phi2 = -(leftover of x2)
    let phi2 = assemble_levels(&g_leftovers, b, kind, r)?.neg();
    // W1 = sum (G + G~)/2 Q^n - x1 (the G tables are now known); the
    // partner table materializes on the second variable block by a plain
    // variable swap (it already stores conjugated data in the real mode).
    let q_poly = quadric::<C>(b, kind);
    let mut w1 = x1.neg();
    let keys: Vec<(u32, u32)> = gu.keys().chain(gl.keys()).cloned().collect();
    for (m, nw) in keys {
        let mut term = HomPoly::zero(n, m, kind);
        if let Some(p) = gu.get(&(m, nw)) {
            term = term.add(&p.scale(&half))?;
        }
        let mut term = Graded::from_poly(term, r);
        if let Some(pl) = gl.get(&(m, nw)) {
            term.add_poly(&pl.swap_vars().scale(&half));
        }
        let mut qp = Graded::one(n, kind, r);
        for _ in 0..nw {
            qp = qp.mul(&Graded::from_poly(q_poly.clone(), r))?;
        }
        let prod = term.mul(&qp)?;
        w1 = w1.add(&prod.part(r))?;
    }
    // the degree-3 antisymmetric leftover feeds the odd-case cubic
    // conditions (phi' = phi1 + i phi2 shares one chain)
    let g3 = if r % 2 == 1 && r >= 3 {
        let lvl = ((r - 3) / 2) as usize;
        g_leftovers.get(lvl).cloned()
    } else {
        None
    };
    let (fu, fl, f_leftovers, c_plus) = phase_f(&w1, r, eng, g3.as_ref())?;
    let phi1 = assemble_levels(&f_leftovers, b, kind, r)?;
    // bottom constants (r even): (g0 - g0~)/2i = c_minus and (g0 + g0~)/2
    // absorbs c_plus so the symmetric bottom of the normal form vanishes
    if r % 2 == 0 {
        // the equations read  sum G Q^n - Lin - phi = -K: the antisymmetric
        // bottom sits on the same side as the cascade data, the symmetric
        // one opposite, hence the sign split
        let cm = c_minus.unwrap_or_else(C::zero);
        let cp = c_plus.unwrap_or_else(C::zero);
        let g0 = -cp.clone() + C::i() * cm.clone();
        let g0t = -cp - C::i() * cm;
        if !g0.is_zero() {
            gu.insert((0, r / 2), z_poly(n, kind, &[(MultiIndex::zero(n), g0)]));
        }
        if !g0t.is_zero() {
            gl.insert((0, r / 2), z_poly(n, kind, &[(MultiIndex::zero(n), g0t)]));
        }
    }
    Ok(StepOut {
        g_upper: gu,
        g_lower: gl,
        f_upper: fu,
        f_lower: fl,
        phi1,
        phi2,
    })
}

// scalar helpers used by the odd case
trait ScalarParts: Coeff {
    fn re_coeff_part_scalar(&self) -> Self {
        let half = Self::from_rational(&BigRational::new(1.into(), 2.into()));
        (self.clone() + self.conj()) * half
    }
    fn im_coeff_part_scalar(&self) -> Self {
        let half = Self::from_rational(&BigRational::new(1.into(), 2.into()));
        (self.clone() - self.conj()) * (-(Self::i() * half))
    }
}
impl<C: Coeff> ScalarParts for C {}

// ---------------------------------------------------------------------------
// Real pipeline
// ---------------------------------------------------------------------------

/// Residual of the transform equation `G(z, w) = Q(F, Fbar) + sum phi'(F, Fbar)`
/// at every degree up to `trunc`.
pub fn transform_residual<C: Coeff>(
    m: &ManifoldSeries<C>,
    t: &FormalTransform<C>,
    phi_out: &BTreeMap<u32, HomPoly<C>>,
    trunc: u32,
) -> Result<Graded<C>> {
    let w = m.w_series(trunc);
    let g = t.g_series(&w)?;
    let f = t.f_component_series(&w)?;
    let fbar: Vec<Graded<C>> = f.iter().map(|s| s.bar()).collect();
    let mut cache = crate::series::ProductCache::new(&f, &fbar, trunc);
    let mut rhs = cache.compose(&quadric::<C>(&m.b, VarKind::Conjugate))?;
    for (_, p) in phi_out {
        rhs = rhs.add(&cache.compose(p)?);
    }
    Ok(g.sub(&rhs))
}

/// Output of the normalization: the unique normalized transform and the
/// partial normal form.
pub struct NormalizeOut<C: Coeff> {
    pub transform: FormalTransform<C>,
    pub normal_form: ManifoldSeries<C>,
}

/// Runs the degree-by-degree normalization up to `d_max`.
pub fn normalize<C: Coeff>(m: &ManifoldSeries<C>, d_max: u32) -> Result<NormalizeOut<C>> {
    if m.b.k0 == 0 {
        return Err(Error::InvalidInput(
            "normalization needs at least one nonzero invariant".into(),
        ));
    }
    let b = m.b.clone();
    let kind = VarKind::Conjugate;
    let eng = crate::fischer::Engine::new(b.clone(), kind);
    let mut t = FormalTransform::identity(b.n, kind, d_max);
    let mut phi_out: BTreeMap<u32, HomPoly<C>> = BTreeMap::new();
    for r in 3..=d_max {
        let resid = transform_residual(m, &t, &phi_out, r)?;
        let k = resid.part(r);
        let step = weight_step(&k, &k.bar(), r, &eng)?;
        for ((mm, nn), p) in step.g_upper {
            t.add_g(mm, nn, p);
        }
        for ((mm, nn), comps) in step.f_upper {
            t.add_f(mm, nn, comps);
        }
        let phi_r = step.phi1.add(&step.phi2.scale(&C::i()))?;
        if !phi_r.is_zero() {
            phi_out.insert(r, phi_r);
        }
    }
    Ok(NormalizeOut {
        transform: t,
        normal_form: ManifoldSeries {
            b,
            phi: phi_out,
            max_degree: d_max,
        },
    })
}

/// Applies a transform to a manifold: recollects the image as a graph
/// `w' = Q(z', zbar') + sum phi'_k` degree by degree up to `d`.
pub fn transform<C: Coeff>(
    m: &ManifoldSeries<C>,
    t: &FormalTransform<C>,
    d: u32,
) -> Result<ManifoldSeries<C>> {
    let w = m.w_series(d);
    let g = t.g_series(&w)?;
    let f = t.f_component_series(&w)?;
    let fbar: Vec<Graded<C>> = f.iter().map(|s| s.bar()).collect();
    let mut cache = crate::series::ProductCache::new(&f, &fbar, d);
    let base = cache.compose(&quadric::<C>(&m.b, VarKind::Conjugate))?;
    let mut residual = g.sub(&base);
    let mut phi = BTreeMap::new();
    for k in 3..=d {
        let part = residual.part(k);
        if part.is_zero() {
            continue;
        }
        residual = residual.sub(&cache.compose(&part)?);
        phi.insert(k, part);
    }
    ManifoldSeries::new(m.b.clone(), phi, d)
}

// ---------------------------------------------------------------------------
// Model automorphisms
// ---------------------------------------------------------------------------

/// Checks that the linear map `U` preserves the model quadric:
/// `Q(Uz, conj(U) zbar) = Q(z, zbar)`.
pub fn preserves_quadric<C: Coeff>(u: &Mat<C>, b: &BishopData) -> Result<bool> {
    let n = b.n;
    let kind = VarKind::Conjugate;
    let uz: Vec<Graded<C>> = (0..n)
        .map(|row| {
            let mut p = HomPoly::zero(n, 1, kind);
            for col in 0..n {
                p.add_term(
                    Key::new(MultiIndex::unit(n, col), MultiIndex::zero(n)),
                    u[(row, col)].clone(),
                );
            }
            Graded::from_poly(p, 2)
        })
        .collect();
    let ubar: Vec<Graded<C>> = uz.iter().map(|s| s.bar()).collect();
    let q = quadric::<C>(b, kind);
    let image = compose(&q, &uz, &ubar, 2)?;
    Ok(image.part(2) == q)
}

/// Composes a transform with the model automorphism
/// `(z, w) -> (a(w) U z, a(w)^2 w)` (real series `a(w) = 1 + a_1 w + ...`).
/// The `w`-component carries the `a^2` factor so the model maps to itself.
pub fn automorphism_apply<C: Coeff>(
    t: &FormalTransform<C>,
    a_coeffs: &[BigRational],
    u: &Mat<C>,
    b: &BishopData,
) -> Result<FormalTransform<C>> {
    if !preserves_quadric(u, b)? {
        return Err(Error::InvalidInput(
            "linear part does not preserve the model quadric".into(),
        ));
    }
    let n = t.n;
    let kind = t.kind;
    let wmax = t.max_weight;
    // (m, n)-table arithmetic: weight m + 2n truncated at wmax
    type Table<C> = BTreeMap<(u32, u32), HomPoly<C>>;
    let tmul = |x: &Table<C>, y: &Table<C>| -> Result<Table<C>> {
        let mut out: Table<C> = BTreeMap::new();
        for (&(m1, n1), p1) in x {
            for (&(m2, n2), p2) in y {
                if m1 + m2 + 2 * (n1 + n2) > wmax {
                    continue;
                }
                let prod = p1.mul(p2)?;
                let e = out
                    .entry((m1 + m2, n1 + n2))
                    .or_insert_with(|| HomPoly::zero(n, m1 + m2, kind));
                *e = e.add(&prod)?;
            }
        }
        out.retain(|_, p| !p.is_zero());
        Ok(out)
    };
    // a(G) where G is the transform's w-component as a table
    let gt: Table<C> = t.g.clone();
    let mut a_of_g: Table<C> = BTreeMap::new();
    a_of_g.insert(
        (0, 0),
        z_poly(n, kind, &[(MultiIndex::zero(n), C::from_rational(&a_coeffs[0]))]),
    );
    let mut gpow: Table<C> = BTreeMap::new();
    gpow.insert((0, 0), z_poly(n, kind, &[(MultiIndex::zero(n), C::one())]));
    for (j, aj) in a_coeffs.iter().enumerate().skip(1) {
        gpow = tmul(&gpow, &gt)?;
        let c = C::from_rational(aj);
        for (&k, p) in &gpow {
            let e = a_of_g
                .entry(k)
                .or_insert_with(|| HomPoly::zero(n, k.0, kind));
            *e = e.add(&p.scale(&c))?;
        }
        let _ = j;
    }
    // new F = a(G) * U F ; new G = G * a(G)^2
    let a2 = tmul(&a_of_g, &a_of_g)?;
    let new_g = tmul(&gt, &a2)?;
    let mut new_f: BTreeMap<(u32, u32), Vec<HomPoly<C>>> = BTreeMap::new();
    for (&key, comps) in &t.f {
        // U F at this table entry
        let mixed: Vec<HomPoly<C>> = (0..n)
            .map(|row| {
                let mut acc = HomPoly::zero(n, key.0, kind);
                for (col, p) in comps.iter().enumerate() {
                    acc = acc.add(&p.scale(&u[(row, col)])).expect("shape");
                }
                acc
            })
            .collect();
        let mut single: Table<C> = BTreeMap::new();
        for (row, p) in mixed.into_iter().enumerate() {
            single.insert(key, p);
            let scaled = tmul(&single, &a_of_g)?;
            for (&k2, p2) in &scaled {
                let e = new_f.entry(k2).or_insert_with(|| {
                    (0..n).map(|_| HomPoly::zero(n, k2.0, kind)).collect()
                });
                e[row] = e[row].add(p2)?;
            }
            single.clear();
        }
    }
    let mut out = FormalTransform {
        n,
        kind,
        max_weight: wmax,
        g: BTreeMap::new(),
        f: BTreeMap::new(),
    };
    for ((m, nw), p) in new_g {
        if !p.is_zero() {
            out.g.insert((m, nw), p);
        }
    }
    for ((m, nw), comps) in new_f {
        if comps.iter().any(|p| !p.is_zero()) {
            out.f.insert((m, nw), comps);
        }
    }
    Ok(out)
}

/// Series parameters of the inverse automorphism: `a'(w a(w)^2) a(w) = 1`.
pub fn invert_automorphism_series(a: &[BigRational], order: usize) -> Vec<BigRational> {
    use num_traits::One;
    // work with rational power series in one variable
    let mul = |x: &[BigRational], y: &[BigRational]| -> Vec<BigRational> {
        let mut out = vec![BigRational::from_integer(0.into()); order + 1];
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                if i + j <= order {
                    out[i + j] += xi * yj;
                }
            }
        }
        out
    };
    let mut a_pad = a.to_vec();
    a_pad.resize(order + 1, BigRational::from_integer(0.into()));
    // s(w) = w a(w)^2
    let a2 = mul(&a_pad, &a_pad);
    let mut s = vec![BigRational::from_integer(0.into()); order + 1];
    for i in 0..order {
        s[i + 1] = a2[i].clone();
    }
    // find a' with a'(s(w)) = 1/a(w), coefficient by coefficient
    let mut inv_a = vec![BigRational::from_integer(0.into()); order + 1];
    inv_a[0] = BigRational::one() / a_pad[0].clone();
    for k in 1..=order {
        // ( a * inv_a )_k = 0
        let mut acc = BigRational::from_integer(0.into());
        for i in 0..k {
            acc += &a_pad[k - i] * &inv_a[i];
        }
        inv_a[k] = -acc / a_pad[0].clone();
    }
    let mut aprime = vec![BigRational::from_integer(0.into()); order + 1];
    // powers of s
    let mut spow = vec![BigRational::from_integer(0.into()); order + 1];
    spow[0] = BigRational::one();
    let mut spows = vec![spow.clone()];
    for _ in 1..=order {
        spow = mul(&spow, &s);
        spows.push(spow.clone());
    }
    for k in 0..=order {
        // inv_a[k-th coefficient] = sum_j aprime[j] * (s^j)_k
        let mut acc = inv_a[k].clone();
        for j in 0..k {
            acc -= &aprime[j] * &spows[j][k];
        }
        // (s^k)_k = a(0)^{2k} = 1 when a0 = 1
        aprime[k] = acc / spows[k][k].clone();
    }
    aprime
}

// ---------------------------------------------------------------------------
// Normal-form checks (the special conditions of the statement)
// ---------------------------------------------------------------------------

/// Report of the even/odd special normalizations on one normal-form part.
#[derive(Debug, Clone)]
pub struct SpecialReport {
    pub ok: bool,
    pub detail: Vec<String>,
}

/// Checks the deep-level kernel conditions on a normal-form part `phi_k`:
/// even `k`: the imaginary part of the degree-2 chain quotient is killed by
/// every operator `D_ab`; odd `k`: the degree-3 chain quotient's imaginary
/// part has no `z_i^3` (or second-block) component for `i < k0`.
pub fn special_conditions<C: Coeff>(
    phi: &HomPoly<C>,
    b: &BishopData,
    tol: f64,
) -> Result<SpecialReport> {
    let mut detail = Vec::new();
    let k = phi.degree();
    if phi.is_zero() || k < 4 {
        return Ok(SpecialReport { ok: true, detail });
    }
    // walk the chain down to the deepest nontrivial quotient
    let mut cur = phi.clone();
    while cur.degree() >= 4 {
        let d = crate::fischer::decompose(&cur, b)?;
        cur = d.a;
    }
    let n = b.n;
    if k % 2 == 0 {
        // degree-2 quotient
        debug_assert_eq!(cur.degree(), 2);
        let y = cur.im_coeff_part();
        for a in 0..n {
            for bb in 0..n {
                let v = coreo_op(&y, b, a, bb);
                let c = v.coeff(&Key::new(MultiIndex::zero(n), MultiIndex::zero(n)));
                if !c.is_zero_tol(tol) {
                    detail.push(format!("even-case D_{}{} = {:?}", a + 1, bb + 1, c));
                }
            }
        }
    } else {
        debug_assert_eq!(cur.degree(), 3);
        let y = cur.im_coeff_part();
        for i in 0..b.k0 {
            let mut z3 = MultiIndex::zero(n);
            z3.0[i] = 3;
            let cz = y.coeff(&Key::new(z3.clone(), MultiIndex::zero(n)));
            let cj = y.coeff(&Key::new(MultiIndex::zero(n), z3));
            if !cz.is_zero_tol(tol) {
                detail.push(format!("odd-case z_{}^3 coefficient {:?}", i + 1, cz));
            }
            if !cj.is_zero_tol(tol) {
                detail.push(format!("odd-case zbar_{}^3 coefficient {:?}", i + 1, cj));
            }
        }
    }
    Ok(SpecialReport {
        ok: detail.is_empty(),
        detail,
    })
}

/// Checks the output conditions on one normal-form part: the symmetric
/// (function real) part lies in the F-space, the antisymmetric part in the
/// G-space.
pub fn check_cn<C: Coeff>(
    phi: &HomPoly<C>,
    b: &BishopData,
    tol: f64,
) -> Result<(crate::fischer::NormReport, crate::fischer::NormReport)> {
    let half = C::from_rational(&BigRational::new(1.into(), 2.into()));
    let re = phi.add(&phi.bar())?.scale(&half);
    let im = phi.sub(&phi.bar())?.scale(&scale_i_half::<C>());
    let rf = crate::fischer::is_normalized(&re, b, Flavor::F, tol)?;
    let rg = crate::fischer::is_normalized(&im, b, Flavor::G, tol)?;
    Ok((rf, rg))
}

/// Exact-mode helper: random real-valued homogeneous polynomial.
pub fn random_real_poly(
    n: usize,
    degree: u32,
    seed: &mut u64,
) -> HomPoly<Exact> {
    let mut p = HomPoly::zero(n, degree, VarKind::Conjugate);
    let mut next = || {
        // xorshift, deterministic across platforms
        let mut x = *seed;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        *seed = x;
        (x % 19) as i64 - 9
    };
    for key in crate::multi_index::keys_of_degree(n, degree) {
        let re = next();
        let im = next();
        if re == 0 && im == 0 {
            continue;
        }
        let c = Exact::new(
            BigRational::new(re.into(), 4.into()),
            BigRational::new(im.into(), 4.into()),
        );
        // add c z^I zbar^J + conj c z^J zbar^I to stay real-valued
        p.add_term(key.clone(), c.clone());
        p.add_term(key.swapped(), c.conj());
    }
    let _ = is_real_coefficient(&p);
    debug_assert!(p.is_bar_symmetric());
    p
}


/// Test-only surface for profiling one weight step.
pub fn weight_step_public<C: Coeff>(
    v_upper: &HomPoly<C>,
    v_lower: &HomPoly<C>,
    r: u32,
    b: &BishopData,
) -> Result<()> {
    let eng = crate::fischer::Engine::new(b.clone(), VarKind::Conjugate);
    weight_step(v_upper, v_lower, r, &eng)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON schemas
// ---------------------------------------------------------------------------

/// JSON form of a manifold series.
#[derive(serde::Serialize, serde::Deserialize)]
pub struct ManifoldJson {
    pub lambda: Vec<String>,
    #[serde(rename = "maxDegree")]
    pub max_degree: u32,
    pub phi: BTreeMap<u32, crate::poly::HomPolyJson>,
}

impl ManifoldSeries<Exact> {
    pub fn to_json(&self) -> ManifoldJson {
        ManifoldJson {
            lambda: self
                .b
                .lambda
                .iter()
                .map(crate::scalar::format_rational)
                .collect(),
            max_degree: self.max_degree,
            phi: self.phi.iter().map(|(d, p)| (*d, p.to_json())).collect(),
        }
    }

    pub fn from_json(j: &ManifoldJson) -> Result<Self> {
        let lambda = j
            .lambda
            .iter()
            .map(|s| {
                crate::scalar::parse_rational(s)
                    .ok_or_else(|| Error::InvalidInput(format!("bad lambda {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let b = BishopData::new(lambda)?;
        let mut phi = BTreeMap::new();
        for (d, pj) in &j.phi {
            phi.insert(*d, HomPoly::<Exact>::from_json(pj)?);
        }
        ManifoldSeries::new(b, phi, j.max_degree)
    }
}

/// JSON form of a transform (tables keyed "m,n").
#[derive(serde::Serialize, serde::Deserialize)]
pub struct TransformJson {
    pub n: usize,
    #[serde(rename = "maxWeight")]
    pub max_weight: u32,
    pub g: BTreeMap<String, crate::poly::HomPolyJson>,
    pub f: BTreeMap<String, Vec<crate::poly::HomPolyJson>>,
}

pub fn table_key(m: u32, n: u32) -> String {
    format!("{m},{n}")
}

pub fn parse_table_key(s: &str) -> Result<(u32, u32)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::InvalidInput(format!("bad table key {s:?}")))?;
    Ok((
        a.trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad table key {s:?}")))?,
        b.trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad table key {s:?}")))?,
    ))
}

impl FormalTransform<Exact> {
    pub fn to_json(&self) -> TransformJson {
        TransformJson {
            n: self.n,
            max_weight: self.max_weight,
            g: self
                .g
                .iter()
                .map(|(&(m, n), p)| (table_key(m, n), p.to_json()))
                .collect(),
            f: self
                .f
                .iter()
                .map(|(&(m, n), v)| {
                    (table_key(m, n), v.iter().map(|p| p.to_json()).collect())
                })
                .collect(),
        }
    }
}
