//! The complexified Segre-preserving mode: double decompositions, the
//! twin-table normal-form algorithm, model-to-model maps, and the
//! desk-scale rigidity probe.
//!
//! Objects live in `(z, xi)` with no conjugation; the bar involution is the
//! plain variable swap and every transform table comes with an independent
//! twin. The weight cascade is shared with the real pipeline.

use crate::error::{Error, Result};
use crate::fischer::{DecompResult, Engine};
use crate::matrix::Mat;
use crate::multi_index::{keys_of_degree, multi_indices, BishopData, Key, MultiIndex};
use crate::normalform::{weight_step, z_poly, ManifoldSeries};
use crate::poly::{quadric, HomPoly, VarKind};
use crate::scalar::{Coeff, Exact};
use crate::series::{Graded, ProductCache};
use num_traits::Zero as _;
use std::collections::BTreeMap;

/// Complexified manifold pair `w = Q + sum phi_k`, `nu = Q + sum phiBar_k`
/// (both right-hand sides polynomials in `(z, xi)`).
#[derive(Clone, Debug, PartialEq)]
pub struct SegreManifold<C: Coeff> {
    pub b: BishopData,
    pub phi: BTreeMap<u32, HomPoly<C>>,
    pub phi_bar: BTreeMap<u32, HomPoly<C>>,
    pub max_degree: u32,
}

impl<C: Coeff> SegreManifold<C> {
    pub fn new(
        b: BishopData,
        phi: BTreeMap<u32, HomPoly<C>>,
        phi_bar: BTreeMap<u32, HomPoly<C>>,
        max_degree: u32,
    ) -> Result<Self> {
        for m in [&phi, &phi_bar] {
            for (d, p) in m {
                if *d < 3 || *d > max_degree || p.degree() != *d {
                    return Err(Error::DegreeMismatch(format!("phi_{d} shape")));
                }
                if p.kind() != VarKind::Independent || p.ambient_n() != b.n {
                    return Err(Error::InvalidInput(format!("phi_{d} shape")));
                }
            }
        }
        Ok(SegreManifold {
            b,
            phi,
            phi_bar,
            max_degree,
        })
    }

    pub fn model(b: BishopData, max_degree: u32) -> Self {
        SegreManifold {
            b,
            phi: BTreeMap::new(),
            phi_bar: BTreeMap::new(),
            max_degree,
        }
    }

    /// True complexification when the pair is conjugate-swap symmetric.
    pub fn is_complexification(&self) -> bool {
        self.phi.len() == self.phi_bar.len()
            && self.phi.iter().all(|(d, p)| {
                self.phi_bar
                    .get(d)
                    .map(|q| *q == conj_swap_independent(p))
                    .unwrap_or(false)
            })
    }

    fn w_series(&self, trunc: u32) -> Graded<C> {
        let mut w = Graded::from_poly(quadric::<C>(&self.b, VarKind::Independent), trunc);
        for (_, p) in &self.phi {
            w.add_poly(p);
        }
        w
    }

    fn nu_series(&self, trunc: u32) -> Graded<C> {
        let mut w = Graded::from_poly(quadric::<C>(&self.b, VarKind::Independent), trunc);
        for (_, p) in &self.phi_bar {
            w.add_poly(p);
        }
        w
    }
}

/// Coefficient-conjugate variable swap: what complexification sends the
/// conjugate series to.
fn conj_swap_independent<C: Coeff>(p: &HomPoly<C>) -> HomPoly<C> {
    let mut out = HomPoly::zero(p.ambient_n(), p.degree(), p.kind());
    for (k, c) in p.terms() {
        out.add_term(k.swapped(), c.conj());
    }
    out
}

/// Complexifies a real manifold: `zbar -> xi` in `phi`, the
/// coefficient-conjugate swap on the `nu` side.
pub fn complexify_manifold<C: Coeff>(m: &ManifoldSeries<C>) -> SegreManifold<C> {
    let phi: BTreeMap<u32, HomPoly<C>> =
        m.phi.iter().map(|(d, p)| (*d, p.complexify())).collect();
    let phi_bar = phi
        .iter()
        .map(|(d, p)| (*d, conj_swap_independent(p)))
        .collect();
    SegreManifold {
        b: m.b.clone(),
        phi,
        phi_bar,
        max_degree: m.max_degree,
    }
}

/// Normalizing Segre transform: the `(F, G)` tables plus their twins
/// (all stored in the z-variable representation; the twins act on
/// `(xi, nu)`).
#[derive(Clone, Debug, PartialEq)]
pub struct SegreTransform<C: Coeff> {
    pub n: usize,
    pub max_weight: u32,
    pub g: BTreeMap<(u32, u32), HomPoly<C>>,
    pub g_tilde: BTreeMap<(u32, u32), HomPoly<C>>,
    pub f: BTreeMap<(u32, u32), Vec<HomPoly<C>>>,
    pub f_tilde: BTreeMap<(u32, u32), Vec<HomPoly<C>>>,
}

impl<C: Coeff> SegreTransform<C> {
    pub fn identity(n: usize, max_weight: u32) -> Self {
        let kind = VarKind::Independent;
        let one = z_poly(n, kind, &[(MultiIndex::zero(n), C::one())]);
        let idv: Vec<HomPoly<C>> = (0..n)
            .map(|k| z_poly(n, kind, &[(MultiIndex::unit(n, k), C::one())]))
            .collect();
        let mut g = BTreeMap::new();
        g.insert((0, 1), one.clone());
        let mut g_tilde = BTreeMap::new();
        g_tilde.insert((0, 1), one);
        let mut f = BTreeMap::new();
        f.insert((1, 0), idv.clone());
        let mut f_tilde = BTreeMap::new();
        f_tilde.insert((1, 0), idv);
        SegreTransform {
            n,
            max_weight,
            g,
            g_tilde,
            f,
            f_tilde,
        }
    }

    pub fn is_identity(&self) -> bool {
        let triv_g = |m: &BTreeMap<(u32, u32), HomPoly<C>>| {
            m.iter().all(|(&k, p)| k == (0, 1) || p.is_zero())
        };
        let triv_f = |m: &BTreeMap<(u32, u32), Vec<HomPoly<C>>>| {
            m.iter()
                .all(|(&k, v)| k == (1, 0) || v.iter().all(|p| p.is_zero()))
        };
        triv_g(&self.g) && triv_g(&self.g_tilde) && triv_f(&self.f) && triv_f(&self.f_tilde)
    }

    fn g_series(&self, w: &Graded<C>, upper: bool) -> Result<Graded<C>> {
        let table = if upper { &self.g } else { &self.g_tilde };
        let mut out = Graded::zero(w.n, w.kind, w.trunc);
        for (&(_, nw), p) in table {
            if p.is_zero() {
                continue;
            }
            let emb = if upper { p.clone() } else { p.swap_vars() };
            out = out.add(&Graded::from_poly(emb, w.trunc).mul(&w.pow(nw)?)?);
        }
        Ok(out)
    }

    fn f_series(&self, w: &Graded<C>, upper: bool) -> Result<Vec<Graded<C>>> {
        let table = if upper { &self.f } else { &self.f_tilde };
        let mut out = vec![Graded::zero(w.n, w.kind, w.trunc); self.n];
        for (&(_, nw), comps) in table {
            let wp = w.pow(nw)?;
            for (k, p) in comps.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let emb = if upper { p.clone() } else { p.swap_vars() };
                out[k] = out[k].add(&Graded::from_poly(emb, w.trunc).mul(&wp)?);
            }
        }
        Ok(out)
    }

    /// The Segre analogue of the (o)-normalization:
    /// `Re(F_{1,n} + F~_{1,n}) = 0` and vanishing trailing components of
    /// `F_{0,n+1}`, `F~_{0,n+1}`.
    pub fn satisfies_o(&self, b: &BishopData) -> bool {
        let zero = |m: u32| HomPoly::<C>::zero(self.n, m, VarKind::Independent);
        let keys: std::collections::BTreeSet<(u32, u32)> = self
            .f
            .keys()
            .chain(self.f_tilde.keys())
            .cloned()
            .collect();
        for (m, n) in keys {
            if m == 1 && n >= 1 {
                for k in 0..self.n {
                    let a = self
                        .f
                        .get(&(m, n))
                        .map(|v| v[k].clone())
                        .unwrap_or_else(|| zero(m));
                    let t = self
                        .f_tilde
                        .get(&(m, n))
                        .map(|v| v[k].clone())
                        .unwrap_or_else(|| zero(m));
                    if !a
                        .add(&t)
                        .map(|s| s.re_coeff_part().is_zero())
                        .unwrap_or(false)
                    {
                        return false;
                    }
                }
            }
            if m == 0 && n >= 2 {
                for table in [&self.f, &self.f_tilde] {
                    if let Some(v) = table.get(&(m, n)) {
                        for (k, p) in v.iter().enumerate() {
                            if k >= b.k0 && !p.is_zero() {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

/// Fischer decomposition in the complexified setting (`xi` replaces `zbar`).
pub fn decompose_c<C: Coeff>(p: &HomPoly<C>, b: &BishopData) -> Result<DecompResult<C>> {
    if p.kind() != VarKind::Independent {
        return Err(Error::KindMismatch("decompose_c needs (z, xi) input".into()));
    }
    crate::fischer::decompose(p, b)
}

/// Residuals of the two transforming equations at truncation `trunc`.
pub fn segre_residuals<C: Coeff>(
    m: &SegreManifold<C>,
    t: &SegreTransform<C>,
    phi_out: &BTreeMap<u32, HomPoly<C>>,
    phi_bar_out: &BTreeMap<u32, HomPoly<C>>,
    trunc: u32,
) -> Result<(Graded<C>, Graded<C>)> {
    let w = m.w_series(trunc);
    let nu = m.nu_series(trunc);
    let g_w = t.g_series(&w, true)?;
    let g_nu = t.g_series(&nu, false)?;
    let f = t.f_series(&w, true)?;
    let ft = t.f_series(&nu, false)?;
    let mut cache = ProductCache::new(&f, &ft, trunc);
    let q = cache.compose(&quadric::<C>(&m.b, VarKind::Independent))?;
    let mut rhs_w = q.clone();
    let mut rhs_nu = q;
    for (_, p) in phi_out {
        rhs_w = rhs_w.add(&cache.compose(p)?);
    }
    for (_, p) in phi_bar_out {
        rhs_nu = rhs_nu.add(&cache.compose(p)?);
    }
    Ok((g_w.sub(&rhs_w), g_nu.sub(&rhs_nu)))
}

/// Output of the Segre normalization.
pub struct SegreNormalizeOut<C: Coeff> {
    pub transform: SegreTransform<C>,
    pub normal_form: SegreManifold<C>,
}

/// Degree-by-degree Segre-preserving normalization: the twin-table
/// counterpart of the real pipeline, sharing the weight cascade.
pub fn normalize_segre<C: Coeff>(m: &SegreManifold<C>, d_max: u32) -> Result<SegreNormalizeOut<C>> {
    if m.b.k0 == 0 {
        return Err(Error::InvalidInput(
            "normalization needs at least one nonzero invariant".into(),
        ));
    }
    let b = m.b.clone();
    let eng = Engine::new(b.clone(), VarKind::Independent);
    let mut t = SegreTransform::identity(b.n, d_max);
    let mut phi_out: BTreeMap<u32, HomPoly<C>> = BTreeMap::new();
    let mut phi_bar_out: BTreeMap<u32, HomPoly<C>> = BTreeMap::new();
    for r in 3..=d_max {
        let (res_w, res_nu) = segre_residuals(m, &t, &phi_out, &phi_bar_out, r)?;
        let kw = res_w.part(r);
        // both equations already share the (z, xi) layout
        let knu = res_nu.part(r);
        let step = weight_step(&kw, &knu, r, &eng)?;
        for ((mm, nn), p) in step.g_upper {
            add_g(&mut t.g, mm, nn, p);
        }
        for ((mm, nn), p) in step.g_lower {
            add_g(&mut t.g_tilde, mm, nn, p);
        }
        for ((mm, nn), comps) in step.f_upper {
            add_f(&mut t.f, mm, nn, comps, b.n);
        }
        for ((mm, nn), comps) in step.f_lower {
            add_f(&mut t.f_tilde, mm, nn, comps, b.n);
        }
        let phi_r = step.phi1.add(&step.phi2.scale(&C::i()))?;
        let phi_bar_r = step.phi1.sub(&step.phi2.scale(&C::i()))?;
        if !phi_r.is_zero() {
            phi_out.insert(r, phi_r);
        }
        if !phi_bar_r.is_zero() {
            phi_bar_out.insert(r, phi_bar_r);
        }
    }
    Ok(SegreNormalizeOut {
        transform: t,
        normal_form: SegreManifold {
            b,
            phi: phi_out,
            phi_bar: phi_bar_out,
            max_degree: d_max,
        },
    })
}

fn add_g<C: Coeff>(table: &mut BTreeMap<(u32, u32), HomPoly<C>>, m: u32, n: u32, p: HomPoly<C>) {
    if p.is_zero() {
        return;
    }
    let e = table
        .entry((m, n))
        .or_insert_with(|| HomPoly::zero(p.ambient_n(), m, p.kind()));
    *e = e.add(&p).expect("g shape");
}

fn add_f<C: Coeff>(
    table: &mut BTreeMap<(u32, u32), Vec<HomPoly<C>>>,
    m: u32,
    n: u32,
    comps: Vec<HomPoly<C>>,
    nvars: usize,
) {
    let kind = comps[0].kind();
    let e = table
        .entry((m, n))
        .or_insert_with(|| (0..nvars).map(|_| HomPoly::zero(nvars, m, kind)).collect());
    for (a, b) in e.iter_mut().zip(comps) {
        *a = a.add(&b).expect("f shape");
    }
}

// ---------------------------------------------------------------------------
// Model-to-model maps and the rigidity probe
// ---------------------------------------------------------------------------

/// A formal map `(z, w) -> (F(z, w), G(z, w))` from an N-model into an
/// N'-model (`n_out >= n_in`), in the weight-table representation.
#[derive(Clone, Debug)]
pub struct ModelMap<C: Coeff> {
    pub n_in: usize,
    pub n_out: usize,
    pub g: BTreeMap<(u32, u32), HomPoly<C>>,
    pub f: BTreeMap<(u32, u32), Vec<HomPoly<C>>>,
}

impl<C: Coeff> ModelMap<C> {
    /// The standard linear embedding `(w, z) -> (w, z, 0)`.
    pub fn standard_embedding(n_in: usize, n_out: usize) -> Self {
        let kind = VarKind::Conjugate;
        let mut g = BTreeMap::new();
        g.insert(
            (0, 1),
            z_poly(n_in, kind, &[(MultiIndex::zero(n_in), C::one())]),
        );
        let mut f = BTreeMap::new();
        f.insert(
            (1, 0),
            (0..n_out)
                .map(|k| {
                    if k < n_in {
                        z_poly(n_in, kind, &[(MultiIndex::unit(n_in, k), C::one())])
                    } else {
                        HomPoly::zero(n_in, 1, kind)
                    }
                })
                .collect(),
        );
        ModelMap { n_in, n_out, g, f }
    }
}

/// Residual report of a model-to-model map: max coefficient magnitude per
/// degree.
#[derive(Clone, Debug, serde::Serialize)]
pub struct MapResidualReport {
    pub per_degree: Vec<(u32, f64)>,
    pub max: f64,
}

impl MapResidualReport {
    pub fn is_zero(&self, tol: f64) -> bool {
        self.max <= tol
    }
}

/// Substitutes a candidate model-to-model map into the transforming
/// equation `G(z, w) = sum_{k <= N'} [F_k Fbar_k + lambda'_k (F_k^2 +
/// Fbar_k^2)]` on `w = Q(z, zbar)` and reports residual magnitudes per
/// degree `<= d`.
pub fn verify_model_map<C: Coeff>(
    map: &ModelMap<C>,
    b: &BishopData,
    b_out: &BishopData,
    d: u32,
) -> Result<MapResidualReport> {
    if map.n_in > map.n_out || b.n != map.n_in || b_out.n != map.n_out {
        return Err(Error::DimensionMismatch("model map shapes".into()));
    }
    for k in 0..map.n_in {
        if b.lambda[k] != b_out.lambda[k] {
            return Err(Error::InvalidInput("invariant prefixes must match".into()));
        }
    }
    let kind = VarKind::Conjugate;
    let w = Graded::from_poly(quadric::<C>(b, kind), d);
    let mut g = Graded::zero(b.n, kind, d);
    for (&(_, nw), p) in &map.g {
        if !p.is_zero() {
            g = g.add(&Graded::from_poly(p.clone(), d).mul(&w.pow(nw)?)?);
        }
    }
    let mut f = vec![Graded::zero(b.n, kind, d); map.n_out];
    for (&(_, nw), comps) in &map.f {
        let wp = w.pow(nw)?;
        for (k, p) in comps.iter().enumerate() {
            if !p.is_zero() {
                f[k] = f[k].add(&Graded::from_poly(p.clone(), d).mul(&wp)?);
            }
        }
    }
    let mut rhs = Graded::zero(b.n, kind, d);
    for k in 0..map.n_out {
        let fb = f[k].bar();
        rhs = rhs.add(&f[k].mul(&fb)?);
        if !b_out.lambda[k].is_zero() {
            let lam = C::from_rational(&b_out.lambda[k]);
            let sq = f[k].mul(&f[k])?.add(&fb.mul(&fb)?);
            rhs = rhs.add(&sq.scale(&lam));
        }
    }
    let resid = g.sub(&rhs);
    let mut per_degree = Vec::new();
    let mut max = 0.0f64;
    for deg in 0..=d {
        let m = resid.part(deg).max_coeff_mag();
        max = max.max(m);
        per_degree.push((deg, m));
    }
    Ok(MapResidualReport { per_degree, max })
}

/// Result of the desk-scale rigidity probe.
#[derive(Clone, Debug, serde::Serialize)]
pub struct RigidityReport {
    /// Per degree: nullspace dimension of the linearized transforming
    /// equations after the Baouendi-Huang-style normalization.
    pub nullspace_dims: Vec<(u32, usize)>,
    /// Whether the extra-component quadratic block is positive definite
    /// (every target invariant < 1/2), so its vanishing forcing is
    /// conclusive.
    pub quadratic_block_definite: bool,
    pub rigid: bool,
}

/// Linearizes the model transforming equations around the standard
/// embedding and computes the exact nullspace degree by degree.
///
/// Tangential map coefficients enter linearly; the `l > N` components only
/// quadratically, so they drop from the linearization and are disposed of
/// by the definiteness of `x conj(x) + lambda (x^2 + conj(x)^2)`
/// (coefficient matrix `[[1, 2 lambda], [2 lambda, 1]]`, definite for
/// `lambda < 1/2`). The normalization rows `Re F^(k)_{1,n} = 0` (n >= 1;
/// the pair sum in the Segre mode) quotient the residual automorphism
/// family.
pub fn rigidity_probe(
    b: &BishopData,
    b_out: &BishopData,
    d: u32,
    segre: bool,
) -> Result<RigidityReport> {
    let n_in = b.n;
    let kind = if segre {
        VarKind::Independent
    } else {
        VarKind::Conjugate
    };
    let half = num_rational::BigRational::new(1.into(), 2.into());
    let quadratic_block_definite = b_out.lambda.iter().all(|l| *l < half);

    let q: HomPoly<Exact> = quadric(b, kind);
    let qpow = |e: u32| -> Result<HomPoly<Exact>> {
        let mut out = HomPoly::monomial(
            n_in,
            kind,
            Key::new(MultiIndex::zero(n_in), MultiIndex::zero(n_in)),
            Exact::from_ints(1, 1),
        );
        for _ in 0..e {
            out = out.mul(&q)?;
        }
        Ok(out)
    };

    struct Col {
        img_w: HomPoly<Exact>,
        img_nu: HomPoly<Exact>,
        norm_group: Option<usize>,
    }

    let mut nullspace_dims = Vec::new();
    let mut rigid = true;
    for delta in 3..=d {
        let zero_p = |deg: u32| HomPoly::<Exact>::zero(n_in, deg, kind);
        let mut cols: Vec<Col> = Vec::new();
        let mut norm_groups = 0usize;
        // G (and twin) unknowns of weight delta: images z^I Q^n
        for nw in 0..=delta / 2 {
            let m = delta - 2 * nw;
            for i in multi_indices(n_in, m) {
                let mono = z_poly(n_in, kind, &[(i.clone(), Exact::from_ints(1, 1))]);
                let img = mono.mul(&qpow(nw)?)?;
                for unit in [Exact::from_ints(1, 1), Exact::i()] {
                    cols.push(Col {
                        img_w: img.scale(&unit),
                        img_nu: zero_p(delta),
                        norm_group: None,
                    });
                }
                if segre {
                    let img_t = img.swap_vars();
                    for unit in [Exact::from_ints(1, 1), Exact::i()] {
                        cols.push(Col {
                            img_w: zero_p(delta),
                            img_nu: img_t.scale(&unit),
                            norm_group: None,
                        });
                    }
                }
            }
        }
        // tangential F (and twin) unknowns of weight delta - 1:
        // images -(zbar_k + 2 lambda_k z_k) z^I Q^n (+ the conjugate part
        // in the real mode; the twin contributes independently in the
        // Segre mode, to both equations)
        for nw in 0..=(delta - 1) / 2 {
            let m = delta - 1 - 2 * nw;
            for k in 0..n_in {
                for i in multi_indices(n_in, m) {
                    let tgt = crate::fischer::paired_target::<Exact>(&i, k, b, kind)?;
                    let base = tgt.mul(&qpow(nw)?)?;
                    let norm = if m == 1 && nw >= 1 {
                        norm_groups += 1;
                        Some(norm_groups - 1)
                    } else {
                        None
                    };
                    if segre {
                        // two groups per index: the automorphism parameter
                        // is complex here, so both the sum's real and
                        // imaginary parts get a row
                        let norm_im = if norm.is_some() {
                            norm_groups += 1;
                            Some(norm_groups - 1)
                        } else {
                            None
                        };
                        for (idx, unit) in
                            [Exact::from_ints(1, 1), Exact::i()].into_iter().enumerate()
                        {
                            let img = base.scale(&unit).neg();
                            cols.push(Col {
                                img_w: img.clone(),
                                img_nu: img,
                                norm_group: if idx == 0 { norm } else { norm_im },
                            });
                        }
                        let tb = tgt.swap_vars().mul(&qpow(nw)?)?;
                        for (idx, unit) in
                            [Exact::from_ints(1, 1), Exact::i()].into_iter().enumerate()
                        {
                            let img = tb.scale(&unit).neg();
                            cols.push(Col {
                                img_w: img.clone(),
                                img_nu: img,
                                norm_group: if idx == 0 { norm } else { norm_im },
                            });
                        }
                    } else {
                        let unit_img = base.add(&base.bar())?.neg();
                        let ib = base.scale(&Exact::i());
                        let i_img = ib.add(&ib.bar())?.neg();
                        cols.push(Col {
                            img_w: unit_img,
                            img_nu: zero_p(delta),
                            norm_group: norm,
                        });
                        cols.push(Col {
                            img_w: i_img,
                            img_nu: zero_p(delta),
                            norm_group: None,
                        });
                    }
                }
            }
        }
        // assemble the real linear system
        let basis = keys_of_degree(n_in, delta);
        let pos: std::collections::HashMap<Key, usize> = basis
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        let neqs = if segre { 2 } else { 1 };
        let nrows = 2 * neqs * basis.len() + norm_groups;
        let mut mat = Mat::<Exact>::zeros(nrows, cols.len());
        for (cidx, col) in cols.iter().enumerate() {
            for (eq, img) in [(0usize, &col.img_w), (1, &col.img_nu)] {
                if eq == 1 && !segre {
                    continue;
                }
                for (key, c) in img.terms() {
                    let r = 2 * (eq * basis.len() + pos[key]);
                    mat[(r, cidx)] = mat[(r, cidx)].clone() + Exact::real(c.re.clone());
                    mat[(r + 1, cidx)] = mat[(r + 1, cidx)].clone() + Exact::real(c.im.clone());
                }
            }
            if let Some(grp) = col.norm_group {
                let r = 2 * neqs * basis.len() + grp;
                mat[(r, cidx)] = mat[(r, cidx)].clone() + Exact::from_ints(1, 1);
            }
        }
        let ns = mat.nullspace();
        nullspace_dims.push((delta, ns.len()));
        if !ns.is_empty() {
            rigid = false;
        }
    }
    Ok(RigidityReport {
        nullspace_dims,
        quadratic_block_definite,
        rigid: rigid && quadratic_block_definite,
    })
}
