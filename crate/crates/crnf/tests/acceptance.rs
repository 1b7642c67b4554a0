//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Two sub-checks (the 550se norm family and the epsilon-recursion
//! convergence clause) are implemented faithfully and fail by construction
//! of the quantities themselves; the analysis lives in the project notes.
//! They sit in their own `_unattainable`-suffixed tests so the attainable
//! criteria stay green.

use crnf::blocksys::{bound_report, BlockSystem, GridSpec, Target};
use crnf::fischer::{self, Flavor};
use crnf::moser;
use crnf::multi_index::{keys_of_degree, multi_indices, BishopData, MultiIndex};
use crnf::normalform::{
    check_cn, normalize, random_real_poly, special_conditions, transform, transform_residual,
    FormalTransform, ManifoldSeries,
};
use crnf::par::{map_items, Parallelism};
use crnf::poly::quadric;
use crnf::segre::{
    complexify_manifold, decompose_c, normalize_segre, rigidity_probe, segre_residuals,
    verify_model_map, ModelMap,
};
use crnf::{Exact, HomPoly, Key, VarKind};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::time::Instant;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Deterministic xorshift for reproducible sampling.
struct Rng(u64);
impl Rng {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }
    /// Random exact lambda vector in [0, 0.45]^n (multiples of 1/40),
    /// nonzero entries first, not all zero.
    fn lambda(&mut self, n: usize) -> BishopData {
        loop {
            let mut v: Vec<BigRational> =
                (0..n).map(|_| rat((self.next() % 19) as i64, 40)).collect();
            v.sort_by_key(|l| num_traits::Zero::is_zero(l));
            if let Ok(b) = BishopData::new(v) {
                return b;
            }
        }
    }
}

#[test]
fn acceptance_1_decompose_correctness() {
    // 50 random exact invariant vectors (dimension cycling through 1..3);
    // for each, every monomial target z^I with 2 <= |I| <= 6 is decomposed
    // and both identities are checked exactly. At N <= 2 the mixed-basis
    // monomials z^I zbar^J are covered as well.
    let t0 = Instant::now();
    let mut rng = Rng(0x1234_5678_9abc_def1);
    let mut cases: Vec<(BishopData, u32)> = Vec::new();
    for draw in 0..50usize {
        let n = 1 + draw % 3;
        let b = rng.lambda(n);
        for p in 2..=6u32 {
            cases.push((b.clone(), p));
        }
    }
    let failures: usize = map_items(Parallelism::default(), cases, |(b, p)| {
        let solver = fischer::DecompSolver::<Exact>::new(&b, VarKind::Conjugate, p).unwrap();
        let q = quadric::<Exact>(&b, VarKind::Conjugate);
        let mut bad = 0usize;
        let mut targets: Vec<HomPoly<Exact>> = multi_indices(b.n, p)
            .into_iter()
            .map(|i| {
                HomPoly::monomial(
                    b.n,
                    VarKind::Conjugate,
                    Key::new(i, MultiIndex::zero(b.n)),
                    Exact::from_ints(1, 1),
                )
            })
            .collect();
        if b.n <= 2 {
            targets = keys_of_degree(b.n, p)
                .into_iter()
                .map(|k| HomPoly::monomial(b.n, VarKind::Conjugate, k, Exact::from_ints(1, 1)))
                .collect();
        }
        for mono in targets {
            let d = solver.decompose(&mono).unwrap();
            let resid = mono.sub(&d.a.mul(&q).unwrap()).unwrap().sub(&d.c).unwrap();
            if !resid.is_zero() || !d.c.trace(&b).unwrap().is_zero() {
                bad += 1;
            }
        }
        bad
    })
    .into_iter()
    .sum();
    let el = t0.elapsed();
    let pass = failures == 0 && el.as_secs() < 60;
    println!(
        "ACCEPTANCE 1 (decompose correctness, all monomial targets, N<=3 p<=6, 50 lambda): {} [{} failures, {:?}]",
        if pass { "PASS" } else { "FAIL" },
        failures,
        el
    );
    assert!(pass);
}

#[test]
fn acceptance_2_elimination_oracle_equivalence() {
    let t0 = Instant::now();
    let mut rng = Rng(0x0dd0_feed_cafe_1234);
    let mut cases = Vec::new();
    for i in 0..200 {
        let n = 1 + (i % 2);
        let b = rng.lambda(n);
        let p = 3 + (rng.next() % 6) as u32; // 3..=8
        let target = if rng.next() % 2 == 0 {
            let is = multi_indices(n, p);
            Target::Monomial(is[(rng.next() as usize) % is.len()].clone())
        } else {
            let js = multi_indices(n, p - 1);
            Target::Paired {
                l: (rng.next() as usize) % n,
                j: js[(rng.next() as usize) % js.len()].clone(),
            }
        };
        cases.push((b, p, target));
    }
    let failures: usize = map_items(Parallelism::default(), cases, |(b, p, target)| {
        let sys = BlockSystem::<Exact>::build(p, &target, &b, VarKind::Conjugate).unwrap();
        let elim = sys.solve_elimination().unwrap();
        let dense = sys.dense_solve().unwrap();
        usize::from(elim != dense)
    })
    .into_iter()
    .sum();
    let el = t0.elapsed();
    let pass = failures == 0 && el.as_secs() < 120;
    println!(
        "ACCEPTANCE 2 (elimination == dense exact solve, 200 instances): {} [{} mismatches, {:?}]",
        if pass { "PASS" } else { "FAIL" },
        failures,
        el
    );
    assert!(pass);
}

fn grid() -> GridSpec {
    GridSpec {
        step: rat(1, 20),
        max: rat(9, 20),
    }
}

#[test]
fn acceptance_3_norm_bound_certification() {
    let t0 = Instant::now();
    let mut all = true;
    for n in 1..=3usize {
        let rep = bound_report(n, 12, &grid(), Parallelism::default()).unwrap();
        for f in &rep.families {
            if f.family.starts_with("550se") {
                continue; // measured in the companion test; see the notes
            }
            println!(
                "  N={n} {}: max {:.6} (bound {:.4}) {}",
                f.family,
                f.max,
                f.bound,
                if f.pass { "ok" } else { "VIOLATED" }
            );
            all &= f.pass;
        }
    }
    let el = t0.elapsed();
    let pass = all && el.as_secs() < 300;
    println!(
        "ACCEPTANCE 3 (viena1 < 1/7, viena2 < 1/2, viena3 < 1/4, 2211 < 1/2; N<=3, sums<=12): {} [{:?}]",
        if pass { "PASS" } else { "FAIL" },
        el
    );
    assert!(pass);
}

#[test]
fn acceptance_3_norm_bound_550se_unattainable() {
    // Faithful measurement of the remaining family; the quantity grows in p
    // (||Aux_p A|| ~ p lambda^2), so the paper's stated bound of 2 cannot
    // hold over the full range. See notes/decisions.md.
    let rep = bound_report(1, 12, &grid(), Parallelism::default()).unwrap();
    let mut pass = true;
    for f in rep.families.iter().filter(|f| f.family.starts_with("550se")) {
        println!(
            "  {}: max {:.4} (bound {:.1}) {}",
            f.family,
            f.max,
            f.bound,
            if f.pass { "ok" } else { "VIOLATED" }
        );
        pass &= f.pass;
    }
    println!(
        "ACCEPTANCE 3 (550se inverse norms < 2): {}",
        if pass { "PASS" } else { "FAIL (spec defect; see decisions ledger)" }
    );
    assert!(pass, "550se bound is unattainable as stated; see notes/decisions.md");
}

#[test]
fn acceptance_4_normal_form_pipeline() {
    let b = BishopData::new(vec![rat(1, 10), rat(3, 10)]).unwrap();
    let seeds: Vec<u64> = (0..20).map(|k| 0x5eed_0000 + 7919 * k as u64).collect();
    let t0 = Instant::now();
    let results = map_items(Parallelism::default(), seeds, |seed| {
        let t = Instant::now();
        let mut s = seed;
        let mut phi = BTreeMap::new();
        for d in 3..=5u32 {
            let p = random_real_poly(2, d, &mut s);
            assert!(!p.is_zero());
            phi.insert(d, p);
        }
        let m = ManifoldSeries::new(b.clone(), phi, 8).unwrap();
        let out = normalize(&m, 8).unwrap();
        let resid = transform_residual(&m, &out.transform, &out.normal_form.phi, 8).unwrap();
        let mut ok = (0..=8u32).all(|d| resid.part(d).is_zero());
        for (_, p) in &out.normal_form.phi {
            let (rf, rg) = check_cn(p, &b, 0.0).unwrap();
            let sp = special_conditions(p, &b, 0.0).unwrap();
            ok &= rf.ok && rg.ok && sp.ok;
        }
        ok &= out.transform.satisfies_o(&b);
        // rerun determinism
        let out2 = normalize(&m, 8).unwrap();
        ok &= out2.transform == out.transform && out2.normal_form == out.normal_form;
        (ok, t.elapsed())
    });
    let mut pass = true;
    let mut worst = std::time::Duration::ZERO;
    for (ok, el) in results {
        pass &= ok && el.as_secs() < 180;
        worst = worst.max(el);
    }
    println!(
        "ACCEPTANCE 4 (normal-form pipeline, 20 instances, N=2 to degree 8): {} [worst instance {:?}, total {:?}]",
        if pass { "PASS" } else { "FAIL" },
        worst,
        t0.elapsed()
    );
    assert!(pass);
}

/// A random transform supported at weights d-1 and d (plus identity).
fn random_weight_d_transform(n: usize, d: u32, seed: &mut u64) -> FormalTransform<Exact> {
    let mut t = FormalTransform::identity(n, VarKind::Conjugate, 2 * d);
    let mut next = |s: &mut u64| {
        let mut x = *s;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        *s = x;
        (x % 7) as i64 - 3
    };
    // G entries of weight d, F entries of weight d - 1
    for nw in 0..=d / 2 {
        let m = d - 2 * nw;
        let mut p = HomPoly::zero(n, m, VarKind::Conjugate);
        for i in multi_indices(n, m) {
            let c = next(seed);
            if c != 0 {
                p.add_term(
                    Key::new(i, MultiIndex::zero(n)),
                    Exact::from_ints(c, 5),
                );
            }
        }
        if !p.is_zero() {
            *t.g.entry((m, nw)).or_insert_with(|| HomPoly::zero(n, m, VarKind::Conjugate)) = p;
        }
    }
    for nw in 0..=(d - 1) / 2 {
        let m = d - 1 - 2 * nw;
        if m == 0 {
            continue;
        }
        let comps: Vec<HomPoly<Exact>> = (0..n)
            .map(|_| {
                let mut p = HomPoly::zero(n, m, VarKind::Conjugate);
                for i in multi_indices(n, m) {
                    let c = next(seed);
                    if c != 0 {
                        p.add_term(Key::new(i, MultiIndex::zero(n)), Exact::from_ints(c, 5));
                    }
                }
                p
            })
            .collect();
        if comps.iter().any(|p| !p.is_zero()) {
            t.f.insert((m, nw), comps);
        }
    }
    t
}

#[test]
fn acceptance_5_degree_doubling() {
    let t0 = Instant::now();
    let mut cases = Vec::new();
    for (d, n) in [(4u32, 2usize), (5, 2), (6, 1)] {
        for inst in 0..10u64 {
            cases.push((d, n, 0xd0b1_0000 + inst * 31 + d as u64));
        }
    }
    let results = map_items(Parallelism::default(), cases, |(d, n, seed)| {
        let b = if n == 1 {
            BishopData::new(vec![rat(3, 10)]).unwrap()
        } else {
            BishopData::new(vec![rat(1, 10), rat(3, 10)]).unwrap()
        };
        let mut s = seed;
        // an error of order exactly d inside the formally trivial class:
        // transform the model by a random map supported at weight >= d - 1
        let model = ManifoldSeries::<Exact>::model(b.clone(), 2 * d);
        let m = loop {
            let tr = random_weight_d_transform(n, d, &mut s);
            let m = transform(&model, &tr, 2 * d).unwrap();
            match m.error_order() {
                Some(o) if o == d => break m,
                _ => continue,
            }
        };
        // weight-d normalizing truncation
        let out = normalize(&m, d).unwrap();
        let m2 = transform(&m, &out.transform, 2 * d - 2).unwrap();
        let ord = m2.error_order().unwrap_or(u32::MAX);
        (d, ord)
    });
    let mut pass = true;
    for (d, ord) in results {
        if ord < 2 * d - 2 {
            println!("  d={d}: transformed error order {ord} < {}", 2 * d - 2);
            pass = false;
        }
    }
    println!(
        "ACCEPTANCE 5 (degree doubling, d in 4..6, 10 instances each): {} [{:?}]",
        if pass { "PASS" } else { "FAIL" },
        t0.elapsed()
    );
    assert!(pass);
}

#[test]
fn acceptance_6_segre_compatibility() {
    let t0 = Instant::now();
    // restriction compatibility on 100 random real inputs
    let mut rng = Rng(0x6e6e_1357_2468_ace0);
    let mut bad = 0usize;
    for i in 0..100 {
        let n = 1 + (i % 2);
        let b = rng.lambda(n);
        let mut seed = rng.next();
        let p = random_real_poly(n, 3 + (i % 3) as u32, &mut seed);
        if p.is_zero() {
            continue;
        }
        let real = fischer::decompose(&p, &b).unwrap();
        let cx = decompose_c(&p.complexify(), &b).unwrap();
        if cx.a.restrict_to_real() != real.a || cx.c.restrict_to_real() != real.c {
            bad += 1;
        }
    }
    // normalize_segre on complexified inputs equals the complexified real
    // output through degree 6
    let mut pipeline_ok = true;
    for (n, seed) in [(1usize, 11u64), (2, 23), (2, 37)] {
        let b = if n == 1 {
            BishopData::new(vec![rat(1, 4)]).unwrap()
        } else {
            BishopData::new(vec![rat(1, 10), rat(3, 10)]).unwrap()
        };
        let mut s = seed;
        let mut phi = BTreeMap::new();
        phi.insert(3, random_real_poly(n, 3, &mut s));
        let m = ManifoldSeries::new(b.clone(), phi, 6).unwrap();
        let real_out = normalize(&m, 6).unwrap();
        let cm = complexify_manifold(&m);
        let seg_out = normalize_segre(&cm, 6).unwrap();
        let expect = complexify_manifold(&real_out.normal_form);
        pipeline_ok &= seg_out.normal_form.phi == expect.phi
            && seg_out.normal_form.phi_bar == expect.phi_bar;
        let (rw, rn) = segre_residuals(
            &cm,
            &seg_out.transform,
            &seg_out.normal_form.phi,
            &seg_out.normal_form.phi_bar,
            6,
        )
        .unwrap();
        pipeline_ok &= (0..=6u32).all(|d| rw.part(d).is_zero() && rn.part(d).is_zero());
    }
    let pass = bad == 0 && pipeline_ok;
    println!(
        "ACCEPTANCE 6 (Segre compatibility: 100 restriction checks + pipeline equality to degree 6): {} [{:?}]",
        if pass { "PASS" } else { "FAIL" },
        t0.elapsed()
    );
    assert!(pass);
}

#[test]
fn acceptance_7_rigidity_probe() {
    let t0 = Instant::now();
    let b = BishopData::new(vec![rat(1, 5)]).unwrap();
    let b_out = BishopData::new(vec![rat(1, 5), rat(3, 10)]).unwrap();
    let emb = ModelMap::<Exact>::standard_embedding(1, 2);
    let emb_ok = verify_model_map(&emb, &b, &b_out, 5).unwrap().is_zero(0.0);
    let real = rigidity_probe(&b, &b_out, 5, false).unwrap();
    let seg = rigidity_probe(&b, &b_out, 5, true).unwrap();
    let pass = emb_ok && real.rigid && seg.rigid;
    println!(
        "ACCEPTANCE 7 (rigidity probe N=1 -> N'=2, degree <= 5, real {:?} / segre {:?}): {} [{:?}]",
        real.nullspace_dims,
        seg.nullspace_dims,
        if pass { "PASS" } else { "FAIL" },
        t0.elapsed()
    );
    assert!(pass);
}

/// Independent evaluation of the estimate constants in u128 arithmetic.
fn constants_u128(d: u32, n: usize) -> (u128, u128, u128, u128) {
    let d = d as u128;
    let mut p2n = 1u128;
    for _ in 0..2 * n {
        p2n *= 2 * d;
    }
    let mut p8n = 1u128;
    for _ in 0..8 * n {
        p8n *= 2 * d;
    }
    let common = 1 + d * d * p2n;
    (
        324 * common,
        18 * n as u128 * common,
        6 * n as u128,
        100 * d * d * p8n,
    )
}

#[test]
fn acceptance_8_moser_arithmetic() {
    let t0 = Instant::now();
    let mut consts_ok = true;
    for n in 1..=3usize {
        for d in 3..=10u32 {
            let (a, b, dd, e) = moser::constants(d, n).unwrap();
            let (a2, b2, dd2, e2) = constants_u128(d, n);
            consts_ok &= a == BigInt::from(a2)
                && b == BigInt::from(b2)
                && dd == BigInt::from(dd2)
                && e == BigInt::from(e2);
        }
    }
    let rows = moser::radius_schedule(10_000);
    let ordering = moser::schedule_ordering_holds(&rows);
    let vanish = moser::vanishing_lemma_probe(1.0, 2.0, 1, 1, 1, 60)
        .unwrap()
        .tends_to_zero;
    let pass = consts_ok && ordering && vanish;
    println!(
        "ACCEPTANCE 8 (constants d<=10 N<=3, radius ordering n<=1e4, vanishing probe): {} [{:?}]",
        if pass { "PASS" } else { "FAIL" },
        t0.elapsed()
    );
    assert!(pass);
}

#[test]
fn acceptance_8_eps_recursion_unattainable() {
    // Faithful iteration of the stated upper-bound recursion: its linear
    // multiplier exceeds 1 for n <= 13, so no eps0 contracts within 12
    // steps. See notes/decisions.md.
    let d = moser::doubling_degrees(14);
    let v = moser::eps_recursion(1e-6, 12, 1, &d).unwrap();
    println!(
        "ACCEPTANCE 8 (eps recursion reaches < 1e-30 within 12 steps): {}",
        if v.convergent {
            "PASS"
        } else {
            "FAIL (spec defect; see decisions ledger)"
        }
    );
    assert!(
        v.convergent,
        "eps-recursion criterion is unattainable as stated; see notes/decisions.md"
    );
}
