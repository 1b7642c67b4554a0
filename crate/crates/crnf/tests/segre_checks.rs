use crnf::multi_index::BishopData;
use crnf::normalform::*;
use crnf::segre::*;
use crnf::{Exact, HomPoly, Key, MultiIndex, VarKind};
use std::collections::BTreeMap;

fn b1(num: i64, den: i64) -> BishopData {
    BishopData::from_pairs(&[(num, den)]).unwrap()
}

#[test]
fn complexified_normalization_matches_real() {
    let b = b1(3, 10);
    let mut phi = BTreeMap::new();
    // z^3 + zbar^3 plus a mixed real-valued part
    let mut p3 = HomPoly::<Exact>::zero(1, 3, VarKind::Conjugate);
    p3.add_term(Key::new(MultiIndex(vec![3]), MultiIndex(vec![0])), Exact::from_ints(1, 1));
    p3.add_term(Key::new(MultiIndex(vec![0]), MultiIndex(vec![3])), Exact::from_ints(1, 1));
    p3.add_term(Key::new(MultiIndex(vec![2]), MultiIndex(vec![1])), Exact::new(
        num_rational::BigRational::new(1.into(), 2.into()),
        num_rational::BigRational::new(1.into(), 3.into())));
    p3.add_term(Key::new(MultiIndex(vec![1]), MultiIndex(vec![2])), Exact::new(
        num_rational::BigRational::new(1.into(), 2.into()),
        num_rational::BigRational::new((-1).into(), 3.into())));
    assert!(p3.is_bar_symmetric());
    phi.insert(3, p3);
    let m = ManifoldSeries::new(b.clone(), phi, 6).unwrap();
    let real_out = normalize(&m, 6).unwrap();
    let cm = complexify_manifold(&m);
    assert!(cm.is_complexification());
    let seg_out = normalize_segre(&cm, 6).unwrap();
    // residuals of the segre equations vanish
    let (rw, rn) = segre_residuals(&cm, &seg_out.transform, &seg_out.normal_form.phi,
        &seg_out.normal_form.phi_bar, 6).unwrap();
    for d in 0..=6u32 {
        assert!(rw.part(d).is_zero(), "w residual at {d}");
        assert!(rn.part(d).is_zero(), "nu residual at {d}");
    }
    // the normal form equals the complexification of the real output
    let expect = complexify_manifold(&real_out.normal_form);
    assert_eq!(seg_out.normal_form.phi, expect.phi, "phi mismatch");
    assert_eq!(seg_out.normal_form.phi_bar, expect.phi_bar, "phi_bar mismatch");
    // the transform tables are the complexifications of the real ones
    for ((mn), p) in &real_out.transform.g {
        let sp = seg_out.transform.g.get(mn).cloned()
            .unwrap_or_else(|| HomPoly::zero(1, mn.0, VarKind::Independent));
        assert_eq!(sp, p.complexify(), "g at {:?}", mn);
    }
    assert!(seg_out.transform.satisfies_o(&b));
    assert!(seg_out.normal_form.is_complexification());
}

#[test]
fn decompose_c_restriction_matches_real() {
    let b = b1(1, 4);
    let mut p = HomPoly::<Exact>::zero(1, 4, VarKind::Conjugate);
    p.add_term(Key::new(MultiIndex(vec![3]), MultiIndex(vec![1])), Exact::from_ints(2, 3));
    p.add_term(Key::new(MultiIndex(vec![1]), MultiIndex(vec![3])), Exact::from_ints(2, 3));
    p.add_term(Key::new(MultiIndex(vec![2]), MultiIndex(vec![2])), Exact::from_ints(-1, 2));
    let real = crnf::fischer::decompose(&p, &b).unwrap();
    let cx = decompose_c(&p.complexify(), &b).unwrap();
    assert_eq!(cx.a.restrict_to_real(), real.a);
    assert_eq!(cx.c.restrict_to_real(), real.c);
    // P = Q target gives (1, 0)
    let q = crnf::quadric::<Exact>(&b, VarKind::Independent);
    let d = decompose_c(&q, &b).unwrap();
    assert!(d.c.is_zero());
    assert_eq!(d.a.num_terms(), 1);
}

#[test]
fn rigidity_probe_desk_scale() {
    // N = 1, N' = 2, lambda = 1/5, lambda' = (1/5, 3/10), degree <= 5
    let b = b1(1, 5);
    let b_out = BishopData::from_pairs(&[(1, 5), (3, 10)]).unwrap();
    let rep = rigidity_probe(&b, &b_out, 5, false).unwrap();
    println!("real: {:?}", rep.nullspace_dims);
    assert!(rep.quadratic_block_definite);
    assert!(rep.rigid, "real-mode nullspaces: {:?}", rep.nullspace_dims);
    let rep = rigidity_probe(&b, &b_out, 5, true).unwrap();
    println!("segre: {:?}", rep.nullspace_dims);
    assert!(rep.rigid, "segre-mode nullspaces: {:?}", rep.nullspace_dims);
}

#[test]
fn model_map_residuals() {
    let b = b1(1, 5);
    let b_out = BishopData::from_pairs(&[(1, 5), (3, 10)]).unwrap();
    let emb = ModelMap::<Exact>::standard_embedding(1, 2);
    let rep = verify_model_map(&emb, &b, &b_out, 6).unwrap();
    assert!(rep.is_zero(0.0), "embedding residual: {:?}", rep.per_degree);
    // embedding + nonzero F_{2,0}^{(2)} must show a degree-4 residual
    let mut pert = emb.clone();
    let mut f20 = vec![HomPoly::<Exact>::zero(1, 2, VarKind::Conjugate); 2];
    f20[1].add_term(Key::new(MultiIndex(vec![2]), MultiIndex(vec![0])), Exact::from_ints(1, 1));
    pert.f.insert((2, 0), f20);
    let rep = verify_model_map(&pert, &b, &b_out, 6).unwrap();
    assert!(!rep.is_zero(0.0));
    let deg4 = rep.per_degree.iter().find(|(d, _)| *d == 4).unwrap().1;
    assert!(deg4 > 0.0, "expected degree-4 residual, got {:?}", rep.per_degree);
}
