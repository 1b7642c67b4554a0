use crnf::multi_index::BishopData;
use crnf::normalform::random_real_poly;
use crnf::poly::quadric;
use crnf::series::{compose, Graded};
use crnf::{Exact, VarKind};
use std::time::Instant;

#[test]
fn probe_series_costs() {
    let b = BishopData::from_pairs(&[(1, 10), (3, 10)]).unwrap();
    let mut seed = 42u64;
    let mut w = Graded::from_poly(quadric::<Exact>(&b, VarKind::Conjugate), 8);
    for d in 3..=5 {
        w.add_poly(&random_real_poly(2, d, &mut seed));
    }
    let t = Instant::now();
    let w2 = w.mul(&w).unwrap();
    println!("mul w*w: {:?}", t.elapsed());
    let t = Instant::now();
    let w4 = w2.mul(&w2).unwrap();
    println!("mul w2*w2: {:?}", t.elapsed());
    let _ = w4;
    // compose a degree-5 poly with near-identity components
    let n = 2;
    let mut fz = Vec::new();
    let mut fj = Vec::new();
    for k in 0..n {
        let mut g = Graded::zero(n, VarKind::Conjugate, 8);
        g.add_poly(&crnf::normalform::z_poly(
            n,
            VarKind::Conjugate,
            &[(crnf::MultiIndex::unit(n, k), Exact::from_ints(1, 1))],
        ));
        g.add_poly(&random_real_poly(n, 4, &mut seed));
        fj.push(g.bar());
        fz.push(g);
    }
    let p = random_real_poly(n, 5, &mut seed);
    println!("compose input terms: {}", p.num_terms());
    let t = Instant::now();
    let c = compose(&p, &fz, &fj, 8).unwrap();
    println!("compose deg-5: {:?} (result degrees {:?})", t.elapsed(), c.min_degree());
}
