use crnf::fischer::DecompSolver;
use crnf::multi_index::{keys_of_degree, BishopData};
use crnf::poly::quadric;
use crnf::{Exact, HomPoly, VarKind};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::time::Instant;

#[test]
fn probe_crit1_parts() {
    let b = BishopData::new(vec![
        BigRational::new(BigInt::from(7), BigInt::from(40)),
        BigRational::new(BigInt::from(13), BigInt::from(40)),
        BigRational::new(BigInt::from(17), BigInt::from(40)),
    ])
    .unwrap();
    let t = Instant::now();
    let solver = DecompSolver::<Exact>::new(&b, VarKind::Conjugate, 6).unwrap();
    println!("solver build (N=3, p=6): {:?}", t.elapsed());
    let q = quadric::<Exact>(&b, VarKind::Conjugate);
    let keys = keys_of_degree(3, 6);
    let t = Instant::now();
    let mut ds = Vec::new();
    for key in keys.iter().take(100) {
        let mono = HomPoly::monomial(3, VarKind::Conjugate, key.clone(), Exact::from_ints(1, 1));
        ds.push(solver.decompose(&mono).unwrap());
    }
    println!("100 decomposes: {:?}", t.elapsed());
    let t = Instant::now();
    for (key, d) in keys.iter().take(100).zip(&ds) {
        let mono = HomPoly::monomial(3, VarKind::Conjugate, key.clone(), Exact::from_ints(1, 1));
        let resid = mono.sub(&d.a.mul(&q).unwrap()).unwrap().sub(&d.c).unwrap();
        assert!(resid.is_zero());
        assert!(d.c.trace(&b).unwrap().is_zero());
    }
    println!("100 verifies: {:?}", t.elapsed());
}
