use crnf::multi_index::BishopData;
use crnf::normalform::*;
use crnf::poly::quadric;
use crnf::series::{compose, Graded};
use crnf::{Exact, VarKind};
use std::collections::BTreeMap;
use std::time::Instant;

#[test]
fn probe_residual_parts() {
    let b = BishopData::from_pairs(&[(1, 10), (3, 10)]).unwrap();
    let mut seed = 42u64;
    let mut phi = BTreeMap::new();
    for d in 3..=5u32 {
        phi.insert(d, random_real_poly(2, d, &mut seed));
    }
    let m = ManifoldSeries::new(b.clone(), phi, 6).unwrap();
    let out5 = normalize(&m, 5).unwrap();
    let t = Instant::now();
    let w = m.w_series(6);
    println!("w_series: {:?}", t.elapsed());
    let t = Instant::now();
    let g = out5.transform.g_series(&w).unwrap();
    println!("g_series: {:?}", t.elapsed());
    let t = Instant::now();
    let f = out5.transform.f_component_series(&w).unwrap();
    println!("f_series: {:?}", t.elapsed());
    let t = Instant::now();
    let fbar: Vec<Graded<Exact>> = f.iter().map(|s| s.bar()).collect();
    println!("fbar: {:?}", t.elapsed());
    let t = Instant::now();
    let q = compose(&quadric::<Exact>(&b, VarKind::Conjugate), &f, &fbar, 6).unwrap();
    println!("Q-compose: {:?}", t.elapsed());
    for (d, p) in &out5.normal_form.phi {
        let t = Instant::now();
        let c = compose(p, &f, &fbar, 6).unwrap();
        println!("phi'_{d}-compose ({} terms): {:?}", p.num_terms(), t.elapsed());
        let _ = c;
    }
    let _ = (g, q);
    // digit sizes of f
    let mut worst = 0;
    for s in &f {
        for d in 0..=6u32 {
            for (_, c) in s.part(d).terms() {
                worst = worst.max(c.re.numer().to_string().len()).max(c.re.denom().to_string().len());
            }
        }
    }
    println!("max f digits: {worst}");
}
