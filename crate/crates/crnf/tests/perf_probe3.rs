use crnf::multi_index::BishopData;
use crnf::normalform::*;
use std::collections::BTreeMap;
use std::time::Instant;

#[test]
fn probe_weight_parts() {
    let b = BishopData::from_pairs(&[(1, 10), (3, 10)]).unwrap();
    let mut seed = 42u64;
    let mut phi = BTreeMap::new();
    for d in 3..=5u32 {
        phi.insert(d, random_real_poly(2, d, &mut seed));
    }
    let m = ManifoldSeries::new(b.clone(), phi, 6).unwrap();
    // normalize to 5 first, then time the pieces of weight 6
    let out5 = normalize(&m, 5).unwrap();
    let t = Instant::now();
    let resid = transform_residual(&m, &out5.transform, &out5.normal_form.phi, 6).unwrap();
    println!("residual assembly at 6: {:?}", t.elapsed());
    let k = resid.part(6);
    println!("k terms: {} max digits {}", k.num_terms(),
        k.terms().map(|(_,c)| c.re.numer().to_string().len().max(c.re.denom().to_string().len())).max().unwrap_or(0));
    let t = Instant::now();
    let kb = k.bar();
    let _step = crnf::normalform::weight_step_public(&k, &kb, 6, &b).unwrap();
    println!("weight_step at 6: {:?}", t.elapsed());
}
