use crnf::multi_index::BishopData;
use crnf::normalform::*;
use std::collections::BTreeMap;
use std::time::Instant;

#[test]
fn probe_normalize_growth() {
    let b = BishopData::from_pairs(&[(1, 10), (3, 10)]).unwrap();
    let mut seed = 42u64;
    let mut phi = BTreeMap::new();
    for d in 3..=5u32 {
        phi.insert(d, random_real_poly(2, d, &mut seed));
    }
    for dmax in [5u32, 6, 7] {
        let phi_d: BTreeMap<_,_> = phi.iter().filter(|(d,_)| **d <= dmax).map(|(d,p)| (*d, p.clone())).collect();
        let m = ManifoldSeries::new(b.clone(), phi_d, dmax).unwrap();
        let t = Instant::now();
        let out = normalize(&m, dmax).unwrap();
        // measure digit sizes in the output
        let mut max_digits = 0usize;
        for (_, p) in &out.normal_form.phi {
            for (_, c) in p.terms() {
                max_digits = max_digits
                    .max(c.re.numer().to_string().len())
                    .max(c.re.denom().to_string().len());
            }
        }
        println!("dmax={dmax}: {:?}, max coeff digits {max_digits}", t.elapsed());
    }
}
