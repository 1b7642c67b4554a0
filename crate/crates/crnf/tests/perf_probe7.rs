use crnf::matrix::Mat;
use crnf::scalar::{Coeff, Exact};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::time::Instant;

#[test]
fn probe_bareiss_integrality() {
    // mimic a class matrix: integer-ish entries with denominator 1600
    let n = 36;
    let mut m = Mat::<Exact>::zeros(n, n);
    let mut seed = 99u64;
    let mut next = || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        (seed % 5000) as i64 - 1000
    };
    for r in 0..n {
        for c in 0..n {
            m[(r, c)] = Exact::new(
                BigRational::new(BigInt::from(next()), BigInt::from(1600)),
                BigRational::from(BigInt::from(0)),
            );
        }
        let d = m[(r, r)].clone() + Exact::from_ints(90000, 1600);
        m[(r, r)] = d;
    }
    let t = Instant::now();
    let inv = m.inverse().unwrap();
    println!("bareiss inverse 36x36: {:?}", t.elapsed());
    // digits of inverse entries
    let mut mx = 0;
    for r in 0..3 {
        for c in 0..3 {
            mx = mx.max(inv[(r, c)].re.denom().to_string().len());
        }
    }
    println!("inverse denom digits: {mx}");
    let t = Instant::now();
    let prod = m.matmul(&inv);
    println!("verify matmul: {:?} identity={}", t.elapsed(), prod == Mat::identity(n));
}
