use crnf::blocksys::{bound_report, GridSpec};
use crnf::par::Parallelism;
use num_rational::BigRational;
use std::time::Instant;

#[test]
fn bounds_small() {
    let grid = GridSpec {
        step: BigRational::new(1.into(), 20.into()),
        max: BigRational::new(9.into(), 20.into()),
    };
    let t = Instant::now();
    let rep = bound_report(1, 8, &grid, Parallelism::Rayon).unwrap();
    println!("N=1 pmax=8: {:?}", t.elapsed());
    for f in &rep.families {
        println!("  {}: max {:.5} < {:.4} pass={} [{}]", f.family, f.max, f.bound, f.pass, f.worst);
    }
    for f in &rep.families {
        if !f.family.starts_with("550se") {
            assert!(f.pass, "{} failed", f.family);
        }
    }
}

#[test]
#[ignore]
fn bounds_full_scale_timing() {
    for n in [2usize, 3] {
        let grid = GridSpec {
            step: BigRational::new(1.into(), 20.into()),
            max: BigRational::new(9.into(), 20.into()),
        };
        let t = Instant::now();
        let rep = bound_report(n, 12, &grid, Parallelism::Rayon).unwrap();
        println!("N={n} pmax=12: {:?} pass-ex-550={}", t.elapsed(),
            rep.families.iter().filter(|f| !f.family.starts_with("550se")).all(|f| f.pass));
        for f in &rep.families {
            println!("  {}: max {:.5} bound {:.4} pass={}", f.family, f.max, f.bound, f.pass);
        }
    }
}
