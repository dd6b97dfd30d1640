use symdeg::approxdeg::{min_approx_degree, DegreeQuery, VarSpace};
use symdeg::properties::PropertySpec;
use symdeg::rat::ratio;
use std::time::Instant;

fn main() {
    for (f, g, m) in [(1u16, 2u16, 3u16), (2, 2, 4)] {
        let spec = PropertySpec::claw(f, g, m);
        for eps in [ratio(1, 10), ratio(1, 3)] {
            let t0 = Instant::now();
            let mut q = DegreeQuery::new(spec.clone(), eps.clone(), VarSpace::RawXY);
            q.max_degree = 6;
            let res = min_approx_degree(&q).unwrap();
            println!(
                "claw({f},{g},{m}) eps={} raw: d_min={:?} in {:.2?}",
                eps, res.d_min, t0.elapsed()
            );
            let t0 = Instant::now();
            let mut q = DegreeQuery::new(spec.clone(), eps.clone(), VarSpace::FreqZW);
            q.max_degree = 6;
            let res = min_approx_degree(&q).unwrap();
            println!(
                "claw({f},{g},{m}) eps={} freq: d_min={:?} in {:.2?}",
                eps, res.d_min, t0.elapsed()
            );
        }
    }
    let t0 = Instant::now();
    let spec = PropertySpec::collision(4);
    let mut q = DegreeQuery::new(spec.clone(), ratio(1, 3), VarSpace::RawXY);
    q.max_degree = 6;
    let res = min_approx_degree(&q).unwrap();
    println!("collision(4) raw: d_min={:?} in {:.2?}", res.d_min, t0.elapsed());
    let mut q = DegreeQuery::new(spec, ratio(1, 3), VarSpace::FreqZW);
    q.max_degree = 6;
    let res = min_approx_degree(&q).unwrap();
    println!("collision(4) freq: d_min={:?}", res.d_min);
}
