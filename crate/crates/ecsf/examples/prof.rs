use ecsf::seeds;
use ecsf::flow;
use std::time::Instant;
fn main() {
    let c = seeds::whitney_lobe(2, 1024).unwrap();
    let n = 20000;
    let mut acc = 0.0;
    // Simulate the run-loop pattern: step from a curve, then geometry of result.
    let t0 = Instant::now();
    let dt = 1e-9;
    for _ in 0..n/2 {
        let s = flow::step(&c, dt).unwrap();
        let g = s.geometry().unwrap();
        acc += g.max_a();
    }
    println!("step+geom: {:.1} us", t0.elapsed().as_secs_f64()/(n/2) as f64 * 1e6);
    // Geometry alone again for comparison.
    let t0 = Instant::now();
    for _ in 0..n {
        let g = c.geometry().unwrap();
        acc += g.max_a();
    }
    println!("geometry:  {:.1} us", t0.elapsed().as_secs_f64()/n as f64 * 1e6);
    // advect-equivalent: clone nodes with arithmetic.
    let t0 = Instant::now();
    for _ in 0..n {
        let v: Vec<ecsf::Vec2> = c.nodes().iter().map(|z| *z * (1.0 + 1e-12)).collect();
        acc += v[3].x;
    }
    println!("node map:  {:.2} us", t0.elapsed().as_secs_f64()/n as f64 * 1e6);
    println!("{acc}");
}
