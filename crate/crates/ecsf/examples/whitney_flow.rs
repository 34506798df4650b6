//! Flow the figure eight until its curvature has grown 50x and check every
//! monotone and conserved quantity along the way: the minimum principles for
//! p/r and (k-p)/r, the strictly decreasing opening angle and its rate law,
//! the convex decreasing enclosed area, the conserved integral of (k-p),
//! and the radial evolution equation.

use ecsf::flow::{self, FlowConfig};
use ecsf::io;
use ecsf::monitors;
use ecsf::seeds;

fn main() -> ecsf::Result<()> {
    let seed = seeds::whitney_lobe(2, 1024)?;
    let cfg = FlowConfig {
        a_stop_factor: 50.0,
        cfl: 0.4,
        ..FlowConfig::default()
    };
    println!("running the equivariant curve shortening flow (m = 2, N = 1024) ...");
    let h = flow::run(&seed, &cfg)?;
    let s0 = &h.series[0];
    let s1 = h.series.last().unwrap();
    println!(
        "terminated: {:?} after {} steps, t = {:.6e}",
        h.termination,
        h.series.len() - 1,
        h.t_final()
    );
    println!(
        "  max|A|: {:.3} -> {:.3} ({:.1}x)",
        h.initial_max_a,
        s1.max_a,
        s1.max_a / h.initial_max_a
    );
    println!("  opening angle: {:.6} -> {:.6}", s0.phi_l, s1.phi_l);
    println!("  enclosed area: {:.6} -> {:.6}", s0.area, s1.area);
    println!(
        "  conserved integral of (k-p): {:.8} -> {:.8}",
        s0.i_kp, s1.i_kp
    );
    println!(
        "  min p/r: {:.6} -> {:.6}   min (k-p)/r: {:.6} -> {:.6}",
        s0.min_p_over_r, s1.min_p_over_r, s0.min_kp_over_r, s1.min_kp_over_r
    );
    println!();
    let report = monitors::check_history(&h);
    print!("{}", io::report_txt(&report));
    std::process::exit(if report.all_pass() { 0 } else { 1 });
}
