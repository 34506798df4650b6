//! Radially perturbed figure-eight seeds and the Ricci positivity gate:
//! p >= eps1 r and k - p >= eps2 r with positive margins. Small amplitudes
//! pass; strong distortion is rejected with the worst margin and location.

use ecsf::seeds::{perturbed_whitney_lobe, validate_ricci_condition};

fn main() {
    println!("radial perturbation (1 + eps sin^2(s) cos(2s)) of the figure eight, m = 2:");
    for eps in [0.0, 0.02, 0.05, 0.1, 0.2, 0.4, 0.8] {
        match perturbed_whitney_lobe(2, 512, eps, 2) {
            Ok(curve) => {
                let report = validate_ricci_condition(&curve, 0.0).expect("lobe");
                println!(
                    "  eps = {eps:4.2}: ok, eps1 = {:7.4}, eps2 = {:7.4}, min Ricci product = {:7.4}",
                    report.eps1, report.eps2, report.min_product
                );
            }
            Err(e) => println!("  eps = {eps:4.2}: rejected ({e})"),
        }
    }

    println!("\nhigher modes at eps = 0.05:");
    for mode in [2u32, 3, 4, 6] {
        match perturbed_whitney_lobe(2, 512, 0.05, mode) {
            Ok(curve) => {
                let report = validate_ricci_condition(&curve, 0.0).expect("lobe");
                println!(
                    "  mode = {mode}: ok, eps1 = {:7.4}, eps2 = {:7.4}",
                    report.eps1, report.eps2
                );
            }
            Err(e) => println!("  mode = {mode}: rejected ({e})"),
        }
    }
}
