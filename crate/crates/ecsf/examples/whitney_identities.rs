//! Pointwise geometry of the figure-eight profile curve: the identities
//! k = 3p = 3r, the vanishing pinching defect, the Ricci eigenvalues
//! 2(m-1)r^2 and m r^2, the distance identities, and their convergence
//! under refinement. Also checks that the ambient Whitney immersion
//! restricted to the profile plane reproduces the curve.

use ecsf::geom::ls_slope;
use ecsf::seeds;
use std::f64::consts::PI;

fn main() -> ecsf::Result<()> {
    let n = 4096;
    let curve = seeds::whitney_lobe(2, n)?;
    let g = curve.geometry()?;

    let max_k = g.k.iter().cloned().fold(0.0f64, f64::max);
    let mut worst_k3p = 0.0f64;
    let mut worst_k3r = 0.0f64;
    let mut worst_pinch = 0.0f64;
    for i in 0..g.len() {
        worst_k3p = worst_k3p.max((g.k[i] - 3.0 * g.p[i]).abs());
        worst_k3r = worst_k3r.max((g.k[i] - 3.0 * g.r[i]).abs());
        worst_pinch = worst_pinch.max(g.pinch[i]);
    }
    println!("figure-eight lobe, N = {n}:");
    println!("  max k             = {max_k:.6}  (3 at the tip)");
    println!("  max |k - 3p|      = {worst_k3p:.3e}");
    println!("  max |k - 3r|      = {worst_k3r:.3e}");
    println!("  max pinching      = {worst_pinch:.3e}  (identically zero on Whitney spheres)");

    for m in [2u32, 3, 4, 5] {
        let g = seeds::whitney_lobe(m, 1024)?.geometry()?;
        let mf = m as f64;
        let mut worst = 0.0f64;
        for i in g.interior() {
            let r2 = g.r[i] * g.r[i];
            worst = worst
                .max((g.ric1[i] / (2.0 * (mf - 1.0) * r2) - 1.0).abs())
                .max((g.ric2[i] / (mf * r2) - 1.0).abs());
        }
        println!("  m = {m}: Ricci eigenvalues match (2(m-1)r^2, m r^2) to {worst:.2e}");
    }

    println!("\ndistance identities |grad r|^2 + r^2 p^2 = 1 and lap r = r p (p - k):");
    let mut logs = (Vec::new(), Vec::new(), Vec::new());
    for n in [512usize, 1024, 2048, 4096] {
        let (res_grad, res_lap) = seeds::whitney_lobe(2, n)?.geometry()?.identity_residuals();
        println!("  N = {n:5}: residuals {res_grad:.3e} / {res_lap:.3e}");
        logs.0.push((n as f64).ln());
        logs.1.push(res_grad.ln());
        logs.2.push(res_lap.ln());
    }
    println!(
        "  observed orders: {:.2} and {:.2}",
        -ls_slope(&logs.0, &logs.1),
        -ls_slope(&logs.0, &logs.2)
    );

    // The ambient immersion restricted to the profile plane.
    let mut worst = 0.0f64;
    for j in 1..64 {
        let s = PI * j as f64 / 64.0;
        let x = [-s.cos(), -s.sin(), 0.0];
        let w = seeds::whitney_immersion_point(&x, 1.0, None)?;
        let z = seeds::whitney_point(s);
        worst = worst.max((w[0] - z.x).abs().max((w[2] - z.y).abs()));
    }
    println!("\nambient immersion vs profile curve: max deviation {worst:.2e}");

    let report = seeds::validate_ricci_condition(&curve, 2.0)?;
    println!(
        "Ricci validation with c = m = 2: ok = {}, eps1 = {:.4}, eps2 = {:.4}",
        report.ok, report.eps1, report.eps2
    );
    Ok(())
}
