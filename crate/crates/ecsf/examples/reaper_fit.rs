//! Translator-fit oracle: an exactly sampled grim reaper is recognized with
//! direction, unit speed and near-zero residual; rotating it rotates the
//! fitted direction; a circle is firmly rejected.

use ecsf::blowup::{reaper_fit, sample_grim_reaper, BlowupFrame};
use ecsf::geom::{unit_from_angle, Vec2};
use std::f64::consts::PI;

fn main() -> ecsf::Result<()> {
    let offset = Vec2::new(100.0, 0.0);
    for theta_deg in [0.0f64, 30.0, 215.0] {
        let theta = theta_deg.to_radians();
        let nodes = sample_grim_reaper(1024, 1.45, theta, 1.0, Vec2::ZERO);
        let fit = reaper_fit(&BlowupFrame::synthetic(nodes, offset, 2)?)?;
        println!(
            "grim reaper at {theta_deg:5.1} deg: fitted theta {:7.3} deg, speed {:.5}, residual {:.2e}",
            fit.theta.to_degrees(),
            fit.speed,
            fit.residual
        );
    }

    // A reaper moving at speed 1/2 is twice as large, half the curvature.
    let nodes = sample_grim_reaper(1024, 1.45, 0.0, 0.5, Vec2::ZERO);
    let fit = reaper_fit(&BlowupFrame::synthetic(nodes, offset, 2)?)?;
    println!(
        "half-speed reaper: fitted speed {:.5}, residual {:.2e}",
        fit.speed, fit.residual
    );

    let circle: Vec<Vec2> = (0..512)
        .map(|i| unit_from_angle(1.9 * PI * i as f64 / 511.0))
        .collect();
    let fit = reaper_fit(&BlowupFrame::synthetic(circle, offset, 2)?)?;
    println!(
        "unit circle: residual {:.3} (a circle is not a translator)",
        fit.residual
    );
    Ok(())
}
