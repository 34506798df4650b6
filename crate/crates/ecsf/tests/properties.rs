//! Property tests over randomized curves and directions.

use ecsf::blowup::{reaper_fit, sample_grim_reaper, BlowupFrame};
use ecsf::curve::{ArcKind, ProfileCurve};
use ecsf::flow::redistribute;
use ecsf::geom::{distance_to_polyline, Vec2};
use proptest::prelude::*;

/// Smooth star-shaped loop avoiding the origin, from a few Fourier modes.
fn star_loop(m: u32, base: f64, amps: &[f64], phases: &[f64]) -> ProfileCurve {
    let n = 256;
    let nodes = (0..n)
        .map(|i| {
            let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let mut radius = base;
            for (j, (&a, &ph)) in amps.iter().zip(phases).enumerate() {
                radius += a * ((j as f64 + 2.0) * th + ph).cos();
            }
            Vec2::new(radius * th.cos(), radius * th.sin())
        })
        .collect();
    ProfileCurve::new(m, ArcKind::ClosedLoop, nodes, 0.0).expect("star loop")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The pinching identity |A|^2 - 3/(m+2) h^2 = (m-1)/(m+2)(k-3p)^2 is
    /// algebraic and must hold pointwise on any curve and dimension.
    #[test]
    fn pinching_identity_holds_pointwise(
        m in 2u32..7,
        base in 0.5f64..2.0,
        a1 in -0.1f64..0.1,
        a2 in -0.08f64..0.08,
        ph1 in 0.0f64..6.28,
        ph2 in 0.0f64..6.28,
    ) {
        let curve = star_loop(m, base, &[a1, a2], &[ph1, ph2]);
        let g = curve.geometry().unwrap();
        let mf = m as f64;
        for i in 0..g.len() {
            let lhs = g.a2[i] - 3.0 / (mf + 2.0) * g.h[i] * g.h[i];
            prop_assert!((lhs - g.pinch[i]).abs() <= 1e-10 * (1.0 + g.a2[i]));
        }
    }

    /// Redistribution flattens the spacing and stays within the quadratic
    /// geometric-change bound.
    #[test]
    fn redistribution_uniform_and_close(
        base in 0.8f64..1.5,
        a1 in -0.15f64..0.15,
        ph1 in 0.0f64..6.28,
    ) {
        let curve = star_loop(2, base, &[a1], &[ph1]);
        let even = redistribute(&curve).unwrap();
        let (min_sp, max_sp) = even.spacing_bounds().unwrap();
        prop_assert!(max_sp / min_sp <= 1.01, "ratio {}", max_sp / min_sp);
        let g = curve.geometry().unwrap();
        let max_k = g.k.iter().fold(0.0f64, |acc, k| acc.max(k.abs()));
        let (_, max_sp0) = curve.spacing_bounds().unwrap();
        let bound = (max_sp0 * max_sp0 * max_k).max(1e-12);
        let mut closed_nodes = curve.nodes().to_vec();
        closed_nodes.push(curve.nodes()[0]);
        for z in even.nodes() {
            prop_assert!(distance_to_polyline(*z, &closed_nodes) <= bound);
        }
    }

    /// Fitting a rotated grim reaper recovers the rotation; the residual and
    /// speed do not depend on the direction.
    #[test]
    fn reaper_fit_is_rotation_equivariant(theta in 0.0f64..6.2831) {
        let nodes = sample_grim_reaper(512, 1.4, theta, 1.0, Vec2::new(0.3, -0.2));
        let frame = BlowupFrame::synthetic(nodes, Vec2::new(80.0, 0.0), 2).unwrap();
        let fit = reaper_fit(&frame).unwrap();
        let mut dev = (fit.theta - theta).abs();
        if dev > std::f64::consts::PI {
            dev = 2.0 * std::f64::consts::PI - dev;
        }
        prop_assert!(dev.to_degrees() <= 0.5, "theta dev {} deg", dev.to_degrees());
        prop_assert!((fit.speed - 1.0).abs() <= 1e-3);
        prop_assert!(fit.residual <= 1e-3);
    }
}
