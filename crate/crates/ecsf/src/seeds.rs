//! Initial profile curves: the figure-eight lobe of the Whitney sphere,
//! radially perturbed variants, and circle control loops, together with the
//! Ricci positivity validation that gates flow-bound seeds.
//!
//! The closed-form reference data for the figure eight (curvature, transverse
//! curvature, arc speed and radial derivatives) lives here as well; it is the
//! independent yardstick for the discrete geometry and never feeds back into
//! the stencil computations.

use crate::curve::{ArcKind, GeometryField, ProfileCurve};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Minimum node count for seeds that are meant to be flowed.
pub const MIN_FLOW_NODES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedKind {
    Whitney,
    PerturbedWhitney,
    Circle,
}

/// Everything needed to construct and validate an initial curve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeedSpec {
    pub kind: SeedKind,
    /// Ambient complex dimension.
    pub m: u32,
    /// Segment count; a lobe stores n+1 nodes, a loop n nodes.
    pub n: usize,
    /// Circle radius.
    pub radius: f64,
    /// Radial perturbation amplitude.
    pub amplitude: f64,
    /// Radial perturbation mode.
    pub mode: u32,
    /// Optional Ricci threshold c; when set, validation additionally requires
    /// (m-1) min[(p/r)((k-p)/r)] >= c.
    pub ricci_constant: Option<f64>,
}

impl SeedSpec {
    pub fn whitney(m: u32, n: usize) -> Self {
        SeedSpec {
            kind: SeedKind::Whitney,
            m,
            n,
            radius: 1.0,
            amplitude: 0.0,
            mode: 2,
            ricci_constant: None,
        }
    }

    /// Construct the seed curve, enforcing flow-readiness (node count and,
    /// for lobes, the Ricci validation).
    pub fn build(&self) -> Result<ProfileCurve> {
        if self.n < MIN_FLOW_NODES {
            return Err(Error::InvalidCurve(format!(
                "flow seeds need at least {MIN_FLOW_NODES} segments, got {}",
                self.n
            )));
        }
        match self.kind {
            SeedKind::Whitney => {
                let curve = whitney_lobe(self.m, self.n)?;
                if let Some(c) = self.ricci_constant {
                    let report = validate_ricci_condition(&curve, c)?;
                    if !report.ok {
                        return Err(report.into_error());
                    }
                }
                Ok(curve)
            }
            SeedKind::PerturbedWhitney => {
                let curve = perturbed_whitney_lobe(self.m, self.n, self.amplitude, self.mode)?;
                if let Some(c) = self.ricci_constant {
                    let report = validate_ricci_condition(&curve, c)?;
                    if !report.ok {
                        return Err(report.into_error());
                    }
                }
                Ok(curve)
            }
            SeedKind::Circle => circle_loop(self.m, self.n, self.radius),
        }
    }
}

// ---------------------------------------------------------------------------
// Figure-eight closed forms.
//
// One lobe is z(s) = (-sin s, sin s cos s) / (1 + cos^2 s) for s in [0, pi].
// On it p = r, k = 3r and |z'(s)| = (1 + cos^2 s)^{-1/2} hold exactly.
// ---------------------------------------------------------------------------

/// Point of the figure-eight lobe at parameter s.
pub fn whitney_point(s: f64) -> Vec2 {
    let (sn, cs) = s.sin_cos();
    let d = 1.0 + cs * cs;
    Vec2::new(-sn / d, sn * cs / d)
}

/// Parametric speed |z'(s)|.
pub fn whitney_arc_speed(s: f64) -> f64 {
    let cs = s.cos();
    1.0 / (1.0 + cs * cs).sqrt()
}

/// Distance to the origin, r(s) = sin s / sqrt(1 + cos^2 s).
pub fn whitney_radial(s: f64) -> f64 {
    let (sn, cs) = s.sin_cos();
    sn / (1.0 + cs * cs).sqrt()
}

/// Unit tangent of the lobe.
pub fn whitney_tangent(s: f64) -> Vec2 {
    let cs = s.cos();
    let d = 1.0 + cs * cs;
    let scale = d.powf(1.5);
    Vec2::new(-cs * (3.0 - cs * cs) / scale, (3.0 * cs * cs - 1.0) / scale)
}

/// Planar curvature k(s) = 3 r(s).
pub fn whitney_curvature(s: f64) -> f64 {
    3.0 * whitney_radial(s)
}

/// Transverse curvature p(s) = r(s).
pub fn whitney_transverse(s: f64) -> f64 {
    whitney_radial(s)
}

/// Radial derivative in arc length, dr/dsigma = 2 cos s / (1 + cos^2 s).
pub fn whitney_grad_r(s: f64) -> f64 {
    let cs = s.cos();
    2.0 * cs / (1.0 + cs * cs)
}

/// Second radial derivative in arc length, -2 r^3.
pub fn whitney_lap_r(s: f64) -> f64 {
    let r = whitney_radial(s);
    -2.0 * r * r * r
}

// ---------------------------------------------------------------------------
// Seed constructors.
// ---------------------------------------------------------------------------

/// Figure-eight lobe sampled uniformly in the parameter s over [0, pi];
/// endpoints are placed exactly at the origin.
pub fn whitney_lobe(m: u32, n: usize) -> Result<ProfileCurve> {
    if n < 16 {
        return Err(Error::InvalidCurve(format!(
            "figure-eight lobe needs at least 16 segments, got {n}"
        )));
    }
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(Vec2::ZERO);
    for j in 1..n {
        nodes.push(whitney_point(PI * j as f64 / n as f64));
    }
    nodes.push(Vec2::ZERO);
    ProfileCurve::new(m, ArcKind::SphereLobe, nodes, 0.0)
}

/// Radially perturbed figure-eight lobe,
/// z_eps(s) = (1 + eps sin^2(s) cos(mode s)) z(s).
/// The sin^2 damping keeps the endpoints and the origin tangency intact and
/// the factor is even in s, so the point symmetry of the full profile curve
/// survives. Construction fails when the perturbation breaks the Ricci
/// positivity (strictly positive margins required).
pub fn perturbed_whitney_lobe(m: u32, n: usize, amplitude: f64, mode: u32) -> Result<ProfileCurve> {
    if amplitude < 0.0 {
        return Err(Error::InvalidCurve("amplitude must be nonnegative".into()));
    }
    if mode < 2 {
        return Err(Error::InvalidCurve("perturbation mode must be >= 2".into()));
    }
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(Vec2::ZERO);
    for j in 1..n {
        let s = PI * j as f64 / n as f64;
        let factor = 1.0 + amplitude * s.sin() * s.sin() * (mode as f64 * s).cos();
        nodes.push(whitney_point(s) * factor);
    }
    nodes.push(Vec2::ZERO);
    let curve = ProfileCurve::new(m, ArcKind::SphereLobe, nodes, 0.0)?;
    let report = validate_ricci_condition(&curve, 0.0)?;
    if !report.ok {
        return Err(report.into_error());
    }
    Ok(curve)
}

/// Counterclockwise circle of the given radius centered at the origin.
pub fn circle_loop(m: u32, n: usize, radius: f64) -> Result<ProfileCurve> {
    if radius <= 0.0 {
        return Err(Error::InvalidCurve("circle radius must be positive".into()));
    }
    let nodes = (0..n)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / n as f64;
            Vec2::new(radius * th.cos(), radius * th.sin())
        })
        .collect();
    ProfileCurve::new(m, ArcKind::ClosedLoop, nodes, 0.0)
}

/// Evaluate the ambient Whitney immersion at a unit vector x in R^{m+1}:
/// W(x0, ..., xm) = R/(1+x0^2) (x1, ..., xm; x0 x1, ..., x0 xm) + C.
/// Returns the 2m real coordinates. Restricted to the profile plane this
/// reproduces the figure-eight curve.
pub fn whitney_immersion_point(x: &[f64], radius: f64, center: Option<&[f64]>) -> Result<Vec<f64>> {
    if x.len() < 3 {
        return Err(Error::Rejected(
            "immersion input needs at least 3 components (m >= 2)".into(),
        ));
    }
    let m = x.len() - 1;
    if let Some(c) = center {
        if c.len() != 2 * m {
            return Err(Error::Rejected(format!(
                "center must have 2m = {} components, got {}",
                2 * m,
                c.len()
            )));
        }
    }
    let norm_sq: f64 = x.iter().map(|v| v * v).sum();
    if (norm_sq.sqrt() - 1.0).abs() > 1e-12 {
        return Err(Error::Rejected(format!(
            "immersion input must be a unit vector, |x| = {}",
            norm_sq.sqrt()
        )));
    }
    let x0 = x[0];
    let scale = radius / (1.0 + x0 * x0);
    let mut out = Vec::with_capacity(2 * m);
    for i in 1..=m {
        out.push(scale * x[i]);
    }
    for i in 1..=m {
        out.push(scale * x0 * x[i]);
    }
    if let Some(c) = center {
        for (o, ci) in out.iter_mut().zip(c) {
            *o += ci;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Ricci validation.
// ---------------------------------------------------------------------------

/// Outcome of the Ricci positivity check on a lobe. The Ricci bound
/// Ric >= c r^2 g is equivalent to p >= eps1 r and k - p >= eps2 r with
/// positive constants, so the validator reports the discrete ratio minima
/// (endpoint values from the analytic ratio extrapolation).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RicciReport {
    pub ok: bool,
    /// Minimum of p/r.
    pub eps1: f64,
    /// Minimum of (k-p)/r.
    pub eps2: f64,
    /// Minimum of (m-1) (p/r) ((k-p)/r); compared against the threshold.
    pub min_product: f64,
    /// Requested constant c.
    pub threshold: f64,
    /// Discretization slack applied to the threshold comparison.
    pub slack: f64,
    /// Node index of the worst product margin.
    pub worst_index: usize,
    /// min_product - threshold (negative when the threshold test fails).
    pub worst_margin: f64,
}

impl RicciReport {
    pub fn into_error(self) -> Error {
        Error::RicciViolation {
            margin: self.worst_margin.min(self.eps1.min(self.eps2)),
            index: self.worst_index,
            eps1: self.eps1,
            eps2: self.eps2,
        }
    }
}

/// Check the Ricci positivity condition on a figure-eight lobe.
///
/// `ok` requires strictly positive ratio minima and, with the discretization
/// slack `max(1e-10, C h^2)` relative, (m-1) min[(p/r)((k-p)/r)] >= c.
/// Always returns a report for lobes; loops are rejected.
pub fn validate_ricci_condition(curve: &ProfileCurve, c: f64) -> Result<RicciReport> {
    if curve.arc_kind() != ArcKind::SphereLobe {
        return Err(Error::Rejected(
            "Ricci validation applies to figure-eight lobes only".into(),
        ));
    }
    let field = curve.geometry()?;
    Ok(ricci_report(curve, &field, c))
}

pub(crate) fn ricci_report(curve: &ProfileCurve, field: &GeometryField, c: f64) -> RicciReport {
    let mf = field.m as f64;
    let mut eps1 = f64::INFINITY;
    let mut eps2 = f64::INFINITY;
    let mut min_product = f64::INFINITY;
    let mut worst_index = 0usize;
    for i in field.interior() {
        let pr = field.p[i] / field.r[i];
        let qr = (field.k[i] - field.p[i]) / field.r[i];
        eps1 = eps1.min(pr);
        eps2 = eps2.min(qr);
        let prod = (mf - 1.0) * pr * qr;
        if prod < min_product {
            min_product = prod;
            worst_index = i;
        }
    }
    if let (Some((p0, p1)), Some((q0, q1))) = (field.p_over_r_limits(), field.kp_over_r_limits()) {
        for (idx, (pr, qr)) in [(0usize, (p0, q0)), (field.len() - 1, (p1, q1))] {
            eps1 = eps1.min(pr);
            eps2 = eps2.min(qr);
            let prod = (mf - 1.0) * pr * qr;
            if prod < min_product {
                min_product = prod;
                worst_index = idx;
            }
        }
    }
    let slack = curve.identity_atol();
    let worst_margin = min_product - c;
    let ok = eps1 > 0.0 && eps2 > 0.0 && min_product >= c * (1.0 - slack) - slack;
    RicciReport {
        ok,
        eps1,
        eps2,
        min_product,
        threshold: c,
        slack,
        worst_index,
        worst_margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn lobe_endpoints_and_tip() {
        let c = whitney_lobe(2, 256).unwrap();
        let nodes = c.nodes();
        assert_eq!(nodes[0], Vec2::ZERO);
        assert_eq!(nodes[256], Vec2::ZERO);
        // s = pi/2 lands on node 128: z = (-1, 0).
        assert!((nodes[128] - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
        // s = pi/4 from the closed form.
        let q = whitney_point(PI / 4.0);
        let expect = Vec2::new(-(0.5f64).sqrt() / 1.5, 1.0 / 3.0);
        assert!((q - expect).norm() < 1e-15);
    }

    #[test]
    fn lobe_orientation_convention() {
        let c = whitney_lobe(2, 128).unwrap();
        let z1 = c.nodes()[1];
        assert!(z1.x < 0.0 && z1.y > 0.0);
    }

    #[test]
    fn lobe_matches_closed_form_geometry() {
        let n = 2048;
        let c = whitney_lobe(2, n).unwrap();
        let g = c.geometry().unwrap();
        let mut max_k_err = 0.0f64;
        let mut max_p_err = 0.0f64;
        let mut max_t_err = 0.0f64;
        for j in 1..n {
            let s = PI * j as f64 / n as f64;
            max_k_err = max_k_err.max((g.k[j] - whitney_curvature(s)).abs());
            max_p_err = max_p_err.max((g.p[j] - whitney_transverse(s)).abs());
            max_t_err = max_t_err.max((g.tangent[j] - whitney_tangent(s)).norm());
        }
        assert!(max_k_err < 5e-6, "k error {max_k_err:e}");
        assert!(max_p_err < 5e-6, "p error {max_p_err:e}");
        assert!(max_t_err < 5e-6, "tangent error {max_t_err:e}");
    }

    #[test]
    fn tip_values_match() {
        // At s = pi/2: r = 1, p = 1, k = 3, <z, nu> = 1.
        let n = 1024;
        let c = whitney_lobe(2, n).unwrap();
        let g = c.geometry().unwrap();
        let tip = n / 2;
        assert!((g.r[tip] - 1.0).abs() < 1e-12);
        assert!((g.p[tip] - 1.0).abs() < 1e-7);
        assert!((g.k[tip] - 3.0).abs() < 1e-5);
        assert!((c.nodes()[tip].dot(g.normal[tip]) - 1.0).abs() < 1e-7);
        // Endpoint curvature is pinned to zero by the point symmetry.
        assert_eq!(g.k[0], 0.0);
        assert_eq!(g.k[n], 0.0);
    }

    #[test]
    fn curvature_error_halves_quadratically() {
        let err_at = |n: usize| -> f64 {
            let c = whitney_lobe(2, n).unwrap();
            let g = c.geometry().unwrap();
            (1..n)
                .map(|j| (g.k[j] - whitney_curvature(PI * j as f64 / n as f64)).abs())
                .fold(0.0f64, f64::max)
        };
        let ratio = err_at(256) / err_at(512);
        let order = ratio.log2();
        assert!((1.6..=2.4).contains(&order), "observed order {order}");
    }

    #[test]
    fn distance_identity_residuals_small_and_converging() {
        let res_at = |n: usize| {
            let c = whitney_lobe(2, n).unwrap();
            c.geometry().unwrap().identity_residuals()
        };
        let (g4096, l4096) = res_at(4096);
        assert!(g4096 <= 1e-4, "res_grad = {g4096:e}");
        assert!(l4096 <= 1e-3, "res_lap = {l4096:e}");
        let (g1024, l1024) = res_at(1024);
        assert!(g1024 / g4096 > 8.0, "grad residual not converging");
        assert!(l1024 / l4096 > 8.0, "lap residual not converging");
    }

    #[test]
    fn endpoint_ratio_extrapolation_is_one() {
        let c = whitney_lobe(2, 1024).unwrap();
        let g = c.geometry().unwrap();
        let (c0, c1) = g.p_over_r_limits().unwrap();
        assert!((c0 - 1.0).abs() < 1e-3, "start limit {c0}");
        assert!((c1 - 1.0).abs() < 1e-3, "end limit {c1}");
        let (q0, q1) = g.kp_over_r_limits().unwrap();
        assert!((q0 - 2.0).abs() < 2e-3);
        assert!((q1 - 2.0).abs() < 2e-3);
    }

    #[test]
    fn immersion_matches_profile_plane() {
        // Unit sphere points (x0, x1, 0, ..) with x0 = -cos s, x1 = -sin s map
        // onto the lobe.
        for m in [2usize, 4] {
            for j in 1..16 {
                let s = PI * j as f64 / 16.0;
                let mut x = vec![0.0; m + 1];
                x[0] = -s.cos();
                x[1] = -s.sin();
                let w = whitney_immersion_point(&x, 1.0, None).unwrap();
                let z = whitney_point(s);
                assert!((w[0] - z.x).abs() < 1e-12);
                assert!((w[m] - z.y).abs() < 1e-12);
                for i in 1..m {
                    assert!(w[i].abs() < 1e-15 && w[m + i].abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn immersion_examples() {
        // x = (0, 1, 0, 0): equator maps to (R, 0, ...).
        let w = whitney_immersion_point(&[0.0, 1.0, 0.0, 0.0], 1.0, None).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-15);
        assert!(w[1].abs() + w[2].abs() + w[3].abs() < 1e-15);
        // x = (1, 0, 0): pole maps to the double point at the origin.
        let w = whitney_immersion_point(&[1.0, 0.0, 0.0], 2.0, None).unwrap();
        assert!(w.iter().all(|v| v.abs() < 1e-15));
        // x0 = x1 = 1/sqrt2 in the profile plane: direct formula evaluation.
        let s = (0.5f64).sqrt();
        let w = whitney_immersion_point(&[s, s, 0.0], 1.0, None).unwrap();
        assert!((w[0] - s / 1.5).abs() < 1e-15);
        assert!((w[2] - 0.5 / 1.5).abs() < 1e-15);
        // Non-unit input is rejected.
        assert!(whitney_immersion_point(&[0.5, 0.5, 0.0], 1.0, None).is_err());
    }

    #[test]
    fn ricci_validation_on_whitney() {
        for m in 2..=6u32 {
            let c = whitney_lobe(m, 256).unwrap();
            let report = validate_ricci_condition(&c, m as f64).unwrap();
            assert!(report.ok, "m = {m}: {report:?}");
            assert!((report.eps1 - 1.0).abs() < 1e-2);
            assert!((report.eps2 - 2.0).abs() < 2e-2);
        }
    }

    #[test]
    fn ricci_validation_rejects_loop() {
        let c = circle_loop(2, 128, 1.0).unwrap();
        assert!(validate_ricci_condition(&c, 1.0).is_err());
    }

    #[test]
    fn perturbed_seed_limits() {
        // Zero amplitude reproduces the plain lobe.
        let a = perturbed_whitney_lobe(2, 256, 0.0, 2).unwrap();
        let b = whitney_lobe(2, 256).unwrap();
        for (x, y) in a.nodes().iter().zip(b.nodes()) {
            assert_eq!(x, y);
        }
        // Small amplitude passes with positive margins.
        let c = perturbed_whitney_lobe(2, 512, 0.05, 2).unwrap();
        let report = validate_ricci_condition(&c, 0.0).unwrap();
        assert!(report.ok && report.eps1 > 0.0 && report.eps2 > 0.0);
        // Strong distortion violates the condition.
        let err = perturbed_whitney_lobe(2, 512, 0.8, 2);
        assert!(err.is_err(), "amplitude 0.8 must fail validation");
    }

    #[test]
    fn ricci_positive_implies_positive_eigenvalues() {
        let c = perturbed_whitney_lobe(3, 512, 0.05, 2).unwrap();
        let g = c.geometry().unwrap();
        for i in g.interior() {
            assert!(g.ric1[i] > 0.0);
            assert!(g.ric2[i] > 0.0);
        }
    }

    #[test]
    fn whitney_closed_forms_self_consistent() {
        // dr/ds = grad_r * |z'| checked by central differences.
        for &s in &[0.3, FRAC_PI_2 - 0.2, 2.0, 2.8] {
            let h = 1e-6;
            let dr_ds = (whitney_radial(s + h) - whitney_radial(s - h)) / (2.0 * h);
            assert!((dr_ds - whitney_grad_r(s) * whitney_arc_speed(s)).abs() < 1e-8);
            // Tangent is the normalized position derivative.
            let dz = (whitney_point(s + h) - whitney_point(s - h)) * (1.0 / (2.0 * h));
            assert!((dz.normalized() - whitney_tangent(s)).norm() < 1e-8);
            assert!((dz.norm() - whitney_arc_speed(s)).abs() < 1e-8);
        }
    }
}
