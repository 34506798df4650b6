//! Discrete profile curves and their pointwise differential geometry.
//!
//! A profile curve is the planar trace of a rotationally equivariant
//! Lagrangian submanifold. Two shapes occur: the lobe of a figure eight,
//! pinned at the origin at both ends, and an origin-avoiding closed loop
//! (the control case for flow tests). All geometric quantities — tangent,
//! outward normal, planar curvature k, transverse curvature p, the driving
//! term h = k + (m-1)p — are computed with centered stencils; at lobe
//! endpoints ghost nodes come from the point symmetry z(-s) = -z(s), which
//! forces k = 0 there and keeps every stencil second order.

use crate::error::{Error, Result};
use crate::geom::{
    self, deriv1_nonuniform, deriv1_vec, deriv2_nonuniform, extrapolate_even_to_zero,
    menger_curvature, Vec2,
};

/// Minimum accepted node count; coarser curves are rejected as degenerate.
pub const MIN_NODES: usize = 16;

/// Maximum allowed ratio of largest to smallest node spacing.
/// Redistribution keeps flowing curves far below this.
pub const MAX_SPACING_RATIO: f64 = 10.0;

/// Calibration constant for spacing-dependent identity tolerances,
/// `atol = max(1e-10, C h^2)`. Calibrated once on the figure-eight seed.
pub const IDENTITY_TOL_COEFF: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcKind {
    /// One lobe of a figure eight: starts and ends exactly at the origin.
    SphereLobe,
    /// Closed curve avoiding the origin; node list wraps around.
    ClosedLoop,
}

/// A discrete planar profile curve with its equivariance metadata.
#[derive(Clone, Debug)]
pub struct ProfileCurve {
    m: u32,
    arc_kind: ArcKind,
    nodes: Vec<Vec2>,
    t: f64,
}

impl ProfileCurve {
    /// Validating constructor; enforces the structural invariants of the
    /// arc kind (pinned endpoints, origin avoidance, distinct consecutive
    /// nodes, bounded spacing ratio).
    pub fn new(m: u32, arc_kind: ArcKind, nodes: Vec<Vec2>, t: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidCurve(format!(
                "ambient dimension must be at least 2, got {m}"
            )));
        }
        if nodes.len() < MIN_NODES {
            return Err(Error::InvalidCurve(format!(
                "need at least {MIN_NODES} nodes, got {}",
                nodes.len()
            )));
        }
        if nodes.iter().any(|z| !z.is_finite()) || !t.is_finite() {
            return Err(Error::InvalidCurve("non-finite node or time".into()));
        }
        match arc_kind {
            ArcKind::SphereLobe => {
                let last = nodes.len() - 1;
                if nodes[0] != Vec2::ZERO || nodes[last] != Vec2::ZERO {
                    return Err(Error::InvalidCurve(
                        "lobe endpoints must sit exactly at the origin".into(),
                    ));
                }
                if nodes[1..last].iter().any(|z| z.norm_sq() == 0.0) {
                    return Err(Error::InvalidCurve(
                        "interior lobe node at the origin".into(),
                    ));
                }
            }
            ArcKind::ClosedLoop => {
                if nodes.iter().any(|z| z.norm_sq() == 0.0) {
                    return Err(Error::InvalidCurve(
                        "closed loop passes through the origin".into(),
                    ));
                }
            }
        }
        let curve = ProfileCurve {
            m,
            arc_kind,
            nodes,
            t,
        };
        let (min_sp, max_sp) = curve.spacing_bounds()?;
        if max_sp / min_sp > MAX_SPACING_RATIO {
            return Err(Error::InvalidCurve(format!(
                "node spacing ratio {:.2} exceeds {MAX_SPACING_RATIO}",
                max_sp / min_sp
            )));
        }
        Ok(curve)
    }

    /// Internal constructor for flow intermediates that are re-checked by
    /// the geometry pass instead.
    pub(crate) fn from_parts_unchecked(
        m: u32,
        arc_kind: ArcKind,
        nodes: Vec<Vec2>,
        t: f64,
    ) -> Self {
        ProfileCurve {
            m,
            arc_kind,
            nodes,
            t,
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn arc_kind(&self) -> ArcKind {
        self.arc_kind
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_closed(&self) -> bool {
        self.arc_kind == ArcKind::ClosedLoop
    }

    pub(crate) fn set_time(&mut self, t: f64) {
        self.t = t;
    }

    /// Smallest and largest node spacing (including the wrap segment of a loop).
    pub fn spacing_bounds(&self) -> Result<(f64, f64)> {
        let mut min_sp = f64::INFINITY;
        let mut max_sp = 0.0f64;
        let n = self.nodes.len();
        let segs = if self.is_closed() { n } else { n - 1 };
        for i in 0..segs {
            let d = (self.nodes[(i + 1) % n] - self.nodes[i]).norm();
            if d == 0.0 {
                return Err(Error::DegenerateSpacing {
                    index: i,
                    spacing: d,
                });
            }
            min_sp = min_sp.min(d);
            max_sp = max_sp.max(d);
        }
        Ok((min_sp, max_sp))
    }

    /// Total polyline length (including the wrap segment of a loop).
    pub fn length(&self) -> f64 {
        let n = self.nodes.len();
        let mut acc = 0.0;
        let segs = if self.is_closed() { n } else { n - 1 };
        for i in 0..segs {
            acc += (self.nodes[(i + 1) % n] - self.nodes[i]).norm();
        }
        acc
    }

    /// Spacing-dependent absolute tolerance for analytic-identity checks on
    /// this discretization.
    pub fn identity_atol(&self) -> f64 {
        let (_, max_sp) = self.spacing_bounds().unwrap_or((1.0, 1.0));
        (IDENTITY_TOL_COEFF * max_sp * max_sp).max(1e-10)
    }

    /// Unit tangent and outward unit normal per node.
    pub fn frames(&self) -> Result<(Vec<Vec2>, Vec<Vec2>)> {
        let g = self.geometry()?;
        Ok((g.tangent, g.normal))
    }

    /// Signed planar curvature per node (zero at lobe endpoints).
    pub fn curvature(&self) -> Result<Vec<f64>> {
        Ok(self.geometry()?.k)
    }

    /// Distance to the origin and transverse curvature p per node.
    pub fn transverse(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let g = self.geometry()?;
        Ok((g.r, g.p))
    }

    /// Compute every pointwise geometric quantity.
    pub fn geometry(&self) -> Result<GeometryField> {
        GeometryField::compute(self)
    }
}

/// Per-node geometric data computed from a [`ProfileCurve`].
#[derive(Clone, Debug)]
pub struct GeometryField {
    pub m: u32,
    pub arc_kind: ArcKind,
    /// Cumulative chord length from the first node.
    pub sigma: Vec<f64>,
    pub tangent: Vec<Vec2>,
    pub normal: Vec<Vec2>,
    /// Distance to the origin (signed distance restricted to the lobe).
    pub r: Vec<f64>,
    /// Planar curvature with respect to the outward normal.
    pub k: Vec<f64>,
    /// Transverse curvature p = <z, nu> / r^2.
    pub p: Vec<f64>,
    /// Normal speed of the flow, h = k + (m-1) p.
    pub h: Vec<f64>,
    /// Squared norm of the second fundamental form, k^2 + 3(m-1) p^2.
    pub a2: Vec<f64>,
    /// Pinching defect (m-1)/(m+2) (k - 3p)^2.
    pub pinch: Vec<f64>,
    /// Ricci eigenvalue (m-1) p (k-p).
    pub ric1: Vec<f64>,
    /// Ricci eigenvalue p (k-p) + (m-2) p^2, multiplicity m-1.
    pub ric2: Vec<f64>,
    /// d r / d sigma.
    pub grad_r: Vec<f64>,
    /// d^2 r / d sigma^2 — the Laplacian entering the distance identity.
    pub lap_r: Vec<f64>,
    /// Closing chord of a loop (zero for lobes).
    pub wrap_chord: f64,
    min_spacing: f64,
    max_spacing: f64,
}

impl GeometryField {
    pub fn compute(curve: &ProfileCurve) -> Result<Self> {
        let nodes = curve.nodes();
        let n = nodes.len();
        if n < MIN_NODES {
            return Err(Error::InvalidCurve("too few nodes for geometry".into()));
        }
        let closed = curve.is_closed();
        let m = curve.m();
        let mf = m as f64;
        let last = n - 1;

        // Chord lengths once; all stencils and quadratures reuse them.
        let mut sigma = Vec::with_capacity(n);
        sigma.push(0.0);
        let mut acc = 0.0f64;
        let mut min_spacing = f64::INFINITY;
        let mut max_spacing = 0.0f64;
        for i in 1..n {
            let d = (nodes[i] - nodes[i - 1]).norm();
            if d == 0.0 {
                return Err(Error::DegenerateSpacing {
                    index: i - 1,
                    spacing: d,
                });
            }
            min_spacing = min_spacing.min(d);
            max_spacing = max_spacing.max(d);
            acc += d;
            sigma.push(acc);
        }
        let wrap_chord = if closed {
            let d = (nodes[0] - nodes[last]).norm();
            if d == 0.0 {
                return Err(Error::DegenerateSpacing {
                    index: last,
                    spacing: d,
                });
            }
            min_spacing = min_spacing.min(d);
            max_spacing = max_spacing.max(d);
            d
        } else {
            0.0
        };
        let total = sigma[last] + wrap_chord;

        // Stencil point with ghosts: point symmetry through the origin at
        // lobe endpoints, periodic wrap for loops.
        let point_at = |j: isize| -> (f64, Vec2) {
            if closed {
                let nn = n as isize;
                let wrapped = j.rem_euclid(nn) as usize;
                let shift = (j.div_euclid(nn)) as f64 * total;
                (sigma[wrapped] + shift, nodes[wrapped])
            } else if j < 0 {
                let idx = (-j) as usize;
                (-sigma[idx], -nodes[idx])
            } else if j as usize > last {
                let idx = 2 * last - j as usize;
                (2.0 * sigma[last] - sigma[idx], -nodes[idx])
            } else {
                (sigma[j as usize], nodes[j as usize])
            }
        };

        let mut tangent = Vec::with_capacity(n);
        let mut normal = Vec::with_capacity(n);
        let mut r = Vec::with_capacity(n);
        let mut k = Vec::with_capacity(n);
        let mut p = Vec::with_capacity(n);
        let mut spacing_a = Vec::with_capacity(n);
        let mut spacing_b = Vec::with_capacity(n);

        // Near the lobe tips <z, nu> cancels to O(r^3), so the normal needs
        // the fourth-order five-point stencil for the ratio p/r to converge;
        // away from the tips (and on loops) the three-point stencil is
        // second order and cheaper.
        let band = if closed { 0 } else { (n / 16).max(8).min(n / 2) };

        let mut us = [0.0f64; 5];
        let mut zs = [Vec2::ZERO; 5];
        for i in 0..n {
            let z = nodes[i];
            let (_, zm) = point_at(i as isize - 1);
            let (_, zp) = point_at(i as isize + 1);
            let a = if i == 0 { sigma[1] } else { sigma[i] - sigma[i - 1] };
            let a = if closed && i == 0 { wrap_chord } else { a };
            let b = if i == last {
                if closed {
                    wrap_chord
                } else {
                    sigma[last] - sigma[last - 1]
                }
            } else {
                sigma[i + 1] - sigma[i]
            };
            spacing_a.push(a);
            spacing_b.push(b);

            let dz = if !closed && (i < band || i + band > last) {
                for (slot, j) in (i as isize - 2..=i as isize + 2).enumerate() {
                    let (u, zz) = point_at(j);
                    us[slot] = u;
                    zs[slot] = zz;
                }
                let w = geom::deriv5_center_weights(&us);
                zs[0] * w[0] + zs[1] * w[1] + zs[2] * w[2] + zs[3] * w[3] + zs[4] * w[4]
            } else {
                geom::deriv1_vec(zm, z, zp, a, b)
            };
            let dn = dz.norm();
            if dn == 0.0 || !dn.is_finite() {
                return Err(Error::NonFinite(format!("tangent at node {i}")));
            }
            let tan = dz * (1.0 / dn);
            let nu = tan.perp_cw();
            tangent.push(tan);
            normal.push(nu);

            let ri = z.norm();
            r.push(ri);

            let endpoint = !closed && (i == 0 || i == last);
            if endpoint {
                k.push(0.0);
                p.push(0.0);
            } else {
                // Circumscribed-circle curvature with the chords reused.
                let u = z - zm;
                let v = zp - z;
                let denom = a * b * (zp - zm).norm();
                k.push(if denom == 0.0 { 0.0 } else { 2.0 * u.cross(v) / denom });
                p.push(z.dot(nu) / (ri * ri));
            }
        }

        // Signed-distance stencils; the lobe ghosts flip the sign of r.
        let mut grad_r = Vec::with_capacity(n);
        let mut lap_r = Vec::with_capacity(n);
        for i in 0..n {
            let (rm, rp) = if closed {
                (r[(i + n - 1) % n], r[(i + 1) % n])
            } else {
                let rm = if i == 0 { -r[1] } else { r[i - 1] };
                let rp = if i == last { -r[last - 1] } else { r[i + 1] };
                (rm, rp)
            };
            let (a, b) = (spacing_a[i], spacing_b[i]);
            grad_r.push(deriv1_nonuniform(rm, r[i], rp, a, b));
            lap_r.push(deriv2_nonuniform(rm, r[i], rp, a, b));
        }

        let mut h = Vec::with_capacity(n);
        let mut a2 = Vec::with_capacity(n);
        let mut pinch = Vec::with_capacity(n);
        let mut ric1 = Vec::with_capacity(n);
        let mut ric2 = Vec::with_capacity(n);
        for i in 0..n {
            let (ki, pi) = (k[i], p[i]);
            let hi = ki + (mf - 1.0) * pi;
            h.push(hi);
            a2.push(ki * ki + 3.0 * (mf - 1.0) * pi * pi);
            pinch.push((mf - 1.0) / (mf + 2.0) * (ki - 3.0 * pi) * (ki - 3.0 * pi));
            ric1.push((mf - 1.0) * pi * (ki - pi));
            ric2.push(pi * (ki - pi) + (mf - 2.0) * pi * pi);
            debug_assert!(
                (a2[i] - 3.0 / (mf + 2.0) * hi * hi - pinch[i]).abs()
                    <= 1e-10 * (1.0 + a2[i].abs()),
                "pinching identity violated at node {i}"
            );
        }

        let field = GeometryField {
            m,
            arc_kind: curve.arc_kind(),
            sigma,
            tangent,
            normal,
            r,
            k,
            p,
            h,
            a2,
            pinch,
            ric1,
            ric2,
            grad_r,
            lap_r,
            wrap_chord,
            min_spacing,
            max_spacing,
        };
        if !field.all_finite() {
            return Err(Error::NonFinite("geometry field".into()));
        }
        Ok(field)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn min_spacing(&self) -> f64 {
        self.min_spacing
    }

    pub fn max_spacing(&self) -> f64 {
        self.max_spacing
    }

    /// Total polyline length including the wrap segment of a loop.
    pub fn total_length(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0) + self.wrap_chord
    }

    /// Trapezoid quadrature of per-node values against the length element,
    /// reusing the precomputed chords.
    pub fn quadrature(&self, values: &[f64]) -> f64 {
        let n = self.len();
        let mut acc = 0.0;
        for i in 0..n - 1 {
            acc += 0.5 * (values[i] + values[i + 1]) * (self.sigma[i + 1] - self.sigma[i]);
        }
        if self.arc_kind == ArcKind::ClosedLoop {
            acc += 0.5 * (values[n - 1] + values[0]) * self.wrap_chord;
        }
        acc
    }

    pub fn all_finite(&self) -> bool {
        self.k.iter().all(|v| v.is_finite())
            && self.p.iter().all(|v| v.is_finite())
            && self.h.iter().all(|v| v.is_finite())
            && self.grad_r.iter().all(|v| v.is_finite())
            && self.lap_r.iter().all(|v| v.is_finite())
            && self.tangent.iter().all(|v| v.is_finite())
    }

    /// Largest |A| over the curve.
    pub fn max_a(&self) -> f64 {
        self.a2.iter().fold(0.0f64, |m, &v| m.max(v)).sqrt()
    }

    /// Largest |k| and its node index (smallest index wins ties).
    pub fn max_abs_k(&self) -> (f64, usize) {
        let mut best = (0.0f64, 0usize);
        for (i, &ki) in self.k.iter().enumerate() {
            if ki.abs() > best.0 {
                best = (ki.abs(), i);
            }
        }
        best
    }

    /// Index range of interior nodes (excludes pinned lobe endpoints).
    pub fn interior(&self) -> std::ops::Range<usize> {
        match self.arc_kind {
            ArcKind::SphereLobe => 1..self.len() - 1,
            ArcKind::ClosedLoop => 0..self.len(),
        }
    }

    /// Max-abs residuals of the two distance identities over interior nodes:
    /// |grad r|^2 + r^2 p^2 - 1 and lap r - r p (p - k).
    pub fn identity_residuals(&self) -> (f64, f64) {
        let mut res_grad = 0.0f64;
        let mut res_lap = 0.0f64;
        for i in self.interior() {
            let g = self.grad_r[i] * self.grad_r[i] + self.r[i] * self.r[i] * self.p[i] * self.p[i]
                - 1.0;
            let l = self.lap_r[i] - self.r[i] * self.p[i] * (self.p[i] - self.k[i]);
            res_grad = res_grad.max(g.abs());
            res_lap = res_lap.max(l.abs());
        }
        (res_grad, res_lap)
    }

    /// Even-in-r extrapolation of a per-node ratio field to r = 0 at the
    /// start of a lobe, using the three nearest interior nodes.
    fn ratio_limit_start(&self, ratio: impl Fn(usize) -> f64) -> f64 {
        extrapolate_even_to_zero(
            [self.r[1], self.r[2], self.r[3]],
            [ratio(1), ratio(2), ratio(3)],
        )
    }

    fn ratio_limit_end(&self, ratio: impl Fn(usize) -> f64) -> f64 {
        let l = self.len() - 1;
        extrapolate_even_to_zero(
            [self.r[l - 1], self.r[l - 2], self.r[l - 3]],
            [ratio(l - 1), ratio(l - 2), ratio(l - 3)],
        )
    }

    /// Endpoint limits of p/r on a lobe (analytic extension of the ratio).
    pub fn p_over_r_limits(&self) -> Option<(f64, f64)> {
        if self.arc_kind != ArcKind::SphereLobe || self.len() < 8 {
            return None;
        }
        let ratio = |i: usize| self.p[i] / self.r[i];
        Some((self.ratio_limit_start(ratio), self.ratio_limit_end(ratio)))
    }

    /// Endpoint limits of (k-p)/r on a lobe.
    pub fn kp_over_r_limits(&self) -> Option<(f64, f64)> {
        if self.arc_kind != ArcKind::SphereLobe || self.len() < 8 {
            return None;
        }
        let ratio = |i: usize| (self.k[i] - self.p[i]) / self.r[i];
        Some((self.ratio_limit_start(ratio), self.ratio_limit_end(ratio)))
    }

    /// Endpoint limits of h/r on a lobe.
    pub fn h_over_r_limits(&self) -> Option<(f64, f64)> {
        if self.arc_kind != ArcKind::SphereLobe || self.len() < 8 {
            return None;
        }
        let ratio = |i: usize| self.h[i] / self.r[i];
        Some((self.ratio_limit_start(ratio), self.ratio_limit_end(ratio)))
    }
}

/// Geometry of an open polyline window (used by blow-up frames and by the
/// rescaled flow). Interior nodes use centered stencils, the two boundary
/// nodes one-sided ones; `origin` is the reference point for r and p.
#[derive(Clone, Debug)]
pub struct WindowGeometry {
    pub sigma: Vec<f64>,
    pub tangent: Vec<Vec2>,
    pub normal: Vec<Vec2>,
    pub k: Vec<f64>,
    pub r: Vec<f64>,
    pub p: Vec<f64>,
}

impl WindowGeometry {
    pub fn compute(nodes: &[Vec2], origin: Vec2) -> Result<Self> {
        let n = nodes.len();
        if n < 3 {
            return Err(Error::Insufficient("window needs at least 3 nodes".into()));
        }
        let mut tangent = Vec::with_capacity(n);
        let mut normal = Vec::with_capacity(n);
        let mut k = Vec::with_capacity(n);
        let mut r = Vec::with_capacity(n);
        let mut p = Vec::with_capacity(n);
        for i in 0..n {
            let (im, ip) = (i.max(1) - 1, (i + 1).min(n - 1));
            let dz = if i == 0 {
                nodes[1] - nodes[0]
            } else if i == n - 1 {
                nodes[n - 1] - nodes[n - 2]
            } else {
                let a = (nodes[i] - nodes[im]).norm();
                let b = (nodes[ip] - nodes[i]).norm();
                if a == 0.0 || b == 0.0 {
                    return Err(Error::DegenerateSpacing {
                        index: i,
                        spacing: a.min(b),
                    });
                }
                deriv1_vec(nodes[im], nodes[i], nodes[ip], a, b)
            };
            let dn = dz.norm();
            if dn == 0.0 {
                return Err(Error::DegenerateSpacing {
                    index: i,
                    spacing: 0.0,
                });
            }
            let tan = dz * (1.0 / dn);
            let nu = tan.perp_cw();
            tangent.push(tan);
            normal.push(nu);

            let ki = if i == 0 {
                menger_curvature(nodes[0], nodes[1], nodes[2])
            } else if i == n - 1 {
                menger_curvature(nodes[n - 3], nodes[n - 2], nodes[n - 1])
            } else {
                menger_curvature(nodes[im], nodes[i], nodes[ip])
            };
            k.push(ki);

            let rel = nodes[i] - origin;
            let ri = rel.norm();
            r.push(ri);
            p.push(if ri == 0.0 { 0.0 } else { rel.dot(nu) / (ri * ri) });
        }
        Ok(WindowGeometry {
            sigma: geom::cumulative_arclength(nodes),
            tangent,
            normal,
            k,
            r,
            p,
        })
    }

    pub fn max_abs_k(&self) -> f64 {
        self.k.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }
}
