//! Planar vectors and the small numerical kernels shared across the crate:
//! nonuniform finite-difference stencils, circumscribed-circle curvature,
//! quadrature, local least-squares fits and boundary extrapolation.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A point or vector in the profile plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product; positive when `other` lies to the left.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    /// Rotation by -pi/2; turns a tangent into the outward normal so that
    /// {normal, tangent} is positively oriented.
    pub fn perp_cw(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        rhs * self
    }
}

pub fn unit_from_angle(theta: f64) -> Vec2 {
    let (s, c) = theta.sin_cos();
    Vec2::new(c, s)
}

/// Signed curvature of the circle through three consecutive points.
/// Positive for a left turn, exact on points sampled from a circle.
pub fn menger_curvature(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    let u = b - a;
    let v = c - b;
    let w = c - a;
    let denom = u.norm() * v.norm() * w.norm();
    if denom == 0.0 {
        0.0
    } else {
        2.0 * u.cross(v) / denom
    }
}

/// First derivative on a nonuniform three-point stencil.
/// `a` is the backward spacing, `b` the forward spacing.
pub fn deriv1_nonuniform(fm: f64, f0: f64, fp: f64, a: f64, b: f64) -> f64 {
    (a * a * fp - b * b * fm + (b * b - a * a) * f0) / (a * b * (a + b))
}

/// Second derivative on a nonuniform three-point stencil.
pub fn deriv2_nonuniform(fm: f64, f0: f64, fp: f64, a: f64, b: f64) -> f64 {
    2.0 * (b * fm - (a + b) * f0 + a * fp) / (a * b * (a + b))
}

pub fn deriv1_vec(zm: Vec2, z0: Vec2, zp: Vec2, a: f64, b: f64) -> Vec2 {
    Vec2::new(
        deriv1_nonuniform(zm.x, z0.x, zp.x, a, b),
        deriv1_nonuniform(zm.y, z0.y, zp.y, a, b),
    )
}

/// Derivative at `at` of the Lagrange interpolant through (us, ys).
/// With five points this is the fourth-order tangent stencil; the transverse
/// curvature p = <z, nu> r^-2 needs this order because <z, nu> cancels to
/// O(r^3) near the origin.
pub fn lagrange_deriv_vec(us: &[f64], ys: &[Vec2], at: f64) -> Vec2 {
    let n = us.len();
    let mut acc = Vec2::ZERO;
    for j in 0..n {
        let mut denom = 1.0;
        for l in 0..n {
            if l != j {
                denom *= us[j] - us[l];
            }
        }
        let mut num = 0.0;
        for m in 0..n {
            if m == j {
                continue;
            }
            let mut prod = 1.0;
            for l in 0..n {
                if l != j && l != m {
                    prod *= at - us[l];
                }
            }
            num += prod;
        }
        acc += ys[j] * (num / denom);
    }
    acc
}

/// Weights of the five-point first-derivative stencil evaluated at the
/// center node: f'(u2) = sum w_j f(u_j). Specialization of the Lagrange
/// derivative exploiting that (u - u_2) vanishes at the evaluation point.
pub fn deriv5_center_weights(us: &[f64; 5]) -> [f64; 5] {
    let c = us[2];
    let v = [c - us[0], c - us[1], c - us[3], c - us[4]];
    let mut w = [0.0f64; 5];
    // Off-center weights: single surviving term of the product rule.
    for &j in &[0usize, 1, 3, 4] {
        let mut num = 1.0;
        let mut denom = 1.0;
        for l in 0..5 {
            if l != j {
                denom *= us[j] - us[l];
                if l != 2 {
                    num *= c - us[l];
                }
            }
        }
        w[j] = num / denom;
    }
    w[2] = 1.0 / v[0] + 1.0 / v[1] + 1.0 / v[2] + 1.0 / v[3];
    w
}

/// Trapezoid rule of per-node values against the polyline length element.
/// For closed curves the wrap segment is included.
pub fn trapezoid(values: &[f64], nodes: &[Vec2], closed: bool) -> f64 {
    let n = nodes.len();
    let mut acc = 0.0;
    for i in 0..n - 1 {
        acc += 0.5 * (values[i] + values[i + 1]) * (nodes[i + 1] - nodes[i]).norm();
    }
    if closed {
        acc += 0.5 * (values[n - 1] + values[0]) * (nodes[0] - nodes[n - 1]).norm();
    }
    acc
}

/// Cumulative chord length along an open polyline (starts at zero).
pub fn cumulative_arclength(nodes: &[Vec2]) -> Vec<f64> {
    let mut sigma = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    sigma.push(0.0);
    for i in 1..nodes.len() {
        acc += (nodes[i] - nodes[i - 1]).norm();
        sigma.push(acc);
    }
    sigma
}

/// Evaluate at r = 0 the even-in-r interpolant through three (r, q) samples,
/// i.e. Lagrange interpolation in the variable r^2.
pub fn extrapolate_even_to_zero(r: [f64; 3], q: [f64; 3]) -> f64 {
    let x = [r[0] * r[0], r[1] * r[1], r[2] * r[2]];
    let mut acc = 0.0;
    for j in 0..3 {
        let mut weight = 1.0;
        for l in 0..3 {
            if l != j {
                weight *= x[l] / (x[l] - x[j]);
            }
        }
        acc += q[j] * weight;
    }
    acc
}

/// Least-squares fit of q = c r + d r^3. Returns `None` when the normal
/// equations are too ill-conditioned to trust.
pub fn fit_odd_cubic(r: &[f64], q: &[f64]) -> Option<(f64, f64)> {
    debug_assert_eq!(r.len(), q.len());
    let (mut s2, mut s4, mut s6, mut b1, mut b3) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&ri, &qi) in r.iter().zip(q) {
        let r2 = ri * ri;
        s2 += r2;
        s4 += r2 * r2;
        s6 += r2 * r2 * r2;
        b1 += ri * qi;
        b3 += ri * r2 * qi;
    }
    let det = s2 * s6 - s4 * s4;
    if det.abs() <= 1e-12 * s2 * s6 || !det.is_finite() {
        return None;
    }
    let c = (b1 * s6 - b3 * s4) / det;
    let d = (b3 * s2 - b1 * s4) / det;
    Some((c, d))
}

/// Solve a 3x3 linear system by Gaussian elimination with partial pivoting.
pub fn solve3(mut m: [[f64; 3]; 3], mut rhs: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let mut pivot = col;
        for row in col + 1..3 {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 3];
    for col in (0..3).rev() {
        let mut acc = rhs[col];
        for k in col + 1..3 {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
        if !x[col].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// Local least-squares quadratic fit of y(t) over samples with |t - t0| <= w.
/// Returns (value, first derivative, second derivative) at t0, or `None` when
/// fewer than six samples fall in the window.
pub fn local_quadratic_fit(ts: &[f64], ys: &[f64], t0: f64, w: f64) -> Option<(f64, f64, f64)> {
    let mut m = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    let mut count = 0usize;
    for (&t, &y) in ts.iter().zip(ys) {
        let tau = (t - t0) / w;
        if tau.abs() > 1.0 {
            continue;
        }
        let basis = [1.0, tau, tau * tau];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            rhs[i] += basis[i] * y;
        }
        count += 1;
    }
    if count < 6 {
        return None;
    }
    let sol = solve3(m, rhs)?;
    Some((sol[0], sol[1] / w, 2.0 * sol[2] / (w * w)))
}

/// Slope of the least-squares line through (x, y) samples.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// Distance from a point to the nearest segment of an open polyline.
pub fn distance_to_polyline(p: Vec2, nodes: &[Vec2]) -> f64 {
    let mut best = f64::INFINITY;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ab = b - a;
        let len_sq = ab.norm_sq();
        let t = if len_sq == 0.0 {
            0.0
        } else {
            ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0)
        };
        let d = (p - (a + ab * t)).norm();
        if d < best {
            best = d;
        }
    }
    best
}

/// splitmix64 step; used to derive deterministic parameter draws from a seed.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic draw in [0, 1) from a seed.
pub fn unit_draw(seed: u64) -> f64 {
    let mut s = seed;
    (splitmix64(&mut s) >> 11) as f64 / (1u64 << 53) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn menger_exact_on_circle() {
        let r = 3.5;
        for &th in &[0.1, 1.0, 2.5] {
            let p = |t: f64| Vec2::new(r * t.cos(), r * t.sin());
            let k = menger_curvature(p(th - 0.05), p(th), p(th + 0.07));
            assert!((k - 1.0 / r).abs() < 1e-12);
        }
    }

    #[test]
    fn stencils_exact_on_quadratics() {
        // f(x) = 2 + 3x + 5x^2 around x0 = 0.3 with uneven spacing.
        let f = |x: f64| 2.0 + 3.0 * x + 5.0 * x * x;
        let (a, b) = (0.013, 0.021);
        let x0 = 0.3;
        let d1 = deriv1_nonuniform(f(x0 - a), f(x0), f(x0 + b), a, b);
        let d2 = deriv2_nonuniform(f(x0 - a), f(x0), f(x0 + b), a, b);
        assert!((d1 - (3.0 + 10.0 * x0)).abs() < 1e-10);
        assert!((d2 - 10.0).abs() < 1e-8);
    }

    #[test]
    fn even_extrapolation_recovers_constant_plus_r2() {
        // q(r) = 1.5 - 0.7 r^2 + 0.2 r^4 evaluated at r = 0.
        let q = |r: f64| 1.5 - 0.7 * r * r + 0.2 * r.powi(4);
        let r = [0.1, 0.17, 0.26];
        let v = extrapolate_even_to_zero(r, [q(r[0]), q(r[1]), q(r[2])]);
        assert!((v - 1.5).abs() < 1e-12);
    }

    #[test]
    fn odd_cubic_fit_recovers_coefficients() {
        let r: Vec<f64> = (1..=6).map(|i| 0.03 * i as f64).collect();
        let q: Vec<f64> = r.iter().map(|&ri| 1.3 * ri - 2.0 * ri * ri * ri).collect();
        let (c, d) = fit_odd_cubic(&r, &q).unwrap();
        assert!((c - 1.3).abs() < 1e-9);
        assert!((d + 2.0).abs() < 1e-6);
    }

    #[test]
    fn quadratic_window_fit_recovers_derivatives() {
        let ts: Vec<f64> = (0..200).map(|i| 0.01 * i as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| 4.0 - 2.0 * t + 0.5 * t * t).collect();
        let (y, dy, d2y) = local_quadratic_fit(&ts, &ys, 1.0, 0.3).unwrap();
        assert!((y - 2.5).abs() < 1e-9);
        assert!((dy + 1.0).abs() < 1e-8);
        assert!((d2y - 1.0).abs() < 1e-6);
    }

    #[test]
    fn deriv5_weights_match_generic_lagrange() {
        let us = [0.0, 0.9, 2.1, 3.0, 4.2];
        let ys = [
            Vec2::new(1.0, -2.0),
            Vec2::new(0.3, 0.7),
            Vec2::new(-1.1, 0.2),
            Vec2::new(2.0, 1.0),
            Vec2::new(0.5, -0.5),
        ];
        let generic = lagrange_deriv_vec(&us, &ys, us[2]);
        let w = deriv5_center_weights(&us);
        let mut fast = Vec2::ZERO;
        for j in 0..5 {
            fast += ys[j] * w[j];
        }
        assert!((generic - fast).norm() < 1e-12);
    }

    #[test]
    fn polyline_distance_basics() {
        let nodes = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0)];
        assert!((distance_to_polyline(Vec2::new(0.5, 0.3), &nodes) - 0.3).abs() < 1e-14);
        assert!((distance_to_polyline(Vec2::new(-1.0, 0.0), &nodes) - 1.0).abs() < 1e-14);
    }
}
