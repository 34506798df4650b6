//! Integral and angular monitors of a profile curve, and the verdict checker
//! that replays a completed flow history against the quantities that are
//! provably monotone or conserved: the opening angle decreases at a rate set
//! by the tip coefficients, the enclosed area is decreasing and convex with
//! d^2A/dt^2 = -m dphi/dt, the integral of (k - p) is conserved, and the
//! ratio minima min p/r and min (k-p)/r obey minimum principles.

use crate::curve::{ArcKind, GeometryField, ProfileCurve};
use crate::error::{Error, Result};
use crate::flow::FlowHistory;
use crate::geom::{self, local_quadratic_fit};
use serde::{Deserialize, Serialize};

/// Per-step slack allowed in "strictly decreasing" verdicts, relative to the
/// initial magnitude of the series.
pub const STRICT_DECREASE_SLACK: f64 = 1e-10;

/// Tolerance on the minimum-principle verdicts, relative to the initial
/// minimum of p/r.
pub const MONOTONICITY_TOL: f64 = 5e-3;

/// Relative tolerance of the opening-angle rate identities.
pub const RATE_TOL: f64 = 0.05;

/// Relative tolerance of the area-acceleration identity.
pub const AREA_RATE_TOL: f64 = 0.10;

/// Allowed relative drift of the conserved integral (up to 20x curvature growth).
pub const DRIFT_TOL: f64 = 0.01;

/// Curvature growth horizon for the conserved-integral verdict.
pub const DRIFT_GROWTH_HORIZON: f64 = 20.0;

/// Allowed normalized residual of the radial evolution equation.
pub const RESIDUAL_TOL: f64 = 0.05;

// ---------------------------------------------------------------------------
// Pointwise-in-time monitors.
// ---------------------------------------------------------------------------

/// Opening angle: integral of p against the length element.
pub fn opening_angle(curve: &ProfileCurve) -> Result<f64> {
    let g = curve.geometry()?;
    Ok(opening_angle_from(curve, &g))
}

pub fn opening_angle_from(_curve: &ProfileCurve, field: &GeometryField) -> f64 {
    field.quadrature(&field.p)
}

/// Signed area enclosed by the curve, (1/2) integral of <z, nu>.
pub fn enclosed_area(curve: &ProfileCurve) -> Result<f64> {
    let g = curve.geometry()?;
    Ok(enclosed_area_from(curve, &g))
}

pub fn enclosed_area_from(curve: &ProfileCurve, field: &GeometryField) -> f64 {
    let vals: Vec<f64> = curve
        .nodes()
        .iter()
        .zip(&field.normal)
        .map(|(z, nu)| z.dot(*nu))
        .collect();
    0.5 * field.quadrature(&vals)
}

/// Conserved integral of (k - p) and the total turning integral of k.
pub fn conserved_integral(curve: &ProfileCurve) -> Result<(f64, f64)> {
    let g = curve.geometry()?;
    Ok(conserved_integral_from(curve, &g))
}

pub fn conserved_integral_from(_curve: &ProfileCurve, field: &GeometryField) -> (f64, f64) {
    let kp: Vec<f64> = field.k.iter().zip(&field.p).map(|(k, p)| k - p).collect();
    (field.quadrature(&kp), field.quadrature(&field.k))
}

/// Cumulative turning angle of the normal (alpha), polar angle (phi) and
/// their difference beta = phi - alpha, with cos beta = r p.
#[derive(Clone, Debug)]
pub struct AngleProfile {
    pub alpha: Vec<f64>,
    pub phi: Vec<f64>,
    pub beta: Vec<f64>,
    pub alpha0: f64,
    pub phi0: f64,
}

/// Angle profile along a lobe. `alpha0` is measured from the normal
/// direction at the origin end; `phi0 = alpha0 + pi/2` so that beta starts
/// at pi/2.
pub fn angle_profile(curve: &ProfileCurve) -> Result<AngleProfile> {
    if curve.is_closed() {
        return Err(Error::Rejected(
            "angle profile applies to figure-eight lobes only".into(),
        ));
    }
    let g = curve.geometry()?;
    let n = g.len();
    let alpha0 = g.normal[0].angle();
    let phi0 = alpha0 + std::f64::consts::FRAC_PI_2;
    let mut alpha = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    alpha.push(alpha0);
    phi.push(phi0);
    for i in 1..n {
        let ds = g.sigma[i] - g.sigma[i - 1];
        alpha.push(alpha[i - 1] + 0.5 * (g.k[i - 1] + g.k[i]) * ds);
        phi.push(phi[i - 1] + 0.5 * (g.p[i - 1] + g.p[i]) * ds);
    }
    let beta = phi.iter().zip(&alpha).map(|(f, a)| f - a).collect();
    Ok(AngleProfile {
        alpha,
        phi,
        beta,
        alpha0,
        phi0,
    })
}

/// Minima of the weighted ratios p / r^{1+alpha}, h / r^{1+alpha} and
/// (k - p) / r^{1+alpha}, with their argmin indices.
#[derive(Clone, Copy, Debug)]
pub struct RatioMinima {
    pub p_alpha: (f64, usize),
    pub h_alpha: (f64, usize),
    pub q_alpha: (f64, usize),
}

/// Ratio minima over interior nodes; for `alpha_exp = 0` the endpoint limits
/// (extrapolated analytic ratios) participate as well.
pub fn ratio_minima(curve: &ProfileCurve, alpha_exp: f64) -> Result<RatioMinima> {
    if alpha_exp < 0.0 {
        return Err(Error::Rejected("alpha exponent must be >= 0".into()));
    }
    let g = curve.geometry()?;
    Ok(ratio_minima_from(&g, alpha_exp))
}

pub fn ratio_minima_from(field: &GeometryField, alpha_exp: f64) -> RatioMinima {
    let mut p_min = (f64::INFINITY, 0usize);
    let mut h_min = (f64::INFINITY, 0usize);
    let mut q_min = (f64::INFINITY, 0usize);
    let consider = |val: f64, idx: usize, slot: &mut (f64, usize)| {
        if val < slot.0 {
            *slot = (val, idx);
        }
    };
    let weight: fn(f64, f64) -> f64 = if alpha_exp == 0.0 {
        |r, _| r
    } else if alpha_exp == 1.0 {
        |r, _| r * r
    } else {
        |r, a| r.powf(1.0 + a)
    };
    for i in field.interior() {
        let w = weight(field.r[i], alpha_exp);
        consider(field.p[i] / w, i, &mut p_min);
        consider(field.h[i] / w, i, &mut h_min);
        consider((field.k[i] - field.p[i]) / w, i, &mut q_min);
    }
    if alpha_exp == 0.0 {
        if let (Some(pl), Some(ql), Some(hl)) = (
            field.p_over_r_limits(),
            field.kp_over_r_limits(),
            field.h_over_r_limits(),
        ) {
            let last = field.len() - 1;
            consider(pl.0, 0, &mut p_min);
            consider(pl.1, last, &mut p_min);
            consider(hl.0, 0, &mut h_min);
            consider(hl.1, last, &mut h_min);
            consider(ql.0, 0, &mut q_min);
            consider(ql.1, last, &mut q_min);
        }
    }
    RatioMinima {
        p_alpha: p_min,
        h_alpha: h_min,
        q_alpha: q_min,
    }
}

/// First-order coefficients of p as an odd series in r at the two lobe tips.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TipCoefficients {
    pub c0: f64,
    pub c_pi: f64,
}

/// Least-squares fit of p = c r + d r^3 on the six interior nodes nearest
/// each endpoint. Fails when the fit is ill-conditioned.
pub fn taylor_coefficients(curve: &ProfileCurve) -> Result<TipCoefficients> {
    if curve.is_closed() {
        return Err(Error::Rejected(
            "tip coefficients apply to figure-eight lobes only".into(),
        ));
    }
    let g = curve.geometry()?;
    taylor_coefficients_from(&g).ok_or_else(|| Error::FitFailed("tip coefficient fit".into()))
}

pub fn taylor_coefficients_from(field: &GeometryField) -> Option<TipCoefficients> {
    if field.arc_kind != ArcKind::SphereLobe || field.len() < 14 {
        return None;
    }
    let n = field.len();
    let mut r = [0.0f64; 6];
    let mut p = [0.0f64; 6];
    let mut fit = |base: usize, step: isize| -> Option<f64> {
        for j in 0..6 {
            let i = (base as isize + step * j as isize) as usize;
            r[j] = field.r[i];
            p[j] = field.p[i];
        }
        geom::fit_odd_cubic(&r, &p).map(|(c, _)| c)
    };
    Some(TipCoefficients {
        c0: fit(1, 1)?,
        c_pi: fit(n - 2, -1)?,
    })
}

/// All scalar monitors recorded per accepted flow step.
#[derive(Clone, Copy, Debug)]
pub struct ScalarSample {
    pub phi_l: f64,
    pub area: f64,
    pub i_kp: f64,
    pub turning: f64,
    pub min_p_over_r: f64,
    pub min_kp_over_r: f64,
    pub c0: f64,
    pub c_pi: f64,
}

/// Fused single-pass evaluation of the per-step scalars; the flow loop calls
/// this every accepted step.
pub fn scalar_sample(curve: &ProfileCurve, field: &GeometryField) -> ScalarSample {
    let nodes = curve.nodes();
    let n = field.len();
    let node_val = |i: usize| -> (f64, f64, f64, f64) {
        let zn = nodes[i].dot(field.normal[i]);
        (
            field.p[i],
            zn,
            field.k[i] - field.p[i],
            field.k[i],
        )
    };
    let mut phi_l = 0.0;
    let mut area2 = 0.0;
    let mut i_kp = 0.0;
    let mut turning = 0.0;
    let mut prev = node_val(0);
    for i in 1..n {
        let cur = node_val(i);
        let ds = field.sigma[i] - field.sigma[i - 1];
        phi_l += 0.5 * (prev.0 + cur.0) * ds;
        area2 += 0.5 * (prev.1 + cur.1) * ds;
        i_kp += 0.5 * (prev.2 + cur.2) * ds;
        turning += 0.5 * (prev.3 + cur.3) * ds;
        prev = cur;
    }
    if curve.is_closed() {
        let first = node_val(0);
        let ds = field.wrap_chord;
        phi_l += 0.5 * (prev.0 + first.0) * ds;
        area2 += 0.5 * (prev.1 + first.1) * ds;
        i_kp += 0.5 * (prev.2 + first.2) * ds;
        turning += 0.5 * (prev.3 + first.3) * ds;
    }
    let minima = ratio_minima_from(field, 0.0);
    let tips = taylor_coefficients_from(field).unwrap_or(TipCoefficients {
        c0: f64::NAN,
        c_pi: f64::NAN,
    });
    ScalarSample {
        phi_l,
        area: 0.5 * area2,
        i_kp,
        turning,
        min_p_over_r: minima.p_alpha.0,
        min_kp_over_r: minima.q_alpha.0,
        c0: tips.c0,
        c_pi: tips.c_pi,
    }
}

// ---------------------------------------------------------------------------
// History checker.
// ---------------------------------------------------------------------------

/// One checked statement about a flow history.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub description: String,
    /// `None` means the verdict could not be evaluated (insufficient samples
    /// or not applicable to this curve kind).
    pub pass: Option<bool>,
    pub measured: f64,
    pub limit: f64,
    pub worst_t: f64,
    pub note: String,
}

impl Verdict {
    fn skipped(id: &str, description: &str, note: &str) -> Self {
        Verdict {
            id: id.into(),
            description: description.into(),
            pass: None,
            measured: f64::NAN,
            limit: f64::NAN,
            worst_t: f64::NAN,
            note: note.into(),
        }
    }
}

/// Full report over a flow history; reproducible from the history alone.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonitorReport {
    pub m: u32,
    pub arc_kind: ArcKind,
    pub samples: usize,
    pub growth_horizon: f64,
    pub verdicts: Vec<Verdict>,
}

impl MonitorReport {
    /// True when no evaluated verdict failed (skipped verdicts do not fail).
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass != Some(false))
    }

    pub fn failed(&self) -> Vec<&Verdict> {
        self.verdicts
            .iter()
            .filter(|v| v.pass == Some(false))
            .collect()
    }
}

/// Options for [`check_history_with`].
#[derive(Clone, Copy, Debug)]
pub struct MonitorOptions {
    /// Curvature growth factor up to which the lemma verdicts are evaluated.
    /// The deep blow-up tail is the business of the blow-up module; near the
    /// resolution limit the quadrature monitors lose meaning.
    pub growth_horizon: f64,
}

impl Default for MonitorOptions {
    fn default() -> Self {
        MonitorOptions {
            growth_horizon: 50.0,
        }
    }
}

pub fn check_history(history: &FlowHistory) -> MonitorReport {
    check_history_with(history, MonitorOptions::default())
}

pub fn check_history_with(history: &FlowHistory, opts: MonitorOptions) -> MonitorReport {
    let checker = Checker::new(history, opts);
    let mut verdicts = Vec::new();
    verdicts.push(checker.min_ratio_monotone());
    verdicts.push(checker.kp_ratio_bound());
    verdicts.push(checker.opening_angle_decreasing());
    verdicts.push(checker.opening_angle_initial_rate());
    verdicts.push(checker.opening_angle_rate_identity());
    verdicts.push(checker.area_decreasing());
    verdicts.push(checker.area_convex());
    verdicts.push(checker.area_acceleration_identity());
    verdicts.push(checker.conserved_integral_drift());
    verdicts.push(checker.evolution_residual());
    MonitorReport {
        m: history.m,
        arc_kind: history.arc_kind,
        samples: history.series.len(),
        growth_horizon: opts.growth_horizon,
        verdicts,
    }
}

struct Checker<'a> {
    h: &'a FlowHistory,
    /// Index one past the last sample within the growth horizon.
    horizon: usize,
    /// Time of the last in-horizon sample.
    t_h: f64,
    is_lobe: bool,
}

impl<'a> Checker<'a> {
    fn new(h: &'a FlowHistory, opts: MonitorOptions) -> Self {
        let a0 = h.initial_max_a;
        let mut horizon = h.series.len();
        let mut running = 0.0f64;
        for (i, s) in h.series.iter().enumerate() {
            running = running.max(s.max_a);
            if running > opts.growth_horizon * a0 {
                horizon = i;
                break;
            }
        }
        let horizon = horizon.max(1);
        Checker {
            h,
            horizon,
            t_h: h.series[horizon - 1].t,
            is_lobe: h.arc_kind == ArcKind::SphereLobe,
        }
    }

    fn ts(&self) -> Vec<f64> {
        self.h.series[..self.horizon].iter().map(|s| s.t).collect()
    }

    fn column(&self, f: impl Fn(&crate::flow::SeriesSample) -> f64) -> Vec<f64> {
        self.h.series[..self.horizon].iter().map(f).collect()
    }

    fn lobe_only(&self, id: &str, desc: &str) -> Option<Verdict> {
        if !self.is_lobe {
            Some(Verdict::skipped(id, desc, "figure-eight lobes only"))
        } else {
            None
        }
    }

    fn need_samples(&self, id: &str, desc: &str, n: usize) -> Option<Verdict> {
        if self.horizon < n {
            Some(Verdict::skipped(id, desc, "insufficient samples"))
        } else {
            None
        }
    }

    fn min_ratio_monotone(&self) -> Verdict {
        let id = "min_ratio_monotone";
        let desc = "min p/r non-decreasing along the flow";
        if let Some(v) = self.lobe_only(id, desc) {
            return v;
        }
        if let Some(v) = self.need_samples(id, desc, 2) {
            return v;
        }
        let vals = self.column(|s| s.min_p_over_r);
        let initial = vals[0];
        let mut running = f64::NEG_INFINITY;
        let mut worst = 0.0f64;
        let mut worst_t = 0.0;
        for (i, &v) in vals.iter().enumerate() {
            running = running.max(v);
            let drop = running - v;
            if drop > worst {
                worst = drop;
                worst_t = self.h.series[i].t;
            }
        }
        let limit = MONOTONICITY_TOL * initial;
        Verdict {
            id: id.into(),
            description: desc.into(),
            pass: Some(worst <= limit),
            measured: worst,
            limit,
            worst_t,
            note: format!("initial min p/r = {initial:.6}"),
        }
    }

    fn kp_ratio_bound(&self) -> Verdict {
        let id = "kp_ratio_bound";
        let desc = "min (k-p)/r bounded below by min(initial, initial p/r / 2)";
        if let Some(v) = self.lobe_only(id, desc) {
            return v;
        }
        if let Some(v) = self.need_samples(id, desc, 2) {
            return v;
        }
        let q0 = self.h.series[0].min_kp_over_r;
        let p0 = self.h.series[0].min_p_over_r;
        let bound = q0.min(0.5 * p0) - MONOTONICITY_TOL * p0;
        let mut measured = f64::INFINITY;
        let mut worst_t = 0.0;
        for s in &self.h.series[..self.horizon] {
            if s.min_kp_over_r < measured {
                measured = s.min_kp_over_r;
                worst_t = s.t;
            }
        }
        Verdict {
            id: id.into(),
            description: desc.into(),
            pass: Some(measured >= bound),
            measured,
            limit: bound,
            worst_t,
            note: format!("initial (k-p)/r = {q0:.6}, initial p/r = {p0:.6}"),
        }
    }

    fn opening_angle_decreasing(&self) -> Verdict {
        let id = "opening_angle_decreasing";
        let desc = "opening angle strictly decreasing";
        if let Some(v) = self.lobe_only(id, desc) {
            return v;
        }
        if let Some(v) = self.need_samples(id, desc, 2) {
            return v;
        }
        let vals = self.column(|s| s.phi_l);
        let slack = STRICT_DECREASE_SLACK * vals[0].abs().max(1.0);
        let mut worst = f64::NEG_INFINITY;
        let mut worst_t = 0.0;
        for i in 1..vals.len() {
            let rise = vals[i] - vals[i - 1];
            if rise > worst {
                worst = rise;
                worst_t = self.h.series[i].t;
            }
        }
        Verdict {
            id: id.into(),
            description: desc.into(),
            pass: Some(worst <= slack),
            measured: worst,
            limit: slack,
            worst_t,
            note: String::new(),
        }
    }

    fn opening_angle_initial_rate(&self) -> Verdict {
        let id = "opening_angle_initial_rate";
        let desc = "early d(phi)/dt <= -2(m+2) initial min p/r (within 5%)";
        if let Some(v) = self.lobe_only(id, desc) {
            return v;
        }
        if let Some(v) = self.need_samples(id, desc, 10) {
            return v;
        }
        let ts = self.ts();
        let phis = self.column(|s| s.phi_l);
        let center = 0.06 * self.t_h;
        let width = 0.05 * self.t_h;
        let m = self.h.m as f64;
        let bound = -2.0 * (m + 2.0) * self.h.series[0].min_p_over_r * (1.0 - RATE_TOL);
        match local_quadratic_fit(&ts, &phis, center, width) {
            Some((_, dphi, _)) => Verdict {
                id: id.into(),
                description: desc.into(),
                pass: Some(dphi <= bound),
                measured: dphi,
                limit: bound,
                worst_t: center,
                note: String::new(),
            },
            None => Verdict::skipped(id, desc, "insufficient samples"),
        }
    }

    fn mid_centers(&self) -> Vec<f64> {
        [0.3, 0.4, 0.5, 0.6, 0.7]
            .iter()
            .map(|f| f * self.t_h)
            .collect()
    }

    /// Linear interpolation of a series column at time t.
    fn interp(&self, t: f64, f: impl Fn(&crate::flow::SeriesSample) -> f64) -> f64 {
        let s = &self.h.series[..self.horizon];
        let idx = s.partition_point(|smp| smp.t < t);
        if idx == 0 {
            return f(&s[0]);
        }
        if idx >= s.len() {
            return f(&s[s.len() - 1]);
        }
        let (a, b) = (&s[idx - 1], &s[idx]);
        let w = if b.t > a.t { (t - a.t) / (b.t - a.t) } else { 0.0 };
        f(a) * (1.0 - w) + f(b) * w
    }

    fn opening_angle_rate_identity(&self) -> Verdict {
        let id = "opening_angle_rate_identity";
        let desc = "d(phi)/dt = -(m+2)(c0 + c_pi) mid-run (within 5%)";
        if let Some(v) = self.lobe_only(id, desc) {
            return v;
        }
        if let Some(v) = self.need_samples(id, desc, 10) {
            return v;
        }
        let ts = self.ts();
        let phis = self.column(|s| s.phi_l);
        let m = self.h.m as f64;
        let width = 0.08 * self.t_h;
        let mut worst = 0.0f64;
        let mut worst_t = f64::NAN;
        let mut evaluated = 0;
        for c in self.mid_centers() {
            if let Some((_, dphi, _)) = local_quadratic_fit(&ts, &phis, c, width) {
                let predicted =
                    -(m + 2.0) * (self.interp(c, |s| s.c0) + self.interp(c, |s| s.c_pi));
                if !predicted.is_finite() {
                    continue;
                }
                let rel = (dphi - predicted).abs() / predicted.abs().max(1e-12);
                evaluated += 1;
                if rel > worst {
                    worst = rel;
                    worst_t = c;
                }
            }
        }
        if evaluated == 0 {
            return Verdict::skipped(id, desc, "insufficient samples");
        }
        Verdict {
            id: id.into(),
            description: desc.into(),
            pass: Some(worst <= RATE_TOL),
            measured: worst,
            limit: RATE_TOL,
            worst_t,
            note: format!("checked at {evaluated} mid-run times"),
        }
    }

    fn area_decreasing(&self) -> Verdict {
        let id = "area_decreasing";
        let desc = "enclosed area decreasing";
        if let Some(v) = self.lobe_only(id, desc) {
            return v;
        }
        if let Some(v) = self.need_samples(id, desc, 10) {
            return v;
        }
        let ts = self.ts();
        let areas = self.column(|s| s.area);
        let width = 0.08 * self.t_h;
        let mut worst = f64::NEG_INFINITY;
        let mut worst_t = f64::NAN;
        for f in [0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85] {
            let c = f * self.t_h;
            if let Some((_, da, _)) = local_quadratic_fit(&ts, &areas, c, width) {
                if da > worst {
                    worst = da;
                    worst_t = c;
                }
            }
        }
        if !worst.is_finite() {
            return Verdict::skipped(id, desc, "insufficient samples");
        }
        Verdict {
            id: id.into(),
            description: desc.into(),
            pass: Some(worst < 0.0),
            measured: worst,
            limit: 0.0,
            worst_t,
            note: String::new(),
        }
    }

    fn area_convex(&self) -> Verdict {
        let id = "area_convex";
        let desc = "enclosed area convex (positive second differences)";
        if let Some(v) = self.lobe_only(id, desc) {
            return v;
        }
        if let Some(v) = self.need_samples(id, desc, 10) {
            return v;
        }
        let ts = self.ts();
        let areas = self.column(|s| s.area);
        let width = 0.08 * self.t_h;
        let mut worst = f64::INFINITY;
        let mut worst_t = f64::NAN;
        for f in [0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85] {
            let c = f * self.t_h;
            if let Some((_, _, d2a)) = local_quadratic_fit(&ts, &areas, c, width) {
                if d2a < worst {
                    worst = d2a;
                    worst_t = c;
                }
            }
        }
        if !worst.is_finite() {
            return Verdict::skipped(id, desc, "insufficient samples");
        }
        Verdict {
            id: id.into(),
            description: desc.into(),
            pass: Some(worst > 0.0),
            measured: worst,
            limit: 0.0,
            worst_t,
            note: String::new(),
        }
    }

    fn area_acceleration_identity(&self) -> Verdict {
        let id = "area_acceleration_identity";
        let desc = "d2A/dt2 = -m d(phi)/dt mid-run (within 10%)";
        if let Some(v) = self.lobe_only(id, desc) {
            return v;
        }
        if let Some(v) = self.need_samples(id, desc, 10) {
            return v;
        }
        let ts = self.ts();
        let areas = self.column(|s| s.area);
        let phis = self.column(|s| s.phi_l);
        let m = self.h.m as f64;
        let width = 0.08 * self.t_h;
        let mut worst = 0.0f64;
        let mut worst_t = f64::NAN;
        let mut evaluated = 0;
        for c in self.mid_centers() {
            let (Some((_, _, d2a)), Some((_, dphi, _))) = (
                local_quadratic_fit(&ts, &areas, c, width),
                local_quadratic_fit(&ts, &phis, c, width),
            ) else {
                continue;
            };
            let predicted = -m * dphi;
            let rel = (d2a - predicted).abs() / predicted.abs().max(1e-12);
            evaluated += 1;
            if rel > worst {
                worst = rel;
                worst_t = c;
            }
        }
        if evaluated == 0 {
            return Verdict::skipped(id, desc, "insufficient samples");
        }
        Verdict {
            id: id.into(),
            description: desc.into(),
            pass: Some(worst <= AREA_RATE_TOL),
            measured: worst,
            limit: AREA_RATE_TOL,
            worst_t,
            note: format!("checked at {evaluated} mid-run times"),
        }
    }

    fn conserved_integral_drift(&self) -> Verdict {
        let id = "conserved_integral_drift";
        let desc = "integral of (k-p) conserved (<= 1% drift up to 20x curvature growth)";
        if let Some(v) = self.need_samples(id, desc, 2) {
            return v;
        }
        let i0 = self.h.series[0].i_kp;
        let a0 = self.h.initial_max_a;
        let mut running = 0.0f64;
        let mut worst = 0.0f64;
        let mut worst_t = 0.0;
        for s in &self.h.series {
            running = running.max(s.max_a);
            if running > DRIFT_GROWTH_HORIZON * a0 {
                break;
            }
            let drift = (s.i_kp - i0).abs();
            if drift > worst {
                worst = drift;
                worst_t = s.t;
            }
        }
        let limit = (DRIFT_TOL * i0.abs()).max(1e-9 * (1.0 + i0.abs()));
        Verdict {
            id: id.into(),
            description: desc.into(),
            pass: Some(worst <= limit),
            measured: worst,
            limit,
            worst_t,
            note: format!("initial integral = {i0:.9}"),
        }
    }

    fn evolution_residual(&self) -> Verdict {
        let id = "radial_evolution_residual";
        let desc = "dr/dt matches lap r - m r p^2 (normalized residual <= 5%)";
        if let Some(v) = self.need_samples(id, desc, 10) {
            return v;
        }
        let t_cut = 0.99 * self.h.series.last().map(|s| s.t).unwrap_or(0.0);
        let mut worst = 0.0f64;
        let mut worst_t = f64::NAN;
        let mut seen = 0usize;
        for s in self.h.series[..self.horizon].iter().skip(3) {
            if s.t > t_cut {
                break;
            }
            if let Some(res) = s.evo_residual {
                seen += 1;
                if res > worst {
                    worst = res;
                    worst_t = s.t;
                }
            }
        }
        if seen == 0 {
            return Verdict::skipped(id, desc, "no residual samples");
        }
        Verdict {
            id: id.into(),
            description: desc.into(),
            pass: Some(worst <= RESIDUAL_TOL),
            measured: worst,
            limit: RESIDUAL_TOL,
            worst_t,
            note: format!("{seen} residual samples"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::{circle_loop, whitney_lobe};
    use std::f64::consts::PI;

    #[test]
    fn whitney_opening_angle_is_half_pi() {
        let c = whitney_lobe(2, 4096).unwrap();
        let phi = opening_angle(&c).unwrap();
        assert!((phi - PI / 2.0).abs() <= 1e-4, "phi = {phi}");
    }

    #[test]
    fn whitney_area_matches_shoelace_and_half() {
        let c = whitney_lobe(2, 4096).unwrap();
        let area = enclosed_area(&c).unwrap();
        // Shoelace over the polyline (lobe closes through the origin).
        let nodes = c.nodes();
        let shoelace: f64 = 0.5
            * nodes
                .windows(2)
                .map(|w| w[0].cross(w[1]))
                .sum::<f64>();
        assert!((area - shoelace).abs() <= 1e-6, "area {area}, shoelace {shoelace}");
        assert!((area - 0.5).abs() < 1e-5);
    }

    #[test]
    fn mirrored_lobe_flips_area_sign() {
        let c = whitney_lobe(2, 512).unwrap();
        let mirrored: Vec<_> = c
            .nodes()
            .iter()
            .map(|z| crate::geom::Vec2::new(z.x, -z.y))
            .collect();
        let mc =
            ProfileCurve::new(2, ArcKind::SphereLobe, mirrored, 0.0).unwrap();
        let a = enclosed_area(&c).unwrap();
        let b = enclosed_area(&mc).unwrap();
        assert!((a + b).abs() < 1e-12);
    }

    #[test]
    fn circle_area() {
        let c = circle_loop(2, 512, 2.0).unwrap();
        let area = enclosed_area(&c).unwrap();
        assert!((area - PI * 4.0).abs() < 1e-3);
    }

    #[test]
    fn whitney_conserved_integrals() {
        let c = whitney_lobe(2, 4096).unwrap();
        let (i_kp, turning) = conserved_integral(&c).unwrap();
        assert!((i_kp - PI).abs() < 1e-4, "I_kp = {i_kp}");
        assert!((turning - 1.5 * PI).abs() < 1e-4, "turning = {turning}");
    }

    #[test]
    fn whitney_angle_profile() {
        let c = whitney_lobe(2, 2048).unwrap();
        let ap = angle_profile(&c).unwrap();
        // alpha0 = pi/4, beta starts at pi/2 and decreases to -pi/2.
        assert!((ap.alpha0 - PI / 4.0).abs() < 1e-4);
        assert!((ap.beta[0] - PI / 2.0).abs() < 1e-12);
        assert!((ap.beta.last().unwrap() + PI / 2.0).abs() < 1e-3);
        // cos beta = r p along the lobe.
        let g = c.geometry().unwrap();
        let mut worst = 0.0f64;
        for i in 0..g.len() {
            worst = worst.max((ap.beta[i].cos() - g.r[i] * g.p[i]).abs());
        }
        assert!(worst <= 1e-3, "cos beta vs rp: {worst:e}");
        // beta strictly decreasing on this Ricci-positive curve.
        for w in ap.beta.windows(2) {
            assert!(w[1] < w[0]);
        }
        // alpha and phi strictly increasing.
        for w in ap.alpha.windows(2) {
            assert!(w[1] > w[0]);
        }
        for w in ap.phi.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn whitney_ratio_minima() {
        let c = whitney_lobe(2, 1024).unwrap();
        let m0 = ratio_minima(&c, 0.0).unwrap();
        assert!((m0.p_alpha.0 - 1.0).abs() < 1e-3, "min p/r = {}", m0.p_alpha.0);
        assert!((m0.q_alpha.0 - 2.0).abs() < 4e-3, "min q = {}", m0.q_alpha.0);
        assert!((m0.h_alpha.0 - 4.0).abs() < 4e-3, "min h/r = {}", m0.h_alpha.0);
        // alpha = 1: minimum strictly inside (values diverge at the tips).
        let m1 = ratio_minima(&c, 1.0).unwrap();
        let n = c.node_count();
        assert!(m1.p_alpha.1 > 2 && m1.p_alpha.1 < n - 3);
        // On the lobe p / r^2 = 1 / r, minimized at the tip r = 1.
        assert!((m1.p_alpha.0 - 1.0).abs() < 1e-3);
        assert_eq!(m1.p_alpha.1, n / 2);
    }

    #[test]
    fn whitney_tip_coefficients() {
        let c = whitney_lobe(2, 1024).unwrap();
        let tips = taylor_coefficients(&c).unwrap();
        assert!((tips.c0 - 1.0).abs() < 1e-2, "c0 = {}", tips.c0);
        assert!((tips.c_pi - 1.0).abs() < 1e-2, "c_pi = {}", tips.c_pi);
        // Scaling the lobe by lambda scales the coefficient by 1/lambda^2.
        let lambda = 2.0;
        let scaled: Vec<_> = c.nodes().iter().map(|z| *z * lambda).collect();
        let sc = ProfileCurve::new(2, ArcKind::SphereLobe, scaled, 0.0).unwrap();
        let stips = taylor_coefficients(&sc).unwrap();
        assert!(
            (stips.c0 - 1.0 / (lambda * lambda)).abs() < 1e-2,
            "scaled c0 = {}",
            stips.c0
        );
    }

    fn short_whitney_history() -> crate::flow::FlowHistory {
        let seed = whitney_lobe(2, 128).unwrap();
        let cfg = crate::flow::FlowConfig {
            a_stop_factor: 3.0,
            ..Default::default()
        };
        crate::flow::run(&seed, &cfg).unwrap()
    }

    #[test]
    fn checker_flags_injected_conservation_fault() {
        let h = short_whitney_history();
        let report = check_history(&h);
        let drift = |r: &MonitorReport| {
            r.verdicts
                .iter()
                .find(|v| v.id == "conserved_integral_drift")
                .unwrap()
                .pass
        };
        assert_eq!(drift(&report), Some(true));
        // Ramp the conserved integral by 5 percent across the run.
        let mut tampered = h.clone();
        let n = tampered.series.len() as f64;
        for (i, s) in tampered.series.iter_mut().enumerate() {
            s.i_kp *= 1.0 + 0.05 * i as f64 / n;
        }
        assert_eq!(drift(&check_history(&tampered)), Some(false));
    }

    #[test]
    fn checker_is_idempotent() {
        let h = short_whitney_history();
        let a = serde_json::to_string(&check_history(&h)).unwrap();
        let b = serde_json::to_string(&check_history(&h)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_sample_history_yields_partial_report() {
        let seed = whitney_lobe(2, 128).unwrap();
        let cfg = crate::flow::FlowConfig {
            t_max: Some(0.0),
            ..Default::default()
        };
        let h = crate::flow::run(&seed, &cfg).unwrap();
        assert_eq!(h.series.len(), 1);
        let report = check_history(&h);
        for v in &report.verdicts {
            assert_eq!(v.pass, None, "{} should be skipped", v.id);
            assert_eq!(v.note, "insufficient samples");
        }
        assert!(report.all_pass());
    }

    #[test]
    fn loop_history_skips_lobe_verdicts() {
        let seed = circle_loop(2, 96, 1.0).unwrap();
        let cfg = crate::flow::FlowConfig {
            a_stop_factor: 2.0,
            ..Default::default()
        };
        let h = crate::flow::run(&seed, &cfg).unwrap();
        let report = check_history(&h);
        for v in &report.verdicts {
            if v.id == "conserved_integral_drift" || v.id == "radial_evolution_residual" {
                assert_eq!(v.pass, Some(true), "{}: {}", v.id, v.note);
            } else {
                assert_eq!(v.pass, None, "{} should be lobe-only", v.id);
            }
        }
    }

    #[test]
    fn quadratures_converge_quadratically() {
        let exact = [PI / 2.0, 0.5, PI];
        let errs = |n: usize| -> [f64; 3] {
            let c = whitney_lobe(2, n).unwrap();
            let g = c.geometry().unwrap();
            let (i_kp, _) = conserved_integral_from(&c, &g);
            [
                (opening_angle_from(&c, &g) - exact[0]).abs(),
                (enclosed_area_from(&c, &g) - exact[1]).abs(),
                (i_kp - exact[2]).abs(),
            ]
        };
        let coarse = errs(512);
        let fine = errs(1024);
        for j in 0..3 {
            let order = (coarse[j] / fine[j]).log2();
            assert!(order >= 1.8, "monitor {j} order {order}");
        }
    }
}
