//! Inscribing cardioid-like curves and circles in deltoid-like curves.

use crate::curvegeo::{BoundaryMap, ComponentCensus};
use crate::par::map_range;
use crate::planecurve::{winding_number, Classification, CurveArc, PlaneCurve, PlacedMap, Similarity};
use crate::ratfun::LaurentPoly;
use crate::svg::SvgDoc;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::sync::Arc;

/// Points of the deltoid-like boundary per arc used for nearest-point seeding.
const REGION_VERTICES: usize = 128;
/// Samples of the placed curve during the sweep.
const SWEEP_SAMPLES: usize = 128;
/// Samples of the placed curve in the containment check.
pub const CHECK_SAMPLES: usize = 512;
/// Points of the `T_conc` grid in the boundary sweep.
pub const P_GRID: usize = 256;
/// Bisection steps locating the switch between the two side labels.
pub const SWITCH_STEPS: usize = 40;
/// Allowed penetration, relative to the size of `T`.
pub const PENETRATION_TOL: f64 = 1e-8;
/// Allowed tangent-direction gap at declared tangencies (radians).
pub const TANGENCY_TOL: f64 = 1e-6;
/// A side counts as touched when its gap is below this, relative to the size of `T`.
pub const CONTACT_TOL: f64 = 1e-7;
/// Template parameter grid for the two-tangent sweep.
const TEMPLATE_SCAN: usize = 32;
/// Starting offset of `q` past `p`, as a fraction of the remaining arc.
const Q_START: f64 = 0.01;
/// Polyline resolution of the template.
const TEMPLATE_VERTICES: usize = 1024;

/// Builds and classifies a closed curve from arcs.
pub fn classify_jordan_curve(arcs: Vec<CurveArc>) -> Result<PlaneCurve> {
    PlaneCurve::from_arcs(arcs)
}

fn shared(f: LaurentPoly) -> Arc<PlacedMap> {
    Arc::new(PlacedMap::new(f, Similarity::default()))
}

/// `w + w²/2`, starting at its cusp.
pub fn genuine_cardioid() -> PlaneCurve {
    let src = shared(LaurentPoly::from_terms(&[(1, C64::new(1.0, 0.0)), (2, C64::new(0.5, 0.0))]));
    PlaneCurve::from_arcs(vec![CurveArc::new(src, 0, PI, 3.0 * PI)]).expect("cardioid arcs join")
}

/// `w − 1/(2w²)`, split at its three cusps.
pub fn genuine_deltoid() -> PlaneCurve {
    let src = shared(LaurentPoly::from_terms(&[(1, C64::new(1.0, 0.0)), (-2, C64::new(-0.5, 0.0))]));
    let arcs = (0..3)
        .map(|k| {
            let a = PI / 3.0 + 2.0 * PI * k as f64 / 3.0;
            CurveArc::new(src.clone(), 0, a, a + 2.0 * PI / 3.0)
        })
        .collect();
    PlaneCurve::from_arcs(arcs).expect("deltoid arcs join")
}

/// The boundary of one face of the complement of `f(𝕋)`.
pub fn face_curve(map: &BoundaryMap, face: &ComponentCensus) -> Result<PlaneCurve> {
    let src = Arc::new(map.source());
    PlaneCurve::from_arcs(face.arcs.iter().map(|&(a, b)| CurveArc::new(src.clone(), 0, a, b)).collect())
}

/// A deltoid-like region with fast signed-distance queries.
struct Region {
    curve: PlaneCurve,
    side_of_arc: Vec<usize>,
    vertices: Vec<(C64, usize, f64)>,
    poly: Vec<C64>,
    scale: f64,
    conc: usize,
}

/// Signed distance to `T` (positive outside) with the side of the nearest point.
#[derive(Clone, Copy, Debug)]
struct Depth {
    depth: f64,
    side: usize,
    tangent: C64,
}

impl Region {
    fn new(curve: &PlaneCurve) -> Result<Region> {
        if curve.classification != Classification::DeltoidLike {
            return Err(Error::Input(format!(
                "target curve is not deltoid-like: {}",
                curve.reason.clone().unwrap_or_default()
            )));
        }
        let conc = curve.conc_side.expect("deltoid-like curves have a concave side");
        let mut side_of_arc = vec![0; curve.arcs.len()];
        for (k, side) in curve.sides.iter().enumerate() {
            for &i in side {
                side_of_arc[i] = k;
            }
        }
        let mut vertices = Vec::new();
        for (i, a) in curve.arcs.iter().enumerate() {
            for k in 0..=REGION_VERTICES {
                let s = k as f64 / REGION_VERTICES as f64;
                vertices.push((a.point(s), i, s));
            }
        }
        let poly = curve.polyline(4 * REGION_VERTICES);
        let scale = poly.iter().map(|p| p.norm()).fold(0.0, f64::max).max(
            poly.iter().map(|p| (p - poly[0]).norm()).fold(0.0, f64::max),
        );
        Ok(Region { curve: curve.clone(), side_of_arc, vertices, poly, scale, conc })
    }

    fn project(&self, arc: usize, s0: f64, y: C64) -> (f64, f64) {
        let a = &self.curve.arcs[arc];
        let mut s = s0;
        for _ in 0..30 {
            let (x, d1, d2) = a.eval(s);
            let g = (d1.conj() * (x - y)).re;
            let h = d1.norm_sqr() + (d2.conj() * (x - y)).re;
            let step = if h > 0.0 { g / h } else { g / d1.norm_sqr().max(1e-300) };
            let ns = (s - step).clamp(0.0, 1.0);
            if (ns - s).abs() < 1e-15 {
                s = ns;
                break;
            }
            s = ns;
        }
        ((a.point(s) - y).norm(), s)
    }

    fn depth(&self, y: C64) -> Depth {
        let mut best = (f64::INFINITY, 0usize);
        for (k, v) in self.vertices.iter().enumerate() {
            let d = (v.0 - y).norm_sqr();
            if d < best.0 {
                best = (d, k);
            }
        }
        let (_, arc0, s0) = self.vertices[best.1];
        let n = self.curve.arcs.len();
        let mut cands = vec![(arc0, s0)];
        if s0 == 0.0 {
            cands.push(((arc0 + n - 1) % n, 1.0));
        }
        if s0 == 1.0 {
            cands.push(((arc0 + 1) % n, 0.0));
        }
        let mut res = (f64::INFINITY, arc0, s0);
        for (arc, s) in cands {
            let (d, s) = self.project(arc, s, y);
            if d < res.0 {
                res = (d, arc, s);
            }
        }
        let (dist, arc, s) = res;
        let a = &self.curve.arcs[arc];
        let x = a.point(s);
        let tangent = a.unit_tangent(s);
        let inside = if s > 0.0 && s < 1.0 {
            (tangent.conj() * (y - x)).im > 0.0
        } else {
            winding_number(&self.poly, y) != 0
        };
        Depth { depth: if inside { -dist } else { dist }, side: self.side_of_arc[arc], tangent }
    }

    fn side_arcs(&self, side: usize) -> &[usize] {
        &self.curve.sides[side]
    }

    /// Point and unit tangent at fraction `u ∈ [0, 1]` along a side.
    fn side_point(&self, side: usize, u: f64) -> (C64, C64) {
        let arcs = self.side_arcs(side);
        let x = u.clamp(0.0, 1.0) * arcs.len() as f64;
        let i = (x.floor() as usize).min(arcs.len() - 1);
        let a = &self.curve.arcs[arcs[i]];
        let s = x - i as f64;
        (a.point(s), a.unit_tangent(s))
    }

    /// The two sides other than `T_conc`: the one ending at `p_L`, then the one starting at `p_R`.
    fn other_sides(&self) -> (usize, usize) {
        let m = self.curve.sides.len();
        ((self.conc + m - 1) % m, (self.conc + 1) % m)
    }
}

/// A cardioid-like template with its parametrisation starting at the cusp.
pub struct CardioidTemplate {
    curve: PlaneCurve,
    order: Vec<usize>,
    poly: Vec<(C64, f64)>,
    ring: Vec<C64>,
    size: f64,
}

impl CardioidTemplate {
    pub fn new(curve: &PlaneCurve) -> Result<Self> {
        if curve.classification != Classification::CardioidLike {
            return Err(Error::Input(format!(
                "template is not cardioid-like: {}",
                curve.reason.clone().unwrap_or_default()
            )));
        }
        let n = curve.arcs.len();
        let start = curve.cusps[0].0;
        let order: Vec<usize> = (0..n).map(|k| (start + k) % n).collect();
        let mut t = CardioidTemplate { curve: curve.clone(), order, poly: Vec::new(), ring: Vec::new(), size: 0.0 };
        t.poly = (0..=TEMPLATE_VERTICES)
            .map(|k| {
                let s = k as f64 / TEMPLATE_VERTICES as f64;
                (t.point(s), s)
            })
            .collect();
        t.ring = t.poly[..TEMPLATE_VERTICES].iter().map(|p| p.0).collect();
        t.size = t.ring.iter().map(|z| z.norm()).fold(1e-300, f64::max);
        Ok(t)
    }

    pub fn curve(&self) -> &PlaneCurve {
        &self.curve
    }

    fn locate(&self, s: f64) -> (&CurveArc, f64) {
        let n = self.order.len();
        let x = s.clamp(0.0, 1.0) * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        (&self.curve.arcs[self.order[i]], x - i as f64)
    }

    pub fn point(&self, s: f64) -> C64 {
        let (a, u) = self.locate(s);
        a.point(u)
    }

    pub fn tangent(&self, s: f64) -> C64 {
        let (a, u) = self.locate(s);
        a.unit_tangent(u)
    }

    /// Samples at `n` interior template parameters.
    fn samples(&self, n: usize) -> Vec<(C64, f64)> {
        (0..n).map(|k| {
            let s = (k as f64 + 0.5) / n as f64;
            (self.point(s), s)
        }).collect()
    }

    /// First crossing of the ray from `C(s_p)` along `e`, before `s_p` in parameter,
    /// with the chord outside the template.
    fn first_hit(&self, s_p: f64, e: C64) -> Option<f64> {
        let p = self.point(s_p);
        let cross = |x: C64| (e.conj() * (x - p)).im;
        let mut best: Option<(f64, usize)> = None;
        let tiny = 1e-9 * self.size;
        let last = ((s_p * TEMPLATE_VERTICES as f64).ceil() as usize).min(TEMPLATE_VERTICES);
        for k in 0..last {
            let (a, b) = (self.poly[k].0, self.poly[k + 1].0);
            let (ca, cb) = (cross(a), cross(b));
            if (ca > 0.0) == (cb > 0.0) {
                continue;
            }
            let w = ca / (ca - cb);
            let x = a + (b - a) * w;
            let lam = (e.conj() * (x - p)).re;
            if lam > tiny && best.is_none_or(|bb| lam < bb.0) {
                best = Some((lam, k));
            }
        }
        let (_, k) = best?;
        let (s0, s1) = (self.poly[k].1, self.poly[k + 1].1);
        if s1 > s_p - 1e-9 {
            return None;
        }
        // The ray leaves P towards the outside, so the chord up to the first hit is outside.
        regula_falsi(|s| cross(self.point(s)), s0, s1)
    }
}

/// Root of `f` in a sign-changing bracket (Illinois variant of regula falsi).
fn regula_falsi<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> Option<f64> {
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if (fa > 0.0) == (fb > 0.0) {
        return None;
    }
    let mut side = 0;
    for _ in 0..60 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() < 1e-15 {
            return Some(c);
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if fa.abs().min(fb.abs()) < 1e-16 {
            break;
        }
    }
    Some(if fa.abs() < fb.abs() { a } else { b })
}

fn wrap(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Result of the two-tangent placement.
#[derive(Clone, Copy, Debug)]
pub struct TwoTangent {
    pub transform: Similarity,
    pub s_p: f64,
    pub s_q: f64,
    /// Tangent-direction gaps at `p` and `q`.
    pub angle_gaps: [f64; 2],
}

/// Places the template tangent to an arc at `p` and `q` (in that order along the
/// arc), with the cusp between them facing the arc.
pub fn two_tangent_cardioid(tpl: &CardioidTemplate, p: C64, tp: C64, q: C64, tq: C64) -> Result<TwoTangent> {
    let chord = q - p;
    if chord.norm() <= 1e-14 * (p.norm() + q.norm()).max(1e-300) {
        return Err(Error::Input("degenerate pair: p = q".into()));
    }
    let v = chord / chord.norm();
    let theta0 = (tp / v).arg();
    let theta1 = -(tq / v).arg();
    if !(theta0 > 0.0 && theta1 > 0.0 && theta0 + theta1 < PI) {
        return Err(Error::Infeasible(format!(
            "tangent angles ({theta0:.6}, {theta1:.6}) do not describe a concave arc"
        )));
    }
    let rot = C64::from_polar(1.0, -theta0);
    let g = |s_p: f64| -> Option<(f64, f64)> {
        let e = tpl.tangent(s_p) * rot;
        let s_q = tpl.first_hit(s_p, e)?;
        Some((wrap((tpl.tangent(s_q) / e).arg() + theta1), s_q))
    };
    // Sweep the contact point P away from the cusp; θ_Q decreases monotonically.
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    let mut last_theta_q = f64::INFINITY;
    for k in 1..TEMPLATE_SCAN {
        let s_p = 1.0 - k as f64 / TEMPLATE_SCAN as f64;
        let Some((gv, _)) = g(s_p) else {
            if prev.is_some() {
                break;
            }
            continue;
        };
        let theta_q = theta1 - gv;
        if theta_q > last_theta_q + 1e-9 {
            return Err(Error::Invariant(format!(
                "two-tangent angle is not monotone at template parameter {s_p:.6}; \
                 uniqueness is only established for the genuine cardioid"
            )));
        }
        last_theta_q = theta_q;
        if let Some((ps, pg)) = prev {
            if pg < 0.0 && gv >= 0.0 {
                bracket = Some((s_p, ps));
                break;
            }
        }
        prev = Some((s_p, gv));
    }
    let (s_p, s_q) = match bracket {
        Some((lo, hi)) => {
            let (a, b) = crate::numerics::bisect_pred(lo, hi, 10, |s| g(s).is_none_or(|(gv, _)| gv >= 0.0));
            let s_p = 0.5 * (a + b);
            let (_, s_q) = g(s_p).or_else(|| g(b)).ok_or_else(|| Error::Infeasible("lost the second intersection".into()))?;
            polish_pair(tpl, s_p, s_q, theta0, theta1).unwrap_or((s_p, s_q))
        }
        None => {
            // The solution sits at the fold where the chord grazes the far lobe; the
            // sweep loses it there, so solve both angle conditions jointly from the edge.
            let (ps, pg) = prev.ok_or_else(|| Error::Infeasible("no second intersection for any template point".into()))?;
            if pg >= 0.0 {
                return Err(Error::Infeasible("two-tangent angle range exhausted near the cusp".into()));
            }
            let step = 1.0 / TEMPLATE_SCAN as f64;
            let (_, b) = crate::numerics::bisect_pred(ps - step, ps, 12, |s| g(s).is_none());
            let (_, s_q) = g(b).ok_or_else(|| Error::Infeasible("two-tangent angle range exhausted".into()))?;
            polish_pair(tpl, b, s_q, theta0, theta1)
                .ok_or_else(|| Error::Infeasible("two-tangent angle range exhausted".into()))?
        }
    };
    let (pp, qq) = (tpl.point(s_p), tpl.point(s_q));
    let lin = chord / (qq - pp);
    let transform = Similarity::from_affine(lin, p - lin * pp);
    let lin_unit = lin / lin.norm();
    let angle_gaps = [
        wrap((tpl.tangent(s_p) * lin_unit / tp).arg()).abs(),
        wrap((tpl.tangent(s_q) * lin_unit / tq).arg()).abs(),
    ];
    Ok(TwoTangent { transform, s_p, s_q, angle_gaps })
}

/// Newton on both angle conditions in `(s_P, s_Q)`.
fn polish_pair(tpl: &CardioidTemplate, mut a: f64, mut b: f64, theta0: f64, theta1: f64) -> Option<(f64, f64)> {
    let f = |a: f64, b: f64| -> [f64; 2] {
        let u = tpl.point(b) - tpl.point(a);
        [wrap((tpl.tangent(a) / u).arg() - theta0), wrap((tpl.tangent(b) / u).arg() + theta1)]
    };
    let h = 1e-7;
    let mut fv = f(a, b);
    for _ in 0..50 {
        let norm = fv[0].abs() + fv[1].abs();
        if norm < 1e-14 {
            break;
        }
        let (fa1, fa0) = (f(a + h, b), f(a - h, b));
        let (fb1, fb0) = (f(a, b + h), f(a, b - h));
        let j = [
            [(fa1[0] - fa0[0]) / (2.0 * h), (fb1[0] - fb0[0]) / (2.0 * h)],
            [(fa1[1] - fa0[1]) / (2.0 * h), (fb1[1] - fb0[1]) / (2.0 * h)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let da = (fv[0] * j[1][1] - fv[1] * j[0][1]) / det;
        let db = (j[0][0] * fv[1] - j[1][0] * fv[0]) / det;
        let mut t = 1.0;
        loop {
            let (na, nb) = (a - t * da, b - t * db);
            if na < 1.0 && nb > 0.0 && nb < na {
                let nf = f(na, nb);
                if nf[0].abs() + nf[1].abs() < norm {
                    a = na;
                    b = nb;
                    fv = nf;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-6 {
                return None;
            }
        }
    }
    if fv[0].abs() + fv[1].abs() > 1e-10 {
        return None;
    }
    // The chord must run outside the template.
    let (pa, pb) = (tpl.point(a), tpl.point(b));
    let outside = (1..8).all(|k| winding_number(&tpl.ring, pa + (pb - pa) * (k as f64 / 8.0)) == 0);
    outside.then_some((a, b))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InscribedShape {
    Cardioid,
    Circle,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideContact {
    pub side: usize,
    pub point: C64,
    pub gap: f64,
    pub angle_gap: f64,
}

/// One point of the traced boundary of `Z_out`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub p: f64,
    pub q: f64,
    pub side: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InscriptionResult {
    pub shape: InscribedShape,
    pub transform: Similarity,
    /// Tangency points on `T_conc`.
    pub tangency_points: Vec<C64>,
    pub tangency_angle_gaps: Vec<f64>,
    pub third_side_contacts: Vec<SideContact>,
    /// Contacts per side of `T`, indexed like the sides of `T`.
    pub contact_count_per_side: Vec<usize>,
    pub conc_side: usize,
    /// Largest signed distance of the placed curve outside `T`.
    pub penetration: f64,
    pub scale: f64,
    /// Changes of the touched-side label along the sweep.
    pub label_changes: usize,
    pub sweep: Vec<SweepSample>,
}

impl InscriptionResult {
    pub fn total_contacts(&self) -> usize {
        self.contact_count_per_side.iter().sum()
    }

    pub fn to_json(&self) -> Value {
        let c = |z: C64| json!([z.re, z.im]);
        json!({
            "shape": self.shape,
            "transform": {
                "rotation": self.transform.rotation,
                "scale": self.transform.scale,
                "translation": c(self.transform.translation),
            },
            "tangencyPoints": self.tangency_points.iter().map(|z| c(*z)).collect::<Vec<_>>(),
            "tangencyAngleGaps": self.tangency_angle_gaps,
            "thirdSideContacts": self.third_side_contacts.iter().map(|s| json!({
                "side": s.side, "point": c(s.point), "gap": s.gap, "angleGap": s.angle_gap
            })).collect::<Vec<_>>(),
            "contactCountPerSide": self.contact_count_per_side,
            "concSide": self.conc_side,
            "penetration": self.penetration,
            "labelChanges": self.label_changes,
        })
    }

    pub fn to_svg(&self, target: &PlaneCurve, placed: &[C64], manifest: &str) -> String {
        let mut doc = SvgDoc::new();
        doc.set_manifest(manifest);
        doc.path(&target.polyline(256), true, "black", "#dde8f4", "target");
        doc.path(placed, true, "#b03030", "none", "inscribed");
        let r = 0.01 * self.scale;
        for p in &self.tangency_points {
            doc.marker(*p, r, "#207020", "tangency");
        }
        for s in &self.third_side_contacts {
            doc.marker(s.point, r, "#2040c0", &format!("contact side {}", s.side));
        }
        doc.render()
    }
}

/// Per-side maximum depth of a placed point set, with its location.
fn side_depths(region: &Region, pts: &[C64]) -> Vec<(f64, usize)> {
    let m = region.curve.sides.len();
    let mut best = vec![(f64::NEG_INFINITY, 0usize); m];
    for (k, y) in pts.iter().enumerate() {
        let d = region.depth(*y);
        if d.depth > best[d.side].0 {
            best[d.side] = (d.depth, k);
        }
    }
    best
}

/// Maximises the depth of `point(s)` for `s` near `s0` by golden-section search.
fn refine_max<F: Fn(f64) -> f64>(f: F, s0: f64, h: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (s0 - h, s0 + h);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-15 {
            break;
        }
    }
    let s = 0.5 * (a + b);
    (f(s), s)
}

/// Cardioid placement for a pair of `T_conc` fractions and its per-side depths.
struct Placement {
    two: TwoTangent,
    depths: Vec<(f64, usize)>,
}

fn place(region: &Region, tpl: &CardioidTemplate, samples: &[(C64, f64)], p: f64, q: f64) -> Result<Placement> {
    let (pp, tp) = region.side_point(region.conc, p);
    let (qq, tq) = region.side_point(region.conc, q);
    let two = two_tangent_cardioid(tpl, pp, tp, qq, tq)?;
    let pts: Vec<C64> = samples.iter().map(|(z, _)| two.transform.apply(*z)).collect();
    Ok(Placement { two, depths: side_depths(region, &pts) })
}

fn max_depth(depths: &[(f64, usize)]) -> f64 {
    depths.iter().map(|d| d.0).fold(f64::NEG_INFINITY, f64::max)
}

/// The largest `q ∈ (p, 1)` with the placed cardioid inside `T` (coarse samples),
/// and the side closest to being touched there.
fn boundary_q(region: &Region, tpl: &CardioidTemplate, samples: &[(C64, f64)], p: f64, steps: usize) -> Result<(f64, usize)> {
    let eps = region.scale * 1e-13;
    let outside = |q: f64| match place(region, tpl, samples, p, q) {
        Ok(pl) => max_depth(&pl.depths) > eps,
        Err(_) => true,
    };
    if !outside(1.0) {
        return Err(Error::Infeasible(format!("cardioid tangent at p = {p:.6} and p_R stays inside")));
    }
    let lo0 = inside_start(p, &outside)
        .ok_or_else(|| Error::Infeasible(format!("smallest cardioid at p = {p:.6} is already outside")))?;
    let (lo, _) = crate::numerics::bisect_pred(lo0, 1.0, steps, |q| !outside(q));
    let pl = place(region, tpl, samples, p, lo)?;
    let (s1, s2) = region.other_sides();
    let side = if pl.depths[s1].0 >= pl.depths[s2].0 { s1 } else { s2 };
    Ok((lo, side))
}

/// A `q` just past `p` whose placement is inside, shrinking the offset as needed.
fn inside_start<F: Fn(f64) -> bool>(p: f64, outside: &F) -> Option<f64> {
    let mut off = Q_START;
    while off >= Q_START * 1e-4 {
        let q = p + off * (1.0 - p);
        if !outside(q) {
            return Some(q);
        }
        off *= 0.5;
    }
    None
}

fn count_changes(labels: &[usize]) -> usize {
    labels.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Inscribes a cardioid-like curve in a deltoid-like curve touching all three sides,
/// tangent to `T_conc` twice.
pub fn inscribe_cardioid(target: &PlaneCurve, template: &PlaneCurve) -> Result<InscriptionResult> {
    let region = Region::new(target)?;
    let tpl = CardioidTemplate::new(template)?;
    let coarse = tpl.samples(SWEEP_SAMPLES);
    let fine = tpl.samples(CHECK_SAMPLES);
    let (s1, s2) = region.other_sides();
    let grid: Vec<Result<(f64, f64, usize)>> = map_range(P_GRID, |k| {
        let p = (k as f64 + 0.5) / P_GRID as f64;
        boundary_q(&region, &tpl, &coarse, p, 24).map(|(q, side)| (p, q, side))
    });
    let sweep: Vec<SweepSample> =
        grid.iter().filter_map(|r| r.as_ref().ok()).map(|&(p, q, side)| SweepSample { p, q, side }).collect();
    if sweep.len() < 2 {
        return Err(Error::Infeasible("boundary sweep produced no usable points".into()));
    }
    let labels: Vec<usize> = sweep.iter().map(|s| s.side).collect();
    let label_changes = count_changes(&labels);
    let k = labels
        .windows(2)
        .position(|w| w[0] == s1 && w[1] == s2)
        .ok_or_else(|| Error::Infeasible(format!("no switch from side {s1} to side {s2} along the sweep")))?;
    // Boundary point of `Z_out` above `p` with refined per-side gaps.
    let refined = |p: f64| -> Result<(f64, Vec<f64>)> {
        let outside = |q: f64| -> bool {
            match place(&region, &tpl, &coarse, p, q) {
                Ok(pl) => refined_side_depths(&region, &tpl, &pl, &coarse).iter().cloned().fold(f64::NEG_INFINITY, f64::max) > 0.0,
                Err(_) => true,
            }
        };
        let q0 = inside_start(p, &outside)
            .ok_or_else(|| Error::Infeasible(format!("smallest cardioid at p = {p:.6} is already outside")))?;
        let (q_in, _) = crate::numerics::bisect_pred(q0, 1.0, 60, |q| !outside(q));
        let pl = place(&region, &tpl, &coarse, p, q_in)?;
        Ok((q_in, refined_side_depths(&region, &tpl, &pl, &coarse)))
    };
    let (mut a, mut b) = (sweep[k].p, sweep[k + 1].p);
    for _ in 0..SWITCH_STEPS {
        let m = 0.5 * (a + b);
        let (_, d) = refined(m)?;
        if d[s1] >= d[s2] {
            a = m;
        } else {
            b = m;
        }
    }
    let p = 0.5 * (a + b);
    let (q_in, _) = refined(p)?;
    let pl = place(&region, &tpl, &fine, p, q_in)?;
    let placed: Vec<C64> = fine.iter().map(|(z, _)| pl.two.transform.apply(*z)).collect();
    let (pp, _) = region.side_point(region.conc, p);
    let (qq, _) = region.side_point(region.conc, q_in);
    let contacts = collect_contacts(&region, |s| pl.two.transform.apply(tpl.point(s)), |s| pl.two.transform.apply_vec(tpl.tangent(s)), &fine);
    let penetration = refined_side_depths(&region, &tpl, &pl, &fine).into_iter().fold(max_depth(&side_depths(&region, &placed)), f64::max);
    let mut counts = vec![0usize; region.curve.sides.len()];
    counts[region.conc] += 2;
    for c in &contacts {
        counts[c.side] += 1;
    }
    Ok(InscriptionResult {
        shape: InscribedShape::Cardioid,
        transform: pl.two.transform,
        tangency_points: vec![pp, qq],
        tangency_angle_gaps: pl.two.angle_gaps.to_vec(),
        third_side_contacts: contacts,
        contact_count_per_side: counts,
        conc_side: region.conc,
        penetration,
        scale: region.scale,
        label_changes,
        sweep,
    })
}

/// Per-side maximum depth, refined on the continuous template parameter
/// (`T_conc` is reported unrefined).
fn refined_side_depths(region: &Region, tpl: &CardioidTemplate, pl: &Placement, samples: &[(C64, f64)]) -> Vec<f64> {
    let h = 1.0 / samples.len() as f64;
    pl.depths
        .iter()
        .enumerate()
        .map(|(side, &(d, k))| {
            if side == region.conc || !d.is_finite() {
                return d;
            }
            let f = |s: f64| {
                let dd = region.depth(pl.two.transform.apply(tpl.point(s)));
                if dd.side == side { dd.depth } else { f64::NEG_INFINITY }
            };
            let s0 = samples[k.min(samples.len() - 1)].1;
            refine_max(f, s0, h).0.max(d)
        })
        .collect()
}

/// Near-contacts of a placed curve with the two sides other than `T_conc`.
fn collect_contacts<P: Fn(f64) -> C64, T: Fn(f64) -> C64>(region: &Region, point: P, tangent: T, samples: &[(C64, f64)]) -> Vec<SideContact> {
    let (s1, s2) = region.other_sides();
    let h = 1.0 / samples.len() as f64;
    let mut out = Vec::new();
    for side in [s1, s2] {
        let mut best = (f64::NEG_INFINITY, 0.5);
        for (_, s) in samples {
            let d = region.depth(point(*s));
            if d.side == side && d.depth > best.0 {
                best = (d.depth, *s);
            }
        }
        if !best.0.is_finite() {
            continue;
        }
        let f = |s: f64| {
            let d = region.depth(point(s));
            if d.side == side { d.depth } else { f64::NEG_INFINITY }
        };
        let (gap, s) = refine_max(f, best.1, h);
        if gap >= -CONTACT_TOL * region.scale {
            let y = point(s);
            let d = region.depth(y);
            let tc = tangent(s);
            let angle_gap = wrap((tc / tc.norm() / d.tangent).arg()).abs();
            out.push(SideContact { side, point: y, gap: -gap, angle_gap });
        }
    }
    out
}

/// Inscribes a circle touching `T_conc` and both other sides.
pub fn inscribe_circle(target: &PlaneCurve) -> Result<InscriptionResult> {
    let region = Region::new(target)?;
    let (s1, s2) = region.other_sides();
    // Smallest radius of a circle tangent at p (on the inner side) through a point of `side`.
    let min_radius = |side: usize, p: f64| -> (f64, f64) {
        let (x0, t0) = region.side_point(region.conc, p);
        let nrm = t0 * C64::new(0.0, 1.0);
        let r_at = |u: f64| {
            let x = region.side_point(side, u).0;
            let w = x - x0;
            let along = (nrm.conj() * w).re;
            if along <= 0.0 {
                f64::INFINITY
            } else {
                w.norm_sqr() / (2.0 * along)
            }
        };
        let n = 4 * REGION_VERTICES;
        let mut best = (f64::INFINITY, 0.5);
        for k in 0..=n {
            let u = k as f64 / n as f64;
            let r = r_at(u);
            if r < best.0 {
                best = (r, u);
            }
        }
        let h = 1.0 / n as f64;
        let (neg, u) = refine_max(|u| -r_at(u.clamp(0.0, 1.0)), best.1, h);
        (-neg, u.clamp(0.0, 1.0))
    };
    let phi = |p: f64| min_radius(s1, p).0 - min_radius(s2, p).0;
    let sweep: Vec<SweepSample> = map_range(P_GRID, |k| {
        let p = (k as f64 + 0.5) / P_GRID as f64;
        let (r1, u1) = min_radius(s1, p);
        let (r2, u2) = min_radius(s2, p);
        let side = if r1 <= r2 { s1 } else { s2 };
        SweepSample { p, q: if r1 <= r2 { u1 } else { u2 }, side }
    });
    let labels: Vec<usize> = sweep.iter().map(|s| s.side).collect();
    let label_changes = count_changes(&labels);
    let k = labels
        .windows(2)
        .position(|w| w[0] == s1 && w[1] == s2)
        .ok_or_else(|| Error::Infeasible(format!("no switch from side {s1} to side {s2} along the sweep")))?;
    let (a, b) = crate::numerics::bisect_pred(sweep[k].p, sweep[k + 1].p, 60, |p| phi(p) <= 0.0);
    let p = 0.5 * (a + b);
    let r = min_radius(s1, p).0.min(min_radius(s2, p).0);
    let (x0, t0) = region.side_point(region.conc, p);
    let center = x0 + t0 * C64::new(0.0, 1.0) * r;
    let transform = Similarity::new(0.0, r, center)?;
    let circle = |s: f64| center + C64::from_polar(r, 2.0 * PI * s);
    let tangent = |s: f64| C64::new(0.0, 1.0) * C64::from_polar(1.0, 2.0 * PI * s);
    let samples: Vec<(C64, f64)> = (0..CHECK_SAMPLES).map(|k| {
        let s = k as f64 / CHECK_SAMPLES as f64;
        (circle(s), s)
    }).collect();
    let contacts = collect_contacts(&region, circle, tangent, &samples);
    let mut penetration = f64::NEG_INFINITY;
    for (y, _) in &samples {
        penetration = penetration.max(region.depth(*y).depth);
    }
    let h = 1.0 / CHECK_SAMPLES as f64;
    for c in &contacts {
        let s0 = ((c.point - center).arg() / (2.0 * PI)).rem_euclid(1.0);
        penetration = penetration.max(refine_max(|s| region.depth(circle(s)).depth, s0, h).0);
    }
    let tangency_gap = wrap((C64::new(0.0, 1.0) * (x0 - center) / r / t0).arg()).abs();
    let mut counts = vec![0usize; region.curve.sides.len()];
    counts[region.conc] += 1;
    for c in &contacts {
        counts[c.side] += 1;
    }
    Ok(InscriptionResult {
        shape: InscribedShape::Circle,
        transform,
        tangency_points: vec![x0],
        tangency_angle_gaps: vec![tangency_gap],
        third_side_contacts: contacts,
        contact_count_per_side: counts,
        conc_side: region.conc,
        penetration,
        scale: region.scale,
        label_changes,
        sweep,
    })
}

/// Points of the placed template (or circle) for plotting and checks.
pub fn placed_points(result: &InscriptionResult, template: Option<&PlaneCurve>, n: usize) -> Vec<C64> {
    match (result.shape, template) {
        (InscribedShape::Circle, _) | (_, None) => {
            (0..n).map(|k| result.transform.apply(C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))).collect()
        }
        (InscribedShape::Cardioid, Some(t)) => {
            t.transformed(&result.transform).polyline((n / t.arcs.len()).max(8))
        }
    }
}

/// Largest signed distance of `pts` outside `target` (positive means outside).
pub fn penetration_depth(target: &PlaneCurve, pts: &[C64]) -> Result<f64> {
    let region = Region::new(target)?;
    Ok(pts.iter().map(|y| region.depth(*y).depth).fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genuine_templates_classify() {
        assert_eq!(genuine_cardioid().classification, Classification::CardioidLike);
        let d = genuine_deltoid();
        assert_eq!(d.classification, Classification::DeltoidLike);
    }

    #[test]
    fn two_tangent_on_circle_arc_is_symmetric() {
        let tpl = CardioidTemplate::new(&genuine_cardioid()).unwrap();
        // Clockwise arc of the circle of radius 2: concave with respect to its inside.
        let pt = |a: f64| C64::from_polar(2.0, a);
        let tan = |a: f64| C64::new(0.0, -1.0) * C64::from_polar(1.0, a);
        let (a, b) = (0.4, -0.4);
        let two = two_tangent_cardioid(&tpl, pt(a), tan(a), pt(b), tan(b)).unwrap();
        assert!(two.angle_gaps.iter().all(|g| *g < 1e-9), "{:?}", two.angle_gaps);
        // The cusp lies on the x-axis.
        let cusp = two.transform.apply(tpl.point(0.0));
        assert!(cusp.im.abs() < 1e-9, "{cusp}");
    }

    #[test]
    fn two_tangent_rejects_equal_points() {
        let tpl = CardioidTemplate::new(&genuine_cardioid()).unwrap();
        let z = C64::new(1.0, 0.0);
        assert!(two_tangent_cardioid(&tpl, z, C64::new(0.0, 1.0), z, C64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn circle_in_genuine_deltoid() {
        let res = inscribe_circle(&genuine_deltoid()).unwrap();
        assert!(res.transform.translation.norm() < 1e-8, "{:?}", res.transform);
        assert!((res.transform.scale - 0.5).abs() < 1e-8, "{}", res.transform.scale);
        assert!(res.penetration <= PENETRATION_TOL * res.scale);
        assert!(res.contact_count_per_side.iter().all(|c| *c >= 1));
    }

    #[test]
    fn cardioid_in_genuine_deltoid() {
        let res = inscribe_cardioid(&genuine_deltoid(), &genuine_cardioid()).unwrap();
        assert!(res.total_contacts() >= 4, "{:?}", res.contact_count_per_side);
        assert!(res.penetration <= PENETRATION_TOL * res.scale, "{}", res.penetration);
        assert!(res.tangency_angle_gaps.iter().all(|g| *g <= TANGENCY_TOL));
        assert!(res.third_side_contacts.iter().all(|c| c.angle_gap <= TANGENCY_TOL), "{:?}", res.third_side_contacts);
        assert!(res.label_changes >= 1);
        eprintln!("{}", res.to_json());
    }
}
