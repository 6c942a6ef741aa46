//! Piecewise-smooth closed plane curves built from arcs of placed Laurent
//! maps, similarity transforms, and the cardioid-like / deltoid-like
//! classification.

use crate::ratfun::LaurentPoly;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc as Shared;

/// `z ↦ scale·e^{i·rotation}·z + translation`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub rotation: f64,
    pub scale: f64,
    pub translation: C64,
}

impl Default for Similarity {
    fn default() -> Self {
        Similarity { rotation: 0.0, scale: 1.0, translation: C64::new(0.0, 0.0) }
    }
}

impl Similarity {
    pub fn new(rotation: f64, scale: f64, translation: C64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Input(format!("similarity scale must be positive, got {scale}")));
        }
        Ok(Similarity { rotation, scale, translation })
    }

    /// The map `z ↦ a z + b`.
    pub fn from_affine(a: C64, b: C64) -> Self {
        Similarity { rotation: a.arg(), scale: a.norm(), translation: b }
    }

    pub fn linear(&self) -> C64 {
        C64::from_polar(self.scale, self.rotation)
    }

    pub fn apply(&self, z: C64) -> C64 {
        self.linear() * z + self.translation
    }

    /// Applies only the linear part (for tangent vectors).
    pub fn apply_vec(&self, v: C64) -> C64 {
        self.linear() * v
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Similarity) -> Similarity {
        let a = self.linear() * other.linear();
        Similarity::from_affine(a, self.apply(other.translation))
    }

    pub fn inverse(&self) -> Similarity {
        let a = C64::new(1.0, 0.0) / self.linear();
        Similarity::from_affine(a, -a * self.translation)
    }
}

/// A Laurent map placed in the plane: `t ↦ S(f(e^{it}))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacedMap {
    pub f: LaurentPoly,
    pub sim: Similarity,
}

impl PlacedMap {
    pub fn new(f: LaurentPoly, sim: Similarity) -> Self {
        PlacedMap { f, sim }
    }

    /// Circle of radius `r` about `c`, parametrised counter-clockwise.
    pub fn circle(c: C64, r: f64) -> Self {
        PlacedMap {
            f: LaurentPoly::from_terms(&[(1, C64::new(1.0, 0.0))]),
            sim: Similarity { rotation: 0.0, scale: r, translation: c },
        }
    }

    /// Point, first and second `t`-derivatives.
    pub fn eval(&self, t: f64) -> (C64, C64, C64) {
        let z = C64::from_polar(1.0, t);
        let (f, f1, f2) = self.f.eval3(z);
        let i = C64::new(0.0, 1.0);
        let d1 = i * z * f1;
        let d2 = -(z * f1 + z * z * f2);
        (self.sim.apply(f), self.sim.apply_vec(d1), self.sim.apply_vec(d2))
    }

    pub fn point(&self, t: f64) -> C64 {
        self.sim.apply(self.f.eval(C64::from_polar(1.0, t)))
    }
}

/// A parameter interval `[t0, t1]` of a placed map, traversed from `t0` to
/// `t1` (either order).
#[derive(Clone, Debug, PartialEq)]
pub struct CurveArc {
    pub source: Shared<PlacedMap>,
    pub source_id: usize,
    pub t0: f64,
    pub t1: f64,
}

impl CurveArc {
    pub fn new(source: Shared<PlacedMap>, source_id: usize, t0: f64, t1: f64) -> Self {
        CurveArc { source, source_id, t0, t1 }
    }

    /// Source parameter at arc fraction `s ∈ [0, 1]`.
    pub fn param(&self, s: f64) -> f64 {
        self.t0 + s * (self.t1 - self.t0)
    }

    /// Point and derivatives with respect to `s`.
    pub fn eval(&self, s: f64) -> (C64, C64, C64) {
        let dt = self.t1 - self.t0;
        let (p, d1, d2) = self.source.eval(self.param(s));
        (p, d1 * dt, d2 * dt * dt)
    }

    pub fn point(&self, s: f64) -> C64 {
        self.source.point(self.param(s))
    }

    pub fn reversed(&self) -> CurveArc {
        CurveArc { source: self.source.clone(), source_id: self.source_id, t0: self.t1, t1: self.t0 }
    }

    /// `n + 1` points including both ends.
    pub fn sample(&self, n: usize) -> Vec<C64> {
        (0..=n).map(|k| self.point(k as f64 / n as f64)).collect()
    }

    /// Signed curvature times speed, `Im(conj(p') p'') / |p'|²`, i.e. the
    /// rate of change of the tangent angle in `s`.
    pub fn turning_rate(&self, s: f64) -> f64 {
        let (_, d1, d2) = self.eval(s);
        (d1.conj() * d2).im / d1.norm_sqr()
    }

    /// Total tangent-angle change along the arc.
    pub fn tangent_variation(&self, n: usize) -> f64 {
        let mut total = 0.0;
        let mut prev = self.unit_tangent(0.0).arg();
        for k in 1..=n {
            let ang = self.unit_tangent(k as f64 / n as f64).arg();
            let mut da = ang - prev;
            while da > PI {
                da -= 2.0 * PI;
            }
            while da < -PI {
                da += 2.0 * PI;
            }
            total += da;
            prev = ang;
        }
        total
    }

    pub fn length(&self, n: usize) -> f64 {
        self.sample(n).windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Unit tangent at fraction `s`, using nearby points when the derivative vanishes.
    pub fn unit_tangent(&self, s: f64) -> C64 {
        let (_, d, d2) = self.eval(s);
        if d.norm() > 1e-12 * d2.norm().max(1e-300) {
            return d / d.norm();
        }
        if d2.norm() > 0.0 {
            let u = d2 / d2.norm();
            return if s < 0.5 { u } else { -u };
        }
        let h = 1e-5;
        let (a, b) = if s < 0.5 { (s, s + h) } else { (s - h, s) };
        let v = self.point(b) - self.point(a);
        v / v.norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CuspDirection {
    Inward,
    Outward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    CardioidLike,
    DeltoidLike,
    Other,
}

/// A closed, counter-clockwise piecewise-smooth curve.
#[derive(Clone, Debug)]
pub struct PlaneCurve {
    pub arcs: Vec<CurveArc>,
    /// Cusp at the start of arc `i` (junction of arc `i−1` and arc `i`), if any.
    pub cusps: Vec<(usize, CuspDirection)>,
    pub classification: Classification,
    /// Sides between consecutive cusps: runs of arc indices.
    pub sides: Vec<Vec<usize>>,
    /// Index into `sides` of the designated concave side of a deltoid-like curve.
    pub conc_side: Option<usize>,
    /// Why the curve is `Other`.
    pub reason: Option<String>,
}

const SAMPLES_PER_ARC: usize = 256;

/// Signed area enclosed by a closed polyline.
pub fn polygon_area(pts: &[C64]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        a.re * b.im - a.im * b.re
    }).sum::<f64>() * 0.5
}

/// Winding number of a closed polyline about `p`.
pub fn winding_number(pts: &[C64], p: C64) -> i32 {
    let n = pts.len();
    let mut w = 0i32;
    for i in 0..n {
        let a = pts[i] - p;
        let b = pts[(i + 1) % n] - p;
        if a.im <= 0.0 {
            if b.im > 0.0 && a.re * b.im - a.im * b.re > 0.0 {
                w += 1;
            }
        } else if b.im <= 0.0 && a.re * b.im - a.im * b.re < 0.0 {
            w -= 1;
        }
    }
    w
}

/// Distance from `p` to the segment `[a, b]` and the closest fraction.
pub fn segment_distance(p: C64, a: C64, b: C64) -> (f64, f64) {
    let ab = b - a;
    let l2 = ab.norm_sqr();
    let t = if l2 == 0.0 { 0.0 } else { (((p - a) * ab.conj()).re / l2).clamp(0.0, 1.0) };
    ((p - (a + ab * t)).norm(), t)
}

impl PlaneCurve {
    /// Builds a curve from arcs joined end to start, orienting it
    /// counter-clockwise and classifying it.
    pub fn from_arcs(mut arcs: Vec<CurveArc>) -> Result<PlaneCurve> {
        if arcs.is_empty() {
            return Err(Error::Input("curve without arcs".into()));
        }
        let scale = arcs.iter().flat_map(|a| a.sample(8)).map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
        for i in 0..arcs.len() {
            let end = arcs[i].point(1.0);
            let start = arcs[(i + 1) % arcs.len()].point(0.0);
            if (end - start).norm() > 1e-6 * scale {
                return Err(Error::Input(format!("arcs {i} and {} do not join (gap {:.3e})", (i + 1) % arcs.len(), (end - start).norm())));
            }
        }
        let mut c = PlaneCurve { arcs: Vec::new(), cusps: Vec::new(), classification: Classification::Other, sides: Vec::new(), conc_side: None, reason: None };
        c.arcs = arcs.clone();
        if polygon_area(&c.polyline(64)) < 0.0 {
            arcs = arcs.iter().rev().map(|a| a.reversed()).collect();
            c.arcs = arcs;
        }
        c.classify();
        Ok(c)
    }

    /// The closed polyline with `per_arc` segments per arc.
    pub fn polyline(&self, per_arc: usize) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.arcs.len() * per_arc);
        for a in &self.arcs {
            for k in 0..per_arc {
                out.push(a.point(k as f64 / per_arc as f64));
            }
        }
        out
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.polyline(SAMPLES_PER_ARC))
    }

    /// Winding number about `p` (1 inside, 0 outside).
    pub fn winding(&self, p: C64) -> i32 {
        winding_number(&self.polyline(SAMPLES_PER_ARC), p)
    }

    /// Junction type at the start of arc `i`: `None` when smooth.
    fn junction(&self, i: usize) -> Option<CuspDirection> {
        let n = self.arcs.len();
        let prev = &self.arcs[(i + n - 1) % n];
        let next = &self.arcs[i];
        let tin = prev.unit_tangent(1.0);
        let tout = next.unit_tangent(0.0);
        let dot = (tin.conj() * tout).re;
        if dot > 1.0 - 1e-6 {
            return None;
        }
        // With the interior on the left, the interior lies between the two
        // branches exactly when the outgoing branch is on the left of the incoming one.
        let corner = next.point(0.0);
        let la = prev.length(64).min(next.length(64));
        let mut votes = 0i32;
        for frac in [1e-3, 3e-3, 1e-2] {
            let h = frac * la;
            let sa = arc_fraction_at_distance(prev, h, true);
            let sb = arc_fraction_at_distance(next, h, false);
            let ya = (tin.conj() * (prev.point(sa) - corner)).im;
            let yb = (tin.conj() * (next.point(sb) - corner)).im;
            votes += if yb > ya { 1 } else { -1 };
        }
        Some(if votes > 0 { CuspDirection::Outward } else { CuspDirection::Inward })
    }

    fn classify(&mut self) {
        let n = self.arcs.len();
        self.cusps = (0..n).filter_map(|i| self.junction(i).map(|d| (i, d))).collect();
        self.sides.clear();
        if self.cusps.is_empty() {
            self.sides.push((0..n).collect());
        } else {
            for (k, &(start, _)) in self.cusps.iter().enumerate() {
                let end = self.cusps[(k + 1) % self.cusps.len()].0;
                let mut side = Vec::new();
                let mut i = start;
                loop {
                    side.push(i);
                    i = (i + 1) % n;
                    if i == end {
                        break;
                    }
                }
                self.sides.push(side);
            }
        }
        let inward = self.cusps.iter().filter(|c| c.1 == CuspDirection::Inward).count();
        let outward = self.cusps.len() - inward;
        if self.cusps.len() == 1 && inward == 1 {
            match self.arcs.iter().position(|a| min_turning(a) <= 0.0) {
                None => {
                    self.classification = Classification::CardioidLike;
                    self.reason = None;
                }
                Some(i) => {
                    self.classification = Classification::Other;
                    self.reason = Some(format!("curvature is not positive on arc {i}"));
                }
            }
        } else if self.cusps.len() == 3 && outward == 3 {
            let mut best: Option<(usize, f64)> = None;
            for (k, side) in self.sides.iter().enumerate() {
                let concave = side.iter().all(|&i| max_turning(&self.arcs[i]) < 0.0);
                let variation: f64 = side.iter().map(|&i| self.arcs[i].tangent_variation(SAMPLES_PER_ARC)).sum();
                if concave && variation.abs() < PI {
                    let len: f64 = side.iter().map(|&i| self.arcs[i].length(SAMPLES_PER_ARC)).sum();
                    if best.is_none_or(|b| len > b.1 * (1.0 + 1e-9)) {
                        best = Some((k, len));
                    }
                }
            }
            match best {
                Some((k, _)) => {
                    self.classification = Classification::DeltoidLike;
                    self.conc_side = Some(k);
                    self.reason = None;
                }
                None => {
                    self.classification = Classification::Other;
                    self.reason = Some("no concave side with tangent variation below pi".into());
                }
            }
        } else {
            self.classification = Classification::Other;
            self.reason = Some(format!("{inward} inward and {outward} outward cusps"));
        }
    }

    /// Total tangent variation of each side.
    pub fn side_variations(&self) -> Vec<f64> {
        self.sides
            .iter()
            .map(|s| s.iter().map(|&i| self.arcs[i].tangent_variation(SAMPLES_PER_ARC)).sum())
            .collect()
    }

    /// Applies a similarity to every arc.
    pub fn transformed(&self, sim: &Similarity) -> PlaneCurve {
        let arcs = self
            .arcs
            .iter()
            .map(|a| {
                let src = PlacedMap { f: a.source.f.clone(), sim: sim.compose(&a.source.sim) };
                CurveArc { source: Shared::new(src), source_id: a.source_id, t0: a.t0, t1: a.t1 }
            })
            .collect();
        PlaneCurve { arcs, ..self.clone() }
    }
}

fn min_turning(a: &CurveArc) -> f64 {
    (1..SAMPLES_PER_ARC).map(|k| a.turning_rate(k as f64 / SAMPLES_PER_ARC as f64)).fold(f64::INFINITY, f64::min)
}

fn max_turning(a: &CurveArc) -> f64 {
    (1..SAMPLES_PER_ARC).map(|k| a.turning_rate(k as f64 / SAMPLES_PER_ARC as f64)).fold(f64::NEG_INFINITY, f64::max)
}

/// Fraction along `arc` at chord distance `h` from its end (`from_end`) or start.
fn arc_fraction_at_distance(arc: &CurveArc, h: f64, from_end: bool) -> f64 {
    let anchor = if from_end { arc.point(1.0) } else { arc.point(0.0) };
    let at = |s: f64| if from_end { 1.0 - s } else { s };
    let (mut lo, mut hi) = (0.0, 1.0);
    if (arc.point(at(hi)) - anchor).norm() < h {
        return at(0.5);
    }
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if (arc.point(at(m)) - anchor).norm() < h {
            lo = m;
        } else {
            hi = m;
        }
    }
    at(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cardioid() -> Shared<PlacedMap> {
        Shared::new(PlacedMap::new(
            LaurentPoly::from_terms(&[(1, C64::new(1.0, 0.0)), (2, C64::new(0.5, 0.0))]),
            Similarity::default(),
        ))
    }

    fn deltoid() -> Shared<PlacedMap> {
        Shared::new(PlacedMap::new(
            LaurentPoly::from_terms(&[(1, C64::new(1.0, 0.0)), (-2, C64::new(-0.5, 0.0))]),
            Similarity::default(),
        ))
    }

    #[test]
    fn similarity_algebra() {
        let s = Similarity::new(0.3, 2.0, C64::new(1.0, -1.0)).unwrap();
        let z = C64::new(0.2, 0.7);
        assert!((s.inverse().apply(s.apply(z)) - z).norm() < 1e-15);
        let t = Similarity::new(-1.1, 0.5, C64::new(0.0, 2.0)).unwrap();
        assert!((s.compose(&t).apply(z) - s.apply(t.apply(z))).norm() < 1e-14);
        assert!(Similarity::new(0.0, 0.0, z).is_err());
    }

    #[test]
    fn genuine_cardioid_is_cardioid_like() {
        let c = PlaneCurve::from_arcs(vec![CurveArc::new(cardioid(), 0, -PI, PI)]).unwrap();
        assert_eq!(c.classification, Classification::CardioidLike, "{:?}", c.reason);
        assert!((c.area() - 1.5 * PI).abs() < 1e-3);
    }

    #[test]
    fn genuine_deltoid_is_deltoid_like() {
        let d = deltoid();
        let arcs: Vec<CurveArc> = (0..3)
            .map(|k| {
                let a = PI / 3.0 + 2.0 * PI * k as f64 / 3.0;
                CurveArc::new(d.clone(), 0, a, a + 2.0 * PI / 3.0)
            })
            .collect();
        let c = PlaneCurve::from_arcs(arcs).unwrap();
        assert_eq!(c.classification, Classification::DeltoidLike, "{:?}", c.reason);
        for v in c.side_variations() {
            assert!((v.abs() - PI / 3.0).abs() < 1e-6, "{v}");
        }
        assert_eq!(c.cusps.len(), 3);
    }

    #[test]
    fn circle_is_other() {
        let c = PlaneCurve::from_arcs(vec![CurveArc::new(Shared::new(PlacedMap::circle(C64::new(0.0, 0.0), 1.0)), 0, 0.0, 2.0 * PI)]).unwrap();
        assert_eq!(c.classification, Classification::Other);
        assert_eq!(c.winding(C64::new(0.1, 0.0)), 1);
    }
}
