//! Singularity and curvature analysis of boundary curves `f(𝕋)` for
//! polynomials in `S_d` and Laurent polynomials in `Σ_d`.

use crate::par;
use crate::planecurve::{polygon_area, winding_number, Classification, CurveArc, PlacedMap, PlaneCurve};
use crate::ratfun::{roots_unchecked, ComplexPoly, LaurentPoly};
use crate::svg::SvgDoc;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write;

const TAU: f64 = 2.0 * PI;

/// Roots within this distance of 𝕋 are cusps.
pub const CUSP_SNAP: f64 = 1e-9;
/// Default size of the double-point torus grid.
pub const DEFAULT_GRID: usize = 2048;
/// Newton tolerance for double points.
pub const NEWTON_TOL: f64 = 1e-12;
/// Tangent directions within this angle are collinear.
pub const TANGENCY_ANGLE: f64 = 1e-6;
/// Curvature is not sampled within this distance of a cusp.
pub const CUSP_EXCLUSION: f64 = 1e-4;
/// Double points must close to this relative tolerance.
pub const DOUBLE_POINT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "S")]
    S,
    #[serde(rename = "Sigma")]
    Sigma,
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        match s {
            "S" | "s" => Ok(Family::S),
            "Sigma" | "sigma" | "Σ" => Ok(Family::Sigma),
            _ => Err(Error::Input(format!("unknown family {s:?} (expected S or Sigma)"))),
        }
    }
}

/// A boundary map: a polynomial on 𝔻 (S-class) or `z + Σ a_k z^{-k}` on
/// the exterior disk (Σ-class), evaluated on 𝕋.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMap {
    pub family: Family,
    pub f: LaurentPoly,
}

impl BoundaryMap {
    pub fn new(family: Family, f: LaurentPoly) -> Result<Self> {
        match family {
            Family::S if f.lo < 0 => return Err(Error::Input("S-class map has negative powers".into())),
            Family::Sigma if f.hi() > 1 => return Err(Error::Input("Sigma-class map has powers above 1".into())),
            _ => {}
        }
        if f.terms().all(|(k, _)| k == 0) {
            return Err(Error::Input("boundary map is constant".into()));
        }
        Ok(BoundaryMap { family, f })
    }

    pub fn s_class(p: &ComplexPoly) -> Result<Self> {
        Self::new(Family::S, LaurentPoly::from_poly(p))
    }

    /// `d` for S-class (`deg f`) or Σ-class (order of the pole at 0).
    pub fn degree(&self) -> usize {
        match self.family {
            Family::S => self.f.hi().max(1) as usize,
            Family::Sigma => (-self.f.lo).max(1) as usize,
        }
    }

    /// The constant conformal curvature of the starred class.
    pub fn starred_curvature(&self) -> f64 {
        let d = self.degree() as f64;
        match self.family {
            Family::S => (1.0 + d) / 2.0,
            Family::Sigma => (1.0 - d) / 2.0,
        }
    }

    /// `d+1` for S-class, `d−1` for Σ-class: the factor in the double-angle relation.
    pub fn angle_factor(&self) -> f64 {
        let d = self.degree() as f64;
        match self.family {
            Family::S => d + 1.0,
            Family::Sigma => d - 1.0,
        }
    }

    pub fn point(&self, t: f64) -> C64 {
        self.f.eval(C64::from_polar(1.0, t))
    }

    /// Point and `t`-derivatives `(f, i ζ f', −(ζ f' + ζ² f''))` at `ζ = e^{it}`.
    pub fn eval_t(&self, t: f64) -> (C64, C64, C64) {
        let z = C64::from_polar(1.0, t);
        let (f, f1, f2) = self.f.eval3(z);
        (f, C64::new(0.0, 1.0) * z * f1, -(z * f1 + z * z * f2))
    }

    /// Upper bound for `|f|` on 𝕋.
    pub fn scale(&self) -> f64 {
        self.f.terms().map(|(_, c)| c.norm()).sum::<f64>().max(1e-300)
    }

    pub fn source(&self) -> PlacedMap {
        PlacedMap::new(self.f.clone(), Default::default())
    }

    /// Cusp caps `(cusps, double points)`.
    pub fn caps(&self) -> (usize, usize) {
        let d = self.degree();
        match self.family {
            Family::S => (d - 1, d.saturating_sub(2)),
            Family::Sigma => (d + 1, d.saturating_sub(2)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cusp {
    pub t: f64,
    pub point: C64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublePoint {
    pub t_minus: f64,
    pub t_plus: f64,
    pub point: C64,
    /// Angle between the tangent lines at the two parameters.
    pub angle: f64,
}

impl DoublePoint {
    pub fn is_tangential(&self) -> bool {
        self.angle <= TANGENCY_ANGLE
    }
}

fn wrap(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Cusps of `f(𝕋)` sorted by `t`, plus ambiguity warnings.
pub fn find_cusps(map: &BoundaryMap) -> (Vec<Cusp>, Vec<String>) {
    let dp = map.f.derivative().cleared();
    let mut cusps = Vec::new();
    let mut warnings = Vec::new();
    if dp.degree() == 0 {
        return (cusps, warnings);
    }
    for z in roots_unchecked(&dp) {
        let off = (z.norm() - 1.0).abs();
        if off <= CUSP_SNAP {
            let t = wrap(z.arg());
            cusps.push(Cusp { t, point: map.point(t) });
        } else if off <= 10.0 * CUSP_SNAP {
            warnings.push(format!("critical point {z} is {off:.2e} from the unit circle"));
        }
    }
    cusps.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    (cusps, warnings)
}

/// `κ(t) = Re(1 + ζ f''(ζ)/f'(ζ))`.
pub fn conformal_curvature(map: &BoundaryMap, t: f64) -> Result<f64> {
    let z = C64::from_polar(1.0, t);
    let (_, f1, f2) = map.f.eval3(z);
    if f1.norm() <= 1e-12 * map.scale() {
        return Err(Error::Singular(format!("curvature requested at cusp parameter t = {t}")));
    }
    Ok((C64::new(1.0, 0.0) + z * f2 / f1).re)
}

/// Newton on the tangential system `Re(conj(T₁) F) = 0`, `Im(conj(T₁) T₂) = 0`,
/// where `F = f(t₁) − f(t₂)`. Returns the converged pair.
pub fn polish_tangential(map: &BoundaryMap, mut t1: f64, mut t2: f64) -> Option<(f64, f64)> {
    for _ in 0..60 {
        let (p1, a1, u1) = map.eval_t(t1);
        let (p2, a2, u2) = map.eval_t(t2);
        let f = p1 - p2;
        let g1 = (a1.conj() * f).re;
        let g2 = (a1.conj() * a2).im;
        let j11 = (u1.conj() * f).re + a1.norm_sqr();
        let j12 = -(a1.conj() * a2).re;
        let j21 = (u1.conj() * a2).im;
        let j22 = (a1.conj() * u2).im;
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let d1 = -(g1 * j22 - j12 * g2) / det;
        let d2 = -(j11 * g2 - j21 * g1) / det;
        let step = d1.abs().max(d2.abs());
        let lim = 0.1;
        let s = if step > lim { lim / step } else { 1.0 };
        t1 += s * d1;
        t2 += s * d2;
        if step < NEWTON_TOL {
            return Some((t1, t2));
        }
    }
    None
}

/// Newton on `F(t₁, t₂) = f(t₁) − f(t₂) = 0` (transversal crossings).
pub fn polish_crossing(map: &BoundaryMap, mut t1: f64, mut t2: f64) -> Option<(f64, f64)> {
    for _ in 0..60 {
        let (p1, a1, _) = map.eval_t(t1);
        let (p2, a2, _) = map.eval_t(t2);
        let f = p1 - p2;
        let (j11, j12, j21, j22) = (a1.re, -a2.re, a1.im, -a2.im);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let d1 = -(f.re * j22 - j12 * f.im) / det;
        let d2 = -(j11 * f.im - j21 * f.re) / det;
        let step = d1.abs().max(d2.abs());
        let s = if step > 0.1 { 0.1 / step } else { 1.0 };
        t1 += s * d1;
        t2 += s * d2;
        if step < NEWTON_TOL {
            return Some((t1, t2));
        }
    }
    None
}

fn tangent_angle(map: &BoundaryMap, t1: f64, t2: f64) -> f64 {
    let a1 = map.eval_t(t1).1;
    let a2 = map.eval_t(t2).1;
    let s = (a1.conj() * a2).im / (a1.norm() * a2.norm());
    s.abs().min(1.0).asin()
}

fn make_double_point(map: &BoundaryMap, t1: f64, t2: f64) -> DoublePoint {
    let (a, b) = (wrap(t1), wrap(t2));
    let (tm, tp) = if a <= b { (a, b) } else { (b, a) };
    DoublePoint { t_minus: tm, t_plus: tp, point: 0.5 * (map.point(tm) + map.point(tp)), angle: tangent_angle(map, tm, tp) }
}

/// Outcome of the double-point search.
#[derive(Clone, Debug, Default)]
pub struct DoublePointSearch {
    pub points: Vec<DoublePoint>,
    pub log: Vec<String>,
    pub warnings: Vec<String>,
}

fn near_same_cusp(cusps: &[Cusp], t1: f64, t2: f64, r: f64) -> bool {
    cusps.iter().any(|c| circ_dist(c.t, t1) < r && circ_dist(c.t, t2) < r)
}

/// Coarse torus-grid proximity pass followed by Newton polish.
pub fn find_double_points(map: &BoundaryMap, grid: usize) -> Result<DoublePointSearch> {
    if grid < 16 {
        return Err(Error::Input(format!("grid size {grid} is too small")));
    }
    let (cusps, _) = find_cusps(map);
    let pts: Vec<C64> = par::map_range(grid, |i| map.point(TAU * i as f64 / grid as f64));
    let hmax = (0..grid).map(|i| (pts[(i + 1) % grid] - pts[i]).norm()).fold(0.0, f64::max);
    let thresh = 2.5 * hmax;
    let band = 2usize;
    let dist = |i: usize, j: usize| -> f64 {
        let i = i % grid;
        let j = j % grid;
        let gap = i.abs_diff(j);
        if gap.min(grid - gap) <= band {
            f64::INFINITY
        } else {
            (pts[i] - pts[j]).norm()
        }
    };
    let rows: Vec<Vec<(usize, usize)>> = par::map_range(grid, |i| {
        let mut out = Vec::new();
        for j in i + band + 1..grid {
            let d = dist(i, j);
            if d > thresh {
                continue;
            }
            let mut is_min = true;
            'nb: for di in [grid - 1, 0, 1] {
                for dj in [grid - 1, 0, 1] {
                    if (di, dj) == (0, 0) {
                        continue;
                    }
                    let e = dist(i + di, j + dj);
                    if e < d || (e == d && (di, dj) < (0, 0)) {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                out.push((i, j));
            }
        }
        out
    });
    let candidates: Vec<(usize, usize)> = rows.into_iter().flatten().collect();
    let mut search = DoublePointSearch::default();
    if candidates.len() > 50 * grid {
        search.warnings.push(format!("{} proximity candidates; the curve is below grid resolution", candidates.len()));
    }
    let scale = map.scale();
    let polished: Vec<(Option<DoublePoint>, Option<String>)> = par::map_slice(&candidates, |&(i, j)| {
        let t1 = TAU * i as f64 / grid as f64;
        let t2 = TAU * j as f64 / grid as f64;
        let closes = |a: f64, b: f64| (map.point(a) - map.point(b)).norm() <= DOUBLE_POINT_TOL * scale;
        let mut found = polish_tangential(map, t1, t2).filter(|&(a, b)| closes(a, b));
        if found.is_none() {
            found = polish_crossing(map, t1, t2).filter(|&(a, b)| closes(a, b));
        }
        match found {
            None => (None, Some(format!("candidate ({t1:.6}, {t2:.6}) did not converge; dropped"))),
            Some((a, b)) => {
                if circ_dist(a, b) < 1e-3 || near_same_cusp(&cusps, a, b, 0.05) {
                    (None, None)
                } else {
                    (Some(make_double_point(map, a, b)), None)
                }
            }
        }
    });
    let mut found: Vec<DoublePoint> = Vec::new();
    for (dp, msg) in polished {
        if let Some(m) = msg {
            search.log.push(m);
        }
        if let Some(dp) = dp {
            if !found.iter().any(|q| circ_dist(q.t_minus, dp.t_minus) < 1e-6 && circ_dist(q.t_plus, dp.t_plus) < 1e-6) {
                found.push(dp);
            }
        }
    }
    found.sort_by(|a, b| a.t_minus.partial_cmp(&b.t_minus).unwrap().then(a.t_plus.partial_cmp(&b.t_plus).unwrap()));
    for dp in &found {
        if dp.angle > TANGENCY_ANGLE && dp.angle < 1e-3 {
            search.warnings.push(format!(
                "double point at ({:.9}, {:.9}) has tangent angle {:.2e}, near the tangency resolution",
                dp.t_minus, dp.t_plus, dp.angle
            ));
        }
    }
    search.points = found;
    Ok(search)
}

/// A sampled boundary curve with its singular points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub map: BoundaryMap,
    pub family: Family,
    pub degree: usize,
    pub samples: Vec<(f64, C64)>,
    pub cusps: Vec<Cusp>,
    pub double_points: Vec<DoublePoint>,
    pub curvature_samples: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

/// Samples the curve and finds its cusps and double points.
pub fn analyze(map: &BoundaryMap, samples: usize, grid: usize) -> Result<BoundaryCurve> {
    let (cusps, mut warnings) = find_cusps(map);
    let search = find_double_points(map, grid)?;
    warnings.extend(search.warnings);
    let s: Vec<(f64, C64)> = (0..samples).map(|k| {
        let t = TAU * k as f64 / samples as f64;
        (t, map.point(t))
    }).collect();
    let curvature_samples = (0..samples)
        .map(|k| TAU * k as f64 / samples as f64)
        .filter(|&t| cusps.iter().all(|c| circ_dist(c.t, t) > CUSP_EXCLUSION))
        .filter_map(|t| conformal_curvature(map, t).ok().map(|k| (t, k)))
        .collect();
    Ok(BoundaryCurve {
        map: map.clone(),
        family: map.family,
        degree: map.degree(),
        samples: s,
        cusps,
        double_points: search.points,
        curvature_samples,
        warnings,
    })
}

impl BoundaryCurve {
    /// Largest deviation of the sampled curvature from the starred constant.
    pub fn curvature_deviation(&self) -> f64 {
        let k = self.map.starred_curvature();
        self.curvature_samples.iter().map(|&(_, v)| (v - k).abs()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x,y,kappa\n");
        for &(t, p) in &self.samples {
            let kappa = if self.cusps.iter().any(|c| circ_dist(c.t, t) <= CUSP_EXCLUSION) {
                f64::NAN
            } else {
                conformal_curvature(&self.map, t).unwrap_or(f64::NAN)
            };
            let _ = writeln!(s, "{t:.12},{:.12},{:.12},{kappa:.12}", p.re, p.im);
        }
        s
    }

    pub fn to_svg(&self, manifest: &str) -> String {
        let mut doc = SvgDoc::new();
        doc.set_manifest(manifest);
        let pts: Vec<C64> = self.samples.iter().map(|s| s.1).collect();
        let fill = match self.family {
            Family::S => "#dde8f5",
            Family::Sigma => "#f5e6d6",
        };
        doc.path(&pts, true, "#1f3b73", fill, "boundary");
        let r = 0.012 * self.map.scale();
        for c in &self.cusps {
            doc.marker(c.point, r, "#c0392b", &format!("cusp t={:.9}", c.t));
        }
        for d in &self.double_points {
            doc.marker(d.point, r, "#27ae60", &format!("double point t-={:.9} t+={:.9}", d.t_minus, d.t_plus));
        }
        doc.render()
    }
}

/// Largest distance of `(d ± 1)(t⁺ − t⁻)/2π` from an integer.
pub fn verify_double_angle_relation(curve: &BoundaryCurve) -> f64 {
    let m = curve.map.angle_factor();
    curve
        .double_points
        .iter()
        .map(|dp| {
            let x = m * (dp.t_plus - dp.t_minus) / TAU;
            (x - x.round()).abs()
        })
        .fold(0.0, f64::max)
}

/// Tri-state univalence verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Univalence {
    Univalent,
    NotUnivalent { t1: f64, t2: f64, reason: String },
    Inconclusive { reason: String },
}

impl Univalence {
    pub fn is_univalent(&self) -> bool {
        matches!(self, Univalence::Univalent)
    }
    pub fn is_not_univalent(&self) -> bool {
        matches!(self, Univalence::NotUnivalent { .. })
    }
}

fn segments_intersect(a: C64, b: C64, c: C64, d: C64) -> Option<(f64, f64)> {
    let r = b - a;
    let s = d - c;
    let den = r.re * s.im - r.im * s.re;
    if den == 0.0 {
        return None;
    }
    let q = c - a;
    let u = (q.re * s.im - q.im * s.re) / den;
    let v = (q.re * r.im - q.im * r.re) / den;
    if (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v) {
        Some((u, v))
    } else {
        None
    }
}

/// Candidate crossing pairs `(i, j, u, v)` of a closed polyline, found with a
/// uniform spatial hash; adjacent segments are skipped.
pub fn polyline_crossings(pts: &[C64]) -> Vec<(usize, usize, f64, f64)> {
    let n = pts.len();
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in pts {
        lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let cells = ((n as f64).sqrt().ceil() as usize).max(1);
    let w = ((hi.re - lo.re) / cells as f64).max(1e-300);
    let h = ((hi.im - lo.im) / cells as f64).max(1e-300);
    let cell_of = |p: C64| -> (usize, usize) {
        (
            (((p.re - lo.re) / w) as usize).min(cells - 1),
            (((p.im - lo.im) / h) as usize).min(cells - 1),
        )
    };
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
    for i in 0..n {
        let (a, b) = (cell_of(pts[i]), cell_of(pts[(i + 1) % n]));
        for x in a.0.min(b.0)..=a.0.max(b.0) {
            for y in a.1.min(b.1)..=a.1.max(b.1) {
                buckets[x * cells + y].push(i);
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for b in &buckets {
        for (k, &i) in b.iter().enumerate() {
            for &j in &b[k + 1..] {
                let (i, j) = if i < j { (i, j) } else { (j, i) };
                let gap = j - i;
                if gap <= 1 || gap >= n - 1 || !seen.insert((i, j)) {
                    continue;
                }
                if let Some((u, v)) = segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                    out.push((i, j, u, v));
                }
            }
        }
    }
    out.sort_by_key(|a| (a.0, a.1));
    out
}

/// Univalence of the map on its disk, decided from the boundary polyline.
pub fn is_univalent(map: &BoundaryMap, sample_count: usize) -> Univalence {
    if sample_count < 64 {
        return Univalence::Inconclusive { reason: format!("sample count {sample_count} is too small") };
    }
    let n = sample_count;
    let pts: Vec<C64> = (0..n).map(|k| map.point(TAU * k as f64 / n as f64)).collect();
    let scale = map.scale();
    let (cusps, _) = find_cusps(map);
    for (i, j, u, v) in polyline_crossings(&pts) {
        let t1 = TAU * (i as f64 + u) / n as f64;
        let t2 = TAU * (j as f64 + v) / n as f64;
        let closes = |a: f64, b: f64| (map.point(a) - map.point(b)).norm() <= DOUBLE_POINT_TOL * scale;
        let crossing = polish_crossing(map, t1, t2).filter(|&(a, b)| closes(a, b));
        match crossing {
            Some((a, b)) if circ_dist(a, b) < 1e-6 => continue,
            Some((a, b)) => {
                let ang = tangent_angle(map, a, b);
                if ang > TANGENCY_ANGLE {
                    let dp = make_double_point(map, a, b);
                    return Univalence::NotUnivalent {
                        t1: dp.t_minus,
                        t2: dp.t_plus,
                        reason: format!("transversal self-crossing at angle {ang:.3e}"),
                    };
                }
            }
            None => {
                let tang = polish_tangential(map, t1, t2).filter(|&(a, b)| closes(a, b));
                if tang.is_none() && !near_same_cusp(&cusps, t1, t2, 4.0 * TAU / n as f64) {
                    return Univalence::Inconclusive {
                        reason: format!("polyline crossing near ({t1:.6}, {t2:.6}) could not be resolved"),
                    };
                }
            }
        }
    }
    let (probe, fallback) = match map.family {
        Family::S => (map.f.coeff(0), centroid(&pts)),
        Family::Sigma => (centroid(&pts), map.f.coeff(0)),
    };
    let w = winding_number(&pts, probe).max(winding_number(&pts, fallback));
    let grid = probe_grid_windings(&pts, 48);
    if let Some(&k) = grid.iter().find(|&&k| k != 0 && k != 1) {
        return Univalence::NotUnivalent { t1: f64::NAN, t2: f64::NAN, reason: format!("winding number {k} occurs") };
    }
    if w != 1 && !grid.contains(&1) {
        return Univalence::NotUnivalent {
            t1: f64::NAN,
            t2: f64::NAN,
            reason: format!("no region with winding number 1 (probe gave {w})"),
        };
    }
    Univalence::Univalent
}

fn centroid(pts: &[C64]) -> C64 {
    let n = pts.len();
    let a = polygon_area(pts);
    if a.abs() < 1e-300 {
        return pts.iter().sum::<C64>() / n as f64;
    }
    let mut c = C64::new(0.0, 0.0);
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let cr = p.re * q.im - p.im * q.re;
        c += (p + q) * cr;
    }
    c / (6.0 * a)
}

fn probe_grid_windings(pts: &[C64], m: usize) -> Vec<i32> {
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in pts {
        lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let probes: Vec<C64> = (0..m * m)
        .map(|k| {
            let (a, b) = ((k / m) as f64 + 0.5, (k % m) as f64 + 0.5);
            C64::new(lo.re + (hi.re - lo.re) * a / m as f64, lo.im + (hi.im - lo.im) * b / m as f64)
        })
        .collect();
    let mut w: Vec<i32> = par::map_slice(&probes, |&p| winding_number(pts, p));
    w.sort();
    w.dedup();
    w
}

/// Per-face singular-point counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentCensus {
    pub component_id: usize,
    pub bounded: bool,
    pub d_j: usize,
    pub c_j: usize,
    pub classification: Classification,
    /// Parameter arcs `(t_start, t_end)` of `f(𝕋)` forming the face boundary.
    pub arcs: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityCensus {
    pub cusp_count: usize,
    pub double_point_count: usize,
    pub is_extreme: bool,
    pub per_component: Vec<ComponentCensus>,
}

/// Loops of the non-crossing chord diagram: each is a list of parameter arcs
/// `(start, end)` with `end > start` (end may exceed 2π).
pub fn trace_loops(curve: &BoundaryCurve) -> Result<Vec<Vec<(f64, f64)>>> {
    #[derive(Clone, Copy)]
    struct Split {
        t: f64,
        partner: Option<usize>,
    }
    let mut splits: Vec<Split> = Vec::new();
    let dps = &curve.double_points;
    for dp in dps {
        splits.push(Split { t: dp.t_minus, partner: None });
        splits.push(Split { t: dp.t_plus, partner: None });
    }
    for c in &curve.cusps {
        splits.push(Split { t: c.t, partner: None });
    }
    if splits.is_empty() {
        return Ok(vec![vec![(0.0, TAU)]]);
    }
    splits.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    for w in 0..splits.len() {
        let nx = (w + 1) % splits.len();
        if circ_dist(splits[w].t, splits[nx].t) < 1e-9 && nx != w {
            return Err(Error::Invariant(format!(
                "coincident singular parameters {:.12} and {:.12}",
                splits[w].t, splits[nx].t
            )));
        }
    }
    for dp in dps {
        let a = splits.iter().position(|s| s.t == dp.t_minus).unwrap();
        let b = splits.iter().position(|s| s.t == dp.t_plus).unwrap();
        splits[a].partner = Some(b);
        splits[b].partner = Some(a);
    }
    let m = splits.len();
    let mut used = vec![false; m];
    let mut loops = Vec::new();
    for first in 0..m {
        if used[first] {
            continue;
        }
        let mut arcs = Vec::new();
        let mut k = first;
        let mut steps = 0;
        loop {
            if used[k] {
                if k == first {
                    break;
                }
                let dp = splits[k].partner.map(|p| (splits[k].t, splits[p].t));
                return Err(Error::Invariant(format!("face tracing failed at parameter pair {dp:?}")));
            }
            used[k] = true;
            let next = (k + 1) % m;
            let mut end = splits[next].t;
            if end <= splits[k].t {
                end += TAU;
            }
            arcs.push((splits[k].t, end));
            k = match splits[next].partner {
                Some(p) => p,
                None => next,
            };
            steps += 1;
            if steps > m {
                return Err(Error::Invariant("face tracing did not close".into()));
            }
        }
        loops.push(arcs);
    }
    Ok(loops)
}

/// Faces of the complement of `f(𝕋)` bounded by the loops of the chord diagram.
pub fn component_analysis(curve: &BoundaryCurve) -> Result<Vec<ComponentCensus>> {
    let loops = trace_loops(curve)?;
    let source = std::sync::Arc::new(curve.map.source());
    let is_cusp = |t: f64| curve.cusps.iter().any(|c| circ_dist(c.t, t) < 1e-12);
    let mut out = Vec::new();
    let mut positive = 0;
    for (id, arcs) in loops.iter().enumerate() {
        let mut pts = Vec::new();
        for &(a, b) in arcs {
            let k = 256;
            for s in 0..k {
                pts.push(curve.map.point(a + (b - a) * s as f64 / k as f64));
            }
        }
        let area = polygon_area(&pts);
        let bounded = match curve.family {
            Family::S => area < 0.0,
            Family::Sigma => true,
        };
        if area > 0.0 {
            positive += 1;
        }
        let c_j = arcs.iter().filter(|&&(a, _)| is_cusp(a)).count();
        let d_j = arcs.iter().filter(|&&(a, _)| !is_cusp(a)).count();
        let d_j = if curve.double_points.is_empty() { 0 } else { d_j };
        let plane_arcs: Vec<CurveArc> = arcs.iter().map(|&(a, b)| CurveArc::new(source.clone(), 0, a, b)).collect();
        let pc = PlaneCurve::from_arcs(plane_arcs)?;
        out.push(ComponentCensus { component_id: id, bounded, d_j, c_j, classification: pc.classification, arcs: arcs.clone() });
    }
    if curve.family == Family::S && positive != 1 {
        return Err(Error::Invariant(format!("expected one outer loop, found {positive}")));
    }
    if curve.family == Family::Sigma && positive != loops.len() {
        return Err(Error::Invariant("a Sigma-class face is negatively oriented".into()));
    }
    Ok(out)
}

/// Counts, caps and per-face census of a univalent map.
pub fn census(map: &BoundaryMap, grid: usize) -> Result<(SingularityCensus, BoundaryCurve)> {
    let curve = analyze(map, 1024, grid)?;
    if let Some(dp) = curve.double_points.iter().find(|d| !d.is_tangential()) {
        return Err(Error::Input(format!(
            "map is not univalent: transversal crossing at ({:.9}, {:.9})",
            dp.t_minus, dp.t_plus
        )));
    }
    let (cc, dc) = map.caps();
    let cusp_count = curve.cusps.len();
    let double_point_count = curve.double_points.len();
    if cusp_count > cc || double_point_count > dc {
        return Err(Error::Invariant(format!(
            "census ({cusp_count}, {double_point_count}) exceeds the caps ({cc}, {dc}) for degree {}",
            map.degree()
        )));
    }
    let is_extreme = map.degree() >= 2 && cusp_count == cc && double_point_count == dc;
    let per_component = component_analysis(&curve)?;
    if is_extreme {
        for c in per_component.iter().filter(|c| c.bounded) {
            if c.d_j + c.c_j != 3 {
                return Err(Error::Invariant(format!(
                    "bounded face {} of an extreme curve has {} singular points",
                    c.component_id,
                    c.d_j + c.c_j
                )));
            }
        }
    }
    Ok((SingularityCensus { cusp_count, double_point_count, is_extreme, per_component }, curve))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cardioid() -> BoundaryMap {
        BoundaryMap::new(Family::S, LaurentPoly::from_terms(&[(1, c(1.0, 0.0)), (2, c(0.5, 0.0))])).unwrap()
    }

    fn deltoid() -> BoundaryMap {
        BoundaryMap::new(Family::Sigma, LaurentPoly::from_terms(&[(1, c(1.0, 0.0)), (-2, c(-0.5, 0.0))])).unwrap()
    }

    #[test]
    fn cardioid_cusp_and_curvature() {
        let m = cardioid();
        let (cs, w) = find_cusps(&m);
        assert!(w.is_empty());
        assert_eq!(cs.len(), 1);
        assert!((cs[0].t - PI).abs() < 1e-12 && (cs[0].point - c(-0.5, 0.0)).norm() < 1e-12);
        assert!((conformal_curvature(&m, 0.0).unwrap() - 1.5).abs() < 1e-14);
        assert!(conformal_curvature(&m, PI).is_err());
        assert!(is_univalent(&m, 2048).is_univalent());
    }

    #[test]
    fn deltoid_cusps() {
        let m = deltoid();
        let (cs, _) = find_cusps(&m);
        assert_eq!(cs.len(), 3);
        for cu in &cs {
            let z = C64::from_polar(1.0, cu.t);
            assert!((z.powi(3) + 1.0).norm() < 1e-12);
        }
        for k in 0..10 {
            let t = 0.1 + 0.6 * k as f64;
            if let Ok(v) = conformal_curvature(&m, t) {
                assert!((v + 0.5).abs() < 1e-12);
            }
        }
        assert!(is_univalent(&m, 2048).is_univalent());
    }

    #[test]
    fn critical_point_inside_breaks_univalence() {
        let m = BoundaryMap::new(Family::S, LaurentPoly::from_terms(&[(1, c(1.0, 0.0)), (2, c(1.0, 0.0))])).unwrap();
        assert!(is_univalent(&m, 2048).is_not_univalent(), "{:?}", is_univalent(&m, 2048));
    }

    #[test]
    fn identity_census() {
        let m = BoundaryMap::new(Family::S, LaurentPoly::from_terms(&[(1, c(1.0, 0.0))])).unwrap();
        let (cs, _) = census(&m, 256).unwrap();
        assert_eq!((cs.cusp_count, cs.double_point_count, cs.is_extreme), (0, 0, false));
    }

    #[test]
    fn cardioid_census() {
        let (cs, curve) = census(&cardioid(), 512).unwrap();
        assert!(cs.is_extreme);
        assert_eq!(cs.per_component.len(), 1);
        let face = &cs.per_component[0];
        assert!(!face.bounded);
        assert_eq!((face.d_j, face.c_j), (0, 1));
        assert_eq!(face.classification, Classification::CardioidLike);
        assert_eq!(verify_double_angle_relation(&curve), 0.0);
        assert!(curve.curvature_deviation() < 1e-12);
    }

    #[test]
    fn deltoid_census() {
        let (cs, _) = census(&deltoid(), 512).unwrap();
        assert!(cs.is_extreme);
        assert_eq!(cs.per_component.len(), 1);
        assert_eq!(cs.per_component[0].classification, Classification::DeltoidLike);
        assert_eq!((cs.per_component[0].d_j, cs.per_component[0].c_j), (0, 3));
    }

    #[test]
    fn csv_and_svg() {
        let curve = analyze(&cardioid(), 16, 64).unwrap();
        let csv = curve.to_csv();
        assert!(csv.starts_with("t,x,y,kappa\n"));
        assert_eq!(csv.lines().count(), 17);
        let svg = curve.to_svg("{}");
        assert!(svg.contains("cusp t="));
    }
}
