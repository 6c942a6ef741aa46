//! Nested-inscription configurations of disjoint quadrature domains and the
//! faces of the complement of their union.

use crate::curvegeo::{census, BoundaryMap, Family};
use crate::inscribe::{face_curve, inscribe_cardioid, inscribe_circle, InscriptionResult};
use crate::numerics::{bisect_root, golden_max, solve_dense};
use crate::par::{for_each_chunk_mut, map_range};
use crate::planecurve::{polygon_area, winding_number, Classification, CurveArc, PlaneCurve, PlacedMap, Similarity};
use crate::ratfun::LaurentPoly;
use crate::suffridge::known_suffridge;
use crate::svg::SvgDoc;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

/// Contact snapping tolerance, relative to the smaller of the two loops.
pub const SNAP_TOL: f64 = 1e-6;
/// Local distance minima between `SNAP_TOL` and this multiple of it are ambiguous.
pub const AMBIGUITY_FACTOR: f64 = 10.0;
/// Samples per loop in the contact search.
pub const CONTACT_SAMPLES: usize = 2048;
/// Side of the rasterization oracle grid.
pub const RASTER_RESOLUTION: usize = 4096;
/// Minor semi-axis of the skinny ellipse; the major one is `2 − b`.
pub const ELLIPSE_B: f64 = 0.5;
/// Minor semi-axes tried in turn when a wide extreme BQD does not reach
/// three contacts inside the ellipse.
const ELLIPSE_THINNING: [f64; 6] = [ELLIPSE_B, 0.4, 0.3, 0.2, 0.15, 0.1];
/// Longest parameter span of a single face-boundary arc.
const MAX_ARC_SPAN: f64 = PI / 4.0;
/// Samples per loop when fitting a piece inside a disk or an ellipse.
const FIT_SAMPLES: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanKind {
    #[serde(rename = "UQD-finite-nodes")]
    UqdFinite,
    #[serde(rename = "UQD-node-at-infinity")]
    UqdInfinity,
    #[serde(rename = "BQD")]
    Bqd,
}

impl PlanKind {
    pub fn name(&self) -> &'static str {
        match self {
            PlanKind::UqdFinite => "UQD-finite-nodes",
            PlanKind::UqdInfinity => "UQD-node-at-infinity",
            PlanKind::Bqd => "BQD",
        }
    }
}

/// One quadrature domain of a configuration, bounded by the loop `t ↦ map(e^{it})`.
#[derive(Clone, Debug)]
pub struct Piece {
    pub label: String,
    pub map: PlacedMap,
    /// The piece is the unbounded side of its loop.
    pub exterior: bool,
    /// Node multiplicity carried by the piece (0 for the exterior of a disk).
    pub mu: usize,
    pub stage: usize,
    pub host_face: Option<usize>,
    pub cusps: Vec<f64>,
    /// Parameter pairs where the loop touches itself.
    pub self_contacts: Vec<(f64, f64)>,
}

impl Piece {
    pub fn disk(c: C64, r: f64, stage: usize) -> Piece {
        Piece {
            label: "disk".into(),
            map: PlacedMap::circle(c, r),
            exterior: false,
            mu: 1,
            stage,
            host_face: None,
            cusps: Vec::new(),
            self_contacts: Vec::new(),
        }
    }

    /// The exterior of a round disk, a null quadrature domain.
    pub fn disk_exterior(c: C64, r: f64) -> Piece {
        Piece { label: "disk-exterior".into(), exterior: true, mu: 0, ..Piece::disk(c, r, 0) }
    }

    /// The exterior of the ellipse with semi-axes `a` (real) and `b` (imaginary).
    pub fn ellipse_exterior(a: f64, b: f64) -> Piece {
        let f = LaurentPoly::from_terms(&[(1, C64::new(0.5 * (a + b), 0.0)), (-1, C64::new(0.5 * (a - b), 0.0))]);
        Piece {
            label: "ellipse-exterior".into(),
            map: PlacedMap::new(f, Similarity::default()),
            exterior: true,
            mu: 1,
            stage: 0,
            host_face: None,
            cusps: Vec::new(),
            self_contacts: Vec::new(),
        }
    }

    /// An extreme shape placed by `sim`.
    pub fn from_shape(shape: &ExtremeShape, sim: Similarity, stage: usize) -> Piece {
        let fam = match shape.map.family {
            Family::S => "S",
            Family::Sigma => "Sigma",
        };
        Piece {
            label: format!("extreme-{fam}{}", shape.map.degree()),
            map: PlacedMap::new(shape.map.f.clone(), sim),
            exterior: shape.map.family == Family::Sigma,
            mu: shape.map.degree(),
            stage,
            host_face: None,
            cusps: shape.cusps.clone(),
            self_contacts: shape.doubles.clone(),
        }
    }

    pub fn point(&self, t: f64) -> C64 {
        self.map.point(t)
    }

    /// Unit normal at `t` pointing away from the piece.
    pub fn free_normal(&self, t: f64) -> C64 {
        let d = self.map.eval(t).1;
        let n = if self.exterior { C64::new(0.0, 1.0) * d } else { C64::new(0.0, -1.0) * d };
        n / n.norm().max(1e-300)
    }

    pub fn samples(&self, n: usize) -> Vec<C64> {
        (0..n).map(|k| self.point(TAU * k as f64 / n as f64)).collect()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.map.f.terms().map(|(k, c)| json!([k, c.re, c.im])).collect();
        json!({
            "label": self.label,
            "mu": self.mu,
            "exterior": self.exterior,
            "stage": self.stage,
            "hostFaceId": self.host_face,
            "map": {
                "terms": terms,
                "rotation": self.map.sim.rotation,
                "scale": self.map.sim.scale,
                "translation": [self.map.sim.translation.re, self.map.sim.translation.im],
            },
            "cusps": self.cusps,
            "selfContacts": self.self_contacts.iter().map(|p| json!([p.0, p.1])).collect::<Vec<_>>(),
        })
    }
}

/// `z + Σ a_k z^k` with six terms found by extremalization from the starred seed.
fn precomputed_s6() -> LaurentPoly {
    let c = C64::new;
    LaurentPoly::from_terms(&[
        (1, c(1.0, 0.0)),
        (2, c(-0.38610122610009734, 1.4572759128880155)),
        (3, c(-1.3467064567429807, -0.6615416959863708)),
        (4, c(0.668127712729946, -0.9055035552515732)),
        (5, c(0.4054987000994139, 0.44632629668261903)),
        (6, c(-0.1479470881646192, 0.07674266662938008)),
    ])
}

fn precomputed_sigma6() -> LaurentPoly {
    let c = C64::new;
    LaurentPoly::from_terms(&[
        (1, c(1.0, 0.0)),
        (-1, c(-0.28710686171044136, 0.7042452322529642)),
        (-4, c(0.18697696123247445, 0.03448328642669342)),
        (-6, c(0.08986650279675724, -0.14036306299328966)),
    ])
}

/// An extreme map of order `d`: the explicit catalog for `d ≤ 5`, stored
/// extremalization output for `d = 6`.
pub fn extreme_map(family: Family, d: usize) -> Result<BoundaryMap> {
    match known_suffridge(family, d) {
        Ok(m) => Ok(m),
        Err(Error::NotInCatalog(_)) if d == 6 => {
            let f = match family {
                Family::S => precomputed_s6(),
                Family::Sigma => precomputed_sigma6(),
            };
            BoundaryMap::new(family, f)
        }
        Err(e) => Err(e),
    }
}

/// An extreme map with its singular points and, for the S-class, its
/// cardioid-like outer boundary.
#[derive(Clone, Debug)]
pub struct ExtremeShape {
    pub map: BoundaryMap,
    pub cusps: Vec<f64>,
    pub doubles: Vec<(f64, f64)>,
    pub outer: Option<PlaneCurve>,
    /// Parameter of the cusp on the outer boundary.
    pub outer_cusp: Option<f64>,
}

impl ExtremeShape {
    pub fn new(family: Family, d: usize) -> Result<ExtremeShape> {
        let map = extreme_map(family, d)?;
        let (cen, curve) = census(&map, 1024)?;
        if !cen.is_extreme {
            return Err(Error::Invariant(format!("{family:?}{d} is not extreme: census {:?}", (cen.cusp_count, cen.double_point_count))));
        }
        let cusps = curve.cusps.iter().map(|c| c.t).collect();
        let doubles = curve.double_points.iter().map(|p| (p.t_minus, p.t_plus)).collect();
        let (outer, outer_cusp) = if family == Family::S {
            let face = cen
                .per_component
                .iter()
                .find(|c| !c.bounded)
                .ok_or_else(|| Error::Invariant("S-class curve without an outer face".into()))?;
            let pc = face_curve(&map, face)?;
            if pc.classification != Classification::CardioidLike {
                return Err(Error::Invariant(format!("outer boundary of S{d} is not cardioid-like")));
            }
            let arc = &pc.arcs[pc.cusps[0].0];
            (Some(pc.clone()), Some(arc.t0.rem_euclid(TAU)))
        } else {
            (None, None)
        };
        Ok(ExtremeShape { map, cusps, doubles, outer, outer_cusp })
    }

    /// Unit vector along which the lobes leave the outer cusp.
    fn notch_direction(&self) -> Option<(C64, C64)> {
        let t = self.outer_cusp?;
        let (p, _, d2) = self.map.source().eval(t);
        Some((p, d2 / d2.norm()))
    }
}

/// A tangential contact between two different pieces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub a: usize,
    pub ta: f64,
    pub b: usize,
    pub tb: f64,
    pub point: C64,
    pub gap: f64,
}

struct Sampled {
    ts: Vec<f64>,
    pts: Vec<C64>,
    size: f64,
    lo: C64,
    hi: C64,
    spacing: f64,
}

fn sample_loop(p: &Piece, n: usize) -> Sampled {
    let ts: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
    let pts: Vec<C64> = ts.iter().map(|&t| p.point(t)).collect();
    let mut lo = pts[0];
    let mut hi = pts[0];
    for q in &pts {
        lo = C64::new(lo.re.min(q.re), lo.im.min(q.im));
        hi = C64::new(hi.re.max(q.re), hi.im.max(q.im));
    }
    let spacing = (0..n).map(|k| (pts[(k + 1) % n] - pts[k]).norm()).fold(0.0, f64::max);
    Sampled { ts, pts, size: (hi - lo).norm(), lo, hi, spacing }
}

/// Newton on the closest-pair conditions `A' ∥ B'`, `(A − B) ⊥ A'`.
fn polish_pair(a: &PlacedMap, b: &PlacedMap, mut s: f64, mut t: f64) -> Option<(f64, f64)> {
    let g = |s: f64, t: f64| -> [f64; 2] {
        let (pa, da, _) = a.eval(s);
        let (pb, db, _) = b.eval(t);
        [(da.conj() * db).im / (da.norm() * db.norm()), ((pa - pb).conj() * da).re / da.norm()]
    };
    let h = 1e-7;
    for _ in 0..40 {
        let r = g(s, t);
        let rs = g(s + h, t);
        let rt = g(s, t + h);
        let j = vec![vec![(rs[0] - r[0]) / h, (rt[0] - r[0]) / h], vec![(rs[1] - r[1]) / h, (rt[1] - r[1]) / h]];
        let step = solve_dense(&j, &[-r[0], -r[1]])?;
        let lim = 0.2;
        let scale = (step[0].abs().max(step[1].abs()) / lim).max(1.0);
        s += step[0] / scale;
        t += step[1] / scale;
        if step[0].abs().max(step[1].abs()) < 1e-13 {
            return Some((s.rem_euclid(TAU), t.rem_euclid(TAU)));
        }
    }
    let r = g(s, t);
    (r[0].abs() < 1e-9 && r[1].abs() < 1e-12).then(|| (s.rem_euclid(TAU), t.rem_euclid(TAU)))
}

fn contacts_between(pieces: &[Piece], i: usize, j: usize, sa: &Sampled, sb: &Sampled) -> Result<Vec<Contact>> {
    let (pa, pb) = (&pieces[i], &pieces[j]);
    let size = sa.size.min(sb.size);
    let snap = SNAP_TOL * size;
    let n = sa.pts.len();
    let nearest: Vec<(f64, usize)> = map_range(n, |k| {
        let mut best = (f64::INFINITY, 0);
        for (m, q) in sb.pts.iter().enumerate() {
            let d = (sa.pts[k] - q).norm_sqr();
            if d < best.0 {
                best = (d, m);
            }
        }
        (best.0.sqrt(), best.1)
    });
    let thr = 3.0 * (sa.spacing + sb.spacing);
    let mut out: Vec<Contact> = Vec::new();
    for k in 0..n {
        let (d, m) = nearest[k];
        if d > thr || d > nearest[(k + n - 1) % n].0 || d > nearest[(k + 1) % n].0 {
            continue;
        }
        let Some((s, t)) = polish_pair(&pa.map, &pb.map, sa.ts[k], sb.ts[m]) else {
            return Err(Error::Invariant(format!(
                "closest-pair polish failed between pieces {i} and {j} near {:.6}{:+.6}i; curves may cross",
                sa.pts[k].re, sa.pts[k].im
            )));
        };
        let (x, y) = (pa.point(s), pb.point(t));
        let dist = (x - y).norm();
        if dist > d + 2.0 * (sa.spacing + sb.spacing) {
            continue;
        }
        let signed = ((y - x).conj() * pa.free_normal(s)).re;
        if signed < -snap {
            return Err(Error::Invariant(format!(
                "pieces {i} and {j} overlap by {:.3e} near {:.6}{:+.6}i",
                -signed, x.re, x.im
            )));
        }
        if dist <= snap {
            if out.iter().all(|c| (c.point - 0.5 * (x + y)).norm() > 1e-4 * size) {
                out.push(Contact { a: i, ta: s, b: j, tb: t, point: 0.5 * (x + y), gap: dist });
            }
        } else if dist <= AMBIGUITY_FACTOR * snap {
            return Err(Error::Inconclusive(format!(
                "ambiguous tangency between pieces {i} and {j}: gap {dist:.3e} is just above the snapping tolerance {snap:.3e}; refine the sampling"
            )));
        }
    }
    // Interior overlap away from local minima.
    let poly_a = &sa.pts;
    for q in sb.pts.iter().step_by(8) {
        let inside_loop = winding_number(poly_a, *q) != 0;
        if inside_loop != pa.exterior {
            let d = poly_a.iter().map(|p| (p - q).norm()).fold(f64::INFINITY, f64::min);
            if d > 2.0 * sa.spacing {
                return Err(Error::Invariant(format!("piece {j} enters piece {i} near {:.6}{:+.6}i", q.re, q.im)));
            }
        }
    }
    Ok(out)
}

fn boxes_near(a: &Sampled, b: &Sampled) -> bool {
    let m = 1e-3 * a.size.min(b.size) + a.spacing + b.spacing;
    a.lo.re <= b.hi.re + m && b.lo.re <= a.hi.re + m && a.lo.im <= b.hi.im + m && b.lo.im <= a.hi.im + m
}

/// All contacts between distinct pieces, snapped at `SNAP_TOL`.
pub fn find_contacts(pieces: &[Piece]) -> Result<Vec<Contact>> {
    let sampled: Vec<Sampled> = pieces.iter().map(|p| sample_loop(p, CONTACT_SAMPLES)).collect();
    let mut out = Vec::new();
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            if boxes_near(&sampled[i], &sampled[j]) {
                out.extend(contacts_between(pieces, i, j, &sampled[i], &sampled[j])?);
            }
        }
    }
    Ok(out)
}

/// A piece of a loop traversed with the piece on the right.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub piece: usize,
    pub t0: f64,
    pub t1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum CutKind {
    Vertex(usize),
    Cusp,
    Split,
}

#[derive(Clone, Copy, Debug)]
struct Cut {
    t: f64,
    kind: CutKind,
}

/// One component of the interior of the complement of the union.
#[derive(Clone, Debug)]
pub struct Face {
    pub id: usize,
    pub bounded: bool,
    /// Boundary cycles; for a bounded face the first one is the outer boundary.
    pub cycles: Vec<Vec<Edge>>,
    pub area: f64,
    pub cusps: usize,
    pub pinch_points: usize,
    pub self_touches: usize,
    pub classification: Option<Classification>,
    pub curve: Option<PlaneCurve>,
}

impl Face {
    pub fn census_json(&self) -> Value {
        json!({
            "faceId": self.id,
            "bounded": self.bounded,
            "cusps": self.cusps,
            "pinchPoints": self.pinch_points,
            "selfTouches": self.self_touches,
            "boundaryCycles": self.cycles.len(),
            "classification": self.classification,
            "area": self.area,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Arrangement {
    pub contacts: Vec<Contact>,
    pub faces: Vec<Face>,
    /// Face count from `V − E + F = 1 + C` minus the pieces.
    pub euler_faces: i64,
    pub components: usize,
}

fn edge_points(pieces: &[Piece], e: &Edge, n: usize) -> Vec<C64> {
    (0..n).map(|k| pieces[e.piece].point(e.t0 + (e.t1 - e.t0) * k as f64 / n as f64)).collect()
}

fn cycle_polyline(pieces: &[Piece], cycle: &[Edge]) -> Vec<C64> {
    cycle.iter().flat_map(|e| edge_points(pieces, e, 32)).collect()
}

fn find_root(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let nx = parent[y];
        parent[y] = r;
        y = nx;
    }
    r
}

/// Traces the faces of the complement of the union of `pieces`.
pub fn arrange(pieces: &[Piece]) -> Result<Arrangement> {
    let contacts = find_contacts(pieces)?;
    arrange_with(pieces, contacts)
}

fn arrange_with(pieces: &[Piece], contacts: Vec<Contact>) -> Result<Arrangement> {
    let np = pieces.len();
    let mut cuts: Vec<Vec<Cut>> = vec![Vec::new(); np];
    let mut vertices: Vec<[(usize, f64); 2]> = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        for &t in &p.cusps {
            cuts[i].push(Cut { t: t.rem_euclid(TAU), kind: CutKind::Cusp });
        }
        for &(a, b) in &p.self_contacts {
            let v = vertices.len();
            vertices.push([(i, a.rem_euclid(TAU)), (i, b.rem_euclid(TAU))]);
            cuts[i].push(Cut { t: a.rem_euclid(TAU), kind: CutKind::Vertex(v) });
            cuts[i].push(Cut { t: b.rem_euclid(TAU), kind: CutKind::Vertex(v) });
        }
    }
    for c in &contacts {
        let v = vertices.len();
        vertices.push([(c.a, c.ta.rem_euclid(TAU)), (c.b, c.tb.rem_euclid(TAU))]);
        cuts[c.a].push(Cut { t: c.ta.rem_euclid(TAU), kind: CutKind::Vertex(v) });
        cuts[c.b].push(Cut { t: c.tb.rem_euclid(TAU), kind: CutKind::Vertex(v) });
    }
    for list in cuts.iter_mut() {
        list.sort_by(|a, b| a.t.total_cmp(&b.t));
        if list.is_empty() {
            list.push(Cut { t: 0.0, kind: CutKind::Split });
        }
        let mut filled = Vec::new();
        for k in 0..list.len() {
            let a = list[k].t;
            let b = if k + 1 < list.len() { list[k + 1].t } else { list[0].t + TAU };
            filled.push(list[k]);
            let pieces_needed = ((b - a) / MAX_ARC_SPAN).ceil() as usize;
            for m in 1..pieces_needed {
                filled.push(Cut { t: (a + (b - a) * m as f64 / pieces_needed as f64).rem_euclid(TAU), kind: CutKind::Split });
            }
        }
        filled.sort_by(|a, b| a.t.total_cmp(&b.t));
        *list = filled;
    }
    // Cut index of each vertex branch.
    let mut branch_cut: Vec<[(usize, usize); 2]> = vec![[(0, 0); 2]; vertices.len()];
    let mut seen = vec![0usize; vertices.len()];
    for (i, list) in cuts.iter().enumerate() {
        for (k, c) in list.iter().enumerate() {
            if let CutKind::Vertex(v) = c.kind {
                if seen[v] >= 2 {
                    return Err(Error::Invariant(format!("vertex {v} has more than two branches")));
                }
                branch_cut[v][seen[v]] = (i, k);
                seen[v] += 1;
            }
        }
    }
    if seen.iter().any(|&s| s != 2) {
        return Err(Error::Invariant("a vertex lost a branch while sorting cuts".into()));
    }
    let offsets: Vec<usize> = cuts.iter().scan(0, |acc, l| {
        let o = *acc;
        *acc += l.len();
        Some(o)
    }).collect();
    let total: usize = cuts.iter().map(|l| l.len()).sum();
    let dir = |i: usize| if pieces[i].exterior { 1isize } else { -1isize };
    let end_cut = |i: usize, k: usize| -> usize {
        let m = cuts[i].len() as isize;
        ((k as isize + dir(i)).rem_euclid(m)) as usize
    };
    let edge_of = |i: usize, k: usize| -> Edge {
        let t0 = cuts[i][k].t;
        let k1 = end_cut(i, k);
        let mut t1 = cuts[i][k1].t;
        if dir(i) > 0 {
            if t1 <= t0 {
                t1 += TAU;
            }
        } else if t1 >= t0 {
            t1 -= TAU;
        }
        Edge { piece: i, t0, t1 }
    };
    let next = |i: usize, k: usize| -> (usize, usize) {
        let k1 = end_cut(i, k);
        match cuts[i][k1].kind {
            CutKind::Vertex(v) => {
                let [b0, b1] = branch_cut[v];
                if b0 == (i, k1) {
                    b1
                } else {
                    b0
                }
            }
            _ => (i, k1),
        }
    };
    let mut visited = vec![false; total];
    struct Cycle {
        edges: Vec<Edge>,
        area: f64,
        poly: Vec<C64>,
        cusps: usize,
        pinches: usize,
        touches: usize,
    }
    let mut cycles: Vec<Cycle> = Vec::new();
    for i in 0..np {
        for k in 0..cuts[i].len() {
            if visited[offsets[i] + k] {
                continue;
            }
            let (mut ci, mut ck) = (i, k);
            let mut edges = Vec::new();
            let (mut cusps, mut pinches, mut touches) = (0, 0, 0);
            loop {
                visited[offsets[ci] + ck] = true;
                edges.push(edge_of(ci, ck));
                let k1 = end_cut(ci, ck);
                match cuts[ci][k1].kind {
                    CutKind::Cusp => cusps += 1,
                    CutKind::Vertex(v) => {
                        if vertices[v][0].0 == vertices[v][1].0 {
                            touches += 1;
                        } else {
                            pinches += 1;
                        }
                    }
                    CutKind::Split => {}
                }
                let (ni, nk) = next(ci, ck);
                if (ni, nk) == (i, k) {
                    break;
                }
                if visited[offsets[ni] + nk] {
                    return Err(Error::Invariant("face tracing entered a traced cycle".into()));
                }
                ci = ni;
                ck = nk;
            }
            let poly = cycle_polyline(pieces, &edges);
            let area = polygon_area(&poly);
            cycles.push(Cycle { edges, area, poly, cusps, pinches, touches });
        }
    }
    let mut faces: Vec<Face> = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; cycles.len()];
    for (ci, c) in cycles.iter().enumerate() {
        if c.area > 0.0 {
            owner[ci] = Some(faces.len());
            faces.push(Face {
                id: faces.len(),
                bounded: true,
                cycles: vec![c.edges.clone()],
                area: c.area,
                cusps: c.cusps,
                pinch_points: c.pinches,
                self_touches: c.touches,
                classification: None,
                curve: None,
            });
        }
    }
    let has_exterior = pieces.iter().any(|p| p.exterior);
    let mut unbounded: Option<usize> = None;
    for (ci, c) in cycles.iter().enumerate() {
        if c.area > 0.0 {
            continue;
        }
        let probe = c.poly[0];
        let host = cycles
            .iter()
            .enumerate()
            .filter(|(cj, d)| d.area > 0.0 && *cj != ci && winding_number(&d.poly, probe) != 0)
            .min_by(|a, b| a.1.area.total_cmp(&b.1.area))
            .map(|(cj, _)| owner[cj].unwrap());
        let fid = match host {
            Some(f) => f,
            None => {
                if has_exterior {
                    return Err(Error::Invariant("negatively oriented cycle outside every face".into()));
                }
                *unbounded.get_or_insert_with(|| {
                    faces.push(Face {
                        id: faces.len(),
                        bounded: false,
                        cycles: Vec::new(),
                        area: f64::INFINITY,
                        cusps: 0,
                        pinch_points: 0,
                        self_touches: 0,
                        classification: None,
                        curve: None,
                    });
                    faces.len() - 1
                })
            }
        };
        let f = &mut faces[fid];
        f.cycles.push(c.edges.clone());
        f.cusps += c.cusps;
        f.pinch_points += c.pinches;
        f.self_touches += c.touches;
        if f.bounded {
            f.area += c.area;
        }
    }
    for f in faces.iter_mut().filter(|f| f.bounded && f.cycles.len() == 1) {
        let arcs: Vec<CurveArc> = f.cycles[0]
            .iter()
            .map(|e| CurveArc::new(Arc::new(pieces[e.piece].map.clone()), e.piece, e.t0, e.t1))
            .collect();
        if let Ok(c) = PlaneCurve::from_arcs(arcs) {
            f.classification = Some(c.classification);
            f.curve = Some(c);
        }
    }
    // Euler characteristic cross-check.
    let mut parent: Vec<usize> = (0..np).collect();
    for c in &contacts {
        let (ra, rb) = (find_root(&mut parent, c.a), find_root(&mut parent, c.b));
        parent[ra] = rb;
    }
    let components = (0..np).filter(|&i| find_root(&mut parent, i) == i).count();
    let pass: usize = cuts.iter().flatten().filter(|c| !matches!(c.kind, CutKind::Vertex(_))).count();
    let v = (vertices.len() + pass) as i64;
    let e = total as i64;
    let euler_faces = e - v + 1 + components as i64 - np as i64;
    if euler_faces != faces.len() as i64 {
        return Err(Error::Invariant(format!(
            "traced {} faces but the Euler characteristic gives {euler_faces}",
            faces.len()
        )));
    }
    Ok(Arrangement { contacts, faces, euler_faces, components })
}

/// Rasterization oracle outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterReport {
    pub resolution: usize,
    /// Faces found by flood fill, including those resolved in zoom windows.
    pub components: usize,
    /// Faces resolved only in zoom windows.
    pub zoomed: usize,
    pub zoom_windows: usize,
    /// Slivers still unresolved at the deepest zoom, not counted as faces.
    pub slivers: usize,
    /// Pixel count of the smallest face in the global window.
    pub smallest_component: usize,
    pub pixel_size: f64,
}

/// Side of the zoom windows of the rasterization oracle.
pub const RASTER_ZOOM_RESOLUTION: usize = 1024;
const RASTER_MAX_DEPTH: usize = 4;
/// Zoom-window sides around singular points, relative to the piece size.
const RASTER_SEED_SCALES: [f64; 3] = [5e-2, 5e-3, 5e-4];

/// A closed polyline with its parameters.
struct Polyline {
    ts: Vec<f64>,
    pts: Vec<C64>,
}

fn sample_polyline(p: &Piece, n: usize) -> Polyline {
    let ts: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
    let pts = ts.iter().map(|&t| p.point(t)).collect();
    Polyline { ts, pts }
}

/// Subdivides the segments of `base` near the window `[lo, hi]` to length `h/2`.
fn refine_polyline(p: &Piece, base: &Polyline, lo: C64, hi: C64, margin: f64, h: f64) -> Polyline {
    let n = base.pts.len();
    let mut ts = Vec::with_capacity(n);
    let mut pts = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b) = (base.pts[k], base.pts[(k + 1) % n]);
        let near = a.re.min(b.re) <= hi.re + margin
            && a.re.max(b.re) >= lo.re - margin
            && a.im.min(b.im) <= hi.im + margin
            && a.im.max(b.im) >= lo.im - margin;
        ts.push(base.ts[k]);
        pts.push(a);
        if near {
            let t0 = base.ts[k];
            let t1 = if k + 1 < n { base.ts[k + 1] } else { TAU };
            let m = ((b - a).norm() / (0.5 * h)).ceil().clamp(1.0, 65536.0) as usize;
            // Chords of the refined arc stay within a pixel of the curve.
            let m = (m * 2).max(2);
            for j in 1..m {
                let t = t0 + (t1 - t0) * j as f64 / m as f64;
                ts.push(t);
                pts.push(p.point(t));
            }
        }
    }
    Polyline { ts, pts }
}

#[derive(Clone, Copy, Debug)]
struct RasterComponent {
    size: usize,
    core: Option<C64>,
    touches_border: bool,
    lo: (usize, usize),
    hi: (usize, usize),
}

struct RasterWindow {
    origin: C64,
    h: f64,
    res: usize,
    runs: Vec<Vec<(usize, usize)>>,
    offsets: Vec<usize>,
    parent: Vec<usize>,
    comps: HashMap<usize, RasterComponent>,
}

impl RasterWindow {
    fn component_at(&mut self, p: C64) -> Option<usize> {
        let c = ((p.re - self.origin.re) / self.h).floor();
        let r = ((p.im - self.origin.im) / self.h).floor();
        if c < 0.0 || r < 0.0 || c >= self.res as f64 || r >= self.res as f64 {
            return None;
        }
        let (r, c) = (r as usize, c as usize);
        let k = self.runs[r].iter().position(|&(s, e)| s <= c && c < e)?;
        Some(find_root(&mut self.parent, self.offsets[r] + k))
    }

    fn pixel_box(&self, c: &RasterComponent) -> (C64, C64) {
        let lo = self.origin + C64::new(c.lo.1 as f64, c.lo.0 as f64) * self.h;
        let hi = self.origin + C64::new(c.hi.1 as f64 + 1.0, c.hi.0 as f64 + 1.0) * self.h;
        (lo, hi)
    }
}

/// Flood fill of the `res²` grid with corner `origin` and pixel `h`: pixels
/// inside a piece or crossed by a loop are blocked, the rest is joined with
/// 4-connectivity.
fn raster_window(pieces: &[Piece], polys: &[Polyline], origin: C64, h: f64, res: usize) -> RasterWindow {
    let side = h * res as f64;
    let (wlo, whi) = (origin, origin + C64::new(side, side));
    // Scanline crossings per row: (piece, x, direction).
    let mut rows: Vec<Vec<(u32, f64, i8)>> = vec![Vec::new(); res];
    for (pi, poly) in polys.iter().enumerate() {
        let n = poly.pts.len();
        for k in 0..n {
            let (p, q) = (poly.pts[k], poly.pts[(k + 1) % n]);
            if p.im == q.im {
                continue;
            }
            let (ylo, yhi) = if p.im < q.im { (p.im, q.im) } else { (q.im, p.im) };
            let r0 = ((ylo - origin.im) / h - 0.5).ceil().max(0.0);
            let r1 = ((yhi - origin.im) / h - 0.5).ceil().min(res as f64);
            if r1 <= r0 {
                continue;
            }
            for r in r0 as usize..r1 as usize {
                let y = origin.im + (r as f64 + 0.5) * h;
                if y < ylo || y >= yhi {
                    continue;
                }
                let x = p.re + (q.re - p.re) * (y - p.im) / (q.im - p.im);
                rows[r].push((pi as u32, x, if q.im > p.im { 1 } else { -1 }));
            }
        }
    }
    let mut grid = vec![0u8; res * res];
    let ext_flags: Vec<bool> = pieces.iter().map(|p| p.exterior).collect();
    for_each_chunk_mut(&mut grid, res, |r, row| {
        let mut xs = rows[r].clone();
        xs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let col = |x: f64| ((x - origin.re) / h - 0.5).ceil().clamp(0.0, res as f64) as usize;
        for (pi, &ext) in ext_flags.iter().enumerate() {
            let mut w = 0i32;
            let mut prev = 0usize;
            for c in xs.iter().filter(|c| c.0 as usize == pi) {
                let cx = col(c.1);
                if (w != 0) != ext {
                    row[prev..cx.max(prev)].iter_mut().for_each(|v| *v = 1);
                }
                w += c.2 as i32;
                prev = cx.max(prev);
            }
            if (w != 0) != ext {
                row[prev..].iter_mut().for_each(|v| *v = 1);
            }
        }
    });
    // Boundary cells, 4-connected.
    let cell = |z: C64| -> (i64, i64) { (((z.re - origin.re) / h).floor() as i64, ((z.im - origin.im) / h).floor() as i64) };
    let mark = |c: (i64, i64), grid: &mut Vec<u8>| {
        if c.0 >= 0 && c.1 >= 0 && (c.0 as usize) < res && (c.1 as usize) < res {
            grid[c.1 as usize * res + c.0 as usize] = 1;
        }
    };
    for poly in polys {
        let n = poly.pts.len();
        for k in 0..n {
            let (p, q) = (poly.pts[k], poly.pts[(k + 1) % n]);
            if p.re.max(q.re) < wlo.re - h || p.re.min(q.re) > whi.re + h || p.im.max(q.im) < wlo.im - h || p.im.min(q.im) > whi.im + h {
                continue;
            }
            let steps = ((q - p).norm() / (0.25 * h)).ceil().max(1.0) as usize;
            let mut last = cell(p);
            mark(last, &mut grid);
            for m in 1..=steps {
                let c = cell(p + (q - p) * (m as f64 / steps as f64));
                if c != last {
                    if c.0 != last.0 && c.1 != last.1 {
                        mark((c.0, last.1), &mut grid);
                        mark((last.0, c.1), &mut grid);
                    }
                    mark(c, &mut grid);
                    last = c;
                }
            }
        }
    }
    // Runs of free pixels, joined across rows.
    let runs: Vec<Vec<(usize, usize)>> = map_range(res, |r| {
        let row = &grid[r * res..(r + 1) * res];
        let mut out = Vec::new();
        let mut c = 0;
        while c < res {
            if row[c] == 0 {
                let s = c;
                while c < res && row[c] == 0 {
                    c += 1;
                }
                out.push((s, c));
            } else {
                c += 1;
            }
        }
        out
    });
    let offsets: Vec<usize> = runs
        .iter()
        .scan(0, |acc, r| {
            let o = *acc;
            *acc += r.len();
            Some(o)
        })
        .collect();
    let total: usize = runs.iter().map(|r| r.len()).sum();
    let mut parent: Vec<usize> = (0..total).collect();
    for r in 1..res {
        let (a, b) = (&runs[r - 1], &runs[r]);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i].0 < b[j].1 && b[j].0 < a[i].1 {
                let (x, y) = (find_root(&mut parent, offsets[r - 1] + i), find_root(&mut parent, offsets[r] + j));
                parent[x] = y;
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }
    // A core pixel has its whole 3×3 neighbourhood free.
    let free = |r: usize, c: usize| grid[r * res + c] == 0;
    let cores: Vec<Vec<Option<usize>>> = map_range(res, |r| {
        runs[r]
            .iter()
            .map(|&(s, e)| {
                if r == 0 || r + 1 >= res {
                    return None;
                }
                (s.max(1)..e.min(res - 1)).find(|&c| (c - 1..=c + 1).all(|x| free(r - 1, x) && free(r + 1, x)) && free(r, c - 1) && free(r, c + 1))
            })
            .collect()
    });
    let mut comps: HashMap<usize, RasterComponent> = HashMap::new();
    for (r, list) in runs.iter().enumerate() {
        for (k, &(s, e)) in list.iter().enumerate() {
            let root = find_root(&mut parent, offsets[r] + k);
            let c = comps.entry(root).or_insert(RasterComponent { size: 0, core: None, touches_border: false, lo: (r, s), hi: (r, e - 1) });
            c.size += e - s;
            if c.core.is_none() {
                c.core = cores[r][k].map(|col| origin + C64::new(col as f64 + 0.5, r as f64 + 0.5) * h);
            }
            c.touches_border |= r == 0 || r + 1 == res || s == 0 || e == res;
            c.lo = (c.lo.0.min(r), c.lo.1.min(s));
            c.hi = (c.hi.0.max(r), c.hi.1.max(e - 1));
        }
    }
    RasterWindow { origin, h, res, runs, offsets, parent, comps }
}

fn loop_length(p: &Piece) -> f64 {
    let pts = p.samples(4096);
    (0..pts.len()).map(|k| (pts[(k + 1) % pts.len()] - pts[k]).norm()).sum()
}

/// Counts the components of the complement by flood fill on a
/// `resolution²` grid. Slivers without a core pixel are re-rasterized in zoom
/// windows; a component found there counts when it stays inside its window
/// and contains no point of a face already counted.
pub fn raster_face_count(pieces: &[Piece], resolution: usize) -> Result<RasterReport> {
    if resolution < 16 {
        return Err(Error::Input(format!("raster resolution {resolution} is too small")));
    }
    let exterior: Vec<usize> = (0..pieces.len()).filter(|&i| pieces[i].exterior).collect();
    let frame: Vec<usize> = if exterior.is_empty() { (0..pieces.len()).collect() } else { exterior };
    let mut lo = C64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = -lo;
    for &i in &frame {
        for q in pieces[i].samples(4096) {
            lo = C64::new(lo.re.min(q.re), lo.im.min(q.im));
            hi = C64::new(hi.re.max(q.re), hi.im.max(q.im));
        }
    }
    let side = (hi.re - lo.re).max(hi.im - lo.im) * 1.04;
    let origin = 0.5 * (lo + hi) - C64::new(0.5 * side, 0.5 * side);
    let h = side / resolution as f64;
    let polys: Vec<Polyline> = pieces
        .iter()
        .map(|p| sample_polyline(p, ((2.0 * loop_length(p) / h).ceil() as usize).clamp(4096, 1 << 18)))
        .collect();
    let global = raster_window(pieces, &polys, origin, h, resolution);
    let mut reps: Vec<C64> = global.comps.values().filter_map(|c| c.core).collect();
    let smallest_component = global.comps.values().filter(|c| c.core.is_some()).map(|c| c.size).min().unwrap_or(0);
    let mut queue: Vec<(C64, C64, usize)> = global
        .comps
        .values()
        .filter(|c| c.core.is_none() && !c.touches_border)
        .map(|c| {
            let (a, b) = global.pixel_box(c);
            (a, b, 1)
        })
        .collect();
    // Faces too thin to leave any free pixel sit at cusps and self-contacts;
    // seed windows there at several scales.
    for (p, poly) in pieces.iter().zip(&polys) {
        let size = poly.pts.iter().fold((poly.pts[0], poly.pts[0]), |(l, u), z| {
            (C64::new(l.re.min(z.re), l.im.min(z.im)), C64::new(u.re.max(z.re), u.im.max(z.im)))
        });
        let size = (size.1 - size.0).norm();
        let features = p.cusps.iter().copied().chain(p.self_contacts.iter().map(|c| c.0));
        for t in features {
            let z = p.point(t);
            for scale in RASTER_SEED_SCALES {
                let r = C64::new(0.125 * scale * size, 0.125 * scale * size);
                queue.push((z - r, z + r, 1));
            }
        }
    }
    let mut done: Vec<(C64, C64)> = Vec::new();
    let (mut zoomed, mut zoom_windows, mut slivers) = (0, 0, 0);
    while let Some((a, b, depth)) = queue.pop() {
        if done.iter().any(|(p, q)| p.re <= a.re && p.im <= a.im && q.re >= b.re && q.im >= b.im) {
            continue;
        }
        if depth > RASTER_MAX_DEPTH {
            slivers += 1;
            continue;
        }
        let mid = 0.5 * (a + b);
        let zside = 4.0 * (b.re - a.re).max(b.im - a.im);
        let zorigin = mid - C64::new(0.5 * zside, 0.5 * zside);
        let zh = zside / RASTER_ZOOM_RESOLUTION as f64;
        let (wlo, whi) = (zorigin, zorigin + C64::new(zside, zside));
        let zpolys: Vec<Polyline> =
            pieces.iter().zip(&polys).map(|(p, base)| refine_polyline(p, base, wlo, whi, 4.0 * h, zh)).collect();
        let mut win = raster_window(pieces, &zpolys, zorigin, zh, RASTER_ZOOM_RESOLUTION);
        zoom_windows += 1;
        done.push((wlo, whi));
        let known: Vec<usize> = reps.iter().filter_map(|&p| win.component_at(p)).collect();
        let comps: Vec<(usize, RasterComponent)> = win.comps.iter().map(|(k, c)| (*k, *c)).collect();
        for (root, c) in comps {
            if c.touches_border || known.contains(&root) {
                continue;
            }
            match c.core {
                Some(p) => {
                    reps.push(p);
                    zoomed += 1;
                }
                None => {
                    let (p, q) = win.pixel_box(&c);
                    queue.push((p, q, depth + 1));
                }
            }
        }
    }
    Ok(RasterReport {
        resolution,
        components: reps.len(),
        zoomed,
        zoom_windows,
        slivers,
        smallest_component,
        pixel_size: h,
    })
}

/// What one construction stage did.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stage {
    pub index: usize,
    pub description: String,
    pub pieces: Vec<usize>,
    pub host_face: Option<usize>,
    pub new_contacts: usize,
    pub faces_after: usize,
    pub inscription: Option<Value>,
}

#[derive(Clone, Debug)]
pub struct ConstructionPlan {
    pub kind: PlanKind,
    pub d: usize,
    /// Node multiplicities; with a node at infinity its multiplicity is last.
    pub partition: Vec<usize>,
    pub infinity: Option<usize>,
    pub pieces: Vec<Piece>,
    pub stages: Vec<Stage>,
    pub target: usize,
    pub bound: usize,
}

/// The connectivity the construction must reach.
pub fn target_count(kind: PlanKind, partition: &[usize]) -> usize {
    let d: usize = partition.iter().sum();
    let n = partition.len();
    match kind {
        PlanKind::UqdFinite => (d + n - 1).min(2 * d - 2),
        PlanKind::UqdInfinity => d + n - 2,
        PlanKind::Bqd => {
            if partition.iter().any(|&m| m >= 3) {
                d + n - 2
            } else {
                (d + n - 3).min(2 * d - 4)
            }
        }
    }
}

/// The connectivity bound no quadrature domain with these nodes can exceed.
pub fn theorem_bound(kind: PlanKind, partition: &[usize]) -> usize {
    let d: usize = partition.iter().sum();
    let n = partition.len();
    match kind {
        PlanKind::UqdFinite => (d + n - 1).min(2 * d - 2),
        PlanKind::UqdInfinity => (d + n - 2).min(2 * d - 2),
        PlanKind::Bqd => {
            if partition.iter().any(|&m| m >= 3) {
                (d + n - 2).min(2 * d - 4)
            } else {
                (d + n - 3).min(2 * d - 4)
            }
        }
    }
}

impl ConstructionPlan {
    pub fn n(&self) -> usize {
        self.partition.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "d": self.d,
            "n": self.n(),
            "partition": self.partition,
            "infinityNode": self.infinity,
            "targetCount": self.target,
            "theoremBound": self.bound,
            "placements": self.pieces.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            "stages": self.stages,
        })
    }

    /// One SVG layer per stage.
    pub fn to_svg(&self, manifest: &str, arrangement: Option<&Arrangement>) -> String {
        let colors = ["#303030", "#b03030", "#2f6fb0", "#2f8f4f", "#8f4fb0", "#c07020", "#20a0a0"];
        let mut doc = SvgDoc::new();
        doc.set_manifest(manifest);
        if let Some(a) = arrangement {
            for f in a.faces.iter().filter(|f| f.bounded) {
                let pts = cycle_polyline(&self.pieces, &f.cycles[0]);
                let fill = if f.classification == Some(Classification::DeltoidLike) { "#f4ecd0" } else { "#e4eef8" };
                doc.path(&pts, true, "none", fill, &format!("face-{}", f.id));
            }
        }
        for st in &self.stages {
            doc.begin_group(&format!("stage-{}", st.index));
            for &pi in &st.pieces {
                let p = &self.pieces[pi];
                let n = 2048;
                let pts = p.samples(n);
                doc.path(&pts, true, colors[st.index % colors.len()], "none", &format!("piece-{pi} {}", p.label));
            }
            doc.end_group();
        }
        if let Some(a) = arrangement {
            let r = 0.004 * self.pieces.iter().map(|p| sample_loop(p, 256).size).fold(0.0, f64::max);
            doc.begin_group("contacts");
            for c in &a.contacts {
                doc.marker(c.point, r, "#207020", &format!("contact {}-{}", c.a, c.b));
            }
            doc.end_group();
        }
        doc.render()
    }
}

struct Builder {
    kind: PlanKind,
    pieces: Vec<Piece>,
    stages: Vec<Stage>,
    shapes: HashMap<usize, ExtremeShape>,
    arrangement: Option<Arrangement>,
}

impl Builder {
    fn new(kind: PlanKind) -> Builder {
        Builder { kind, pieces: Vec::new(), stages: Vec::new(), shapes: HashMap::new(), arrangement: None }
    }

    fn shape(&mut self, mu: usize) -> Result<ExtremeShape> {
        if let Some(s) = self.shapes.get(&mu) {
            return Ok(s.clone());
        }
        let s = ExtremeShape::new(Family::S, mu)?;
        self.shapes.insert(mu, s.clone());
        Ok(s)
    }

    /// Adds a stage of pieces and re-traces the arrangement.
    fn add_stage(&mut self, mut new: Vec<Piece>, description: String, host_face: Option<usize>, inscription: Option<Value>) -> Result<()> {
        let index = self.stages.len();
        let before = self.arrangement.as_ref().map_or(0, |a| a.contacts.len());
        let first = self.pieces.len();
        for p in new.iter_mut() {
            p.stage = index;
            p.host_face = host_face;
        }
        self.pieces.extend(new);
        let arr = arrange(&self.pieces)?;
        self.stages.push(Stage {
            index,
            description,
            pieces: (first..self.pieces.len()).collect(),
            host_face,
            new_contacts: arr.contacts.len() - before.min(arr.contacts.len()),
            faces_after: arr.faces.len(),
            inscription,
        });
        self.arrangement = Some(arr);
        Ok(())
    }

    /// Inscribes a disk (`mu = 1`) or an extreme BQD of order `mu` in the
    /// largest deltoid-like face.
    fn inscribe_next(&mut self, mu: usize) -> Result<()> {
        let arr = self.arrangement.as_ref().ok_or_else(|| Error::Invariant("no arrangement to inscribe into".into()))?;
        let mut candidates: Vec<&Face> =
            arr.faces.iter().filter(|f| f.bounded && f.classification == Some(Classification::DeltoidLike)).collect();
        candidates.sort_by(|a, b| b.area.total_cmp(&a.area));
        if candidates.is_empty() {
            return Err(Error::Infeasible(format!("stage {}: no deltoid-like face to inscribe into", self.stages.len())));
        }
        let stage = self.stages.len();
        let expected = if mu == 1 { 3 } else { 4 };
        let faces_before = arr.faces.len();
        let mut errors = Vec::new();
        let candidates: Vec<(usize, PlaneCurve)> =
            candidates.iter().map(|f| (f.id, f.curve.clone().expect("classified faces carry a curve"))).collect();
        for (fid, curve) in candidates {
            let mut attempt = || -> Result<(Piece, InscriptionResult)> {
                if mu == 1 {
                    let res = inscribe_circle(&curve)?;
                    Ok((Piece::disk(res.transform.translation, res.transform.scale, stage), res))
                } else {
                    let shape = self.shape(mu)?;
                    let res = inscribe_cardioid(&curve, shape.outer.as_ref().expect("S-class shapes have an outer boundary"))?;
                    Ok((Piece::from_shape(&shape, res.transform, stage), res))
                }
            };
            let (piece, res) = match attempt() {
                Ok(x) => x,
                Err(e) => {
                    errors.push(format!("face {fid}: {e}"));
                    continue;
                }
            };
            let saved = (self.pieces.clone(), self.stages.clone(), self.arrangement.clone());
            let desc = format!("{} of order {mu} inscribed in face {fid}", if mu == 1 { "disk" } else { "extreme BQD" });
            match self.add_stage(vec![piece], desc, Some(fid), Some(res.to_json())) {
                Ok(()) => {
                    let st = self.stages.last().unwrap();
                    let gained = st.faces_after as i64 - faces_before as i64;
                    let want = if mu == 1 { 2 } else { mu as i64 + 1 };
                    if st.new_contacts >= expected && gained == want {
                        return Ok(());
                    }
                    errors.push(format!("face {fid}: {} contacts, {gained} new faces", st.new_contacts));
                }
                Err(e) => errors.push(format!("face {fid}: {e}")),
            }
            (self.pieces, self.stages, self.arrangement) = saved;
        }
        Err(Error::Infeasible(format!("stage {stage} (order {mu}): inscription failed in every deltoid-like face: {}", errors.join("; "))))
    }

    fn finish(self, partition: Vec<usize>, infinity: Option<usize>) -> Result<ConstructionPlan> {
        let d = partition.iter().sum();
        let target = target_count(self.kind, &partition);
        let bound = theorem_bound(self.kind, &partition);
        Ok(ConstructionPlan { kind: self.kind, d, partition, infinity, pieces: self.pieces, stages: self.stages, target, bound })
    }
}

fn check_partition(partition: &[usize]) -> Result<()> {
    if partition.is_empty() || partition.contains(&0) {
        return Err(Error::Input(format!("partition {partition:?} must consist of positive integers")));
    }
    Ok(())
}

/// Largest distance from `c` to the outer boundary on each side of the line
/// through `pc` along `u`.
fn side_max_dist(outer: &PlaneCurve, pc: C64, u: C64, c: C64) -> [f64; 2] {
    let per_arc = FIT_SAMPLES / outer.arcs.len().max(1) + 16;
    let mut best = [(f64::NEG_INFINITY, 0usize, 0usize); 2];
    for (ai, arc) in outer.arcs.iter().enumerate() {
        for k in 0..=per_arc {
            let p = arc.point(k as f64 / per_arc as f64);
            let side = ((u.conj() * (p - pc)).im < 0.0) as usize;
            let v = (p - c).norm_sqr();
            if v > best[side].0 {
                best[side] = (v, ai, k);
            }
        }
    }
    let h = 1.0 / per_arc as f64;
    best.map(|(v, ai, k)| {
        if v == f64::NEG_INFINITY {
            return 0.0;
        }
        let s = k as f64 * h;
        golden_max((s - h).max(0.0), (s + h).min(1.0), 80, |s| (outer.arcs[ai].point(s) - c).norm_sqr()).1.max(v).sqrt()
    })
}

/// Places an extreme BQD inside a round disk touching it once on each side
/// of the outer cusp.
fn fit_in_disk(shape: &ExtremeShape) -> Result<(C64, f64)> {
    let (pc, u) = shape.notch_direction().ok_or_else(|| Error::Input("shape has no outer cusp".into()))?;
    let outer = shape.outer.as_ref().expect("S-class shapes have an outer boundary");
    let size = sample_loop(&Piece::from_shape(shape, Similarity::default(), 0), 512).size;
    let iu = C64::new(0.0, 1.0) * u;
    for rho in [0.75, 1.0, 1.5, 2.0, 3.0, 4.5] {
        let center = |x: f64| pc - u * (rho * size) + iu * x;
        let phi = |x: f64| {
            let [l, r] = side_max_dist(outer, pc, u, center(x));
            l - r
        };
        let Some(x) = bisect_root(-2.0 * size, 2.0 * size, 1e-15 * size, phi) else { continue };
        let c = center(x);
        let r = side_max_dist(outer, pc, u, c)[0];
        let overall = shape.map.source();
        let far = (0..4 * FIT_SAMPLES).map(|k| (overall.point(TAU * k as f64 / (4 * FIT_SAMPLES) as f64) - c).norm()).fold(0.0, f64::max);
        if far <= r * (1.0 + 1e-9) {
            return Ok((c, r));
        }
    }
    Err(Error::Infeasible("could not place the extreme BQD in a disk with two lobe contacts".into()))
}

fn ellipse_level(z: C64, a: f64, b: f64) -> f64 {
    (z.re / a).powi(2) + (z.im / b).powi(2) - 1.0
}

/// Indices of the convex hull vertices of `pts`, counter-clockwise.
fn convex_hull(pts: &[C64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&i, &j| pts[i].re.total_cmp(&pts[j].re).then(pts[i].im.total_cmp(&pts[j].im)));
    let cross = |o: C64, a: C64, b: C64| ((a - o).conj() * (b - o)).im;
    let mut hull: Vec<usize> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 { Box::new(idx.iter()) } else { Box::new(idx.iter().rev()) };
        for &i in iter {
            while hull.len() >= start + 2 && cross(pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]], pts[i]) <= 0.0 {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

/// Places an extreme BQD in the ellipse `(x/a)² + (y/b)² < 1` touching it at
/// both ends of the convex-hull edge across the notch and at the opposite side.
pub fn fit_in_ellipse(shape: &ExtremeShape, a: f64, b: f64) -> Result<Similarity> {
    let (pc, u) = shape.notch_direction().ok_or_else(|| Error::Input("shape has no outer cusp".into()))?;
    let src = shape.map.source();
    let n = FIT_SAMPLES;
    let h = TAU / n as f64;
    let raw: Vec<C64> = (0..n).map(|k| src.point(h * k as f64)).collect();
    let hull = convex_hull(&raw);
    // Hull edge hit by the ray leaving the cusp through the notch.
    let mut bridge = None;
    for k in 0..hull.len() {
        let (p, q) = (raw[hull[k]], raw[hull[(k + 1) % hull.len()]]);
        let e = q - p;
        let den = (u.conj() * e).im;
        if den.abs() < 1e-300 {
            continue;
        }
        let lam = ((p - pc).conj() * e).im / den;
        let mu = ((p - pc).conj() * u).im / den;
        if lam > 0.0 && (0.0..=1.0).contains(&mu) {
            bridge = Some((hull[k], hull[(k + 1) % hull.len()]));
        }
    }
    let (i1, i2) = bridge.ok_or_else(|| Error::Infeasible("no convex-hull edge across the notch".into()))?;
    let e = raw[i2] - raw[i1];
    let mut nrm = C64::new(0.0, -1.0) * e;
    if (nrm.conj() * u).re < 0.0 {
        nrm = -nrm;
    }
    let rot = PI / 2.0 - nrm.arg();
    let turn = C64::from_polar(1.0, rot);
    let pts: Vec<C64> = raw.iter().map(|p| p * turn).collect();
    let top = pts[i1].im;
    let i3 = (0..n).min_by(|&x, &y| pts[x].im.total_cmp(&pts[y].im)).unwrap();
    let s0 = 2.0 * b / (top - pts[i3].im);
    let mid = 0.5 * (pts[i1] + pts[i2]);
    let mut v = [-s0 * mid.re, -s0 * 0.5 * (top + pts[i3].im), s0];
    let f = |z: C64| ellipse_level(z, a, b);
    let base = |t: f64| src.point(t) * turn;
    let ts: Vec<f64> = [i1, i2, i3].iter().map(|&i| h * i as f64).collect();
    let resid = |v: &[f64; 3]| -> Vec<f64> {
        let c = C64::new(v[0], v[1]);
        ts.iter()
            .map(|&t| {
                let k = (-24..=24).map(|j| t + h * j as f64).max_by(|&x, &y| f(base(x) * v[2] + c).total_cmp(&f(base(y) * v[2] + c))).unwrap();
                golden_max(k - h, k + h, 80, |s| f(base(s) * v[2] + c)).1
            })
            .collect()
    };
    for _ in 0..30 {
        let r = resid(&v);
        if r.iter().all(|x| x.abs() < 1e-14) {
            break;
        }
        let eps = 1e-7;
        let mut jac = vec![vec![0.0; 3]; 3];
        for c in 0..3 {
            let mut w = v;
            w[c] += eps;
            let rw = resid(&w);
            for row in 0..3 {
                jac[row][c] = (rw[row] - r[row]) / eps;
            }
        }
        let step = solve_dense(&jac, &[-r[0], -r[1], -r[2]]).ok_or_else(|| Error::Singular("ellipse contact system".into()))?;
        for c in 0..3 {
            v[c] += step[c];
        }
    }
    let r = resid(&v);
    if r.iter().any(|x| x.abs() > 1e-12) {
        return Err(Error::Infeasible(format!("ellipse contact polish did not converge: {r:?}")));
    }
    let c = C64::new(v[0], v[1]);
    let worst = pts.iter().map(|p| f(p * v[2] + c)).fold(f64::NEG_INFINITY, f64::max);
    if worst > 1e-10 {
        return Err(Error::Infeasible(format!("the three-contact placement leaves the ellipse (level {worst:.3e})")));
    }
    Similarity::new(rot, v[2], c)
}

/// Radius of the largest disk about `c` outside the piece, i.e. the distance to its loop.
fn distance_to_loop(p: &Piece, c: C64) -> f64 {
    let neg = |t: f64| -(p.point(t) - c).norm_sqr();
    let n = FIT_SAMPLES;
    let h = TAU / n as f64;
    let (k, _) = (0..n).map(|k| (k, neg(h * k as f64))).fold((0, f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b });
    (-golden_max(h * (k as f64 - 1.0), h * (k as f64 + 1.0), 80, neg).1).sqrt()
}

/// The symmetric pair of cardioids `A` and `2a − A` touching three times.
fn two_cardioids() -> Result<(Piece, Piece)> {
    let shape = ExtremeShape::new(Family::S, 2)?;
    let a_piece = Piece::from_shape(&shape, Similarity::default(), 0);
    let src = shape.map.source();
    let make_b = |theta: f64| -> Piece {
        let a = src.point(theta);
        Piece::from_shape(&shape, Similarity { rotation: PI, scale: 1.0, translation: a * 2.0 }, 0)
    };
    // Smallest signed clearance of `B` from `A` away from the designed contact.
    let sa = sample_loop(&a_piece, 1024);
    let gap = |theta: f64| -> f64 {
        let b = make_b(theta);
        let mut best = f64::INFINITY;
        for k in 0..512 {
            let t = TAU * k as f64 / 512.0;
            let dt = (t - theta).rem_euclid(TAU);
            if dt.min(TAU - dt) < 0.6 {
                continue;
            }
            let q = b.point(t);
            let d = sa.pts.iter().map(|p| (p - q).norm()).fold(f64::INFINITY, f64::min);
            let inside = winding_number(&sa.pts, q) != 0;
            best = best.min(if inside { -d } else { d });
        }
        best
    };
    let n = 96;
    let mut prev: Option<(f64, f64)> = None;
    for k in 1..n {
        let theta = PI * k as f64 / n as f64;
        let g = gap(theta);
        if let Some((pt, pg)) = prev {
            if pg > 0.0 && g <= 0.0 {
                let fine = |th: f64| {
                    let b = make_b(th);
                    let pieces = [a_piece.clone(), b];
                    let s0 = sample_loop(&pieces[0], CONTACT_SAMPLES);
                    let s1 = sample_loop(&pieces[1], CONTACT_SAMPLES);
                    min_clearance(&pieces, &s0, &s1, th)
                };
                let th = bisect_root(pt, theta, 1e-15, fine).ok_or_else(|| Error::Infeasible("two-cardioid contact not bracketed".into()))?;
                return Ok((a_piece, make_b(th)));
            }
        }
        prev = Some((theta, g));
    }
    Err(Error::Infeasible("no second contact between the two cardioids".into()))
}

/// Signed clearance of the closest pair of `pieces[1]` from `pieces[0]`
/// away from the parameter `theta` of piece 1.
fn min_clearance(pieces: &[Piece; 2], s0: &Sampled, s1: &Sampled, theta: f64) -> f64 {
    let mut best = f64::INFINITY;
    let n = s1.pts.len();
    let mut cand = (0, 0, f64::INFINITY);
    for k in 0..n {
        let dt = (s1.ts[k] - theta).rem_euclid(TAU);
        if dt.min(TAU - dt) < 0.6 {
            continue;
        }
        for (m, p) in s0.pts.iter().enumerate().step_by(2) {
            let d = (p - s1.pts[k]).norm();
            if d < cand.2 {
                cand = (m, k, d);
            }
        }
    }
    if let Some((s, t)) = polish_pair(&pieces[0].map, &pieces[1].map, s0.ts[cand.0], s1.ts[cand.1]) {
        let (x, y) = (pieces[0].point(s), pieces[1].point(t));
        best = best.min(((y - x).conj() * pieces[0].free_normal(s)).re);
    } else {
        let q = s1.pts[cand.1];
        best = if winding_number(&s0.pts, q) != 0 { -cand.2 } else { cand.2 };
    }
    best
}

/// `buildUnboundedConfig`: `partition` lists every node multiplicity; with
/// `infinity = Some(m)` one part equal to `m` is the node at infinity.
pub fn build_unbounded_config(partition: &[usize], infinity: Option<usize>) -> Result<ConstructionPlan> {
    check_partition(partition)?;
    let d: usize = partition.iter().sum();
    if d < 2 {
        return Err(Error::Input(format!("an unbounded quadrature domain needs order d ≥ 2 (got {d})")));
    }
    let mut finite: Vec<usize> = partition.to_vec();
    finite.sort_unstable_by(|a, b| b.cmp(a));
    match infinity {
        None => {
            let mut b = Builder::new(PlanKind::UqdFinite);
            if finite.iter().all(|&m| m == 1) {
                // Equal disks of radius `r` tangent to the unit circle and to each other.
                let r: f64 = 0.4;
                let alpha = (r / (1.0 - r)).asin();
                b.add_stage(
                    vec![
                        Piece::disk_exterior(C64::new(0.0, 0.0), 1.0),
                        Piece::disk(C64::from_polar(1.0 - r, alpha), r, 0),
                        Piece::disk(C64::from_polar(1.0 - r, -alpha), r, 0),
                    ],
                    "two tangent disks in the unit disk".into(),
                    None,
                    None,
                )?;
                for _ in 2..finite.len() {
                    b.inscribe_next(1)?;
                }
            } else {
                let shape = b.shape(finite[0])?;
                let (c, r) = fit_in_disk(&shape)?;
                let host = Piece::disk_exterior(c, r);
                b.add_stage(
                    vec![host, Piece::from_shape(&shape, Similarity::default(), 0)],
                    format!("extreme BQD of order {} inscribed in a round disk", finite[0]),
                    None,
                    None,
                )?;
                for &m in &finite[1..] {
                    b.inscribe_next(m)?;
                }
            }
            b.finish(finite, None)
        }
        Some(m) => {
            let pos = finite
                .iter()
                .position(|&x| x == m)
                .ok_or_else(|| Error::Input(format!("infinity multiplicity {m} is not a part of {partition:?}")))?;
            finite.remove(pos);
            let mut b = Builder::new(PlanKind::UqdInfinity);
            if m >= 2 {
                let shape = ExtremeShape::new(Family::Sigma, m)?;
                b.add_stage(
                    vec![Piece::from_shape(&shape, Similarity::default(), 0)],
                    format!("extreme UQD of order {m}"),
                    None,
                    None,
                )?;
                for &mu in &finite {
                    b.inscribe_next(mu)?;
                }
            } else {
                let (ea, eb) = (2.0 - ELLIPSE_B, ELLIPSE_B);
                let host = Piece::ellipse_exterior(ea, eb);
                if finite.iter().all(|&x| x == 1) {
                    if finite.len() == 1 {
                        b.add_stage(vec![host, Piece::disk(C64::new(0.0, 0.0), eb, 0)], "disk in a skinny ellipse".into(), None, None)?;
                    } else {
                        let hp = host.clone();
                        let x0 = bisect_root(1e-6, eb, 1e-15, |x| distance_to_loop(&hp, C64::new(x, 0.0)) - x)
                            .ok_or_else(|| Error::Infeasible("two equal disks do not fit the ellipse".into()))?;
                        let r = distance_to_loop(&hp, C64::new(x0, 0.0));
                        b.add_stage(
                            vec![host, Piece::disk(C64::new(-x0, 0.0), r, 0), Piece::disk(C64::new(x0, 0.0), r, 0)],
                            "two touching disks in a skinny ellipse".into(),
                            None,
                            None,
                        )?;
                        for _ in 2..finite.len() {
                            b.inscribe_next(1)?;
                        }
                    }
                } else {
                    let shape = b.shape(finite[0])?;
                    let want = finite[0] + 1;
                    let mut placed = false;
                    let mut errors = Vec::new();
                    'thin: for eb in ELLIPSE_THINNING {
                        let ea = 2.0 - eb;
                        let host = Piece::ellipse_exterior(ea, eb);
                        {
                            let sim = match fit_in_ellipse(&shape, ea, eb) {
                                Ok(s) => s,
                                Err(e) => {
                                    errors.push(format!("b {eb}: {e}"));
                                    continue;
                                }
                            };
                            let trial = vec![host.clone(), Piece::from_shape(&shape, sim, 0)];
                            match arrange(&trial) {
                                Ok(arr) if arr.faces.len() == want => {
                                    b.add_stage(
                                        trial,
                                        format!("extreme BQD of order {} inscribed in an ellipse with semi-axes {ea} and {eb}", finite[0]),
                                        None,
                                        None,
                                    )?;
                                    placed = true;
                                    break 'thin;
                                }
                                Ok(arr) => errors.push(format!("b {eb}: {} faces", arr.faces.len())),
                                Err(e) => errors.push(format!("b {eb}: {e}")),
                            }
                        }
                    }
                    if !placed {
                        return Err(Error::Infeasible(format!(
                            "no three-contact placement of the order-{} extreme BQD in the ellipse: {}",
                            finite[0],
                            errors.join("; ")
                        )));
                    }
                    for &mu in &finite[1..] {
                        b.inscribe_next(mu)?;
                    }
                }
            }
            finite.push(m);
            b.finish(finite, Some(m))
        }
    }
}

/// `buildBoundedConfig` for a partition of `d ≥ 3`.
pub fn build_bounded_config(partition: &[usize]) -> Result<ConstructionPlan> {
    check_partition(partition)?;
    let d: usize = partition.iter().sum();
    if d < 3 {
        return Err(Error::Input(format!("a bounded construction needs order d ≥ 3 (got {d})")));
    }
    let mut parts: Vec<usize> = partition.to_vec();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    let mut b = Builder::new(PlanKind::Bqd);
    let rest: Vec<usize>;
    if parts[0] >= 3 {
        let shape = b.shape(parts[0])?;
        b.add_stage(vec![Piece::from_shape(&shape, Similarity::default(), 0)], format!("extreme BQD of order {}", parts[0]), None, None)?;
        rest = parts[1..].to_vec();
    } else if parts.iter().all(|&m| m == 1) {
        let r = 1.0;
        let c = |k: usize| C64::from_polar(2.0 * r / 3f64.sqrt(), PI / 2.0 + TAU * k as f64 / 3.0);
        b.add_stage(vec![Piece::disk(c(0), r, 0), Piece::disk(c(1), r, 0), Piece::disk(c(2), r, 0)], "three mutually tangent disks".into(), None, None)?;
        rest = parts[3..].to_vec();
    } else if parts.iter().all(|&m| m == 2) {
        let (a, bb) = two_cardioids()?;
        b.add_stage(vec![a, bb], "two interlocked cardioids".into(), None, None)?;
        rest = parts[2..].to_vec();
    } else {
        let shape = b.shape(2)?;
        let card = Piece::from_shape(&shape, Similarity::default(), 0);
        let (pc, u) = shape.notch_direction().unwrap();
        let size = sample_loop(&card, 512).size;
        let c = pc + u * (0.25 * size);
        let r = distance_to_loop(&card, c);
        b.add_stage(vec![card, Piece::disk(c, r, 0)], "disk in the notch of a cardioid".into(), None, None)?;
        let mut rem = parts.clone();
        rem.remove(rem.iter().position(|&m| m == 2).unwrap());
        rem.remove(rem.iter().position(|&m| m == 1).unwrap());
        rest = rem;
    }
    for &mu in &rest {
        b.inscribe_next(mu)?;
    }
    b.finish(parts, None)
}

/// Face report of a plan: traced arrangement, census, target and bound.
#[derive(Clone, Debug)]
pub struct ArrangementReport {
    pub face_count: usize,
    pub per_face: Vec<Value>,
    pub target_count: usize,
    pub bound: usize,
    pub achieved: bool,
    pub contacts: usize,
    pub euler_faces: i64,
    pub raster: Option<RasterReport>,
    pub arrangement: Arrangement,
}

impl ArrangementReport {
    pub fn to_json(&self) -> Value {
        json!({
            "faceCount": self.face_count,
            "perFaceSingularity": self.per_face,
            "targetCount": self.target_count,
            "theoremBound": self.bound,
            "achieved": self.achieved,
            "contacts": self.contacts,
            "eulerFaceCount": self.euler_faces,
            "raster": self.raster,
            "note": "face count of the configuration before the final Hele-Shaw perturbation, taken as the connectivity",
        })
    }
}

/// `countComplementComponents`: faces of the interior of the complement of
/// the union; exceeding the theorem bound is an invariant violation.
pub fn count_complement_components(plan: &ConstructionPlan) -> Result<ArrangementReport> {
    let arrangement = arrange(&plan.pieces)?;
    let face_count = arrangement.faces.len();
    if face_count > plan.bound {
        return Err(Error::Invariant(format!(
            "{} faces exceed the bound {} for {} {:?}",
            face_count,
            plan.bound,
            plan.kind.name(),
            plan.partition
        )));
    }
    Ok(ArrangementReport {
        face_count,
        per_face: arrangement.faces.iter().map(|f| f.census_json()).collect(),
        target_count: plan.target,
        bound: plan.bound,
        achieved: face_count >= plan.target,
        contacts: arrangement.contacts.len(),
        euler_faces: arrangement.euler_faces,
        raster: None,
        arrangement,
    })
}

/// Adds the rasterization oracle to a report.
pub fn with_raster(mut report: ArrangementReport, plan: &ConstructionPlan, resolution: usize) -> Result<ArrangementReport> {
    report.raster = Some(raster_face_count(&plan.pieces, resolution)?);
    Ok(report)
}

/// Every partition of `d` in non-increasing order.
pub fn partitions(d: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=rem.min(max)).rev() {
            cur.push(k);
            rec(rem - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_of_five() {
        assert_eq!(partitions(5).len(), 7);
        assert!(partitions(4).contains(&vec![2, 1, 1]));
    }

    #[test]
    fn targets_match_the_theorems() {
        assert_eq!(target_count(PlanKind::UqdFinite, &[2]), 2);
        assert_eq!(target_count(PlanKind::UqdFinite, &[2, 1]), 4);
        assert_eq!(target_count(PlanKind::UqdInfinity, &[1, 1, 1]), 4);
        assert_eq!(target_count(PlanKind::Bqd, &[2, 2]), 3);
        assert_eq!(target_count(PlanKind::Bqd, &[2, 1]), 2);
        assert_eq!(target_count(PlanKind::Bqd, &[3]), 2);
    }

    #[test]
    fn two_disjoint_disks_leave_one_face() {
        let pieces = vec![Piece::disk(C64::new(-2.0, 0.0), 1.0, 0), Piece::disk(C64::new(2.0, 0.0), 1.0, 0)];
        let arr = arrange(&pieces).unwrap();
        assert_eq!(arr.faces.len(), 1);
        assert!(!arr.faces[0].bounded);
    }

    #[test]
    fn single_cardioid_leaves_one_face() {
        let shape = ExtremeShape::new(Family::S, 2).unwrap();
        let arr = arrange(&[Piece::from_shape(&shape, Similarity::default(), 0)]).unwrap();
        assert_eq!(arr.faces.len(), 1);
    }

    #[test]
    fn overlapping_disks_are_rejected() {
        let pieces = vec![Piece::disk(C64::new(-0.5, 0.0), 1.0, 0), Piece::disk(C64::new(0.5, 0.0), 1.0, 0)];
        assert!(arrange(&pieces).is_err());
    }
}
