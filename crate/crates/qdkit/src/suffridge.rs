//! Catalog of explicit extreme polynomials in `S_d` and `Σ_d`, the
//! self-dual perturbation basis, and the extremalization loop that pushes a
//! starred map to the univalence boundary until it is extreme.

use crate::curvegeo::{census, find_cusps, find_double_points, is_univalent, BoundaryMap, DoublePoint, Family, SingularityCensus, Univalence, DEFAULT_GRID};
use crate::numerics::{bisect_pred, min_norm_solve, null_vector};
use crate::par;
use crate::ratfun::{is_self_dual, ComplexPoly, LaurentPoly};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

/// Samples used by the univalence test during extremalization.
pub const UNIVALENCE_SAMPLES: usize = 8192;
/// Fraction of the critical step taken before adding the new contact.
pub const ADVANCE_FRACTION: f64 = 0.98;
/// Relative tolerance on closed contact gaps.
pub const GAP_TOL: f64 = 1e-14;
/// Tolerance of the (R2) linear constraints.
pub const R2_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The explicit Suffridge polynomials for `d ∈ 2..=5`.
pub fn known_suffridge(family: Family, d: usize) -> Result<BoundaryMap> {
    let s2 = 2f64.sqrt();
    let terms: Vec<(i32, C64)> = match (family, d) {
        (Family::S, 2) => vec![(1, c(1.0, 0.0)), (2, c(0.5, 0.0))],
        (Family::S, 3) => vec![(1, c(1.0, 0.0)), (2, c(2.0 * s2 / 3.0, 0.0)), (3, c(1.0 / 3.0, 0.0))],
        (Family::S, 4) => {
            let a = 0.5 * (3.0 * (15f64.sqrt() - 3.0)).sqrt();
            let t = ((3.0 / 16.0) * (9.0 + 5.0 * 15f64.sqrt()).sqrt()).acos() / 3.0;
            vec![(1, c(1.0, 0.0)), (2, C64::from_polar(1.5 * a, t)), (3, C64::from_polar(a, -t)), (4, c(0.25, 0.0))]
        }
        (Family::S, 5) => {
            let r = (2.0f64 / 3.0).sqrt();
            vec![(1, c(1.0, 0.0)), (2, c(1.6 * r, 0.0)), (3, c(1.2, 0.0)), (4, c(0.8 * r, 0.0)), (5, c(0.2, 0.0))]
        }
        (Family::Sigma, 2) => vec![(1, c(1.0, 0.0)), (-2, c(-0.5, 0.0))],
        (Family::Sigma, 3) => vec![(1, c(1.0, 0.0)), (-1, c(2.0 / 3.0, 0.0)), (-3, c(-1.0 / 3.0, 0.0))],
        (Family::Sigma, 4) => vec![(1, c(1.0, 0.0)), (-1, c(-5.0 / 8.0, 0.0)), (-2, c(-5.0 / 16.0, 0.0)), (-4, c(-0.25, 0.0))],
        (Family::Sigma, 5) => vec![(1, c(1.0, 0.0)), (-2, c(2.0 * s2 / 5.0, 0.0)), (-5, c(-0.2, 0.0))],
        _ => return Err(Error::NotInCatalog(format!("no explicit Suffridge polynomial for ({family:?}, {d})"))),
    };
    BoundaryMap::new(family, LaurentPoly::from_terms(&terms))
}

/// Starting point of the extremalization: `f' = Π(z − e^{iθ_j})` with equally
/// spaced cusp angles, i.e. `z + z^d/d` (S) or `z − z^{−d}/d` (Σ).
pub fn starred_seed(family: Family, d: usize) -> Result<BoundaryMap> {
    if d < 2 {
        return Err(Error::Input(format!("degree {d} is below 2")));
    }
    let di = d as i32;
    let terms = match family {
        Family::S => vec![(1, c(1.0, 0.0)), (di, c(1.0 / d as f64, 0.0))],
        Family::Sigma => vec![(1, c(1.0, 0.0)), (-di, c(-1.0 / d as f64, 0.0))],
    };
    BoundaryMap::new(family, LaurentPoly::from_terms(&terms))
}

/// Seed from arbitrary cusp angles: `f'` (or `z^{d+1} f'`) `= Π(z − e^{iθ_j})`,
/// after rotating the angles so that the starred normalization holds.
pub fn seed_from_cusp_angles(family: Family, d: usize, thetas: &[f64]) -> Result<BoundaryMap> {
    let count = match family {
        Family::S => d - 1,
        Family::Sigma => d + 1,
    };
    if thetas.len() != count {
        return Err(Error::Input(format!("expected {count} cusp angles, got {}", thetas.len())));
    }
    let target = PI * count as f64;
    let shift = (target - thetas.iter().sum::<f64>()) / count as f64;
    let roots: Vec<C64> = thetas.iter().map(|&t| C64::from_polar(1.0, t + shift)).collect();
    let p = ComplexPoly::from_roots(&roots);
    match family {
        Family::S => BoundaryMap::s_class(&p.integral()),
        Family::Sigma => {
            if p.coeff(d).norm() > 1e-12 {
                return Err(Error::Input("Sigma-class cusp angles must have vanishing sum of e^{iθ}".into()));
            }
            let mut terms = vec![(1, c(1.0, 0.0))];
            for k in 1..=d {
                let coef = p.coeff(d - k);
                terms.push((-(k as i32), -coef / k as f64));
            }
            BoundaryMap::new(Family::Sigma, LaurentPoly::from_terms(&terms))
        }
    }
}

/// Real basis of the perturbations satisfying (R1).
pub fn self_dual_basis(family: Family, d: usize) -> Vec<LaurentPoly> {
    let mut out = Vec::new();
    if d < 3 {
        return out;
    }
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match family {
        Family::S => {
            for m in 2..=d.div_ceil(2) {
                let m2 = d + 1 - m;
                let (mi, m2i) = (m as i32, m2 as i32);
                let (wm, w2) = (1.0 / m as f64, 1.0 / m2 as f64);
                if m == m2 {
                    out.push(LaurentPoly::from_terms(&[(mi, one * (2.0 * wm))]));
                } else {
                    out.push(LaurentPoly::from_terms(&[(mi, one * wm), (m2i, one * w2)]));
                    out.push(LaurentPoly::from_terms(&[(mi, i * wm), (m2i, -i * w2)]));
                }
            }
        }
        Family::Sigma => {
            // r'(1/z) = Σ b_k z^k with b_{j+1} = −j a_j; pair k ↔ d+1−k on 2..=d−1.
            for k in 2..d {
                let k2 = d + 1 - k;
                if k2 < k {
                    continue;
                }
                let a = |b: C64, kk: usize| -> (i32, C64) { (-((kk - 1) as i32), -b / (kk - 1) as f64) };
                if k == k2 {
                    out.push(LaurentPoly::from_terms(&[a(one * 2.0, k)]));
                } else {
                    out.push(LaurentPoly::from_terms(&[a(one, k), a(one, k2)]));
                    out.push(LaurentPoly::from_terms(&[a(i, k), a(-i, k2)]));
                }
            }
        }
    }
    out
}

/// The (R1) self-duality check for a perturbation `r`.
pub fn satisfies_r1(family: Family, d: usize, r: &LaurentPoly, tol: f64) -> bool {
    match family {
        Family::S => {
            if r.lo < 0 || r.coeff(0).norm() > tol || r.coeff(1).norm() > tol || r.coeff(d as i32).norm() > tol || r.hi() > d as i32 {
                return false;
            }
            let p = r.derivative().as_poly().unwrap_or_else(ComplexPoly::zero);
            is_self_dual(&p, d - 1, tol).unwrap_or(false)
        }
        Family::Sigma => {
            if r.hi() > 0 || r.coeff(0).norm() > tol || r.lo < -(d as i32) {
                return false;
            }
            let b: Vec<C64> = (0..=d + 1)
                .map(|k| if k >= 2 { -(r.coeff(-((k - 1) as i32))) * (k - 1) as f64 } else { c(0.0, 0.0) })
                .collect();
            is_self_dual(&ComplexPoly::new(b), d + 1, tol).unwrap_or(false)
        }
    }
}

/// A self-dual perturbation direction for the current double points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerturbationStep {
    pub basis_coefficients: Vec<f64>,
    pub direction: LaurentPoly,
    pub admissible_delta: Option<(f64, f64)>,
    /// Largest (R2) residual over the double points.
    pub r2_residual: f64,
}

/// Exponent `ρ` of the normal `ζ^ρ`: `(d+1)/2` (S) or `(1−d)/2` (Σ).
fn normal_exponent(family: Family, d: usize) -> f64 {
    match family {
        Family::S => (d as f64 + 1.0) / 2.0,
        Family::Sigma => (1.0 - d as f64) / 2.0,
    }
}

/// `Re((r(ζ⁺) − r(ζ⁻)) / (ζ⁺)^ρ)`.
fn r2_functional(family: Family, d: usize, r: &LaurentPoly, tm: f64, tp: f64) -> f64 {
    let rho = normal_exponent(family, d);
    let diff = r.eval(C64::from_polar(1.0, tp)) - r.eval(C64::from_polar(1.0, tm));
    (diff * C64::from_polar(1.0, -rho * tp)).re
}

fn combine(basis: &[LaurentPoly], coeffs: &[f64]) -> LaurentPoly {
    let mut acc = LaurentPoly::from_terms(&[]);
    for (b, &w) in basis.iter().zip(coeffs) {
        acc = acc.add(&b.scale(c(w, 0.0)));
    }
    acc
}

/// Solves (R2) for a nontrivial `r` in the self-dual basis.
pub fn perturbation_direction(map: &BoundaryMap, double_points: &[DoublePoint]) -> Result<PerturbationStep> {
    let d = map.degree();
    let n = double_points.len();
    if n + 2 >= d {
        return Err(Error::Infeasible(format!("already extreme: {n} double points for degree {d}")));
    }
    let basis = self_dual_basis(map.family, d);
    let rows: Vec<Vec<f64>> = double_points
        .iter()
        .map(|dp| basis.iter().map(|b| r2_functional(map.family, d, b, dp.t_minus, dp.t_plus)).collect())
        .collect();
    let coeffs = null_vector(&rows, basis.len(), 1e-10)
        .ok_or_else(|| Error::Singular("(R2) system has no nontrivial solution".into()))?;
    let direction = combine(&basis, &coeffs);
    let r2_residual = double_points
        .iter()
        .map(|dp| r2_functional(map.family, d, &direction, dp.t_minus, dp.t_plus).abs())
        .fold(0.0, f64::max);
    Ok(PerturbationStep { basis_coefficients: coeffs, direction, admissible_delta: None, r2_residual })
}

fn expected_cusps(family: Family, d: usize) -> usize {
    match family {
        Family::S => d - 1,
        Family::Sigma => d + 1,
    }
}

fn perturbed(map: &BoundaryMap, r: &LaurentPoly, delta: f64) -> BoundaryMap {
    BoundaryMap { family: map.family, f: map.f.add(&r.scale(c(delta, 0.0))) }
}

fn plain_ok(map: &BoundaryMap, r: &LaurentPoly, delta: f64, samples: usize) -> Result<bool> {
    let g = perturbed(map, r, delta);
    if find_cusps(&g).0.len() != expected_cusps(map.family, map.degree()) {
        return Ok(false);
    }
    match is_univalent(&g, samples) {
        Univalence::Univalent => Ok(true),
        Univalence::NotUnivalent { .. } => Ok(false),
        Univalence::Inconclusive { reason } => {
            match is_univalent(&g, samples * 4) {
                Univalence::Univalent => Ok(true),
                Univalence::NotUnivalent { .. } => Ok(false),
                Univalence::Inconclusive { .. } => Err(Error::Inconclusive(format!("univalence at delta = {delta}: {reason}"))),
            }
        }
    }
}

/// Bisection bounds `(δ_min, δ_max)` of the univalent interval of `f + δ r`
/// around 0, to absolute `resolution`.
pub fn max_univalent_delta(map: &BoundaryMap, r: &LaurentPoly, resolution: f64) -> Result<(f64, f64)> {
    let scale = map.scale() / r.terms().map(|(_, v)| v.norm()).sum::<f64>().max(1e-300);
    let mut bounds = [0.0f64; 2];
    for (k, sign) in [-1.0f64, 1.0].into_iter().enumerate() {
        let mut lo = 0.0;
        let mut step = 0.01 * scale;
        let hi = loop {
            let t = lo + step;
            if !plain_ok(map, r, sign * t, 4096)? {
                break t;
            }
            lo = t;
            step *= 1.6;
            if lo > 1e6 * scale {
                return Err(Error::Infeasible("univalence never lost along the direction".into()));
            }
        };
        let steps = (((hi - lo) / resolution).log2().ceil().max(0.0) as usize).min(200);
        let mut err = None;
        let (a, _) = bisect_pred(lo, hi, steps, |t| match plain_ok(map, r, sign * t, 4096) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                false
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        bounds[k] = sign * a;
    }
    Ok((bounds[0], bounds[1]))
}

/// A tracked parallel-tangent pair `(t, t + 2πm/M)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactPair {
    pub t: f64,
    pub m: usize,
}

/// `M = d + 1` (S) or `d − 1` (Σ): tangents at `t` and `t'` are parallel iff
/// `M (t' − t) ∈ 2πℤ`.
fn modulus(family: Family, d: usize) -> usize {
    match family {
        Family::S => d + 1,
        Family::Sigma => d - 1,
    }
}

fn wrap(t: f64) -> f64 {
    t.rem_euclid(TAU)
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let x = (a - b).rem_euclid(TAU);
    x.min(TAU - x)
}

struct Frame {
    h: f64,
    sigma: f64,
    dh: f64,
    antiparallel: bool,
}

/// Tangential component `h` and signed normal gap `σ` (positive when the two
/// arcs are separated) of the chord of the pair.
fn frame(g: &BoundaryMap, t: f64, dt: f64) -> Frame {
    let (p0, a0, u0) = g.eval_t(t);
    let (p1, a1, _) = g.eval_t(t + dt);
    let chord = p1 - p0;
    let tau = a0 / a0.norm();
    let theta_rate = (a0.conj() * u0).im / a0.norm_sqr();
    let h = (tau.conj() * chord).re;
    let sigma = -(tau.conj() * chord).im;
    let dh = -theta_rate * sigma + (tau.conj() * (a1 - a0)).re;
    Frame { h, sigma, dh, antiparallel: (a0.conj() * a1).re < 0.0 }
}

fn solve_h(g: &BoundaryMap, mut t: f64, dt: f64) -> Option<f64> {
    for _ in 0..60 {
        let f = frame(g, t, dt);
        if f.dh == 0.0 || !f.dh.is_finite() {
            return None;
        }
        let step = (-f.h / f.dh).clamp(-0.05, 0.05);
        t += step;
        if step.abs() < 1e-15 {
            return Some(t);
        }
    }
    let f = frame(g, t, dt);
    (f.h.abs() < 1e-12 * g.scale()).then_some(t)
}

fn pair_params(family: Family, d: usize, p: &ContactPair) -> (f64, f64) {
    let dt = TAU * p.m as f64 / modulus(family, d) as f64;
    let (a, b) = (wrap(p.t), wrap(p.t + dt));
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn same_pair(x: (f64, f64), y: (f64, f64), tol: f64) -> bool {
    (circ_dist(x.0, y.0) < tol && circ_dist(x.1, y.1) < tol) || (circ_dist(x.0, y.1) < tol && circ_dist(x.1, y.0) < tol)
}

/// Antiparallel-tangent pairs at local chord minima, excluding `tracked`.
fn contact_candidates(g: &BoundaryMap, tracked: &[ContactPair]) -> Vec<(ContactPair, f64)> {
    let d = g.degree();
    let mm = modulus(g.family, d);
    let cusps = find_cusps(g).0;
    let tracked_params: Vec<(f64, f64)> = tracked.iter().map(|p| pair_params(g.family, d, p)).collect();
    let k = 2048;
    let per_m: Vec<Vec<(ContactPair, f64)>> = par::map_range(mm.saturating_sub(1), |mi| {
        let m = mi + 1;
        let dt = TAU * m as f64 / mm as f64;
        let dist: Vec<f64> = (0..k)
            .map(|i| {
                let t = TAU * i as f64 / k as f64;
                (g.point(t + dt) - g.point(t)).norm()
            })
            .collect();
        let mut out = Vec::new();
        for i in 0..k {
            let (a, b) = (dist[(i + k - 1) % k], dist[(i + 1) % k]);
            if dist[i] > a || dist[i] > b || (dist[i] == a && i > 0) {
                continue;
            }
            let Some(t) = solve_h(g, TAU * i as f64 / k as f64, dt) else { continue };
            let f = frame(g, t, dt);
            if !f.antiparallel {
                continue;
            }
            let t2 = t + dt;
            if cusps.iter().any(|cu| circ_dist(cu.t, t) < 1e-3 || circ_dist(cu.t, t2) < 1e-3) {
                continue;
            }
            out.push((ContactPair { t: wrap(t), m }, f.sigma));
        }
        out
    });
    let mut all: Vec<(ContactPair, f64)> = Vec::new();
    for (p, s) in per_m.into_iter().flatten() {
        let pp = pair_params(g.family, d, &p);
        if tracked_params.iter().any(|&q| same_pair(pp, q, 1e-4)) {
            continue;
        }
        if all.iter().any(|(q, _)| same_pair(pp, pair_params(g.family, d, q), 1e-7)) {
            continue;
        }
        all.push((p, s));
    }
    all.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    all
}

/// Closes the gaps of the tracked pairs by minimum-norm Gauss–Newton steps in
/// the coefficient space of `basis`.
fn correct(base: &BoundaryMap, basis: &[LaurentPoly], coeffs: &mut [f64], pairs: &mut [ContactPair]) -> bool {
    if pairs.is_empty() {
        return true;
    }
    let d = base.degree();
    let mm = modulus(base.family, d) as f64;
    let tol = GAP_TOL * base.scale();
    let eval = |coeffs: &[f64], pairs: &mut [ContactPair]| -> Option<(BoundaryMap, Vec<f64>)> {
        let g = BoundaryMap { family: base.family, f: base.f.add(&combine(basis, coeffs)) };
        let mut gaps = Vec::with_capacity(pairs.len());
        for p in pairs.iter_mut() {
            let dt = TAU * p.m as f64 / mm;
            p.t = solve_h(&g, p.t, dt)?;
            let f = frame(&g, p.t, dt);
            if !f.antiparallel {
                return None;
            }
            gaps.push(f.sigma);
        }
        Some((g, gaps))
    };
    let Some((mut g, mut gaps)) = eval(coeffs, pairs) else { return false };
    for _ in 0..40 {
        let worst = gaps.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if worst <= tol {
            return true;
        }
        let jac: Vec<Vec<f64>> = pairs
            .iter()
            .map(|p| {
                let dt = TAU * p.m as f64 / mm;
                let a0 = g.eval_t(p.t).1;
                let tau = a0 / a0.norm();
                let (z0, z1) = (C64::from_polar(1.0, p.t), C64::from_polar(1.0, p.t + dt));
                basis.iter().map(|b| -(tau.conj() * (b.eval(z1) - b.eval(z0))).im).collect()
            })
            .collect();
        let rhs: Vec<f64> = gaps.iter().map(|v| -v).collect();
        let Some(step) = min_norm_solve(&jac, &rhs) else { return false };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<f64> = coeffs.iter().zip(&step).map(|(a, s)| a + lambda * s).collect();
            let mut trial_pairs = pairs.to_vec();
            if let Some((g2, gaps2)) = eval(&trial, &mut trial_pairs) {
                let w2 = gaps2.iter().map(|v| v.abs()).fold(0.0, f64::max);
                if w2 < worst || w2 <= tol {
                    coeffs.copy_from_slice(&trial);
                    pairs.copy_from_slice(&trial_pairs);
                    g = g2;
                    gaps = gaps2;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return gaps.iter().map(|v| v.abs()).fold(0.0, f64::max) <= tol;
        }
    }
    gaps.iter().map(|v| v.abs()).fold(0.0, f64::max) <= tol
}

/// One point on the corrected path `f + δ r + correction`.
#[derive(Clone, Debug)]
struct PathPoint {
    delta: f64,
    coeffs: Vec<f64>,
    pairs: Vec<ContactPair>,
    cands: Vec<(ContactPair, f64)>,
}

/// Candidate in `cands` describing the same pair as `p`, if any.
fn matching(family: Family, d: usize, cands: &[(ContactPair, f64)], p: &ContactPair, tol: f64) -> Option<(ContactPair, f64)> {
    let pp = pair_params(family, d, p);
    cands
        .iter()
        .filter(|(q, _)| same_pair(pp, pair_params(family, d, q), tol))
        .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .copied()
}

#[derive(Clone, Debug, PartialEq)]
enum ProbeFailure {
    Corrector,
    CuspCount(usize),
    Contact(ContactPair),
    Crossing(String),
}

fn probe(
    base: &BoundaryMap,
    basis: &[LaurentPoly],
    dir: &[f64],
    from: &PathPoint,
    delta: f64,
) -> std::result::Result<PathPoint, ProbeFailure> {
    let mut coeffs: Vec<f64> = from.coeffs.iter().zip(dir).map(|(a, r)| a + (delta - from.delta) * r).collect();
    let mut pairs = from.pairs.clone();
    if !correct(base, basis, &mut coeffs, &mut pairs) {
        return Err(ProbeFailure::Corrector);
    }
    let g = BoundaryMap { family: base.family, f: base.f.add(&combine(basis, &coeffs)) };
    let cusps = find_cusps(&g).0.len();
    if cusps != expected_cusps(base.family, base.degree()) {
        return Err(ProbeFailure::CuspCount(cusps));
    }
    let cands = contact_candidates(&g, &pairs);
    let d = base.degree();
    let mut flips: Vec<(ContactPair, f64)> = cands
        .iter()
        .filter(|(p, s)| matching(base.family, d, &from.cands, p, 0.1).is_some_and(|(_, s0)| s0.signum() != s.signum()))
        .copied()
        .collect();
    flips.sort_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap());
    if let Some((p, _)) = flips.first() {
        return Err(ProbeFailure::Contact(*p));
    }
    match is_univalent(&g, UNIVALENCE_SAMPLES) {
        Univalence::Univalent => Ok(PathPoint { delta, coeffs, pairs, cands }),
        Univalence::NotUnivalent { reason, .. } | Univalence::Inconclusive { reason } => Err(ProbeFailure::Crossing(reason)),
    }
}

/// Advance fractions tried in order when closing a new contact.
const ADVANCE_SCHEDULE: [f64; 4] = [ADVANCE_FRACTION, 0.995, 0.999, 0.9999];

/// Moves to `target_delta` along the path, adds the contact that caused
/// `fail` (and any symmetric twins), and closes all gaps.
fn close_new_contact(
    base: &BoundaryMap,
    basis: &[LaurentPoly],
    sdir: &[f64],
    good: &[PathPoint],
    target_delta: f64,
    fail: &ProbeFailure,
    target: usize,
) -> std::result::Result<(BoundaryMap, Vec<ContactPair>), String> {
    let family = base.family;
    let d = base.degree();
    let from = good
        .iter()
        .filter(|p| p.delta <= target_delta)
        .max_by(|a, b| a.delta.partial_cmp(&b.delta).unwrap())
        .ok_or("no path point below the target")?
        .clone();
    let at = probe(base, basis, sdir, &from, target_delta).unwrap_or(from);
    let mut cands = at.cands.clone();
    cands.sort_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap());
    let first = match fail {
        ProbeFailure::Contact(p) => matching(family, d, &cands, p, 0.1),
        _ => cands.first().copied(),
    };
    let (p0, s0) = first.ok_or("no contact candidate")?;
    let mut new_pairs = at.pairs.clone();
    new_pairs.push(p0);
    for &(p, s) in &cands {
        let same = same_pair(pair_params(family, d, &p), pair_params(family, d, &p0), 1e-7);
        if !same && (s.abs() - s0.abs()).abs() <= 1e-6 * s0.abs() + 1e-12 && new_pairs.len() < target {
            new_pairs.push(p);
        }
    }
    let mut coeffs = at.coeffs.clone();
    if !correct(base, basis, &mut coeffs, &mut new_pairs) {
        return Err("corrector failed closing the new contact".into());
    }
    let g = BoundaryMap { family, f: base.f.add(&combine(basis, &coeffs)) };
    if find_cusps(&g).0.len() != expected_cusps(family, d) || !is_univalent(&g, UNIVALENCE_SAMPLES).is_univalent() {
        return Err("closing the new contact broke univalence".into());
    }
    Ok((g, new_pairs))
}

/// One line of the extremalization trace.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundTrace {
    pub round: usize,
    pub n: usize,
    pub delta_interval: (f64, f64),
    pub cusps: usize,
    pub double_points: usize,
    pub event: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtremalizeOutcome {
    /// Result in the starred normalization.
    pub starred: BoundaryMap,
    /// Result rotated so that its first cusp sits at `t = 0`.
    pub gauged: BoundaryMap,
    pub census: SingularityCensus,
    pub trace: Vec<RoundTrace>,
    pub rounds: usize,
    /// Missing double points when the round cap was reached.
    pub shortfall: usize,
}

impl ExtremalizeOutcome {
    pub fn trace_jsonl(&self) -> String {
        self.trace.iter().map(|t| serde_json::to_string(t).unwrap() + "\n").collect()
    }
}

/// `e^{−iφ} f(e^{iφ} z)` with `e^{iφ}` the first cusp.
pub fn rotate_gauge(map: &BoundaryMap) -> BoundaryMap {
    let cusps = find_cusps(map).0;
    let Some(first) = cusps.first() else { return map.clone() };
    let phi = first.t;
    let terms: Vec<(i32, C64)> = map.f.terms().map(|(k, v)| (k, v * C64::from_polar(1.0, (k - 1) as f64 * phi))).collect();
    BoundaryMap { family: map.family, f: LaurentPoly::from_terms(&terms) }
}

fn tracked_from(map: &BoundaryMap, dps: &[DoublePoint]) -> Vec<ContactPair> {
    let mm = modulus(map.family, map.degree()) as f64;
    dps.iter()
        .map(|dp| {
            let m = ((dp.t_plus - dp.t_minus) * mm / TAU).round() as usize;
            ContactPair { t: dp.t_minus, m: m.clamp(1, mm as usize - 1) }
        })
        .collect()
}

fn direction_for(base: &BoundaryMap, basis: &[LaurentPoly], pairs: &[ContactPair]) -> Option<Vec<f64>> {
    let d = base.degree();
    let rows: Vec<Vec<f64>> = pairs
        .iter()
        .map(|p| {
            let (a, b) = (p.t, p.t + TAU * p.m as f64 / modulus(base.family, d) as f64);
            basis.iter().map(|r| r2_functional(base.family, d, r, a, b)).collect()
        })
        .collect();
    null_vector(&rows, basis.len(), 1e-10)
}

/// Runs rounds of perturbation until the map is extreme or `max_rounds` is hit.
pub fn extremalize(f0: &BoundaryMap, max_rounds: usize) -> Result<ExtremalizeOutcome> {
    let d = f0.degree();
    let family = f0.family;
    let expect = expected_cusps(family, d);
    if find_cusps(f0).0.len() != expect {
        return Err(Error::Input(format!("starting map does not have {expect} cusps on the unit circle")));
    }
    let lead = match family {
        Family::S => f0.f.coeff(d as i32) - c(1.0 / d as f64, 0.0),
        Family::Sigma => f0.f.coeff(-(d as i32)) + c(1.0 / d as f64, 0.0),
    };
    if lead.norm() > 1e-12 || (f0.f.coeff(1) - c(1.0, 0.0)).norm() > 1e-12 {
        return Err(Error::Input("starting map is not in the starred normalization".into()));
    }
    if !is_univalent(f0, UNIVALENCE_SAMPLES).is_univalent() {
        return Err(Error::Input("starting map is not univalent".into()));
    }
    let basis = self_dual_basis(family, d);
    let mut base = f0.clone();
    let mut pairs = tracked_from(&base, &find_double_points(&base, DEFAULT_GRID)?.points);
    let mut trace = Vec::new();
    let target = d.saturating_sub(2);
    let mut round = 0;
    while pairs.len() < target && round < max_rounds {
        round += 1;
        let dir = direction_for(&base, &basis, &pairs).ok_or_else(|| Error::Singular("(R2) system is degenerate".into()))?;
        let scale = base.scale() / combine(&basis, &dir).terms().map(|(_, v)| v.norm()).sum::<f64>().max(1e-300);
        let mut advanced = None;
        let mut last_event = String::new();
        for sign in [1.0, -1.0] {
            let sdir: Vec<f64> = dir.iter().map(|v| v * sign).collect();
            let start = PathPoint { delta: 0.0, coeffs: vec![0.0; basis.len()], pairs: pairs.clone(), cands: contact_candidates(&base, &pairs) };
            let mut good = vec![start.clone()];
            let mut step = 0.01 * scale;
            let mut fail: (f64, ProbeFailure);
            loop {
                let from = good.last().unwrap().clone();
                let delta = from.delta + step;
                match probe(&base, &basis, &sdir, &from, delta) {
                    Ok(p) => {
                        good.push(p);
                        step *= 1.5;
                    }
                    Err(e) => {
                        fail = (delta, e);
                        break;
                    }
                }
                if from.delta > 1e3 * scale {
                    return Err(Error::Infeasible("univalence never lost along the direction".into()));
                }
            }
            let mut lo = good.last().unwrap().clone();
            while fail.0 - lo.delta > 1e-9 * fail.0.max(1e-300) {
                let mid = 0.5 * (lo.delta + fail.0);
                match probe(&base, &basis, &sdir, &lo, mid) {
                    Ok(p) => {
                        good.push(p.clone());
                        lo = p;
                    }
                    Err(e) => fail = (mid, e),
                }
            }
            let delta_star = lo.delta;
            last_event = format!("{:?} at delta = {:.9e}", fail.1, fail.0);
            if matches!(fail.1, ProbeFailure::CuspCount(_) | ProbeFailure::Corrector) {
                continue;
            }
            for frac in ADVANCE_SCHEDULE {
                match close_new_contact(&base, &basis, &sdir, &good, frac * delta_star, &fail.1, target) {
                    Ok((g, new_pairs)) => {
                        advanced = Some((g, new_pairs, (sign * delta_star).min(0.0), (sign * delta_star).max(0.0)));
                        break;
                    }
                    Err(msg) => last_event = format!("{msg} at {frac} of the critical step ({:?} at delta = {:.9e})", fail.1, fail.0),
                }
            }
            if advanced.is_some() {
                break;
            }
        }
        let Some((g, new_pairs, a, b)) = advanced else {
            trace.push(RoundTrace { round, n: pairs.len(), delta_interval: (0.0, 0.0), cusps: expect, double_points: pairs.len(), event: format!("stalled: {last_event}") });
            break;
        };
        base = g;
        pairs = new_pairs;
        trace.push(RoundTrace { round, n: pairs.len(), delta_interval: (a, b), cusps: expect, double_points: pairs.len(), event: last_event });
    }
    let (cs, _) = census(&base, DEFAULT_GRID)?;
    let shortfall = target.saturating_sub(cs.double_point_count);
    if let Some(t) = trace.last_mut() {
        t.cusps = cs.cusp_count;
        t.double_points = cs.double_point_count;
    }
    Ok(ExtremalizeOutcome { gauged: rotate_gauge(&base), starred: base, census: cs, trace, rounds: round, shortfall })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvegeo::find_double_points;

    #[test]
    fn catalog_examples_are_starred_and_extreme_shaped() {
        for fam in [Family::S, Family::Sigma] {
            for d in 2..=5 {
                let m = known_suffridge(fam, d).unwrap();
                assert_eq!(m.degree(), d);
                assert_eq!(find_cusps(&m).0.len(), expected_cusps(fam, d));
            }
        }
        assert!(matches!(known_suffridge(Family::S, 6), Err(Error::NotInCatalog(_))));
    }

    #[test]
    fn basis_matches_small_cases_and_r1() {
        let b3 = self_dual_basis(Family::S, 3);
        assert_eq!(b3, vec![LaurentPoly::from_terms(&[(2, c(1.0, 0.0))])]);
        let b4 = self_dual_basis(Family::S, 4);
        assert_eq!(b4.len(), 2);
        assert!((b4[0].coeff(2) - c(0.5, 0.0)).norm() < 1e-15 && (b4[0].coeff(3) - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((b4[1].coeff(2) - c(0.0, 0.5)).norm() < 1e-15 && (b4[1].coeff(3) - c(0.0, -1.0 / 3.0)).norm() < 1e-15);
        for fam in [Family::S, Family::Sigma] {
            for d in 3..=8 {
                let b = self_dual_basis(fam, d);
                assert_eq!(b.len(), d - 2, "{fam:?} {d}");
                for r in &b {
                    assert!(satisfies_r1(fam, d, r, 1e-14), "{fam:?} {d} {r:?}");
                }
                if fam == Family::Sigma {
                    assert!(b.iter().all(|r| r.coeff(-(d as i32 - 1)).norm() == 0.0));
                }
            }
        }
        assert!(!satisfies_r1(Family::S, 4, &LaurentPoly::from_terms(&[(2, c(1.0, 0.0))]), 1e-12));
    }

    #[test]
    fn seeds_are_starred() {
        let s = starred_seed(Family::S, 3).unwrap();
        assert_eq!(find_cusps(&s).0.len(), 2);
        let thetas = [0.3, 2.0, 4.0];
        let m = seed_from_cusp_angles(Family::S, 4, &thetas).unwrap();
        assert!((m.f.coeff(1) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((m.f.coeff(4) - c(0.25, 0.0)).norm() < 1e-12);
        let sg = seed_from_cusp_angles(Family::Sigma, 3, &[0.0, PI / 2.0, PI, 1.5 * PI]).unwrap();
        assert!((sg.f.coeff(-3) + c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        assert_eq!(find_cusps(&sg).0.len(), 4);
    }

    #[test]
    fn direction_satisfies_r2() {
        let f = known_suffridge(Family::S, 3).unwrap();
        assert!(perturbation_direction(&f, &find_double_points(&f, 512).unwrap().points).is_err());
        let f = starred_seed(Family::S, 3).unwrap();
        let step = perturbation_direction(&f, &[]).unwrap();
        assert_eq!(step.direction, LaurentPoly::from_terms(&[(2, c(1.0, 0.0))]));
    }

    #[test]
    fn degree_three_interval_is_brannan() {
        let f = starred_seed(Family::S, 3).unwrap();
        let r = LaurentPoly::from_terms(&[(2, c(1.0, 0.0))]);
        let (lo, hi) = max_univalent_delta(&f, &r, 1e-6).unwrap();
        let exact = 2.0 * 2f64.sqrt() / 3.0;
        assert!((hi - exact).abs() < 1e-3 && (lo + exact).abs() < 1e-3, "{lo} {hi}");
    }

    #[test]
    fn extremalize_degree_three() {
        let out = extremalize(&starred_seed(Family::S, 3).unwrap(), 5).unwrap();
        assert!(out.census.is_extreme, "{:?}", out.trace);
        let a2 = out.starred.f.coeff(2).norm();
        assert!((a2 - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-9, "{a2}");
    }
}
