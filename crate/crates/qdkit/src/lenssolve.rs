//! Fixed points of `z ↦ conj(r(z))`, their classification, the Lefschetz
//! count, the sharp bound, and gravitational-lens maps.

use crate::numerics::{gauss_legendre, nelder_mead};
use crate::ratfun::{aberth_refine, cluster_points, roots_unchecked, ComplexPoly, RationalMap};
use crate::{Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// `||r'| - 1|` below this marks a fixed point as nonhyperbolic.
pub const HYPERBOLIC_MARGIN: f64 = 1e-6;
/// Multipliers at or below this are superattracting.
pub const SUPER_SNAP: f64 = 1e-9;
/// Default residual tolerance, relative to `max(1, |z|²)`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// `γ₀ = (2 − √2)/(2 + √2)`, the two-disk feasibility threshold.
pub fn gamma0() -> f64 {
    let s = 2f64.sqrt();
    (2.0 - s) / (2.0 + s)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FpClass {
    Attracting,
    Repelling,
    Superattracting,
    Nonhyperbolic,
}

impl FpClass {
    fn from_multiplier(m: f64) -> Self {
        if m <= SUPER_SNAP {
            FpClass::Superattracting
        } else if (m - 1.0).abs() < HYPERBOLIC_MARGIN {
            FpClass::Nonhyperbolic
        } else if m < 1.0 {
            FpClass::Attracting
        } else {
            FpClass::Repelling
        }
    }

    pub fn is_attracting(self) -> bool {
        matches!(self, FpClass::Attracting | FpClass::Superattracting)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FpLocation {
    Finite(C64),
    Infinity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    pub location: FpLocation,
    /// `|r'(z)|` for finite points; for ∞ the multiplier in the chart `1/z`.
    pub multiplier: f64,
    pub class: FpClass,
    /// `|r(z) − conj z|` (0 for ∞).
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointReport {
    pub points: Vec<FixedPoint>,
    pub f: usize,
    pub a: usize,
    pub fhat: usize,
    pub ahat: usize,
    pub d: usize,
    pub n: usize,
    pub hyperbolic: bool,
}

impl FixedPointReport {
    pub fn finite_points(&self) -> impl Iterator<Item = (C64, &FixedPoint)> {
        self.points.iter().filter_map(|p| match p.location {
            FpLocation::Finite(z) => Some((z, p)),
            FpLocation::Infinity => None,
        })
    }

    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        let pts: Vec<Value> = self
            .points
            .iter()
            .map(|p| {
                let z = match p.location {
                    FpLocation::Finite(z) => json!([z.re, z.im]),
                    FpLocation::Infinity => json!("inf"),
                };
                json!({"z": z, "multiplier": p.multiplier, "class": p.class})
            })
            .collect();
        json!({
            "points": pts,
            "F": self.f,
            "A": self.a,
            "Fhat": self.fhat,
            "Ahat": self.ahat,
            "d": self.d,
            "n": self.n,
            "lefschetzResidual": verify_lefschetz(self).ok(),
        })
    }
}

/// Cleared numerator of `r*(r(z)) − z`, where `r*(w) = conj(r(conj w))`.
pub fn build_fixed_point_poly(r: &RationalMap) -> Result<ComplexPoly> {
    let d = r.degree;
    let p = &r.numerator;
    let q = &r.denominator;
    let p_pows: Vec<ComplexPoly> = (0..=d).map(|k| p.pow(k)).collect();
    let q_pows: Vec<ComplexPoly> = (0..=d).map(|k| q.pow(k)).collect();
    let mut a = ComplexPoly::zero();
    let mut b = ComplexPoly::zero();
    for k in 0..=d {
        let t = p_pows[k].mul(&q_pows[d - k]);
        a = a.add(&t.scale(p.coeff(k).conj()));
        b = b.add(&t.scale(q.coeff(k).conj()));
    }
    let zb = b.mul(&ComplexPoly::monomial(C64::new(1.0, 0.0), 1));
    let poly = a.sub(&zb);
    let scale = a.max_abs_coeff().max(b.max_abs_coeff()).max(f64::MIN_POSITIVE);
    if poly.max_abs_coeff() <= 1e-12 * scale {
        return Err(Error::Continuum);
    }
    Ok(ComplexPoly::new(
        poly.coeffs()
            .iter()
            .map(|&c| if c.norm() <= 1e-15 * scale { C64::new(0.0, 0.0) } else { c })
            .collect(),
    ))
}

/// Value and derivative of `Σ (p̄_k − z q̄_k) P^k Q^{d−k}` evaluated through
/// `P` and `Q` rather than expanded coefficients.
pub fn factored_fixed_point_eval(r: &RationalMap, z: C64) -> (C64, C64) {
    let d = r.degree;
    let (u, du) = r.numerator.eval_d(z);
    let (v, dv) = r.denominator.eval_d(z);
    let mut h = C64::new(0.0, 0.0);
    let mut dh = C64::new(0.0, 0.0);
    for k in 0..=d {
        let pk = r.numerator.coeff(k).conj();
        let qk = r.denominator.coeff(k).conj();
        let c = pk - z * qk;
        let t = u.powi(k as i32) * v.powi((d - k) as i32);
        let mut dt = C64::new(0.0, 0.0);
        if k > 0 {
            dt += u.powi(k as i32 - 1) * du * v.powi((d - k) as i32) * k as f64;
        }
        if d > k {
            dt += u.powi(k as i32) * v.powi((d - k - 1) as i32) * dv * (d - k) as f64;
        }
        h += c * t;
        dh += c * dt - qk * t;
    }
    (h, dh)
}

/// Newton iteration on the real system `r(z) = conj z`.
fn polish_fixed_point(r: &RationalMap, mut z: C64) -> Option<C64> {
    for _ in 0..40 {
        let (v, a) = r.eval_d(z);
        let g = v - z.conj();
        if !g.is_finite() {
            return None;
        }
        let det = a.norm_sqr() - 1.0;
        if det.abs() < 1e-300 {
            return Some(z);
        }
        let delta = -(g.conj() + a.conj() * g) / det;
        z += delta;
        if delta.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z.is_finite().then_some(z)
}

/// Solves `r(z) = conj z`, classifies each solution and appends ∞ when it is
/// a fixed point.
pub fn solve_lens(r: &RationalMap, tol: f64) -> Result<FixedPointReport> {
    let poly = build_fixed_point_poly(r)?;
    let mut candidates = Vec::new();
    if poly.degree() >= 1 {
        let mut roots = roots_unchecked(&poly);
        aberth_refine(|z| factored_fixed_point_eval(r, z), &mut roots, 100);
        for z0 in roots {
            if let Some(z) = polish_fixed_point(r, z0) {
                let res = (r.eval(z) - z.conj()).norm();
                if res <= tol * z.norm_sqr().max(1.0) {
                    candidates.push(z);
                }
            }
        }
    }
    let polished: Vec<C64> = candidates.iter().map(|&z| polish_fixed_point(r, z).unwrap_or(z)).collect();
    let clusters = cluster_points(&polished, 1e-7);
    let mut points: Vec<FixedPoint> = clusters
        .into_iter()
        .map(|(z, _)| {
            let (v, dv) = r.eval_d(z);
            let m = dv.norm();
            FixedPoint {
                location: FpLocation::Finite(z),
                multiplier: m,
                class: FpClass::from_multiplier(m),
                residual: (v - z.conj()).norm(),
            }
        })
        .collect();
    points.sort_by(|a, b| {
        let (FpLocation::Finite(x), FpLocation::Finite(y)) = (a.location, b.location) else { unreachable!() };
        (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap()
    });
    let f = points.len();
    let a = points.iter().filter(|p| p.class.is_attracting()).count();
    let (dn, dd) = (r.num_degree(), r.den_degree());
    let mut fhat = f;
    let mut ahat = a;
    if dn > dd {
        let m = if dn == dd + 1 {
            let lead = r.numerator.leading() / r.denominator.leading();
            1.0 / lead.norm()
        } else {
            0.0
        };
        let class = FpClass::from_multiplier(m);
        fhat += 1;
        if class.is_attracting() {
            ahat += 1;
        }
        points.push(FixedPoint { location: FpLocation::Infinity, multiplier: m, class, residual: 0.0 });
    }
    let hyperbolic = points.iter().all(|p| p.class != FpClass::Nonhyperbolic);
    Ok(FixedPointReport { points, f, a, fhat, ahat, d: r.degree, n: r.n, hyperbolic })
}

/// `solve_lens` over a batch of maps, data-parallel when the `parallel`
/// feature is on.
pub fn solve_lens_batch(maps: &[RationalMap], tol: f64) -> Vec<Result<FixedPointReport>> {
    crate::par::map_slice(maps, |r| solve_lens(r, tol))
}

/// `F̂ − (2Â + d − 1)`; refuses when a fixed point is nonhyperbolic.
pub fn verify_lefschetz(report: &FixedPointReport) -> Result<i64> {
    if let Some(p) = report.points.iter().find(|p| p.class == FpClass::Nonhyperbolic) {
        let loc = match p.location {
            FpLocation::Finite(z) => format!("{z} (|r'| = {})", p.multiplier),
            FpLocation::Infinity => "infinity".to_string(),
        };
        return Err(Error::Nonhyperbolic(loc));
    }
    Ok(report.fhat as i64 - (2 * report.ahat as i64 + report.d as i64 - 1))
}

/// `min{3d + 2n − 3, 5d − 5}`.
pub fn sharp_bound(d: usize, n: usize) -> usize {
    (3 * d + 2 * n - 3).min(5 * d - 5)
}

/// True iff `F̂ ≤ min{3d + 2n − 3, 5d − 5}` (vacuously true for `d < 2`).
pub fn check_sharp_bound(report: &FixedPointReport) -> bool {
    report.d < 2 || report.fhat <= sharp_bound(report.d, report.n)
}

/// Parameters of `r(z) = −γz + s + Σ ε_j/(z − z_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LensConfig {
    pub gamma: f64,
    pub source: C64,
    pub masses: Vec<f64>,
    pub positions: Vec<C64>,
}

impl LensConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) {
            return Err(Error::Input(format!("shear must be nonnegative, got {}", self.gamma)));
        }
        if self.masses.len() != self.positions.len() {
            return Err(Error::Input("masses and positions differ in length".into()));
        }
        if let Some(e) = self.masses.iter().find(|e| !(**e > 0.0)) {
            return Err(Error::Input(format!("mass must be positive, got {e}")));
        }
        for i in 0..self.positions.len() {
            for j in 0..i {
                if (self.positions[i] - self.positions[j]).norm() < 1e-12 {
                    return Err(Error::Input("coincident mass positions".into()));
                }
            }
        }
        Ok(())
    }
}

/// The rational map of a lens configuration.
pub fn lens_from_masses(config: &LensConfig) -> Result<RationalMap> {
    config.validate()?;
    let one = C64::new(1.0, 0.0);
    let q = ComplexPoly::from_roots(&config.positions);
    let linear = ComplexPoly::new(vec![config.source, C64::new(-config.gamma, 0.0)]);
    let mut p = linear.mul(&q);
    for (j, &e) in config.masses.iter().enumerate() {
        let others: Vec<C64> = config
            .positions
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &z)| z)
            .collect();
        p = p.add(&ComplexPoly::from_roots(&others).scale(one * e));
    }
    RationalMap::new(p, q)
}

/// Disk-packing seed: an ellipse of shear `gamma` with disks inside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSeed {
    pub gamma: f64,
    pub centers: Vec<C64>,
    pub radii: Vec<f64>,
}

impl ConstructionSeed {
    /// `N` equal disks stacked along the major axis of the ellipse
    /// `a w − b/w` with `a + b = 2` and `γ = b/a`; the disks have the width
    /// of the minor axis and touch each other.
    pub fn ellipse_disks(n: usize, gamma: f64) -> Self {
        let a = 2.0 / (1.0 + gamma);
        let b = 2.0 - a;
        let rho = ((a - b) * 0.98).min(2.0 / n as f64);
        let centers = (0..n)
            .map(|j| C64::new(0.0, rho * (2.0 * j as f64 - (n as f64 - 1.0))))
            .collect();
        ConstructionSeed { gamma, centers, radii: vec![rho; n] }
    }

    /// Lens configuration with masses equal to squared radii at the centers.
    pub fn to_config(&self) -> LensConfig {
        LensConfig {
            gamma: self.gamma,
            source: C64::new(0.0, 0.0),
            masses: self.radii.iter().map(|r| r * r).collect(),
            positions: self.centers.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub config: LensConfig,
    pub images: usize,
    pub target: usize,
    pub shortfall: bool,
    pub evaluations: usize,
}

/// Finite image count of a configuration and the smallest `||r'| − 1|` among
/// its images (0 when the solve fails).
pub fn image_count(config: &LensConfig) -> (usize, f64) {
    let Ok(r) = lens_from_masses(config) else { return (0, 0.0) };
    match solve_lens(&r, RESIDUAL_TOL) {
        Ok(rep) => {
            let margin = rep
                .finite_points()
                .map(|(_, p)| (p.multiplier - 1.0).abs())
                .fold(f64::INFINITY, f64::min);
            (rep.f, if margin.is_finite() { margin } else { 0.0 })
        }
        Err(_) => (0, 0.0),
    }
}

struct Param {
    n: usize,
    gamma_range: Option<(f64, f64)>,
}

impl Param {
    fn decode(&self, x: &[f64]) -> LensConfig {
        let gamma = match self.gamma_range {
            Some((lo, hi)) => lo + (hi - lo) / (1.0 + (-x[0]).exp()),
            None => 0.0,
        };
        let source = C64::new(x[1], x[2]);
        let masses = (0..self.n).map(|j| x[3 + j].exp()).collect();
        let positions = (0..self.n)
            .map(|j| C64::new(x[3 + self.n + 2 * j], x[4 + self.n + 2 * j]))
            .collect();
        LensConfig { gamma, source, masses, positions }
    }

    fn encode(&self, c: &LensConfig) -> Vec<f64> {
        let g = match self.gamma_range {
            Some((lo, hi)) => {
                let u = ((c.gamma - lo) / (hi - lo)).clamp(1e-6, 1.0 - 1e-6);
                (u / (1.0 - u)).ln()
            }
            None => 0.0,
        };
        let mut x = vec![g, c.source.re, c.source.im];
        x.extend(c.masses.iter().map(|m| m.ln()));
        for p in &c.positions {
            x.push(p.re);
            x.push(p.im);
        }
        x
    }
}

/// Target image count: `5N − 1` with shear, `5N − 5` without (2 for a single mass).
pub fn image_target(n: usize, shear: bool) -> usize {
    match (shear, n) {
        (true, _) => 5 * n - 1,
        (false, 1) => 2,
        (false, _) => 5 * n - 5,
    }
}

/// Derivative-free search for a lens configuration with many images.
///
/// Nelder–Mead over `(γ, s, log ε_j, z_j)` with the objective `−F` plus a
/// hyperbolicity-margin tie-break, restarted from seeded perturbations of the
/// disk-packing seed until the target `5N − 1` is met or `budget` evaluations
/// are spent. When `seed.gamma > 0` the shear stays in `(γ₀, 1)`; a zero
/// seed shear is kept at zero.
pub fn search_max_images(n: usize, seed: &ConstructionSeed, budget: usize, rng_seed: u64) -> Result<SearchOutcome> {
    if n == 0 || seed.centers.len() != n || seed.radii.len() != n {
        return Err(Error::Input("seed must describe exactly N disks".into()));
    }
    let gamma_range = (seed.gamma > 0.0).then(|| (gamma0(), 1.0));
    let param = Param { n, gamma_range };
    let target = image_target(n, seed.gamma > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let objective = |x: &[f64]| -> f64 {
        let cfg = param.decode(x);
        if cfg.validate().is_err() {
            return 1e3;
        }
        let (f, margin) = image_count(&cfg);
        -(f as f64) - 0.5 * margin.min(1.0)
    };
    let start = param.encode(&seed.to_config());
    let (mut best_cfg, mut best_f) = {
        let cfg = param.decode(&start);
        let (f, _) = image_count(&cfg);
        (cfg, f)
    };
    let mut used = 1usize;
    let mut x0 = start.clone();
    while used < budget && best_f < target {
        let step: Vec<f64> = (0..x0.len()).map(|_| 0.05 + 0.2 * rng.gen::<f64>()).collect();
        let res = nelder_mead(&x0, &step, (budget - used).min(600), 1e-12, objective);
        used += res.evaluations;
        let cfg = param.decode(&res.x);
        let (f, _) = image_count(&cfg);
        if f > best_f && cfg.validate().is_ok() {
            best_f = f;
            best_cfg = cfg;
        }
        let base = param.encode(&best_cfg);
        x0 = base.iter().map(|v| v + 0.3 * (rng.gen::<f64>() - 0.5)).collect();
    }
    Ok(SearchOutcome { config: best_cfg, images: best_f, target, shortfall: best_f < target, evaluations: used })
}

/// A seeded random rational map of degree `d` with a random pole pattern:
/// finite poles with random multiplicities, and a pole at ∞ of random order
/// (possibly none). Resamples until every fixed point is hyperbolic with
/// margin `1e-3` and the solve is clean.
pub fn random_hyperbolic_map(rng: &mut impl Rng, d: usize) -> RationalMap {
    loop {
        let inf_order = if rng.gen_bool(0.5) { rng.gen_range(1..=d) } else { 0 };
        let den_deg = d - inf_order;
        let num_deg = if inf_order > 0 { d } else { rng.gen_range(0..=d) };
        let mut poles = Vec::new();
        let mut left = den_deg;
        while left > 0 {
            let m = rng.gen_range(1..=left.min(3));
            let p = C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            poles.extend(std::iter::repeat_n(p, m));
            left -= m;
        }
        let den = ComplexPoly::from_roots(&poles);
        let num = ComplexPoly::new(
            (0..=num_deg)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        );
        let Ok(r) = RationalMap::new(num, den) else { continue };
        if r.degree != d {
            continue;
        }
        let Ok(rep) = solve_lens(&r, RESIDUAL_TOL) else { continue };
        let margin_ok = rep.points.iter().all(|p| (p.multiplier - 1.0).abs() > 1e-3);
        if margin_ok {
            return r;
        }
    }
}

/// Outcome of the Hele-Shaw potential check at a fixed point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeleShawCheck {
    /// `|conj z0 − r(z0)|`, the gradient of `Q` at `z0`.
    pub gradient_residual: f64,
    /// `1 − |r'(z0)|²`, proportional to the Hessian determinant of `Q`.
    pub determinant: f64,
    /// Minimum of `Q` over the probe circle.
    pub min_probe: f64,
    pub is_local_min: bool,
}

fn segment_integral(r: &RationalMap, a: C64, b: C64, rule: &[(f64, f64)]) -> C64 {
    let panels = 8;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..panels {
        let p0 = a + (b - a) * (k as f64 / panels as f64);
        let p1 = a + (b - a) * ((k + 1) as f64 / panels as f64);
        let h = (p1 - p0) * 0.5;
        let m = (p0 + p1) * 0.5;
        for &(x, w) in rule {
            acc += r.eval(m + h * x) * h * w;
        }
    }
    acc
}

fn distance_to_segment(p: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let t = if ab.norm_sqr() == 0.0 { 0.0 } else { ((p - a) * ab.conj()).re / ab.norm_sqr() };
    (p - (a + ab * t.clamp(0.0, 1.0))).norm()
}

/// `Q(z) = |z|² − |z0|² − 2 Re ∫_{z0}^{z} r`, integrated along a straight
/// segment, or through a deflected midpoint when a pole lies near it.
pub fn hele_shaw_potential(r: &RationalMap, z0: C64, z: C64) -> Result<f64> {
    let rule = gauss_legendre(16);
    let clear = |a: C64, b: C64| {
        let len = (b - a).norm();
        r.finite_poles.iter().all(|(p, _)| distance_to_segment(*p, a, b) > 0.05 * len.max(1e-12))
    };
    let integral = if clear(z0, z) {
        segment_integral(r, z0, z, &rule)
    } else {
        let mid = (z0 + z) * 0.5;
        let normal = (z - z0) * C64::new(0.0, 1.0);
        let mut found = None;
        for s in [0.5, -0.5, 1.0, -1.0, 2.0, -2.0] {
            let w = mid + normal * s;
            if clear(z0, w) && clear(w, z) {
                found = Some(segment_integral(r, z0, w, &rule) + segment_integral(r, w, z, &rule));
                break;
            }
        }
        found.ok_or_else(|| Error::Singular(format!("pole on every integration path from {z0} to {z}")))?
    };
    Ok(z.norm_sqr() - z0.norm_sqr() - 2.0 * integral.re)
}

/// Local-minimum check of the Hele-Shaw potential at `z0` on a probe circle.
pub fn hele_shaw_local_min(r: &RationalMap, z0: C64, probe_radius: f64) -> Result<HeleShawCheck> {
    let (v, dv) = r.eval_d(z0);
    if !v.is_finite() {
        return Err(Error::Singular(format!("{z0} is a pole")));
    }
    let samples = 64;
    let mut min_probe = f64::INFINITY;
    for k in 0..samples {
        let z = z0 + C64::from_polar(probe_radius, 2.0 * std::f64::consts::PI * k as f64 / samples as f64);
        min_probe = min_probe.min(hele_shaw_potential(r, z0, z)?);
    }
    let determinant = 1.0 - dv.norm_sqr();
    Ok(HeleShawCheck {
        gradient_residual: (z0.conj() - v).norm(),
        determinant,
        min_probe,
        is_local_min: determinant > 0.0 && min_probe > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn map(s: &str) -> RationalMap {
        RationalMap::parse(s).unwrap()
    }

    fn has_point(rep: &FixedPointReport, z: C64, tol: f64) -> Option<FpClass> {
        rep.finite_points().find(|(w, _)| (w - z).norm() < tol).map(|(_, p)| p.class)
    }

    #[test]
    fn fixed_point_poly_examples() {
        let half = RationalMap::polynomial(ComplexPoly::from_real(&[0.0, 0.5])).unwrap();
        let p = build_fixed_point_poly(&half).unwrap();
        assert_eq!(p.degree(), 1);
        assert!(p.coeff(0).norm() < 1e-15);
        let sq = RationalMap::polynomial(ComplexPoly::from_real(&[0.0, 0.0, 1.0])).unwrap();
        let p = build_fixed_point_poly(&sq).unwrap();
        assert_eq!(p.degree(), 4);
        let inv = map("[[1,0]]/[[0,0],[1,0]]");
        assert_eq!(build_fixed_point_poly(&inv), Err(Error::Continuum));
    }

    #[test]
    fn squares_tightness() {
        let sq = RationalMap::polynomial(ComplexPoly::from_real(&[0.0, 0.0, 1.0])).unwrap();
        let rep = solve_lens(&sq, RESIDUAL_TOL).unwrap();
        assert_eq!(rep.f, 4);
        assert_eq!(rep.fhat, 5);
        assert_eq!(rep.ahat, 2);
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        for z in [c(0.0, 0.0), c(1.0, 0.0), w, w.conj()] {
            assert!(has_point(&rep, z, 1e-10).is_some());
        }
        assert_eq!(verify_lefschetz(&rep).unwrap(), 0);
        assert!(check_sharp_bound(&rep));
        assert_eq!(sharp_bound(2, 1), 5);
    }

    #[test]
    fn critical_fixed_point_examples() {
        let r = map("[[0,0],[2,0]]/[[-1,0],[0,0],[1,0]]");
        let rep = solve_lens(&r, RESIDUAL_TOL).unwrap();
        assert_eq!(has_point(&rep, c(0.0, 1.0), 1e-10), Some(FpClass::Superattracting));
        assert_eq!(has_point(&rep, c(0.0, -1.0), 1e-10), Some(FpClass::Superattracting));
        assert_eq!(verify_lefschetz(&rep).unwrap(), 0);

        let r = map("[[2,0],[0,0],[1,0]]/[[0,0],[2,0]]");
        let rep = solve_lens(&r, RESIDUAL_TOL).unwrap();
        let s = 2f64.sqrt();
        assert_eq!(has_point(&rep, c(s, 0.0), 1e-10), Some(FpClass::Superattracting));
        assert_eq!(has_point(&rep, c(-s, 0.0), 1e-10), Some(FpClass::Superattracting));

        let cc = 2.0 / 3.0;
        let r = RationalMap::new(
            ComplexPoly::from_real(&[cc * cc * cc, 0.0, 0.0, 0.5]),
            ComplexPoly::from_real(&[0.0, 1.0]),
        )
        .unwrap();
        let rep = solve_lens(&r, RESIDUAL_TOL).unwrap();
        for j in 0..3 {
            let z = C64::from_polar(cc, 2.0 * std::f64::consts::PI * j as f64 / 3.0);
            assert_eq!(has_point(&rep, z, 1e-10), Some(FpClass::Superattracting));
        }
        assert_eq!(verify_lefschetz(&rep).unwrap(), 0);
    }

    #[test]
    fn crofoot_sarason() {
        let p = RationalMap::polynomial(ComplexPoly::from_real(&[0.0, 1.5, 0.0, -0.5])).unwrap();
        let rep = solve_lens(&p, RESIDUAL_TOL).unwrap();
        assert_eq!(has_point(&rep, c(1.0, 0.0), 1e-10), Some(FpClass::Superattracting));
        assert_eq!(has_point(&rep, c(-1.0, 0.0), 1e-10), Some(FpClass::Superattracting));
        assert_eq!(verify_lefschetz(&rep).unwrap(), 0);
        assert!(check_sharp_bound(&rep));
    }

    #[test]
    fn half_map_counts() {
        let r = RationalMap::polynomial(ComplexPoly::from_real(&[0.0, 0.5])).unwrap();
        let rep = solve_lens(&r, RESIDUAL_TOL).unwrap();
        assert_eq!((rep.f, rep.a, rep.fhat, rep.ahat), (1, 1, 2, 1));
        assert_eq!(verify_lefschetz(&rep).unwrap(), 0);
        let j = rep.to_json();
        assert_eq!(j["Fhat"], 2);
        assert_eq!(j["points"][1]["z"], "inf");
    }

    #[test]
    fn nonhyperbolic_refused() {
        let r = RationalMap::polynomial(ComplexPoly::from_real(&[0.0, 1.0, 1.0])).unwrap();
        let rep = solve_lens(&r, RESIDUAL_TOL).unwrap();
        assert!(!rep.hyperbolic);
        assert!(matches!(verify_lefschetz(&rep), Err(Error::Nonhyperbolic(_))));
    }

    #[test]
    fn lens_maps() {
        let cfg = LensConfig { gamma: 0.0, source: c(0.0, 0.0), masses: vec![1.0], positions: vec![c(0.0, 0.0)] };
        let r = lens_from_masses(&cfg).unwrap();
        assert_eq!(r.degree, 1);
        assert!((r.eval(c(2.0, 1.0)) - 1.0 / c(2.0, 1.0)).norm() < 1e-15);
        let cfg = LensConfig { gamma: 0.5, source: c(0.0, 0.0), masses: vec![1.0, 1.0], positions: vec![c(1.0, 0.0), c(-1.0, 0.0)] };
        let r = lens_from_masses(&cfg).unwrap();
        assert_eq!(r.degree, 3);
        assert_eq!(r.n, 3);
        let z = c(0.3, 0.7);
        let want = -0.5 * z + 1.0 / (z - 1.0) + 1.0 / (z + 1.0);
        assert!((r.eval(z) - want).norm() < 1e-14);
        let bad = LensConfig { positions: vec![c(1.0, 0.0), c(1.0, 0.0)], ..cfg.clone() };
        assert!(lens_from_masses(&bad).is_err());
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<LensConfig>(&s).unwrap(), cfg);
    }

    #[test]
    fn gamma0_value() {
        assert!((gamma0() - 0.171573).abs() < 5e-7);
    }

    #[test]
    fn hele_shaw_examples() {
        let r = RationalMap::polynomial(ComplexPoly::from_real(&[0.0, 0.5])).unwrap();
        let h = hele_shaw_local_min(&r, c(0.0, 0.0), 0.1).unwrap();
        assert!((h.determinant - 0.75).abs() < 1e-15);
        assert!(h.is_local_min);
        let r = map("[[0,0],[2,0]]/[[-1,0],[0,0],[1,0]]");
        let h = hele_shaw_local_min(&r, c(0.0, 1.0), 0.05).unwrap();
        assert!((h.determinant - 1.0).abs() < 1e-12);
        assert!(h.is_local_min && h.gradient_residual < 1e-14);
        let r = RationalMap::polynomial(ComplexPoly::from_real(&[0.0, 0.0, 1.0])).unwrap();
        let h = hele_shaw_local_min(&r, c(1.0, 0.0), 0.05).unwrap();
        assert!((h.determinant + 3.0).abs() < 1e-12);
        assert!(!h.is_local_min);
    }
}
