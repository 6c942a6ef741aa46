//! Complex polynomials, Laurent polynomials and rational maps.
//!
//! Coefficients are stored ascending by power. The JSON form of a polynomial
//! is an array of `[re, im]` pairs.

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Distance below which two roots count as shared between numerator and denominator.
pub const COPRIME_TOL: f64 = 1e-9;
/// A root with `||z| - 1|` below this is flagged as lying on the unit circle.
pub const UNIT_SNAP: f64 = 1e-9;

const ABERTH_MAX_ITER: usize = 200;
const POLISH_STEPS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct ComplexPoly {
    coeffs: Vec<C64>,
}

impl From<Vec<[f64; 2]>> for ComplexPoly {
    fn from(v: Vec<[f64; 2]>) -> Self {
        ComplexPoly::new(v.into_iter().map(|[a, b]| C64::new(a, b)).collect())
    }
}

impl From<ComplexPoly> for Vec<[f64; 2]> {
    fn from(p: ComplexPoly) -> Self {
        p.coeffs.iter().map(|c| [c.re, c.im]).collect()
    }
}

impl ComplexPoly {
    /// Builds a polynomial, trimming exactly-zero leading coefficients.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == C64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        ComplexPoly { coeffs }
    }

    pub fn from_real(c: &[f64]) -> Self {
        Self::new(c.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c z^k`.
    pub fn monomial(c: C64, k: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `z - a`.
    pub fn linear_root(a: C64) -> Self {
        Self::new(vec![-a, C64::new(1.0, 0.0)])
    }

    pub fn from_roots(roots: &[C64]) -> Self {
        roots
            .iter()
            .fold(Self::constant(C64::new(1.0, 0.0)), |acc, &r| acc.mul(&Self::linear_root(r)))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == C64::new(0.0, 0.0)
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> C64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_d(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `Σ |c_k| |z|^k`, the scale of rounding error in `eval(z)`.
    pub fn eval_scale(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let mut v = vec![C64::new(0.0, 0.0)];
        v.extend(self.coeffs.iter().enumerate().map(|(k, &c)| c / (k as f64 + 1.0)));
        Self::new(v)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::new(v)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::constant(C64::new(1.0, 0.0)), |acc, _| acc.mul(self))
    }

    /// Polynomial with conjugated coefficients, `conj(p(conj z))`.
    pub fn conj_coeffs(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// `p(e^{iθ} z)`.
    pub fn rotate_arg(&self, theta: f64) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c * C64::from_polar(1.0, theta * k as f64))
                .collect(),
        )
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Maximum coefficient-wise distance to another polynomial.
    pub fn max_coeff_diff(&self, o: &Self) -> f64 {
        let n = self.coeffs.len().max(o.coeffs.len());
        (0..n).map(|k| (self.coeff(k) - o.coeff(k)).norm()).fold(0.0, f64::max)
    }
}

/// True when `||z| - 1| < UNIT_SNAP`.
pub fn on_unit_circle(z: C64) -> bool {
    (z.norm() - 1.0).abs() < UNIT_SNAP
}

/// Start points from the Newton polygon of `(k, log|c_k|)`: each edge of the
/// upper convex hull between `k_i < k_j` contributes `k_j − k_i` points on the
/// circle of radius `(|c_{k_i}|/|c_{k_j}|)^{1/(k_j − k_i)}`, each circle capped
/// by the Cauchy bound.
fn newton_polygon_starts(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    let pts: Vec<(f64, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, x)| x.norm() > 0.0)
        .map(|(k, x)| (k as f64, x.norm().ln()))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let cauchy = cauchy_radius(c);
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (k0, l0) = w[0];
        let (k1, l1) = w[1];
        let m = (k1 - k0) as usize;
        let radius = ((l0 - l1) / (k1 - k0)).exp().min(cauchy);
        for j in 0..m {
            let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64 + 2.0 * std::f64::consts::PI * k0 / n as f64 + 0.4;
            out.push(C64::from_polar(radius, th));
        }
    }
    out
}

/// Unique positive root of `|a_n| x^n = Σ_{k<n} |a_k| x^k`.
fn cauchy_radius(c: &[C64]) -> f64 {
    let n = c.len() - 1;
    let lead = c[n].norm();
    let b: Vec<f64> = c.iter().map(|x| x.norm() / lead).collect();
    let g = |x: f64| -> (f64, f64) {
        let mut v = 1.0;
        let mut dv = 0.0;
        for (k, &bk) in b.iter().enumerate().take(n) {
            let e = k as f64 - n as f64;
            v -= bk * x.powf(e);
            dv -= bk * e * x.powf(e - 1.0);
        }
        (v, dv)
    };
    let mut x = 1.0 + b[..n].iter().cloned().fold(0.0, f64::max);
    for _ in 0..200 {
        let (v, dv) = g(x);
        if dv <= 0.0 || !v.is_finite() {
            break;
        }
        let nx = x - v / dv;
        if !nx.is_finite() || nx <= 0.0 {
            break;
        }
        if (nx - x).abs() <= 1e-14 * x {
            x = nx;
            break;
        }
        x = nx;
    }
    x
}

/// All roots of `p` with multiplicity, by Aberth–Ehrlich iteration.
///
/// Start points come from the Newton polygon of the coefficient moduli; each
/// root is then polished with Newton steps. Fails if some residual exceeds
/// `tol · Σ|c_k||z|^k`.
pub fn all_roots(p: &ComplexPoly, tol: f64) -> Result<Vec<C64>> {
    if p.is_zero() {
        return Err(Error::Input("root finding on the zero polynomial".into()));
    }
    let deg = p.degree();
    if deg == 0 {
        return Err(Error::Input("root finding on a constant polynomial".into()));
    }
    let roots = roots_unchecked(p);
    let worst = roots
        .iter()
        .map(|&r| p.eval(r).norm() / p.eval_scale(r).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if !(worst <= tol) {
        return Err(Error::NoConvergence { degree: deg, worst });
    }
    Ok(roots)
}

/// Roots of a nonconstant polynomial without the residual check.
pub fn roots_unchecked(p: &ComplexPoly) -> Vec<C64> {
    let zeros_at_origin = p.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let mut roots = vec![C64::new(0.0, 0.0); zeros_at_origin];
    let q = ComplexPoly::new(p.coeffs[zeros_at_origin..].to_vec());
    let m = q.degree();
    if m == 0 {
        return roots;
    }
    let lead = q.leading();
    let mon = q.scale(C64::new(1.0, 0.0) / lead);
    let z = if m == 1 {
        vec![-mon.coeffs[0]]
    } else {
        aberth(&mon)
    };
    roots.extend(z.into_iter().map(|r| polish(p, r)));
    roots
}

fn aberth(mon: &ComplexPoly) -> Vec<C64> {
    let n = mon.degree();
    let mut z = newton_polygon_starts(&mon.coeffs);
    for _ in 0..ABERTH_MAX_ITER {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (v, dv) = mon.eval_d(z[k]);
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let w = v / dv;
            let s: C64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d == C64::new(0.0, 0.0) {
                        C64::new(0.0, 0.0)
                    } else {
                        C64::new(1.0, 0.0) / d
                    }
                })
                .sum();
            let denom = C64::new(1.0, 0.0) - w * s;
            let step = if denom.norm() > 0.0 && w.is_finite() { w / denom } else { w };
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// Further Aberth sweeps on a function given by value and derivative, e.g.
/// a polynomial evaluated in factored form. `z` holds all root estimates.
pub fn aberth_refine<F: Fn(C64) -> (C64, C64)>(f: F, z: &mut [C64], iters: usize) {
    let n = z.len();
    for _ in 0..iters {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (v, dv) = f(z[k]);
            if v == C64::new(0.0, 0.0) || !v.is_finite() || !dv.is_finite() {
                continue;
            }
            let w = v / dv;
            let s: C64 = (0..n)
                .filter(|&j| j != k && z[k] != z[j])
                .map(|j| C64::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let denom = C64::new(1.0, 0.0) - w * s;
            let step = if denom.norm() > 0.0 { w / denom } else { w };
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
}

fn polish(p: &ComplexPoly, mut z: C64) -> C64 {
    let mut best = p.eval(z).norm();
    for _ in 0..POLISH_STEPS {
        let (v, dv) = p.eval_d(z);
        if dv.norm() == 0.0 {
            break;
        }
        let nz = z - v / dv;
        let nv = p.eval(nz).norm();
        if nz.is_finite() && nv <= best {
            z = nz;
            best = nv;
        } else {
            break;
        }
    }
    z
}

/// Roots sorted by argument in `[0, 2π)`.
pub fn roots_by_angle(roots: &mut [C64]) {
    roots.sort_by(|a, b| angle01(a.arg()).partial_cmp(&angle01(b.arg())).unwrap());
}

/// Reduces an angle to `[0, 2π)`.
pub fn angle01(t: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let r = t.rem_euclid(tau);
    if r >= tau {
        0.0
    } else {
        r
    }
}

/// The involution `p*(z) = z^k conj(p(1/conj z))` on polynomials of degree ≤ k.
pub fn dualize(p: &ComplexPoly, k: usize) -> Result<ComplexPoly> {
    if p.degree() > k && !p.is_zero() {
        return Err(Error::InvalidSlot { degree: p.degree(), slot: k });
    }
    Ok(ComplexPoly::new((0..=k).map(|j| p.coeff(k - j).conj()).collect()))
}

/// True iff `p` and `dualize(p, k)` agree coefficient-wise within `tol`.
pub fn is_self_dual(p: &ComplexPoly, k: usize, tol: f64) -> Result<bool> {
    let d = dualize(p, k)?;
    Ok(p.max_coeff_diff(&d) <= tol)
}

/// Groups nearby points; returns (mean location, count) per cluster.
pub fn cluster_points(pts: &[C64], radius: f64) -> Vec<(C64, usize)> {
    let mut out: Vec<(C64, usize, C64)> = Vec::new();
    for &p in pts {
        if let Some(c) = out
            .iter_mut()
            .find(|(m, _, _)| (*m - p).norm() <= radius * (1.0 + p.norm()))
        {
            c.1 += 1;
            c.2 += p;
            c.0 = c.2 / c.1 as f64;
        } else {
            out.push((p, 1, p));
        }
    }
    out.into_iter().map(|(m, k, _)| (m, k)).collect()
}

/// A Laurent polynomial `Σ_{k=lo}^{lo+len-1} c_k z^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentPoly {
    pub lo: i32,
    pub coeffs: Vec<C64>,
}

impl LaurentPoly {
    pub fn new(lo: i32, coeffs: Vec<C64>) -> Self {
        let mut l = LaurentPoly { lo, coeffs };
        l.trim();
        l
    }

    pub fn from_poly(p: &ComplexPoly) -> Self {
        Self::new(0, p.coeffs().to_vec())
    }

    /// Builds `Σ terms` from `(power, coefficient)` pairs.
    pub fn from_terms(terms: &[(i32, C64)]) -> Self {
        let lo = terms.iter().map(|t| t.0).min().unwrap_or(0);
        let hi = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut v = vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for &(k, c) in terms {
            v[(k - lo) as usize] += c;
        }
        Self::new(lo, v)
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == C64::new(0.0, 0.0) {
            self.coeffs.pop();
        }
        while self.coeffs.len() > 1 && self.coeffs[0] == C64::new(0.0, 0.0) {
            self.coeffs.remove(0);
            self.lo += 1;
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(C64::new(0.0, 0.0));
        }
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, k: i32) -> C64 {
        if k < self.lo || k > self.hi() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(k - self.lo) as usize]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.lo + i as i32, c))
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.lo)
    }

    pub fn derivative(&self) -> Self {
        Self::from_terms(
            &self
                .terms()
                .filter(|(k, _)| *k != 0)
                .map(|(k, c)| (k - 1, c * k as f64))
                .collect::<Vec<_>>(),
        )
    }

    /// `(f, f', f'')` at `z`.
    pub fn eval3(&self, z: C64) -> (C64, C64, C64) {
        let mut f = C64::new(0.0, 0.0);
        let mut d1 = C64::new(0.0, 0.0);
        let mut d2 = C64::new(0.0, 0.0);
        for (k, c) in self.terms() {
            let zk = z.powi(k);
            f += c * zk;
            if k != 0 {
                let zk1 = z.powi(k - 1);
                d1 += c * k as f64 * zk1;
                if k != 1 {
                    d2 += c * (k * (k - 1)) as f64 * z.powi(k - 2);
                }
            }
        }
        (f, d1, d2)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut t: Vec<(i32, C64)> = self.terms().collect();
        t.extend(o.terms());
        Self::from_terms(&t)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `z^{-lo}` times the Laurent polynomial, as an ordinary polynomial.
    pub fn cleared(&self) -> ComplexPoly {
        ComplexPoly::new(self.coeffs.clone())
    }

    /// Nonnegative-power part as a polynomial (fails if negative powers are present).
    pub fn as_poly(&self) -> Option<ComplexPoly> {
        if self.lo < 0 && self.coeffs.iter().take((-self.lo) as usize).any(|c| c.norm() != 0.0) {
            return None;
        }
        Some(ComplexPoly::new((0..=self.hi().max(0)).map(|k| self.coeff(k)).collect()))
    }
}

/// A rational map `P/Q` with pole bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalMap {
    pub numerator: ComplexPoly,
    pub denominator: ComplexPoly,
    pub degree: usize,
    pub finite_poles: Vec<(C64, usize)>,
    pub n: usize,
}

impl RationalMap {
    /// Validates coprimality and records the finite poles and the count `n`.
    pub fn new(numerator: ComplexPoly, denominator: ComplexPoly) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::Input("zero denominator".into()));
        }
        let dn = if numerator.is_zero() { 0 } else { numerator.degree() };
        let dd = denominator.degree();
        let degree = dn.max(dd);
        if degree < 1 {
            return Err(Error::Input("rational map must have degree at least 1".into()));
        }
        let mut finite_poles = Vec::new();
        if dd >= 1 {
            let den_roots = all_roots(&denominator, 1e-8)?;
            if dn >= 1 {
                let num_roots = all_roots(&numerator, 1e-8)?;
                for a in &num_roots {
                    for b in &den_roots {
                        if (a - b).norm() < COPRIME_TOL {
                            return Err(Error::Input(format!(
                                "numerator and denominator share a root near {a}"
                            )));
                        }
                    }
                }
            }
            finite_poles = cluster_points(&den_roots, 1e-4);
        }
        let n = finite_poles.len() + usize::from(dn > dd);
        Ok(RationalMap { numerator, denominator, degree, finite_poles, n })
    }

    pub fn polynomial(p: ComplexPoly) -> Result<Self> {
        Self::new(p, ComplexPoly::constant(C64::new(1.0, 0.0)))
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.numerator.eval(z) / self.denominator.eval(z)
    }

    /// `(r(z), r'(z))`.
    pub fn eval_d(&self, z: C64) -> (C64, C64) {
        let (p, dp) = self.numerator.eval_d(z);
        let (q, dq) = self.denominator.eval_d(z);
        (p / q, (dp * q - p * dq) / (q * q))
    }

    pub fn num_degree(&self) -> usize {
        if self.numerator.is_zero() {
            0
        } else {
            self.numerator.degree()
        }
    }

    pub fn den_degree(&self) -> usize {
        self.denominator.degree()
    }

    /// Order of the pole at ∞ (0 when ∞ is not a pole).
    pub fn pole_order_at_infinity(&self) -> usize {
        self.num_degree().saturating_sub(self.den_degree())
    }

    /// The map whose conjugate `conj r'` is `ρ ∘ conj r ∘ ρ⁻¹` for the rotation
    /// `ρ(z) = e^{iθ} z`, i.e. `r'(z) = e^{-iθ} r(e^{-iθ} z)`. Fixed points of
    /// `conj r'` are those of `conj r` rotated by `e^{iθ}`.
    pub fn conjugate_rotation(&self, theta: f64) -> Result<Self> {
        let u = C64::from_polar(1.0, -theta);
        let num = self.numerator.rotate_arg(-theta).scale(u);
        let den = self.denominator.rotate_arg(-theta);
        Self::new(num, den)
    }

    /// Parses `num/den` with each side in the JSON polynomial format.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = match s.find("]/[") {
            Some(i) => (&s[..=i], &s[i + 2..]),
            None => (s, "[[1,0]]"),
        };
        let parse_poly = |t: &str| -> Result<ComplexPoly> {
            serde_json::from_str::<ComplexPoly>(t.trim())
                .map_err(|e| Error::Input(format!("malformed polynomial {t:?}: {e}")))
        };
        Self::new(parse_poly(a)?, parse_poly(b)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn roots_of_z2_plus_1() {
        let r = all_roots(&ComplexPoly::from_real(&[1.0, 0.0, 1.0]), 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|z| (z - c(0.0, 1.0)).norm() < 1e-14));
        assert!(r.iter().any(|z| (z - c(0.0, -1.0)).norm() < 1e-14));
    }

    #[test]
    fn roots_of_cubic_suffridge_derivative() {
        let s2 = 2f64.sqrt();
        let p = ComplexPoly::from_real(&[1.0, 4.0 * s2 / 3.0, 1.0]);
        let r = all_roots(&p, 1e-12).unwrap();
        for want in [c(-2.0 * s2 / 3.0, 1.0 / 3.0), c(-2.0 * s2 / 3.0, -1.0 / 3.0)] {
            assert!(r.iter().any(|z| (z - want).norm() < 1e-13));
        }
        assert!(r.iter().all(|&z| on_unit_circle(z)));
    }

    #[test]
    fn roots_of_talbot_numerator_are_unimodular() {
        let p = ComplexPoly::from_real(&[1.0, 0.0, -2.0 / 3.0, 0.0, 1.0]);
        let r = all_roots(&p, 1e-12).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn roots_with_zero_and_multiple_roots() {
        let p = ComplexPoly::from_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 1.0)]);
        let r = all_roots(&p, 1e-10).unwrap();
        assert_eq!(r.len(), 5);
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
        assert_eq!(r.iter().filter(|z| (*z - c(1.0, 0.0)).norm() < 1e-6).count(), 2);
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(all_roots(&ComplexPoly::from_real(&[3.0]), 1e-10).is_err());
        assert!(all_roots(&ComplexPoly::zero(), 1e-10).is_err());
    }

    #[test]
    fn dualize_examples() {
        let p = ComplexPoly::from_real(&[1.0, 1.0]);
        assert_eq!(dualize(&p, 1).unwrap(), p);
        let q = ComplexPoly::from_real(&[1.0, 2.0]);
        assert_eq!(dualize(&q, 1).unwrap(), ComplexPoly::from_real(&[2.0, 1.0]));
        assert!(!is_self_dual(&q, 1, 1e-12).unwrap());
        assert!(matches!(dualize(&ComplexPoly::from_real(&[1.0, 0.0, 1.0]), 1), Err(Error::InvalidSlot { .. })));
        let s2 = 2f64.sqrt();
        let fp = ComplexPoly::from_real(&[1.0, 4.0 * s2 / 3.0, 1.0]);
        assert!(is_self_dual(&fp, 2, 1e-15).unwrap());
        let deltoid = ComplexPoly::from_real(&[1.0, 0.0, 0.0, 1.0]);
        assert!(is_self_dual(&deltoid, 3, 0.0).unwrap());
        let complex = ComplexPoly::new(vec![c(1.0, 2.0), c(3.0, -1.0), c(0.5, 0.5)]);
        assert_eq!(dualize(&dualize(&complex, 4).unwrap(), 4).unwrap(), complex);
    }

    #[test]
    fn rational_map_poles() {
        let r = RationalMap::parse("[[0,0],[2,0]]/[[-1,0],[0,0],[1,0]]").unwrap();
        assert_eq!(r.degree, 2);
        assert_eq!(r.n, 2);
        assert_eq!(r.finite_poles.len(), 2);
        let z2 = RationalMap::parse("[[0,0],[0,0],[1,0]]").unwrap();
        assert_eq!(z2.degree, 2);
        assert_eq!(z2.n, 1);
        assert_eq!(z2.pole_order_at_infinity(), 2);
        let double = RationalMap::new(
            ComplexPoly::from_real(&[1.0]),
            ComplexPoly::from_real(&[1.0, -2.0, 1.0]),
        )
        .unwrap();
        assert_eq!(double.finite_poles.len(), 1);
        assert_eq!(double.finite_poles[0].1, 2);
        assert!(RationalMap::new(ComplexPoly::from_real(&[-1.0, 1.0]), ComplexPoly::from_real(&[-1.0, 0.0, 1.0])).is_err());
        assert!(RationalMap::parse("[[1,0]]/[[2,0]]").is_err());
        assert!(RationalMap::parse("[[1,0]/[[2,0]]").is_err());
    }

    #[test]
    fn laurent_eval_and_derivatives() {
        let f = LaurentPoly::from_terms(&[(1, c(1.0, 0.0)), (-2, c(-0.5, 0.0))]);
        let z = c(0.3, 0.8);
        let (v, d1, d2) = f.eval3(z);
        assert!((v - (z - 0.5 / (z * z))).norm() < 1e-14);
        assert!((d1 - (1.0 + 1.0 / (z * z * z))).norm() < 1e-14);
        assert!((d2 - (-3.0 / z.powi(4))).norm() < 1e-13);
        assert!((f.derivative().eval(z) - d1).norm() < 1e-14);
        assert_eq!(f.lo, -2);
        assert!(f.as_poly().is_none());
    }

    #[test]
    fn json_roundtrip() {
        let p = ComplexPoly::new(vec![c(1.0, -2.0), c(0.0, 3.5)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[1.0,-2.0],[0.0,3.5]]");
        let q: ComplexPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
