//! Schwarz-function principal parts and the quadrature identity for `f(𝔻)`
//! with `f` a polynomial.

use crate::ratfun::ComplexPoly;
use crate::{Error, Result, C64};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::PI;

/// Relative tolerance for each moment residual.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Coefficients whose exact binary fractions have denominators up to `2^EXACT_DENOM_BITS`
/// take the rational path.
pub const EXACT_DENOM_BITS: u64 = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureNode {
    pub z: C64,
    pub mult: usize,
    /// `principal[m-1]` multiplies `(z − node)^(−m)`.
    pub principal: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureData {
    pub nodes: Vec<QuadratureNode>,
    pub d: usize,
    pub n: usize,
    /// Whether the principal part came from exact rational arithmetic.
    pub exact: bool,
}

fn cjson(z: C64) -> Value {
    json!([z.re, z.im])
}

impl QuadratureData {
    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|nd| {
                json!({
                    "z": cjson(nd.z),
                    "mult": nd.mult,
                    "principal": nd.principal.iter().map(|c| cjson(*c)).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({"nodes": nodes, "d": self.d, "n": self.n, "exact": self.exact})
    }

    /// `r_Ω(z)`, the sum of the principal parts.
    pub fn eval(&self, z: C64) -> C64 {
        let mut s = C64::zero();
        for nd in &self.nodes {
            let u = z - nd.z;
            let mut p = C64::one();
            for c in &nd.principal {
                p /= u;
                s += c * p;
            }
        }
        s
    }

    /// `π · Σ Res z^k r_Ω(z)`.
    pub fn moment(&self, k: usize) -> C64 {
        let mut s = C64::zero();
        for nd in &self.nodes {
            // Residue of z^k (z − a)^(−m) at a is C(k, m−1) a^(k−m+1).
            for (i, c) in nd.principal.iter().enumerate() {
                let m = i + 1;
                if m - 1 > k {
                    break;
                }
                s += c * binom(k, m - 1) * nd.z.powu((k + 1 - m) as u32);
            }
        }
        s * PI
    }
}

fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Truncated power-series arithmetic over any field.
trait Field: Clone + Zero + One + std::ops::Sub<Output = Self> + std::ops::Div<Output = Self> {}
impl<T: Clone + Zero + One + std::ops::Sub<Output = T> + std::ops::Div<Output = T>> Field for T {}

fn mul_trunc<T: Field>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

fn inv_trunc<T: Field>(a: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    out[0] = T::one() / a[0].clone();
    for k in 1..n {
        let mut s = T::zero();
        for j in 1..=k.min(a.len() - 1) {
            s = s + a[j].clone() * out[k - j].clone();
        }
        out[k] = T::zero() - s * out[0].clone();
    }
    out
}

/// Principal part `c_1..c_d` of the Schwarz function at `f(0)`, where `a` are the
/// coefficients of `f` and `ac` their conjugates.
fn principal_generic<T: Field>(a: &[T], ac: &[T]) -> Vec<T> {
    let d = a.len() - 1;
    // Inverse series w(u) = Σ b_j u^j to order d via w = (u − Σ_{k≥2} a_k w^k)/a_1.
    let mut w = vec![T::zero(); d + 1];
    w[1] = T::one() / a[1].clone();
    for _ in 0..d {
        let mut rhs = vec![T::zero(); d + 1];
        rhs[1] = T::one();
        let mut wk = w.clone();
        for ak in a.iter().take(d + 1).skip(2) {
            wk = mul_trunc(&wk, &w, d + 1);
            for (r, x) in rhs.iter_mut().zip(&wk) {
                *r = r.clone() - ak.clone() * x.clone();
            }
        }
        w = rhs.into_iter().map(|x| x / a[1].clone()).collect();
    }
    // w = u h(u); g = 1/h.
    let h: Vec<T> = w[1..].to_vec();
    let g = inv_trunc(&h, d);
    let mut c = vec![T::zero(); d];
    let mut gm = vec![T::one()];
    for (m, acm) in ac.iter().enumerate().skip(1) {
        gm = mul_trunc(&gm, &g, d);
        gm.resize(d, T::zero());
        for j in 1..=m {
            c[j - 1] = c[j - 1].clone() + acm.clone() * gm[m - j].clone();
        }
    }
    c
}

fn small_dyadic(x: f64) -> Option<BigRational> {
    let r = BigRational::from_float(x)?;
    (r.denom().bits() <= EXACT_DENOM_BITS + 1).then_some(r)
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Principal part of the Schwarz function of `f(𝔻)` at its single node `f(0)`.
pub fn schwarz_principal_part(f: &ComplexPoly) -> Result<QuadratureData> {
    let d = f.degree();
    if d == 0 || f.coeff(1).norm() == 0.0 {
        return Err(Error::Input("invalid normalization: f'(0) = 0".into()));
    }
    let a = f.coeffs();
    if a.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Input("non-finite coefficient".into()));
    }
    let exact: Option<Vec<Complex<BigRational>>> = a
        .iter()
        .map(|c| Some(Complex::new(small_dyadic(c.re)?, small_dyadic(c.im)?)))
        .collect();
    let (principal, is_exact) = match exact {
        Some(ar) => {
            let arc: Vec<_> = ar.iter().map(|c| Complex::new(c.re.clone(), -c.im.clone())).collect();
            let c = principal_generic(&ar, &arc);
            (c.iter().map(|z| C64::new(rat_to_f64(&z.re), rat_to_f64(&z.im))).collect(), true)
        }
        None => {
            let ac: Vec<C64> = a.iter().map(|c| c.conj()).collect();
            (principal_generic(a, &ac), false)
        }
    };
    Ok(QuadratureData {
        nodes: vec![QuadratureNode { z: a[0], mult: d, principal }],
        d,
        n: 1,
        exact: is_exact,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentResidual {
    pub k: usize,
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
    pub ok: bool,
}

/// `∫_{f(𝔻)} z^k dA = π Σ m u_m conj(a_m)` with `u` the coefficients of `f^(k+1)/(k+1)`.
pub fn area_moment(f: &ComplexPoly, k: usize) -> C64 {
    let u = f.pow(k + 1);
    let mut s = C64::zero();
    for (m, am) in f.coeffs().iter().enumerate().skip(1) {
        s += u.coeff(m) * am.conj() * m as f64;
    }
    s * PI / (k + 1) as f64
}

/// Residuals of the quadrature identity for `k = 0..=k_max`.
pub fn verify_quadrature_identity(f: &ComplexPoly, k_max: usize) -> Result<Vec<MomentResidual>> {
    let q = schwarz_principal_part(f)?;
    Ok((0..=k_max)
        .map(|k| {
            let lhs = area_moment(f, k);
            let rhs = q.moment(k);
            let residual = (lhs - rhs).norm();
            let tol = IDENTITY_TOL * lhs.norm().max(1.0);
            MomentResidual { k, lhs, rhs, residual, ok: residual <= tol }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suffridge::known_suffridge;
    use crate::curvegeo::Family;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn disk_principal_part() {
        let q = schwarz_principal_part(&ComplexPoly::from_real(&[0.0, 1.5])).unwrap();
        assert!(q.exact);
        assert_eq!(q.nodes[0].principal, vec![c(2.25)]);
    }

    #[test]
    fn cardioid_principal_part() {
        let q = schwarz_principal_part(&ComplexPoly::from_real(&[0.0, 1.0, 0.5])).unwrap();
        assert!(q.exact);
        assert_eq!(q.nodes[0].principal, vec![c(1.5), c(0.5)]);
        let mom = verify_quadrature_identity(&ComplexPoly::from_real(&[0.0, 1.0, 0.5]), 5).unwrap();
        assert!((mom[0].lhs.re - 1.5 * PI).abs() < 1e-14);
        assert!((mom[1].rhs.re - 0.5 * PI).abs() < 1e-14);
        assert!(mom.iter().all(|m| m.ok));
    }

    #[test]
    fn floating_path_matches_exact_path() {
        let f = ComplexPoly::new(vec![C64::zero(), c(1.0), C64::new(0.25, 0.125), C64::new(-0.0625, 0.03125)]);
        let ex = schwarz_principal_part(&f).unwrap();
        assert!(ex.exact);
        let ac: Vec<C64> = f.coeffs().iter().map(|c| c.conj()).collect();
        let fl = principal_generic(f.coeffs(), &ac);
        for (a, b) in ex.nodes[0].principal.iter().zip(&fl) {
            assert!((a - b).norm() < 1e-14);
        }
        let irrational = ComplexPoly::from_real(&[0.0, 1.0, 0.1]);
        assert!(!schwarz_principal_part(&irrational).unwrap().exact);
    }

    #[test]
    fn catalog_pole_order_is_degree() {
        for d in 2..=5 {
            let f = known_suffridge(Family::S, d).unwrap().f.as_poly().unwrap();
            let q = schwarz_principal_part(&f).unwrap();
            assert_eq!(q.nodes[0].principal.len(), d);
            assert!(q.nodes[0].principal[d - 1].norm() > 1e-12);
            assert!(verify_quadrature_identity(&f, 5).unwrap().iter().all(|m| m.ok));
        }
    }

    #[test]
    fn zero_derivative_rejected() {
        assert!(schwarz_principal_part(&ComplexPoly::from_real(&[0.0, 0.0, 1.0])).is_err());
    }
}
