//! Small numerical kernels: Gauss–Legendre rules, bisection, Nelder–Mead,
//! dense real linear algebra.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Bisection on `[a, b]` where `pred(a)` is true and `pred(b)` is false.
/// Returns the final bracket `(last true, first false)`.
pub fn bisect_pred<F: FnMut(f64) -> bool>(mut a: f64, mut b: f64, steps: usize, mut pred: F) -> (f64, f64) {
    for _ in 0..steps {
        let m = 0.5 * (a + b);
        if pred(m) {
            a = m;
        } else {
            b = m;
        }
    }
    (a, b)
}

/// Golden-section maximisation of a unimodal `f` on `[a, b]`; returns `(argmax, max)`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut a: f64, mut b: f64, iters: usize, mut f: F) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc >= fd {
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
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Root of a continuous `f` with a sign change on `[a, b]` by bisection
/// followed by secant refinement.
pub fn bisect_root<F: FnMut(f64) -> f64>(mut a: f64, mut b: f64, tol: f64, mut f: F) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < tol {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Result of a Nelder–Mead run.
#[derive(Clone, Debug)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Nelder–Mead minimisation with standard coefficients, stopping after
/// `budget` evaluations or when the simplex values agree within `ftol`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(x0: &[f64], step: &[f64], budget: usize, ftol: f64, mut f: F) -> NmResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    while evals < budget {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if (simplex[n].1 - simplex[0].1).abs() <= ftol && simplex[n].1.is_finite() {
            let spread = (0..n)
                .map(|k| simplex.iter().map(|s| (s.0[k] - simplex[0].0[k]).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread < 1e-10 {
                break;
            }
        }
        let centroid: Vec<f64> = (0..n).map(|k| simplex[..n].iter().map(|s| s.0[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + t * (simplex[n].0[k] - centroid[k])).collect() };
        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let x = along(-0.5);
                let v = eval(&x, &mut evals);
                (x, v)
            } else {
                let x = along(0.5);
                let v = eval(&x, &mut evals);
                (x, v)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    for k in 0..n {
                        s.0[k] = best[k] + 0.5 * (s.0[k] - best[k]);
                    }
                    s.1 = eval(&s.0, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    NmResult { x: simplex[0].0.clone(), value: simplex[0].1, evaluations: evals }
}

/// Solves the dense system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` for a (numerically) singular matrix.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[piv][col].abs() <= 1e-14 * scale {
            return None;
        }
        m.swap(col, piv);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            for j in col..=n {
                m[i][j] -= f * m[col][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

/// Minimum-norm solution of the underdetermined system `j x = r`
/// (`j` has full row rank), via `x = jᵀ (j jᵀ)⁻¹ r`.
pub fn min_norm_solve(j: &[Vec<f64>], r: &[f64]) -> Option<Vec<f64>> {
    let m = j.len();
    if m == 0 {
        return Some(Vec::new());
    }
    let n = j[0].len();
    let jjt: Vec<Vec<f64>> = (0..m)
        .map(|a| (0..m).map(|b| (0..n).map(|k| j[a][k] * j[b][k]).sum()).collect())
        .collect();
    let y = solve_dense(&jjt, r)?;
    Some((0..n).map(|k| (0..m).map(|a| j[a][k] * y[a]).sum()).collect())
}

/// A null vector of the `m × n` matrix `a`, taken from the reduced row
/// echelon form: the basis vector attached to the lowest-index free column,
/// normalised to unit length with its first nonzero entry positive.
/// Returns `None` when the matrix has full column rank.
pub fn null_vector(a: &[Vec<f64>], n: usize, tol: f64) -> Option<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let rows = m.len();
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        if r >= rows {
            break;
        }
        let piv = (r..rows).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap()).unwrap();
        if m[piv][col].abs() <= tol * scale {
            continue;
        }
        m.swap(r, piv);
        let p = m[r][col];
        for v in m[r].iter_mut() {
            *v /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = m[i][col];
                if f != 0.0 {
                    for k in 0..n {
                        m[i][k] -= f * m[r][k];
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut x = vec![0.0; n];
    x[free] = 1.0;
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = -m[row][free];
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let first = x.iter().find(|v| v.abs() > 1e-14).copied().unwrap_or(1.0);
    let s = first.signum() / norm;
    Some(x.iter().map(|v| v * s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(8);
        let s: f64 = rule.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let s: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let r = nelder_mead(&[-1.2, 1.0], &[0.1, 0.1], 4000, 1e-16, |x| {
            (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
        });
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn null_vector_picks_lowest_free_column() {
        let v = null_vector(&[vec![1.0, 1.0, 0.0]], 3, 1e-12).unwrap();
        let s = 0.5f64.sqrt();
        assert!((v[0] - s).abs() < 1e-15 && (v[1] + s).abs() < 1e-15 && v[2] == 0.0);
        assert!(null_vector(&[vec![1.0, 0.0], vec![0.0, 1.0]], 2, 1e-12).is_none());
        let e = null_vector(&[], 2, 1e-12).unwrap();
        assert_eq!(e, vec![1.0, 0.0]);
    }

    #[test]
    fn solvers() {
        let x = solve_dense(&[vec![2.0, 1.0], vec![1.0, 3.0]], &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        let y = min_norm_solve(&[vec![1.0, 1.0]], &[2.0]).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-15 && (y[1] - 1.0).abs() < 1e-15);
        let r = bisect_root(0.0, 2.0, 1e-14, |x| x * x - 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }
}
