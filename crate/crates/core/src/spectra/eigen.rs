//! Dense symmetric eigenvalues: Householder tridiagonalization followed by
//! implicit-shift QL. Reflectors are kept so sampled eigenvectors can be
//! back-transformed for residual checks.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    /// Reflector k acts on indices `k+1..n` as `I - beta v vᵀ`.
    reflectors: Vec<(f64, Vec<f64>)>,
}

/// Reduce a row-major symmetric matrix in place to tridiagonal form.
pub fn tridiagonalize(a: &mut [f64], n: usize) -> Tridiagonal {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        diag[k] = a[k * n + k];
        let m = n - k - 1;
        let x: Vec<f64> = a[k * n + k + 1..(k + 1) * n].to_vec();
        let sigma: f64 = x[1..].iter().map(|v| v * v).sum();
        let alpha_norm = (x[0] * x[0] + sigma).sqrt();
        if sigma == 0.0 {
            off[k] = x[0];
            reflectors.push((0.0, vec![0.0; m]));
            continue;
        }
        let alpha = if x[0] > 0.0 { -alpha_norm } else { alpha_norm };
        let mut v = x;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        let beta = 2.0 / vnorm2;
        off[k] = alpha;
        let base = k + 1;
        // p = beta * A' v
        for i in 0..m {
            let row = &a[(base + i) * n + base..(base + i) * n + n];
            p[i] = beta * row.iter().zip(&v).map(|(r, s)| r * s).sum::<f64>();
        }
        let pv: f64 = p[..m].iter().zip(&v).map(|(x, y)| x * y).sum();
        let kf = 0.5 * beta * pv;
        for i in 0..m {
            p[i] -= kf * v[i];
        }
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[(base + i) * n + base..(base + i) * n + n];
            for ((r, vj), wj) in row.iter_mut().zip(&v).zip(&p[..m]) {
                *r -= vi * wj + wi * vj;
            }
        }
        reflectors.push((beta, v));
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2) * n + n - 2];
        diag[n - 1] = a[(n - 1) * n + n - 1];
        off[n - 2] = a[(n - 1) * n + n - 2];
    } else if n == 1 {
        diag[0] = a[0];
    }
    Tridiagonal { diag, off, reflectors }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..off.len()].copy_from_slice(off);
    // Deflating against ‖T‖ as well keeps zero diagonal blocks from stalling;
    // the perturbation stays within eps·‖T‖.
    let norm = d.iter().chain(off).fold(0.0f64, |m, x| m.max(x.abs()));
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd.max(norm) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Degenerate("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

impl Tridiagonal {
    /// Eigenvector of the tridiagonal matrix for an approximate eigenvalue,
    /// by inverse iteration with a pivoted tridiagonal solve.
    pub fn tridiagonal_vector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let scale = self.diag.iter().chain(&self.off).fold(1.0f64, |m, x| m.max(x.abs()));
        let shift = lambda + scale * 1e-10;
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 13) as f64 * 0.01).collect();
        for _ in 0..3 {
            x = solve_tridiagonal(&self.diag, &self.off, shift, &x);
            let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if nrm == 0.0 || !nrm.is_finite() {
                break;
            }
            x.iter_mut().for_each(|v| *v /= nrm);
        }
        x
    }

    /// Map a tridiagonal-basis vector back to the original basis.
    pub fn back_transform(&self, y: &mut [f64]) {
        for (k, (beta, v)) in self.reflectors.iter().enumerate().rev() {
            if *beta == 0.0 {
                continue;
            }
            let seg = &mut y[k + 1..];
            let dot: f64 = seg.iter().zip(v).map(|(a, b)| a * b).sum();
            for (s, vi) in seg.iter_mut().zip(v) {
                *s -= beta * dot * vi;
            }
        }
    }
}

/// Solve `(T - shift I) x = b` with partial pivoting.
fn solve_tridiagonal(diag: &[f64], off: &[f64], shift: f64, b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        let p = diag[0] - shift;
        return vec![b[0] / if p == 0.0 { 1e-300 } else { p }];
    }
    // rows stored as (main, upper, upper2) after elimination
    let mut a: Vec<[f64; 3]> = (0..n)
        .map(|i| [diag[i] - shift, if i + 1 < n { off[i] } else { 0.0 }, 0.0])
        .collect();
    let mut sub: Vec<f64> = off.to_vec();
    let mut rhs = b.to_vec();
    for i in 0..n - 1 {
        if sub[i].abs() > a[i][0].abs() {
            // swap rows i and i+1
            let lower = [sub[i], diag[i + 1] - shift, if i + 2 < n { off[i + 1] } else { 0.0 }];
            let upper = a[i];
            a[i] = lower;
            rhs.swap(i, i + 1);
            let f = upper[0] / a[i][0];
            a[i + 1] = [upper[1] - f * a[i][1], upper[2] - f * a[i][2], 0.0];
            rhs[i + 1] -= f * rhs[i];
        } else {
            let piv = if a[i][0] == 0.0 { 1e-300 } else { a[i][0] };
            let f = sub[i] / piv;
            a[i + 1][0] -= f * a[i][1];
            a[i + 1][1] -= f * a[i][2];
            rhs[i + 1] -= f * rhs[i];
        }
        sub[i] = 0.0;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= a[i][1] * x[i + 1];
        }
        if i + 2 < n {
            s -= a[i][2] * x[i + 2];
        }
        let piv = if a[i][0] == 0.0 { 1e-300 } else { a[i][0] };
        x[i] = s / piv;
    }
    x
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub values: Vec<f64>,
    /// Max over sampled pairs of `‖Mv − λv‖ / ‖M‖_F`.
    pub residual: f64,
}

/// All eigenvalues of a row-major symmetric matrix, with a residual check on
/// up to `samples` eigenpairs spread through the spectrum.
pub fn sym_eigenvalues(m: &[f64], n: usize, tol: f64, samples: usize) -> Result<EigenResult> {
    if m.len() != n * n {
        return Err(Error::NotSquare);
    }
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((m[i * n + j] - m[j * n + i]).abs());
        }
    }
    if asym > 1e-12 {
        return Err(Error::NotSymmetric(asym));
    }
    let mut a = m.to_vec();
    let tri = tridiagonalize(&mut a, n);
    let values = tridiagonal_eigenvalues(&tri.diag, &tri.off)?;
    let fro = m.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let mut residual = 0.0f64;
    let k = samples.min(n);
    for s in 0..k {
        let idx = if k <= 1 { 0 } else { s * (n - 1) / (k - 1) };
        let lam = values[idx];
        let mut v = tri.tridiagonal_vector(lam);
        tri.back_transform(&mut v);
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm == 0.0 {
            continue;
        }
        let mut r = 0.0;
        for i in 0..n {
            let row = &m[i * n..(i + 1) * n];
            let mv: f64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            r += (mv - lam * v[i]).powi(2);
        }
        residual = residual.max(r.sqrt() / nrm / fro);
    }
    if residual > tol {
        return Err(Error::Degenerate(format!("eigen residual {residual:e} exceeds tolerance {tol:e}")));
    }
    Ok(EigenResult { values, residual })
}

/// `log|det|` by LU with partial pivoting.
pub fn log_abs_det(m: &[f64], n: usize) -> f64 {
    let mut a = m.to_vec();
    let mut acc = 0.0;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs())).unwrap_or(k);
        if a[p * n + k] == 0.0 {
            return f64::NEG_INFINITY;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
        }
        let piv = a[k * n + k];
        acc += piv.abs().ln();
        for i in k + 1..n {
            let f = a[i * n + k] / piv;
            if f != 0.0 {
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let r = sym_eigenvalues(&[0.0, 1.0, 1.0, 0.0], 2, 1e-10, 2).unwrap();
        assert!((r.values[0] + 1.0).abs() < 1e-14 && (r.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_sixteen() {
        let n = 16;
        let m: Vec<f64> = (0..n * n).map(|k| if k / n == k % n { 1.0 } else { 0.0 }).collect();
        let r = sym_eigenvalues(&m, n, 1e-10, 4).unwrap();
        assert!(r.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(matches!(sym_eigenvalues(&[0.0, 1.0, 0.0, 0.0], 2, 1e-10, 1), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn path_graph_spectrum() {
        // path on n vertices: eigenvalues 2 cos(kπ/(n+1))
        let n = 40;
        let mut m = vec![0.0; n * n];
        for i in 0..n - 1 {
            m[i * n + i + 1] = 1.0;
            m[(i + 1) * n + i] = 1.0;
        }
        let r = sym_eigenvalues(&m, n, 1e-10, 8).unwrap();
        let mut exact: Vec<f64> =
            (1..=n).map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos()).collect();
        exact.sort_by(f64::total_cmp);
        for (a, b) in r.values.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_diagonal_with_tiny_couplings() {
        let diag = vec![0.0; 8];
        let off = vec![1.0, 1e-17, 1.0, 1e-300, 1.0, 1e-17, 1.0];
        let v = tridiagonal_eigenvalues(&diag, &off).unwrap();
        for (x, want) in v.iter().zip([-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0]) {
            assert!((x - want).abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn log_det_diag() {
        let m = [2.0, 0.0, 0.0, -3.0];
        assert!((log_abs_det(&m, 2) - 6f64.ln()).abs() < 1e-15);
    }
}
