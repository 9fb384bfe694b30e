//! Complex Schur form with a selected leading cluster of eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{require_square, CMatrix, LinalgError};

/// `A = Q T Q*` with `T` upper triangular and the `lead` largest-modulus
/// eigenvalues occupying the leading diagonal block of `T`.
#[derive(Debug, Clone)]
pub struct OrderedSchur {
    pub q: DMatrix<Complex64>,
    pub t: DMatrix<Complex64>,
    pub lead: usize,
}

impl OrderedSchur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }

    /// Smallest modulus in the leading block, `+∞` when it is empty.
    pub fn lead_min_modulus(&self) -> f64 {
        (0..self.lead).map(|i| self.t[(i, i)].norm()).fold(f64::INFINITY, f64::min)
    }

    /// Largest modulus in the trailing block, `0` when it is empty.
    pub fn trail_max_modulus(&self) -> f64 {
        (self.lead..self.t.nrows()).map(|i| self.t[(i, i)].norm()).fold(0.0, f64::max)
    }
}

/// Schur form of `a` reordered so the `lead` eigenvalues of largest modulus come first.
pub fn ordered_schur(a: &CMatrix, lead: usize) -> Result<OrderedSchur, LinalgError> {
    let n = require_square(a)?;
    assert!(lead <= n, "leading block larger than the matrix");
    let (mut q, mut t) = complex_schur(a.as_dmatrix())?;

    let mut by_modulus: Vec<usize> = (0..n).collect();
    by_modulus.sort_by(|&x, &y| t[(y, y)].norm().total_cmp(&t[(x, x)].norm()).then(x.cmp(&y)));
    let mut selected = vec![false; n];
    for &i in by_modulus.iter().take(lead) {
        selected[i] = true;
    }

    // Bubble each selected eigenvalue up to the next free leading slot.
    let mut next = 0;
    for pos in 0..n {
        if selected[pos] {
            let mut k = pos;
            while k > next {
                swap_adjacent(&mut t, &mut q, k - 1);
                selected.swap(k - 1, k);
                k -= 1;
            }
            next += 1;
        }
    }
    Ok(OrderedSchur { q, t, lead })
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// The unitary `R = [[f̄, ḡ], [−g, f]] / ρ` with `R (f, g)ᵀ = (ρ, 0)ᵀ`,
/// returned as the pair `(f/ρ, g/ρ)`.
fn rotation(f: Complex64, g: Complex64) -> Option<(Complex64, Complex64)> {
    let rho = f.norm().hypot(g.norm());
    (rho > 0.0).then(|| (f / rho, g / rho))
}

/// Applies `R` from the left to rows `k`, `k+1`, columns `cols`.
fn rotate_rows(m: &mut DMatrix<Complex64>, (f, g): (Complex64, Complex64), k: usize, cols: std::ops::Range<usize>) {
    for j in cols {
        let x = m[(k, j)];
        let y = m[(k + 1, j)];
        m[(k, j)] = f.conj() * x + g.conj() * y;
        m[(k + 1, j)] = -g * x + f * y;
    }
}

/// Applies `R*` from the right to columns `k`, `k+1`, rows `rows`.
fn rotate_cols(m: &mut DMatrix<Complex64>, (f, g): (Complex64, Complex64), k: usize, rows: std::ops::Range<usize>) {
    for i in rows {
        let x = m[(i, k)];
        let y = m[(i, k + 1)];
        m[(i, k)] = x * f + y * g;
        m[(i, k + 1)] = -x * g.conj() + y * f.conj();
    }
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (l1, l2) = (mid + disc, mid - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition `a = q t q*` by Householder reduction to
/// Hessenberg form and single-shift QR sweeps.
///
/// A subdiagonal entry is set to zero once it is below `ε` times either its
/// diagonal neighbours or `‖a‖`; the absolute test keeps clusters of
/// near-zero eigenvalues from stalling the iteration.
pub(crate) fn complex_schur(a: &DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>), LinalgError> {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = DMatrix::<Complex64>::identity(n, n);

    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let mut v = x.clone();
        v[0] += phase * norm;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= vn);
        // h ← (I − 2vv*) h (I − 2vv*), q ← q (I − 2vv*), acting on indices k+1..n.
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= *vi * dot * 2.0;
            }
        }
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let dot: Complex64 = v.iter().enumerate().map(|(j, vj)| m[(i, k + 1 + j)] * vj).sum();
                for (j, vj) in v.iter().enumerate() {
                    m[(i, k + 1 + j)] -= dot * vj.conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = zero();
        }
    }

    let eps = f64::EPSILON;
    let scale = a.norm();
    let mut hi = n.saturating_sub(1);
    let mut stalled = 0usize;
    let mut budget = 30 * n.max(1) * n.max(1);
    while hi > 0 {
        let mut lo = 0;
        for k in (1..=hi).rev() {
            let sub = h[(k, k - 1)].norm();
            if sub <= eps * (h[(k, k)].norm() + h[(k - 1, k - 1)].norm()) || sub <= eps * scale {
                h[(k, k - 1)] = zero();
                lo = k;
                break;
            }
        }
        if lo == hi {
            hi -= 1;
            stalled = 0;
            continue;
        }
        if budget == 0 {
            return Err(LinalgError::SchurFailed);
        }
        budget -= 1;
        stalled += 1;

        let shift = if stalled % 10 == 0 {
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let r = rotation(h[(k, k)], h[(k + 1, k)]);
            if let Some(r) = r {
                rotate_rows(&mut h, r, k, k..n);
                h[(k + 1, k)] = zero();
            }
            rotations.push(r);
        }
        for (k, r) in (lo..hi).zip(rotations) {
            if let Some(r) = r {
                rotate_cols(&mut h, r, k, 0..(k + 2).min(hi + 1));
                rotate_cols(&mut q, r, k, 0..n);
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    for j in 0..n {
        for i in (j + 1)..n {
            h[(i, j)] = zero();
        }
    }
    Ok((q, h))
}

/// Exchanges the diagonal entries `k` and `k+1` of an upper triangular `t`
/// with a unitary rotation, updating `q` so that `q t q*` is unchanged.
fn swap_adjacent(t: &mut DMatrix<Complex64>, q: &mut DMatrix<Complex64>, k: usize) {
    let n = t.nrows();
    let a = t[(k, k)];
    let b = t[(k + 1, k + 1)];
    let c = t[(k, k + 1)];
    let d = b - a;
    let r = (c.norm_sqr() + d.norm_sqr()).sqrt();
    if r == 0.0 {
        return;
    }
    // First column of g is the eigenvector (c, b − a) of the 2x2 block for b.
    let cs = c / r;
    let sn = d / r;
    let g = [[cs, -sn.conj()], [sn, cs.conj()]];

    for j in 0..n {
        let x = t[(k, j)];
        let y = t[(k + 1, j)];
        t[(k, j)] = g[0][0].conj() * x + g[1][0].conj() * y;
        t[(k + 1, j)] = g[0][1].conj() * x + g[1][1].conj() * y;
    }
    for i in 0..n {
        let x = t[(i, k)];
        let y = t[(i, k + 1)];
        t[(i, k)] = x * g[0][0] + y * g[1][0];
        t[(i, k + 1)] = x * g[0][1] + y * g[1][1];
        let x = q[(i, k)];
        let y = q[(i, k + 1)];
        q[(i, k)] = x * g[0][0] + y * g[1][0];
        q[(i, k + 1)] = x * g[0][1] + y * g[1][1];
    }
    t[(k + 1, k)] = Complex64::new(0.0, 0.0);
    t[(k, k)] = b;
    t[(k + 1, k + 1)] = a;
}

/// Inverse of a nonsingular upper triangular matrix by back substitution.
pub(crate) fn upper_triangular_inverse(t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = t.nrows();
    let mut inv = DMatrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = Complex64::new(1.0, 0.0) / t[(j, j)];
        for i in (0..j).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for k in (i + 1)..=j {
                s += t[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / t[(i, i)];
        }
    }
    inv
}

/// Solves `t11 y − y t22 = rhs` for upper triangular `t11`, `t22` with disjoint spectra.
pub(crate) fn solve_triangular_sylvester(
    t11: &DMatrix<Complex64>,
    t22: &DMatrix<Complex64>,
    rhs: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let p = t11.nrows();
    let m = t22.nrows();
    let mut y = DMatrix::<Complex64>::zeros(p, m);
    for j in 0..m {
        // (t11 − t22[j,j]) y_j = rhs_j + Σ_{l<j} y_l t22[l,j]
        let mut col: Vec<Complex64> = (0..p).map(|i| rhs[(i, j)]).collect();
        for l in 0..j {
            let w = t22[(l, j)];
            for (i, c) in col.iter_mut().enumerate() {
                *c += y[(i, l)] * w;
            }
        }
        let shift = t22[(j, j)];
        for i in (0..p).rev() {
            let mut s = col[i];
            for k in (i + 1)..p {
                s -= t11[(i, k)] * y[(k, j)];
            }
            y[(i, j)] = s / (t11[(i, i)] - shift);
        }
    }
    y
}
