use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_tol, CMatrix, LinalgError, SubspaceBasis, DEFAULT_SUBSPACE_TOL};

struct SortedSvd {
    /// Left singular vectors (all `rows` of them).
    u: DMatrix<Complex64>,
    /// Nonincreasing, `min(rows, cols)` entries.
    sigma: Vec<f64>,
    /// Right singular vectors (all `cols` of them).
    v: DMatrix<Complex64>,
}

fn sorted_svd(m: &DMatrix<Complex64>) -> Result<SortedSvd, LinalgError> {
    let (r, c) = m.shape();
    let work = faer::Mat::<Complex64>::from_fn(r, c, |i, j| m[(i, j)]);
    // faer's iteration occasionally stalls on tightly clustered singular
    // values (e.g. stacked projectors). Power-of-two rescaling is exact, so a
    // retry on a scaled copy changes the iteration but not the answer.
    let mut attempt = None;
    for scale in [1.0, 0.5, 2.0, 0.25, 4.0] {
        let scaled = if scale == 1.0 { work.clone() } else { faer::Mat::from_fn(r, c, |i, j| work[(i, j)] * scale) };
        if let Ok(svd) = scaled.svd() {
            attempt = Some((svd, scale));
            break;
        }
    }
    let (svd, scale) = attempt.ok_or(LinalgError::SvdFailed)?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let sigma: Vec<f64> = (0..r.min(c)).map(|k| s[k].re / scale).collect();
    if sigma.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::SvdFailed);
    }
    Ok(SortedSvd {
        u: DMatrix::from_fn(r, r, |i, j| u[(i, j)]),
        sigma,
        v: DMatrix::from_fn(c, c, |i, j| v[(i, j)]),
    })
}

fn count_above(sigma: &[f64], cutoff: f64) -> usize {
    sigma.iter().filter(|&&s| s > cutoff).count()
}

fn relative_cutoff(sigma: &[f64], tol: f64) -> f64 {
    tol * sigma.first().copied().unwrap_or(0.0)
}

fn ensure_finite(m: &CMatrix) -> Result<(), LinalgError> {
    if m.is_finite() {
        Ok(())
    } else {
        CMatrix::from_dmatrix(m.as_dmatrix().clone()).map(|_| ())
    }
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>, LinalgError> {
    ensure_finite(m)?;
    Ok(sorted_svd(m.as_dmatrix())?.sigma)
}

/// Number of singular values strictly above `tol · σ_max`.
pub fn rank(m: &CMatrix, tol: f64) -> Result<usize, LinalgError> {
    check_tol(tol)?;
    let sigma = singular_values(m)?;
    let cutoff = relative_cutoff(&sigma, tol);
    Ok(count_above(&sigma, cutoff))
}

/// Number of singular values strictly above an absolute cutoff.
pub fn rank_abs(m: &CMatrix, cutoff: f64) -> Result<usize, LinalgError> {
    check_tol(cutoff)?;
    let sigma = singular_values(m)?;
    Ok(count_above(&sigma, cutoff))
}

/// Orthonormal basis of the numerical kernel `{v : ‖Mv‖ ≤ tol·σ_max·‖v‖}`.
pub fn null_basis(m: &CMatrix, tol: f64) -> Result<SubspaceBasis, LinalgError> {
    check_tol(tol)?;
    ensure_finite(m)?;
    let svd = sorted_svd(m.as_dmatrix())?;
    let cutoff = relative_cutoff(&svd.sigma, tol);
    kernel_from(svd, m.cols(), cutoff)
}

/// Kernel basis with an absolute singular-value cutoff.
pub fn null_basis_abs(m: &CMatrix, cutoff: f64) -> Result<SubspaceBasis, LinalgError> {
    check_tol(cutoff)?;
    ensure_finite(m)?;
    let svd = sorted_svd(m.as_dmatrix())?;
    kernel_from(svd, m.cols(), cutoff)
}

fn kernel_from(svd: SortedSvd, cols: usize, cutoff: f64) -> Result<SubspaceBasis, LinalgError> {
    let r = count_above(&svd.sigma, cutoff);
    let k = cols - r;
    let basis = svd.v.columns(r, k).into_owned();
    Ok(SubspaceBasis::from_orthonormal_columns(basis, DEFAULT_SUBSPACE_TOL))
}

/// Orthonormal basis of the numerical range; dimension equals `rank(m, tol)`.
pub fn range_basis(m: &CMatrix, tol: f64) -> Result<SubspaceBasis, LinalgError> {
    check_tol(tol)?;
    ensure_finite(m)?;
    let svd = sorted_svd(m.as_dmatrix())?;
    let cutoff = relative_cutoff(&svd.sigma, tol);
    range_from(svd, m.rows(), cutoff)
}

/// Range basis with an absolute singular-value cutoff.
pub fn range_basis_abs(m: &CMatrix, cutoff: f64) -> Result<SubspaceBasis, LinalgError> {
    check_tol(cutoff)?;
    ensure_finite(m)?;
    let svd = sorted_svd(m.as_dmatrix())?;
    range_from(svd, m.rows(), cutoff)
}

fn range_from(svd: SortedSvd, rows: usize, cutoff: f64) -> Result<SubspaceBasis, LinalgError> {
    let r = count_above(&svd.sigma, cutoff);
    let basis = if r == 0 {
        DMatrix::zeros(rows, 0)
    } else {
        svd.u.columns(0, r).into_owned()
    };
    Ok(SubspaceBasis::from_orthonormal_columns(basis, DEFAULT_SUBSPACE_TOL))
}

/// Moore–Penrose pseudoinverse, truncating singular values at `tol · σ_max`.
pub fn pinv(m: &CMatrix, tol: f64) -> Result<CMatrix, LinalgError> {
    check_tol(tol)?;
    ensure_finite(m)?;
    let svd = sorted_svd(m.as_dmatrix())?;
    let cutoff = relative_cutoff(&svd.sigma, tol);
    let r = count_above(&svd.sigma, cutoff);
    Ok(pinv_from(&svd, r, m.shape()))
}

/// Pseudoinverse keeping exactly the `rank` largest singular values.
pub fn pinv_rank(m: &CMatrix, rank: usize) -> Result<CMatrix, LinalgError> {
    ensure_finite(m)?;
    let svd = sorted_svd(m.as_dmatrix())?;
    let r = rank.min(svd.sigma.len());
    Ok(pinv_from(&svd, r, m.shape()))
}

fn pinv_from(svd: &SortedSvd, r: usize, shape: (usize, usize)) -> CMatrix {
    let (rows, cols) = shape;
    let mut out = DMatrix::<Complex64>::zeros(cols, rows);
    for k in 0..r {
        let s = svd.sigma[k];
        if s == 0.0 {
            continue;
        }
        let vk = svd.v.column(k);
        let uk = svd.u.column(k);
        for i in 0..cols {
            let vi = vk[i] / s;
            for j in 0..rows {
                out[(i, j)] += vi * uk[j].conj();
            }
        }
    }
    CMatrix::wrap(out)
}
