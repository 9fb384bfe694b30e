use super::{check_tol, null_basis_abs, range_basis_abs, require_square, singular_values, CMatrix, LinalgError, SubspaceBasis};

/// Kernels and ranges of `A^k` for `k = 0..=k_max`.
///
/// Powers are never formed. Each step works with a matrix of norm at most
/// `‖A‖`, so one cutoff `tol · σ_max(A)` serves every level:
/// `N(A^{k+1}) = N((I − P_{N(A^k)}) A)` and `R(A^{k+1}) = R(A · B_{R(A^k)})`.
#[derive(Debug, Clone)]
pub struct PowerChain {
    pub kernels: Vec<SubspaceBasis>,
    pub ranges: Vec<SubspaceBasis>,
}

impl PowerChain {
    pub fn k_max(&self) -> usize {
        self.kernels.len() - 1
    }

    pub fn nullity(&self, k: usize) -> usize {
        self.kernels[k].dim()
    }

    pub fn rank(&self, k: usize) -> usize {
        self.ranges[k].dim()
    }

    /// Smallest `k` with `N(A^k) = N(A^{k+1})`, if it occurs below `k_max`.
    pub fn ascent(&self) -> Option<usize> {
        (0..self.k_max()).find(|&k| self.nullity(k) == self.nullity(k + 1))
    }

    /// Smallest `k` with `R(A^k) = R(A^{k+1})`, if it occurs below `k_max`.
    pub fn descent(&self) -> Option<usize> {
        (0..self.k_max()).find(|&k| self.rank(k) == self.rank(k + 1))
    }
}

pub fn power_chain(a: &CMatrix, tol: f64, k_max: usize) -> Result<PowerChain, LinalgError> {
    check_tol(tol)?;
    require_square(a)?;
    let sigma_max = singular_values(a)?.first().copied().unwrap_or(0.0);
    power_chain_abs(a, tol * sigma_max, k_max)
}

/// [`power_chain`] with an absolute singular-value cutoff.
pub fn power_chain_abs(a: &CMatrix, cutoff: f64, k_max: usize) -> Result<PowerChain, LinalgError> {
    check_tol(cutoff)?;
    let n = require_square(a)?;

    let mut kernels = vec![SubspaceBasis::zero(n)];
    let mut ranges = vec![SubspaceBasis::full(n)];
    for k in 0..k_max {
        let kernel = if kernels[k].dim() == n {
            SubspaceBasis::full(n)
        } else {
            let restricted = &kernels[k].complement_projector() * a;
            null_basis_abs(&restricted, cutoff)?
        };
        let range = match ranges[k].basis_matrix() {
            Some(b) => range_basis_abs(&(a * &b), cutoff)?,
            None => SubspaceBasis::zero(n),
        };
        kernels.push(kernel);
        ranges.push(range);
    }
    Ok(PowerChain { kernels, ranges })
}
