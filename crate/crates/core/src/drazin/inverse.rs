use nalgebra::DMatrix;
use serde::Serialize;

use crate::linalg::schur::{solve_triangular_sylvester, upper_triangular_inverse};
use crate::linalg::{ordered_schur, pinv_rank, power_chain, require_square, CMatrix, Complex64, PowerChain};

use super::axioms::{check_left_drazin, check_right_drazin, check_two_sided, relative_distance, AxiomResiduals};
use super::{DrazinError, DrazinOptions};

#[derive(Debug, Clone, Serialize)]
pub struct DrazinResiduals {
    pub two_sided: AxiomResiduals,
    pub left: AxiomResiduals,
    pub right: AxiomResiduals,
}

impl DrazinResiduals {
    pub fn max_relative(&self) -> f64 {
        self.two_sided
            .max_relative()
            .max(self.left.max_relative())
            .max(self.right.max_relative())
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_relative() <= tol
    }
}

#[derive(Debug, Clone)]
pub struct DrazinResult {
    pub inverse: CMatrix,
    pub index: usize,
    /// `I − XA`, the projection onto the nil part along the core.
    pub idempotent: CMatrix,
    pub residuals: DrazinResiduals,
    pub core_dim: usize,
    /// Smallest core eigenvalue modulus (`+∞` if the core is empty).
    pub core_min_modulus: f64,
    /// Largest computed modulus in the nil cluster (`0` if it is empty).
    pub nil_max_modulus: f64,
    /// `‖X − A^k pinv(A^{2k+1}) A^k‖ / max(‖X‖, ‖oracle‖)`.
    pub oracle_deviation: f64,
}

pub(crate) fn chain_for(a: &CMatrix, opts: &DrazinOptions) -> Result<PowerChain, DrazinError> {
    let n = require_square(a).map_err(|_| DrazinError::NotSquare(a.rows(), a.cols()))?;
    Ok(power_chain(a, opts.rank_tol_for(n), n + 1)?)
}

/// Smallest `k` with `rank(A^k) = rank(A^{k+1})`.
pub fn drazin_index(a: &CMatrix, tol: f64) -> Result<usize, DrazinError> {
    let chain = chain_for(a, &DrazinOptions::default().with_rank_tol(tol))?;
    Ok(chain.descent().expect("rank chain of an n×n matrix stabilizes within n steps"))
}

/// `A^k · pinv(A^{2k+1}) · A^k`, truncating the pseudoinverse to `rank`
/// singular values (the rank of `A^k`).
pub fn drazin_oracle(a: &CMatrix, k: usize, rank: usize) -> Result<CMatrix, DrazinError> {
    require_square(a)?;
    let ak = a.pow(k);
    let middle = &(&ak * a) * &ak;
    let p = pinv_rank(&middle, rank)?;
    Ok(&(&ak * &p) * &ak)
}

/// Drazin inverse by a core/nil split of the ordered Schur form.
///
/// The nil cluster is the `n − rank(A^k)` eigenvalues of smallest modulus,
/// `k` being the index read off the rank chain. The split is refused when
/// that cluster is not separated from the core by `opts.max_cluster_ratio`,
/// or when an explicit `opts.theta` does not fall between the two clusters.
pub fn drazin_inverse(a: &CMatrix, opts: &DrazinOptions) -> Result<DrazinResult, DrazinError> {
    let n = a.rows();
    let chain = chain_for(a, opts)?;
    let index = chain.descent().expect("rank chain of an n×n matrix stabilizes within n steps");
    let core = chain.rank(index);

    let (inverse, core_min, nil_max) = if core == 0 {
        (CMatrix::zeros(n, n), f64::INFINITY, spectral_radius_bound(a)?)
    } else {
        split_inverse(a, core, opts)?
    };

    let idempotent = &CMatrix::identity(n) - &(&inverse * a);
    let residuals = DrazinResiduals {
        two_sided: check_two_sided(a, &inverse, index)?,
        left: check_left_drazin(a, &inverse, index)?,
        right: check_right_drazin(a, &inverse, index)?,
    };
    let oracle = drazin_oracle(a, index, core)?;
    Ok(DrazinResult {
        oracle_deviation: relative_distance(&inverse, &oracle),
        inverse,
        index,
        idempotent,
        residuals,
        core_dim: core,
        core_min_modulus: core_min,
        nil_max_modulus: nil_max,
    })
}

fn spectral_radius_bound(a: &CMatrix) -> Result<f64, DrazinError> {
    let s = ordered_schur(a, 0)?;
    Ok(s.trail_max_modulus())
}

fn split_inverse(a: &CMatrix, core: usize, opts: &DrazinOptions) -> Result<(CMatrix, f64, f64), DrazinError> {
    let n = a.rows();
    let schur = ordered_schur(a, core)?;
    let core_min = schur.lead_min_modulus();
    let nil_max = schur.trail_max_modulus();
    let gap = core_min - nil_max;
    if core < n {
        match opts.theta {
            Some(theta) if !(nil_max <= theta && theta < core_min) => {
                return Err(DrazinError::SpectralSplit {
                    nil_max,
                    core_min,
                    gap,
                    threshold: theta,
                })
            }
            Some(_) => {}
            None if nil_max > opts.max_cluster_ratio * core_min => {
                return Err(DrazinError::SpectralSplit {
                    nil_max,
                    core_min,
                    gap,
                    threshold: opts.max_cluster_ratio * core_min,
                })
            }
            None => {}
        }
    }

    let m = n - core;
    let t = &schur.t;
    let t11 = t.view((0, 0), (core, core)).into_owned();
    let t11_inv = upper_triangular_inverse(&t11);
    let mut inner = DMatrix::<Complex64>::zeros(n, n);
    inner.view_mut((0, 0), (core, core)).copy_from(&t11_inv);
    if m > 0 {
        let t12 = t.view((0, core), (core, m)).into_owned();
        let t22 = t.view((core, core), (m, m)).into_owned();
        // [[I, Y], [0, I]] block-diagonalizes T when T11 Y − Y T22 = −T12.
        let y = solve_triangular_sylvester(&t11, &t22, &(-t12));
        let corner = -(&t11_inv * &y);
        inner.view_mut((0, core), (core, m)).copy_from(&corner);
    }
    let x = &schur.q * inner * schur.q.adjoint();
    Ok((CMatrix::from_dmatrix(x)?, core_min, nil_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> DrazinOptions {
        DrazinOptions::default()
    }

    #[test]
    fn index_examples() {
        assert_eq!(drazin_index(&CMatrix::identity(4), 1e-12).unwrap(), 0);
        assert_eq!(drazin_index(&CMatrix::jordan_zero(3), 1e-12).unwrap(), 3);
        let s = CMatrix::from_real_rows(&[
            &[1.0, 2.0, 0.0, 1.0],
            &[0.0, 1.0, 1.0, 0.0],
            &[1.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0, 1.0],
        ]);
        let core = CMatrix::from_real_diagonal(&[1.0, 2.0]).direct_sum(&CMatrix::jordan_zero(2));
        let a = &(&s * &core) * &s.try_inverse().unwrap();
        // rank(A^k) by brute force: 4, 3, 2, 2, 2.
        let ranks: Vec<usize> =
            (0..5).map(|k| crate::linalg::rank(&a.pow(k), 1e-10).unwrap()).collect();
        assert_eq!(ranks, vec![4, 3, 2, 2, 2]);
        assert_eq!(drazin_index(&a, 1e-12).unwrap(), 2);
    }

    #[test]
    fn inverse_examples() {
        let r = drazin_inverse(&CMatrix::from_real_diagonal(&[2.0, 0.0]), &opts()).unwrap();
        assert!(r.inverse.distance(&CMatrix::from_real_diagonal(&[0.5, 0.0])) < 1e-15);
        assert_eq!(r.index, 1);

        let r = drazin_inverse(&CMatrix::jordan_zero(2), &opts()).unwrap();
        assert_eq!(r.inverse.max_abs(), 0.0);
        assert_eq!(r.index, 2);
        assert!(r.idempotent.distance(&CMatrix::identity(2)) == 0.0);

        let e = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let r = drazin_inverse(&e, &opts()).unwrap();
        assert!(r.inverse.distance(&e) < 1e-14);
        assert_eq!(r.index, 1);
        assert!(r.residuals.passes(1e-12));
        assert!(r.oracle_deviation < 1e-12);
    }

    #[test]
    fn invertible_input_gives_the_inverse() {
        let a = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let r = drazin_inverse(&a, &opts()).unwrap();
        assert_eq!(r.index, 0);
        assert!(r.inverse.distance(&a.try_inverse().unwrap()) < 1e-14);
        assert!(r.idempotent.max_abs() < 1e-14);
    }

    #[test]
    fn non_trivial_jordan_structure() {
        let s = CMatrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0], &[1.0, 0.0, 2.0]]);
        let core = CMatrix::from_real_diagonal(&[3.0]).direct_sum(&CMatrix::jordan_zero(2));
        let a = &(&s * &core) * &s.try_inverse().unwrap();
        let r = drazin_inverse(&a, &opts()).unwrap();
        assert_eq!(r.index, 2);
        assert!(r.residuals.passes(1e-12), "{:?}", r.residuals);
        assert!(r.oracle_deviation < 1e-10);
        let p = &r.idempotent;
        assert!((p * p).distance(p) < 1e-12);
        assert!((&a * p).distance(&(p * &a)) < 1e-12);
    }

    #[test]
    fn close_clusters_are_refused() {
        // Eigenvalue 1e-3 is a genuine core eigenvalue; a θ above it contradicts the rank count.
        let a = CMatrix::from_real_diagonal(&[1e-3, 0.0, 1.0]);
        let err = drazin_inverse(&a, &DrazinOptions { theta: Some(1e-2), ..opts() }).unwrap_err();
        assert!(matches!(err, DrazinError::SpectralSplit { .. }), "{err}");
        // A coarse rank tolerance folds 1e-3 into the nil count; the cluster check catches it.
        let err = drazin_inverse(&CMatrix::from_real_diagonal(&[2e-3, 1.2e-3, 0.0, 1.0]), &opts().with_rank_tol(1.5e-3))
            .unwrap_err();
        assert!(matches!(err, DrazinError::SpectralSplit { .. }), "{err}");
        assert!(err.to_string().contains("gap"));
    }

    #[test]
    fn non_square_is_rejected() {
        assert!(matches!(
            drazin_inverse(&CMatrix::zeros(2, 3), &opts()),
            Err(DrazinError::NotSquare(2, 3))
        ));
    }
}
