//! Kernel and range chains of square matrices.
//!
//! Every dimension here is an integer read off an SVD against a relative
//! cutoff. The meet and join tables are computed by explicit subspace
//! intersection and sum, never from rank differences, so the identities
//! relating them to the nullity and rank tables are genuine checks.

mod perturb;
mod spectra;

pub use perturb::{index_stability, perturb_expand, PerturbReport, StabilityReport};
pub use spectra::{eigenvalue_centroids, spectra_scan, SpectraEntry, SpectraReport};

use serde::Serialize;
use thiserror::Error;

use crate::drazin::{default_structural_tol, DrazinError};
use crate::linalg::{
    intersect, null_basis_abs, power_chain, power_chain_abs, range_basis_abs, rank, rank_abs, require_square,
    singular_values, subspace_sum, CMatrix, LinalgError, PowerChain, SubspaceBasis,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Drazin(#[from] DrazinError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{what}: residual {residual:e} exceeds {tol:e}")]
    Conditioning { what: &'static str, residual: f64, tol: f64 },
    #[error("B-Fredholm index at n = {n} is {meet} − {codim} ≠ 0")]
    Conservation { n: usize, meet: usize, codim: usize },
}

/// Dimension tables for `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub n: usize,
    pub k_max: usize,
    /// `dim N(A^k)`.
    pub nullity: Vec<usize>,
    /// `dim R(A^k)`.
    pub rank: Vec<usize>,
    /// `dim(N(A) ∩ R(A^k))`.
    pub meet: Vec<usize>,
    /// `dim(R(A) + N(A^k))`.
    pub join: Vec<usize>,
    pub asc: usize,
    pub dsc: usize,
    pub dis: usize,
}

impl ChainReport {
    /// Places where `nullity_{k+1} − nullity_k = meet_k` or
    /// `rank_k − rank_{k+1} = n − join_k` fails, for `k < k_max`.
    pub fn kaashoek_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for k in 0..self.k_max {
            let dn = self.nullity[k + 1] as i64 - self.nullity[k] as i64;
            if dn != self.meet[k] as i64 {
                out.push(format!("k = {k}: nullity step {dn} ≠ meet {}", self.meet[k]));
            }
            let dr = self.rank[k] as i64 - self.rank[k + 1] as i64;
            let gap = self.n as i64 - self.join[k] as i64;
            if dr != gap {
                out.push(format!("k = {k}: rank step {dr} ≠ n − join {gap}"));
            }
        }
        out
    }

    pub fn is_monotone(&self) -> bool {
        self.nullity.windows(2).all(|w| w[0] <= w[1]) && self.rank.windows(2).all(|w| w[0] >= w[1])
    }
}

fn chain(a: &CMatrix, tol: f64, k_max: usize) -> Result<PowerChain, StructureError> {
    Ok(power_chain(a, tol, k_max)?)
}

fn report_from_chain(c: &PowerChain, n: usize) -> Result<ChainReport, StructureError> {
    let k_max = c.k_max();
    let kernel_a = &c.kernels[1.min(k_max)];
    let range_a = &c.ranges[1.min(k_max)];
    let mut meet = Vec::with_capacity(k_max + 1);
    let mut join = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        meet.push(intersect(kernel_a, &c.ranges[k])?.dim());
        join.push(subspace_sum(range_a, &c.kernels[k])?.dim());
    }
    let last = *meet.last().expect("k_max ≥ 0");
    let dis = (0..=k_max).find(|&k| meet[k..].iter().all(|&m| m == last)).unwrap_or(k_max);
    let nullity: Vec<usize> = (0..=k_max).map(|k| c.nullity(k)).collect();
    let rank: Vec<usize> = (0..=k_max).map(|k| c.rank(k)).collect();
    Ok(ChainReport {
        n,
        k_max,
        asc: c.ascent().unwrap_or(k_max),
        dsc: c.descent().unwrap_or(k_max),
        dis,
        nullity,
        rank,
        meet,
        join,
    })
}

/// Tables for `k = 0..=max(n + 1, k_max)`; every chain of an `n×n` matrix is
/// stable by `k = n`.
pub fn chain_report_to(a: &CMatrix, tol: f64, k_max: usize) -> Result<ChainReport, StructureError> {
    let n = require_square(a)?;
    let c = chain(a, tol, k_max.max(n + 1))?;
    report_from_chain(&c, n)
}

pub fn chain_report(a: &CMatrix, tol: f64) -> Result<ChainReport, StructureError> {
    chain_report_to(a, tol, 0)
}

fn structural(a: &CMatrix) -> Result<(usize, PowerChain), StructureError> {
    let n = require_square(a)?;
    let c = chain(a, default_structural_tol(n), n + 1)?;
    let d = c.descent().expect("chain of length n + 1 stabilizes");
    Ok((d, c))
}

/// `H₀(A) = N(A^d)`, `d` the Drazin index: the generalized 0-eigenspace.
pub fn quasinilpotent_part(a: &CMatrix) -> Result<SubspaceBasis, StructureError> {
    let (d, c) = structural(a)?;
    Ok(c.kernels[d].clone())
}

/// `K(A) = R(A^d)`, `d` the Drazin index.
pub fn analytic_core(a: &CMatrix) -> Result<SubspaceBasis, StructureError> {
    let (d, c) = structural(a)?;
    Ok(c.ranges[d].clone())
}

/// `B* A B` for an orthonormal basis `B` (the compression of `A` to its span).
fn compression(a: &CMatrix, s: &SubspaceBasis) -> Option<(CMatrix, CMatrix)> {
    let b = s.basis_matrix()?;
    let ab = a * &b;
    let c = &b.adjoint() * &ab;
    Some((c, ab))
}

/// `‖A B − B C‖ / ‖A‖`: how far `span B` is from being `A`-invariant.
fn invariance_defect(a: &CMatrix, s: &SubspaceBasis) -> f64 {
    match (compression(a, s), s.basis_matrix()) {
        (Some((c, ab)), Some(b)) => {
            let norm = a.norm();
            if norm == 0.0 {
                0.0
            } else {
                ab.distance(&(&b * &c)) / norm
            }
        }
        _ => 0.0,
    }
}

fn joint_rank(s1: &SubspaceBasis, s2: &SubspaceBasis) -> Result<usize, StructureError> {
    let n = s1.ambient_dim();
    let vectors: Vec<_> = s1.vectors().chain(s2.vectors()).collect();
    if vectors.is_empty() {
        return Ok(0);
    }
    let m = CMatrix::new(
        n,
        vectors.len(),
        (0..n).flat_map(|i| vectors.iter().map(move |v| v[i])).collect(),
    )?;
    Ok(rank(&m, default_structural_tol(n))?)
}

#[derive(Debug, Clone, Serialize)]
pub struct KatoDecomposition {
    #[serde(skip)]
    pub m: SubspaceBasis,
    #[serde(skip)]
    pub n_space: SubspaceBasis,
    pub index: usize,
    pub dim_m: usize,
    pub dim_n: usize,
    /// Rank of the two bases side by side; `n` for a direct sum.
    pub joint_rank: usize,
    pub invariance_m: f64,
    pub invariance_n: f64,
    /// `A|_M` is invertible (rank of the compression equals `dim M`).
    pub core_invertible: bool,
    /// Nilpotency order of `A|_N`.
    pub nil_order: usize,
    /// `dim N(A^j) + dim R(A^{j+1}) = n` with trivial intersection.
    pub kernel_range_complemented: bool,
    /// `X = R(A^j) ⊕ N` and `A` maps `R(A^j)` onto itself.
    pub range_decomposition: bool,
}

impl KatoDecomposition {
    pub fn is_consistent(&self, n: usize) -> bool {
        self.dim_m + self.dim_n == n
            && self.joint_rank == n
            && self.core_invertible
            && self.nil_order == self.index
            && self.kernel_range_complemented
            && self.range_decomposition
    }
}

/// `A = A|_M ⊕ A|_N` with `M = K(A)` and `N = H₀(A)`.
pub fn kato_decomposition(a: &CMatrix, invariance_tol: f64) -> Result<KatoDecomposition, StructureError> {
    let (d, c) = structural(a)?;
    let n = a.rows();
    let m = c.ranges[d].clone();
    let nil = c.kernels[d].clone();
    let sigma_max = singular_values(a)?.first().copied().unwrap_or(0.0);
    let cutoff = default_structural_tol(n) * sigma_max;

    let invariance_m = invariance_defect(a, &m);
    let invariance_n = invariance_defect(a, &nil);
    for (what, residual) in [("A-invariance of K(A)", invariance_m), ("A-invariance of H0(A)", invariance_n)] {
        if residual > invariance_tol {
            return Err(StructureError::Conditioning {
                what,
                residual,
                tol: invariance_tol,
            });
        }
    }

    let core_invertible = match compression(a, &m) {
        Some((cm, _)) => rank_abs(&cm, cutoff)? == m.dim(),
        None => true,
    };
    let nil_order = match compression(a, &nil) {
        Some((cn, _)) => {
            let k = nil.dim();
            let chain = power_chain_abs(&cn, cutoff, k + 1)?;
            (0..=k + 1).find(|&j| chain.rank(j) == 0).unwrap_or(k + 1)
        }
        None => 0,
    };

    let next_range = &c.ranges[d + 1];
    let kernel_range_complemented =
        c.kernels[d].dim() + next_range.dim() == n && intersect(&c.kernels[d], next_range)?.dim() == 0;
    let surjective = match m.basis_matrix() {
        Some(b) => range_basis_abs(&(a * &b), cutoff)?.dim() == m.dim(),
        None => true,
    };
    let range_decomposition = m.dim() + nil.dim() == n && intersect(&m, &nil)?.dim() == 0 && surjective;

    Ok(KatoDecomposition {
        index: d,
        dim_m: m.dim(),
        dim_n: nil.dim(),
        joint_rank: joint_rank(&m, &nil)?,
        invariance_m,
        invariance_n,
        core_invertible,
        nil_order,
        kernel_range_complemented,
        range_decomposition,
        m,
        n_space: nil,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BfIndex {
    pub n: usize,
    /// `dim(N(A) ∩ R(A^n))`.
    pub meet: usize,
    /// `codim(R(A) + N(A^n))`.
    pub codim: usize,
    pub index: i64,
}

/// B-Fredholm index `dim[N(A) ∩ R(Aⁿ)] − codim[R(A) + N(Aⁿ)]` for `n ≥ dis`.
/// For a square matrix rank–nullity forces it to vanish; a nonzero value is
/// reported as an error.
pub fn bf_index(a: &CMatrix, n: usize, tol: f64) -> Result<BfIndex, StructureError> {
    let report = chain_report_to(a, tol, n)?;
    bf_index_from(&report, n)
}

pub fn bf_index_from(report: &ChainReport, n: usize) -> Result<BfIndex, StructureError> {
    if n < report.dis {
        return Err(StructureError::Precondition(format!("n = {n} is below dis = {}", report.dis)));
    }
    if n > report.k_max {
        return Err(StructureError::Precondition(format!("n = {n} beyond the table (k_max = {})", report.k_max)));
    }
    let meet = report.meet[n];
    let codim = report.n - report.join[n];
    if meet != codim {
        return Err(StructureError::Conservation { n, meet, codim });
    }
    Ok(BfIndex {
        n,
        meet,
        codim,
        index: meet as i64 - codim as i64,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionIndex {
    pub dis: usize,
    pub ind_a: i64,
    /// `dim N − codim R` of the compression of `A` to `K(A)`; 0 for an
    /// empty block.
    pub ind_core: i64,
}

impl DecompositionIndex {
    pub fn equal(&self) -> bool {
        self.ind_a == self.ind_core
    }
}

/// `ind(A)` against the Fredholm index of `A` restricted to `K(A)`.
pub fn decomposition_index_equality(a: &CMatrix) -> Result<DecompositionIndex, StructureError> {
    let n = require_square(a)?;
    let tol = default_structural_tol(n);
    let report = chain_report(a, tol)?;
    let ind_a = bf_index_from(&report, report.dis)?.index;
    let core = analytic_core(a)?;
    let ind_core = match compression(a, &core) {
        Some((c, _)) => {
            let sigma_max = singular_values(a)?.first().copied().unwrap_or(0.0);
            let cutoff = tol * sigma_max;
            let kernel = null_basis_abs(&c, cutoff)?.dim() as i64;
            let range = range_basis_abs(&c, cutoff)?.dim() as i64;
            kernel - (core.dim() as i64 - range)
        }
        None => 0,
    };
    Ok(DecompositionIndex {
        dis: report.dis,
        ind_a,
        ind_core,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn similarity(core: &CMatrix) -> CMatrix {
        let n = core.rows();
        let s = CMatrix::from_dmatrix(nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let x = ((i * 7 + j * 3) % 5) as f64 - 1.5;
            crate::linalg::Complex64::new(if i == j { x + 4.0 } else { x * 0.3 }, 0.1 * j as f64)
        }))
        .unwrap();
        &(&s * core) * &s.try_inverse().unwrap()
    }

    #[test]
    fn chain_examples() {
        let r = chain_report(&CMatrix::identity(3), TOL).unwrap();
        assert_eq!((r.asc, r.dsc, r.dis), (0, 0, 0));

        let r = chain_report(&CMatrix::jordan_zero(2), TOL).unwrap();
        assert_eq!((r.asc, r.dsc), (2, 2));
        assert_eq!(&r.meet[..3], &[1, 1, 0]);
        assert_eq!(r.dis, 2);
        assert_eq!(&r.nullity[..3], &[0, 1, 2]);
        assert_eq!(&r.join[..3], &[1, 1, 2]);
        assert!(r.kaashoek_violations().is_empty());

        let core = CMatrix::from_real_diagonal(&[1.0, 2.0, 0.0]).direct_sum(&CMatrix::jordan_zero(2));
        let r = chain_report(&similarity(&core), TOL).unwrap();
        assert_eq!((r.asc, r.dsc), (2, 2));
        assert!(r.kaashoek_violations().is_empty());
        assert!(r.is_monotone());
    }

    #[test]
    fn parts_and_core() {
        assert_eq!(quasinilpotent_part(&CMatrix::identity(3)).unwrap().dim(), 0);
        assert_eq!(quasinilpotent_part(&CMatrix::jordan_zero(3)).unwrap().dim(), 3);
        let h = quasinilpotent_part(&CMatrix::from_real_diagonal(&[2.0, 0.0, 0.0])).unwrap();
        assert!(h.same_as(&SubspaceBasis::coordinate(3, &[1, 2])));

        assert_eq!(analytic_core(&CMatrix::identity(3)).unwrap().dim(), 3);
        assert_eq!(analytic_core(&CMatrix::jordan_zero(3)).unwrap().dim(), 0);
        let k = analytic_core(&CMatrix::from_real_diagonal(&[2.0, 0.0])).unwrap();
        assert!(k.same_as(&SubspaceBasis::coordinate(2, &[0])));
    }

    #[test]
    fn kato_examples() {
        let k = kato_decomposition(&CMatrix::from_real_diagonal(&[2.0, 0.0]), 1e-10).unwrap();
        assert!(k.m.same_as(&SubspaceBasis::coordinate(2, &[0])));
        assert!(k.n_space.same_as(&SubspaceBasis::coordinate(2, &[1])));
        assert!(k.is_consistent(2));

        let k = kato_decomposition(&CMatrix::jordan_zero(2), 1e-10).unwrap();
        assert_eq!((k.dim_m, k.dim_n, k.nil_order), (0, 2, 2));
        assert!(k.is_consistent(2));

        let core = CMatrix::from_real_diagonal(&[1.0, 2.0]).direct_sum(&CMatrix::jordan_zero(2));
        let k = kato_decomposition(&similarity(&core), 1e-10).unwrap();
        assert_eq!((k.dim_m, k.dim_n, k.nil_order), (2, 2, 2));
        assert!(k.is_consistent(4), "{k:?}");
    }

    #[test]
    fn bf_index_examples() {
        let b = bf_index(&CMatrix::identity(3), 0, TOL).unwrap();
        assert_eq!(b.index, 0);
        let b = bf_index(&CMatrix::jordan_zero(3), 3, TOL).unwrap();
        assert_eq!((b.meet, b.codim, b.index), (0, 0, 0));
        let err = bf_index(&CMatrix::jordan_zero(3), 1, TOL).unwrap_err();
        assert!(err.to_string().contains("dis = 3"), "{err}");
    }

    #[test]
    fn decomposition_index_examples() {
        let d = decomposition_index_equality(&CMatrix::from_real_diagonal(&[2.0, 0.0])).unwrap();
        assert!(d.equal() && d.ind_a == 0);
        let d = decomposition_index_equality(&CMatrix::jordan_zero(3)).unwrap();
        assert_eq!((d.ind_a, d.ind_core), (0, 0));
    }

    #[test]
    fn non_square_is_rejected() {
        assert!(chain_report(&CMatrix::zeros(2, 3), TOL).is_err());
        assert!(quasinilpotent_part(&CMatrix::zeros(3, 2)).is_err());
    }
}
