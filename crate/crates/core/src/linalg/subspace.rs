use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{null_basis_abs, range_basis_abs, CMatrix, LinalgError};

/// Resolution used for subspaces produced by the SVD routines: the
/// orthonormality tolerance and the principal-angle cutoff for
/// intersections and sums.
pub const DEFAULT_SUBSPACE_TOL: f64 = 1e-9;

/// Orthonormal spanning set of a subspace of `C^ambient_dim`.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    /// Basis vectors as columns, `ambient_dim × dim`.
    columns: DMatrix<Complex64>,
    tol: f64,
}

impl SubspaceBasis {
    pub(crate) fn from_orthonormal_columns(columns: DMatrix<Complex64>, tol: f64) -> Self {
        Self {
            ambient_dim: columns.nrows(),
            columns,
            tol,
        }
    }

    /// Orthonormalizes the given spanning vectors (Gram matrix rank decides the dimension).
    pub fn span(ambient_dim: usize, vectors: &[Vec<Complex64>], tol: f64) -> Result<Self, LinalgError> {
        if ambient_dim == 0 {
            return Err(LinalgError::EmptyShape { rows: 0, cols: 0 });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(LinalgError::AmbientMismatch(ambient_dim, v.len()));
        }
        if vectors.is_empty() {
            return Ok(Self::zero(ambient_dim));
        }
        let m = DMatrix::from_fn(ambient_dim, vectors.len(), |i, j| vectors[j][i]);
        let m = CMatrix::from_dmatrix(m)?;
        let mut out = range_basis_abs(&m, tol)?;
        out.tol = tol;
        Ok(out)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self::from_orthonormal_columns(DMatrix::zeros(ambient_dim, 0), DEFAULT_SUBSPACE_TOL)
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::from_orthonormal_columns(DMatrix::identity(ambient_dim, ambient_dim), DEFAULT_SUBSPACE_TOL)
    }

    /// Span of the listed standard basis vectors (0-based).
    pub fn coordinate(ambient_dim: usize, axes: &[usize]) -> Self {
        let cols = DMatrix::from_fn(ambient_dim, axes.len(), |i, j| {
            if i == axes[j] {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::from_orthonormal_columns(cols, DEFAULT_SUBSPACE_TOL)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.columns.column(k).iter().copied().collect()
    }

    pub fn vectors(&self) -> impl Iterator<Item = Vec<Complex64>> + '_ {
        (0..self.dim()).map(move |k| self.vector(k))
    }

    pub fn columns(&self) -> &DMatrix<Complex64> {
        &self.columns
    }

    /// Basis columns as a matrix; `None` for the zero subspace.
    pub fn basis_matrix(&self) -> Option<CMatrix> {
        (self.dim() > 0).then(|| CMatrix::wrap(self.columns.clone()))
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> CMatrix {
        CMatrix::wrap(&self.columns * self.columns.adjoint())
    }

    /// `I − P`.
    pub fn complement_projector(&self) -> CMatrix {
        let mut m = -(&self.columns * self.columns.adjoint());
        for i in 0..self.ambient_dim {
            m[(i, i)] += Complex64::new(1.0, 0.0);
        }
        CMatrix::wrap(m)
    }

    /// `max |⟨vᵢ,vⱼ⟩ − δᵢⱼ|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.columns.adjoint() * &self.columns;
        let mut worst: f64 = 0.0;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Distance from `v` to the subspace relative to `‖v‖`.
    pub fn relative_distance(&self, v: &[Complex64]) -> f64 {
        let v = DVector::from_column_slice(v);
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let proj = &self.columns * (self.columns.adjoint() * &v);
        (v - proj).norm() / norm
    }

    /// True when every basis vector of `other` lies in `self` up to the combined tolerance.
    pub fn contains(&self, other: &SubspaceBasis) -> bool {
        let tol = self.tol.max(other.tol);
        other.vectors().all(|v| self.relative_distance(&v) <= tol)
    }

    /// Same subspace: equal dimension and mutual containment.
    pub fn same_as(&self, other: &SubspaceBasis) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.dim() == other.dim()
            && self.contains(other)
            && other.contains(self)
    }
}

fn check_ambient(s1: &SubspaceBasis, s2: &SubspaceBasis) -> Result<(), LinalgError> {
    if s1.ambient_dim == s2.ambient_dim {
        Ok(())
    } else {
        Err(LinalgError::AmbientMismatch(s1.ambient_dim, s2.ambient_dim))
    }
}

/// `S1 ∩ S2` as the kernel of `[(I−P₁); (I−P₂)]`.
///
/// The kernel cutoff and the one used by [`subspace_sum`] coincide, so a
/// principal angle θ is counted in the intersection exactly when it is
/// dropped from the sum (both tests see `√2·sin(θ/2)`).
pub fn intersect(s1: &SubspaceBasis, s2: &SubspaceBasis) -> Result<SubspaceBasis, LinalgError> {
    check_ambient(s1, s2)?;
    let n = s1.ambient_dim;
    let tol = s1.tol.max(s2.tol);
    if s1.dim() == 0 || s2.dim() == 0 {
        return Ok(SubspaceBasis::zero(n).with_tol(tol));
    }
    let c1 = s1.complement_projector();
    let c2 = s2.complement_projector();
    let mut stacked = DMatrix::zeros(2 * n, n);
    stacked.view_mut((0, 0), (n, n)).copy_from(c1.as_dmatrix());
    stacked.view_mut((n, 0), (n, n)).copy_from(c2.as_dmatrix());
    let out = null_basis_abs(&CMatrix::wrap(stacked), tol)?;
    Ok(out.with_tol(tol))
}

/// `S1 + S2` as the range of the concatenated bases.
pub fn subspace_sum(s1: &SubspaceBasis, s2: &SubspaceBasis) -> Result<SubspaceBasis, LinalgError> {
    check_ambient(s1, s2)?;
    let n = s1.ambient_dim;
    let tol = s1.tol.max(s2.tol);
    let k = s1.dim() + s2.dim();
    if k == 0 {
        return Ok(SubspaceBasis::zero(n).with_tol(tol));
    }
    let mut cat = DMatrix::zeros(n, k);
    cat.view_mut((0, 0), (n, s1.dim())).copy_from(&s1.columns);
    cat.view_mut((0, s1.dim()), (n, s2.dim())).copy_from(&s2.columns);
    let out = range_basis_abs(&CMatrix::wrap(cat), tol)?;
    Ok(out.with_tol(tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn intersect_examples() {
        let full = SubspaceBasis::full(3);
        assert_eq!(intersect(&full, &full).unwrap().dim(), 3);

        let x = SubspaceBasis::span(2, &[real(&[1.0, 0.0])], 1e-9).unwrap();
        let y = SubspaceBasis::span(2, &[real(&[0.0, 1.0])], 1e-9).unwrap();
        assert_eq!(intersect(&x, &y).unwrap().dim(), 0);

        let a = SubspaceBasis::coordinate(4, &[0, 1]);
        let b = SubspaceBasis::coordinate(4, &[1, 2]);
        let meet = intersect(&a, &b).unwrap();
        assert_eq!(meet.dim(), 1);
        assert!(meet.same_as(&SubspaceBasis::coordinate(4, &[1])));
    }

    #[test]
    fn sum_examples() {
        let line = SubspaceBasis::span(3, &[real(&[1.0, 2.0, 0.0])], 1e-9).unwrap();
        assert_eq!(subspace_sum(&line, &line).unwrap().dim(), 1);

        let e1 = SubspaceBasis::coordinate(3, &[0]);
        let e2 = SubspaceBasis::coordinate(3, &[1]);
        let s = subspace_sum(&e1, &e2).unwrap();
        assert!(s.same_as(&SubspaceBasis::coordinate(3, &[0, 1])));
    }

    #[test]
    fn two_generic_planes_fill_three_space() {
        let p1 = SubspaceBasis::span(3, &[real(&[1.0, 0.3, -0.2]), real(&[0.1, 1.0, 0.7])], 1e-9).unwrap();
        let p2 = SubspaceBasis::span(3, &[real(&[-0.4, 0.2, 1.0]), real(&[0.9, -1.1, 0.3])], 1e-9).unwrap();
        // Oracle: the 3x4 concatenation of spanning vectors has rank 3.
        let cat = CMatrix::from_real_rows(&[
            &[1.0, 0.1, -0.4, 0.9],
            &[0.3, 1.0, 0.2, -1.1],
            &[-0.2, 0.7, 1.0, 0.3],
        ]);
        assert_eq!(crate::linalg::rank(&cat, 1e-12).unwrap(), 3);
        let s = subspace_sum(&p1, &p2).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(intersect(&p1, &p2).unwrap().dim(), 1);
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = SubspaceBasis::full(2);
        let b = SubspaceBasis::full(3);
        assert_eq!(intersect(&a, &b).unwrap_err(), LinalgError::AmbientMismatch(2, 3));
        assert_eq!(subspace_sum(&a, &b).unwrap_err(), LinalgError::AmbientMismatch(2, 3));
    }
}
