use serde::Serialize;

use crate::linalg::CMatrix;

use super::DrazinError;

/// One identity residual `‖lhs − rhs‖` together with the norm bound of the
/// two sides it is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub abs: f64,
    pub scale: f64,
}

impl Residual {
    pub fn new(abs: f64, scale: f64) -> Self {
        Self { abs, scale }
    }

    pub fn between(lhs: &CMatrix, rhs: &CMatrix, scale: f64) -> Self {
        Self::new(lhs.distance(rhs), scale)
    }

    /// `abs / scale`, with `0/0 = 0`.
    pub fn relative(&self) -> f64 {
        if self.abs == 0.0 {
            0.0
        } else if self.scale == 0.0 {
            f64::INFINITY
        } else {
            self.abs / self.scale
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.relative() <= tol
    }
}

/// Residuals of an axiom triple.
///
/// For the left axioms these are `‖axa − xa²‖`, `‖x²a − x‖` and
/// `‖xa^{j+1} − a^j‖`; for the right axioms `‖aya − a²y‖`, `‖ay² − y‖` and
/// `‖a^{j+1}y − a^j‖`; for the two-sided axioms `‖ax − xa‖`, `‖x²a − x‖`
/// and `‖a^{j+1}x − a^j‖`. Scales are products of Frobenius norms of the
/// factors, so `relative()` is insensitive to the size of `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomResiduals {
    pub r_weak_commute: Residual,
    pub r_inner: Residual,
    pub r_index: Residual,
}

impl AxiomResiduals {
    pub fn max_relative(&self) -> f64 {
        self.r_weak_commute
            .relative()
            .max(self.r_inner.relative())
            .max(self.r_index.relative())
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_relative() <= tol
    }

    /// First two axioms only (the index relation excluded).
    pub fn algebraic_passes(&self, tol: f64) -> bool {
        self.r_weak_commute.passes(tol) && self.r_inner.passes(tol)
    }
}

pub(crate) fn check_pair(a: &CMatrix, x: &CMatrix) -> Result<usize, DrazinError> {
    if !a.is_square() {
        return Err(DrazinError::NotSquare(a.rows(), a.cols()));
    }
    if a.shape() != x.shape() {
        return Err(DrazinError::ShapeMismatch {
            expected: a.shape(),
            found: x.shape(),
        });
    }
    Ok(a.rows())
}

fn identity_norm(n: usize) -> f64 {
    (n as f64).sqrt()
}

fn power_norm_bound(a_norm: f64, k: usize, n: usize) -> f64 {
    if k == 0 {
        identity_norm(n)
    } else {
        a_norm.powi(k as i32)
    }
}

/// Residuals of `axa = xa²`, `x²a = x`, `xa^{j+1} = a^j`.
pub fn check_left_drazin(a: &CMatrix, x: &CMatrix, j: usize) -> Result<AxiomResiduals, DrazinError> {
    let n = check_pair(a, x)?;
    let (na, nx) = (a.norm(), x.norm());
    let xa = x * a;
    let axa = a * &xa;
    let xaa = &xa * a;
    let xxa = x * &xa;
    let aj = a.pow(j);
    let xaj1 = &(x * &aj) * a;
    Ok(AxiomResiduals {
        r_weak_commute: Residual::between(&axa, &xaa, 2.0 * na * na * nx),
        r_inner: Residual::between(&xxa, x, nx * nx * na + nx),
        r_index: Residual::between(
            &xaj1,
            &aj,
            nx * power_norm_bound(na, j + 1, n) + power_norm_bound(na, j, n),
        ),
    })
}

/// Residuals of `aya = a²y`, `ay² = y`, `a^{j+1}y = a^j`.
pub fn check_right_drazin(a: &CMatrix, y: &CMatrix, j: usize) -> Result<AxiomResiduals, DrazinError> {
    let n = check_pair(a, y)?;
    let (na, ny) = (a.norm(), y.norm());
    let ay = a * y;
    let aya = &ay * a;
    let aay = a * &ay;
    let ayy = &ay * y;
    let aj = a.pow(j);
    let aj1y = a * &(&aj * y);
    Ok(AxiomResiduals {
        r_weak_commute: Residual::between(&aya, &aay, 2.0 * na * na * ny),
        r_inner: Residual::between(&ayy, y, ny * ny * na + ny),
        r_index: Residual::between(
            &aj1y,
            &aj,
            ny * power_norm_bound(na, j + 1, n) + power_norm_bound(na, j, n),
        ),
    })
}

/// Residuals of the commuting system `ax = xa`, `x²a = x`, `a^{j+1}x = a^j`.
pub fn check_two_sided(a: &CMatrix, x: &CMatrix, j: usize) -> Result<AxiomResiduals, DrazinError> {
    let n = check_pair(a, x)?;
    let (na, nx) = (a.norm(), x.norm());
    let ax = a * x;
    let xa = x * a;
    let xxa = x * &xa;
    let aj = a.pow(j);
    let aj1x = &(&aj * a) * x;
    Ok(AxiomResiduals {
        r_weak_commute: Residual::between(&ax, &xa, 2.0 * na * nx),
        r_inner: Residual::between(&xxa, x, nx * nx * na + nx),
        r_index: Residual::between(
            &aj1x,
            &aj,
            nx * power_norm_bound(na, j + 1, n) + power_norm_bound(na, j, n),
        ),
    })
}

/// Which one-sided family an inverse belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn check(self, a: &CMatrix, x: &CMatrix, j: usize) -> Result<AxiomResiduals, DrazinError> {
        match self {
            Side::Left => check_left_drazin(a, x, j),
            Side::Right => check_right_drazin(a, x, j),
        }
    }
}

/// Group axioms: the Drazin triple with index one (`xa² = a` or `a²y = a`).
pub fn check_group(a: &CMatrix, x: &CMatrix, side: Side) -> Result<AxiomResiduals, DrazinError> {
    side.check(a, x, 1)
}

/// `‖M‖` scaled for the relative distance between two candidate inverses.
pub(crate) fn relative_distance(x: &CMatrix, y: &CMatrix) -> f64 {
    let d = x.distance(y);
    let s = x.norm().max(y.norm());
    if d == 0.0 {
        0.0
    } else if s == 0.0 {
        f64::INFINITY
    } else {
        d / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_residuals(r: &AxiomResiduals) -> bool {
        r.r_weak_commute.abs == 0.0 && r.r_inner.abs == 0.0 && r.r_index.abs == 0.0
    }

    #[test]
    fn left_checker_examples() {
        let i = CMatrix::identity(3);
        assert!(zero_residuals(&check_left_drazin(&i, &i, 0).unwrap()));
        let a = CMatrix::from_real_diagonal(&[2.0, 0.0]);
        let x = CMatrix::from_real_diagonal(&[0.5, 0.0]);
        assert!(zero_residuals(&check_left_drazin(&a, &x, 1).unwrap()));
        let j2 = CMatrix::jordan_zero(2);
        assert!(zero_residuals(&check_left_drazin(&j2, &CMatrix::zeros(2, 2), 2).unwrap()));
    }

    #[test]
    fn right_checker_examples() {
        let i = CMatrix::identity(2);
        assert!(zero_residuals(&check_right_drazin(&i, &i, 0).unwrap()));
        let a = CMatrix::from_real_diagonal(&[2.0, 0.0]);
        let x = CMatrix::from_real_diagonal(&[0.5, 0.0]);
        assert!(zero_residuals(&check_right_drazin(&a, &x, 1).unwrap()));
    }

    #[test]
    fn group_checker_examples() {
        let i = CMatrix::identity(2);
        assert!(zero_residuals(&check_group(&i, &i, Side::Left).unwrap()));
        let a = CMatrix::from_real_diagonal(&[2.0, 0.0]);
        let x = CMatrix::from_real_diagonal(&[0.5, 0.0]);
        assert!(zero_residuals(&check_group(&a, &x, Side::Left).unwrap()));
    }

    #[test]
    fn nonzero_nilpotent_has_no_group_inverse() {
        // a = J₂(0) has a² = 0, so xa² = 0 and ‖xa² − a‖ = ‖a‖ = 1 for every x.
        // Brute force over a grid of real 2x2 candidates confirms it never passes.
        let a = CMatrix::jordan_zero(2);
        let grid = [-2.0, -0.5, 0.0, 0.5, 2.0];
        for &p in &grid {
            for &q in &grid {
                for &r in &grid {
                    for &s in &grid {
                        let x = CMatrix::from_real_rows(&[&[p, q], &[r, s]]);
                        let res = check_group(&a, &x, Side::Left).unwrap();
                        assert_eq!(res.r_index.abs, a.norm());
                        assert!(!res.passes(1e-8));
                    }
                }
            }
        }
    }

    #[test]
    fn shape_errors() {
        let a = CMatrix::identity(2);
        let x = CMatrix::identity(3);
        assert!(matches!(
            check_left_drazin(&a, &x, 1),
            Err(DrazinError::ShapeMismatch { .. })
        ));
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(check_right_drazin(&rect, &rect, 1), Err(DrazinError::NotSquare(2, 3))));
    }

    #[test]
    fn relative_residual_edge_cases() {
        assert_eq!(Residual::new(0.0, 0.0).relative(), 0.0);
        assert_eq!(Residual::new(1.0, 0.0).relative(), f64::INFINITY);
        assert_eq!(Residual::new(1.0, 4.0).relative(), 0.25);
    }
}
