use nalgebra::DMatrix;
use serde::Serialize;

use crate::linalg::{
    power_chain_abs, range_basis_abs, rank, rank_abs, singular_values, CMatrix, Complex64, LinalgError,
};

use super::axioms::{
    check_group, check_left_drazin, check_pair, check_right_drazin, relative_distance, AxiomResiduals, Residual,
    Side,
};
use super::inverse::{chain_for, drazin_inverse};
use super::{DrazinError, DrazinOptions};

fn require_left(a: &CMatrix, x: &CMatrix, j: usize, tol: f64, what: &'static str) -> Result<AxiomResiduals, DrazinError> {
    let r = check_left_drazin(a, x, j)?;
    if r.passes(tol) {
        Ok(r)
    } else {
        Err(DrazinError::AxiomFailure {
            what,
            residuals: Box::new(r),
            tol,
        })
    }
}

fn power_bound(norm: f64, k: usize, n: usize) -> f64 {
    if k == 0 {
        (n as f64).sqrt()
    } else {
        norm.powi(k as i32)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NilpotencyReport {
    /// `‖R² − AR‖` with `R = A − AXA`.
    pub square_identity: Residual,
    /// `‖R^j‖` (`R` itself when `j = 0`).
    pub power: Residual,
}

impl NilpotencyReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.square_identity.passes(tol) && self.power.passes(tol)
    }
}

/// Residuals of `(A − AXA)² = A(A − AXA)` and `(A − AXA)^j = 0`.
///
/// Only the first two left axioms are required of `x`; the nilpotency
/// order is then read against the supplied `j`.
pub fn residual_nilpotency(
    a: &CMatrix,
    x: &CMatrix,
    j: usize,
    opts: &DrazinOptions,
) -> Result<NilpotencyReport, DrazinError> {
    check_pair(a, x)?;
    let left = check_left_drazin(a, x, j)?;
    if !left.algebraic_passes(opts.residual_tol) {
        return Err(DrazinError::AxiomFailure {
            what: "residual nilpotency needs axa = xa² and x²a = x",
            residuals: Box::new(left),
            tol: opts.residual_tol,
        });
    }
    let na = a.norm();
    let r = a - &(&(a * x) * a);
    let rb = na + na * na * x.norm();
    let e = j.max(1);
    Ok(NilpotencyReport {
        square_identity: Residual::between(&(&r * &r), &(a * &r), rb * rb + na * rb),
        power: Residual::new(r.pow(e).norm(), rb.powi(e as i32)),
    })
}

/// Order of `ap` in the corner algebra `p𝒜p`: 0 when `p ≈ 0`, otherwise
/// the least `k` with `(ap)^k = 0`, read off the range chain of `ap` with the
/// absolute cutoff `tol·‖a‖₂·‖p‖₂`. `None` when the chain stalls above zero.
pub fn nilpotency_order(a: &CMatrix, p: &CMatrix, tol: f64) -> Result<Option<usize>, DrazinError> {
    let n = check_pair(a, p)?;
    // Singular values of an idempotent are 0 or at least 1.
    let p_norm = singular_values(p)?[0];
    if p_norm < 0.5 {
        return Ok(Some(0));
    }
    let cutoff = tol * singular_values(a)?[0] * p_norm;
    let chain = power_chain_abs(&(a * p), cutoff, n)?;
    Ok((1..=n).find(|&k| chain.rank(k) == 0))
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralIdempotent {
    #[serde(skip)]
    pub p: CMatrix,
    /// Order of `AP` (0 when `P = 0`).
    pub nilpotency_order: Option<usize>,
    pub idempotence: Residual,
    pub commutation: Residual,
    pub sum_invertible: bool,
}

impl SpectralIdempotent {
    pub fn passes(&self, tol: f64) -> bool {
        self.idempotence.passes(tol) && self.commutation.passes(tol) && self.nilpotency_order.is_some() && self.sum_invertible
    }
}

/// A nonzero idempotent has norm at least one, so residuals of a candidate
/// idempotent are measured against `max(‖P‖, 1)`; this keeps a roundoff-sized
/// `P ≈ 0` from looking like a failure.
fn idempotent_scale(p: &CMatrix) -> f64 {
    p.norm().max(1.0)
}

fn idempotent_checks(a: &CMatrix, p: &CMatrix) -> (Residual, Residual) {
    let (na, np) = (a.norm(), idempotent_scale(p));
    let idem = Residual::between(&(p * p), p, np * np + np);
    let comm = Residual::between(&(a * p), &(p * a), 2.0 * na * np);
    (idem, comm)
}

fn invertible(m: &CMatrix, opts: &DrazinOptions) -> Result<bool, LinalgError> {
    let n = m.rows();
    Ok(rank(m, opts.rank_tol_for(n))? == n)
}

fn invertible_abs(m: &CMatrix, cutoff: f64) -> Result<bool, LinalgError> {
    Ok(rank_abs(m, cutoff)? == m.rows())
}

/// `P = I − XA` for a left Drazin inverse `x`, with its defining properties measured.
pub fn spectral_idempotent_left(
    a: &CMatrix,
    x: &CMatrix,
    opts: &DrazinOptions,
) -> Result<SpectralIdempotent, DrazinError> {
    let n = check_pair(a, x)?;
    // Any index j ≤ n also satisfies the index axiom at n.
    require_left(a, x, n, opts.residual_tol, "spectral idempotent needs a left Drazin inverse")?;
    let p = &CMatrix::identity(n) - &(x * a);
    let (idempotence, commutation) = idempotent_checks(a, &p);
    Ok(SpectralIdempotent {
        nilpotency_order: nilpotency_order(a, &p, opts.rank_tol_for(n))?,
        sum_invertible: invertible(&(a + &p), opts)?,
        p,
        idempotence,
        commutation,
    })
}

#[derive(Debug, Clone)]
pub struct OneSidedInverse {
    pub inverse: CMatrix,
    pub side: Side,
    /// Nilpotency order of `AP`, used as the index in the axiom check.
    pub index: usize,
    pub residuals: AxiomResiduals,
}

/// `x = (A+P)⁻¹(I−P)` (left) or `y = (I−P)(A+P)⁻¹` (right) for a commuting
/// idempotent `P` with `AP` nilpotent and `A + P` invertible.
pub fn inverse_from_idempotent(
    a: &CMatrix,
    p: &CMatrix,
    side: Side,
    opts: &DrazinOptions,
) -> Result<OneSidedInverse, DrazinError> {
    let n = check_pair(a, p)?;
    let tol = opts.residual_tol;
    let (idem, comm) = idempotent_checks(a, p);
    let order = nilpotency_order(a, p, opts.rank_tol_for(n))?;
    let sum = a + p;
    let sum_inv = if invertible(&sum, opts)? { sum.try_inverse() } else { None };

    let mut failed = Vec::new();
    if !idem.passes(tol) {
        failed.push(format!("P² ≠ P (relative residual {:.3e})", idem.relative()));
    }
    if !comm.passes(tol) {
        failed.push(format!("AP ≠ PA (relative residual {:.3e})", comm.relative()));
    }
    if order.is_none() {
        failed.push(format!("AP is not nilpotent within {n} steps"));
    }
    if sum_inv.is_none() {
        failed.push("A + P is singular".to_string());
    }
    let (Some(index), Some(c), true) = (order, sum_inv, failed.is_empty()) else {
        return Err(DrazinError::Precondition(failed));
    };

    let complement = &CMatrix::identity(n) - p;
    let inverse = match side {
        Side::Left => &c * &complement,
        Side::Right => &complement * &c,
    };
    let residuals = side.check(a, &inverse, index)?;
    if !residuals.passes(tol) {
        return Err(DrazinError::AxiomFailure {
            what: "inverse built from the idempotent",
            residuals: Box::new(residuals),
            tol,
        });
    }
    Ok(OneSidedInverse {
        inverse,
        side,
        index,
        residuals,
    })
}

#[derive(Debug, Clone)]
pub struct Merged {
    pub value: CMatrix,
    /// `‖X − Y‖ / max(‖X‖, ‖Y‖)`.
    pub deviation: f64,
    pub commutator: Residual,
}

/// A left and a right Drazin inverse of the same `A` coincide; the common
/// value commutes with `A`.
pub fn merge_two_sided(
    a: &CMatrix,
    x: &CMatrix,
    y: &CMatrix,
    j: usize,
    opts: &DrazinOptions,
) -> Result<Merged, DrazinError> {
    let tol = opts.residual_tol;
    require_left(a, x, j, tol, "merge needs a left Drazin inverse")?;
    let right = check_right_drazin(a, y, j)?;
    if !right.passes(tol) {
        return Err(DrazinError::AxiomFailure {
            what: "merge needs a right Drazin inverse",
            residuals: Box::new(right),
            tol,
        });
    }
    let deviation = relative_distance(x, y);
    if deviation > tol {
        return Err(DrazinError::TheoremViolation {
            what: "left and right Drazin inverses differ",
            deviation,
            tol,
        });
    }
    let commutator = Residual::between(&(a * x), &(x * a), 2.0 * a.norm() * x.norm());
    if !commutator.passes(tol) {
        return Err(DrazinError::TheoremViolation {
            what: "merged inverse does not commute with A",
            deviation: commutator.relative(),
            tol,
        });
    }
    Ok(Merged {
        value: x.clone(),
        deviation,
        commutator,
    })
}

#[derive(Debug, Clone)]
pub struct PowerLift {
    pub power: CMatrix,
    /// Left axioms of `Xⁿ` against `Aⁿ` with the original index.
    pub residuals: AxiomResiduals,
    /// Left group axioms of `Xⁿ` against `Aⁿ`, checked once `n ≥ j`.
    pub group: Option<AxiomResiduals>,
}

/// `Xⁿ` as a left Drazin inverse of `Aⁿ`.
pub fn power_lift(x: &CMatrix, a: &CMatrix, n: usize, j: usize, opts: &DrazinOptions) -> Result<PowerLift, DrazinError> {
    let tol = opts.residual_tol;
    if n == 0 {
        return Err(DrazinError::Precondition(vec!["power must be at least 1".into()]));
    }
    require_left(a, x, j, tol, "power lift needs a left Drazin inverse")?;
    let (xn, an) = (x.pow(n), a.pow(n));
    let residuals = check_left_drazin(&an, &xn, j)?;
    if !residuals.passes(tol) {
        return Err(DrazinError::TheoremViolation {
            what: "Xⁿ is not a left Drazin inverse of Aⁿ",
            deviation: residuals.max_relative(),
            tol,
        });
    }
    let group = if n >= j {
        let g = check_group(&an, &xn, Side::Left)?;
        if !g.passes(tol) {
            return Err(DrazinError::TheoremViolation {
                what: "Xⁿ is not a left group inverse of Aⁿ for n ≥ j",
                deviation: g.max_relative(),
                tol,
            });
        }
        Some(g)
    } else {
        None
    };
    Ok(PowerLift {
        power: xn,
        residuals,
        group,
    })
}

#[derive(Debug, Clone)]
pub struct GroupLift {
    pub z: CMatrix,
    pub residuals: AxiomResiduals,
}

/// `Z = X A^{n−1}` from a left group inverse `X` of `Aⁿ` with `AXA = XA²`.
pub fn group_lift(a: &CMatrix, x: &CMatrix, n: usize, opts: &DrazinOptions) -> Result<GroupLift, DrazinError> {
    let tol = opts.residual_tol;
    check_pair(a, x)?;
    if n == 0 {
        return Err(DrazinError::Precondition(vec!["power must be at least 1".into()]));
    }
    let an = a.pow(n);
    let g = check_group(&an, x, Side::Left)?;
    let wc = Residual::between(&(&(a * x) * a), &(&(x * a) * a), 2.0 * a.norm().powi(2) * x.norm());
    let mut failed = Vec::new();
    if !g.passes(tol) {
        failed.push(format!("X is not a left group inverse of Aⁿ (relative residual {:.3e})", g.max_relative()));
    }
    if !wc.passes(tol) {
        failed.push(format!("AXA ≠ XA² (relative residual {:.3e})", wc.relative()));
    }
    if !failed.is_empty() {
        return Err(DrazinError::Precondition(failed));
    }
    let z = x * &a.pow(n - 1);
    let residuals = check_left_drazin(a, &z, n)?;
    if !residuals.passes(tol) {
        return Err(DrazinError::TheoremViolation {
            what: "X A^{n−1} is not a left Drazin inverse of A",
            deviation: residuals.max_relative(),
            tol,
        });
    }
    Ok(GroupLift { z, residuals })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BcWitness {
    /// `‖x − x^{j+1}a^j‖`.
    pub membership: Residual,
    /// `‖x a^{j+1} − a^j‖`.
    pub absorption: Residual,
}

impl BcWitness {
    pub fn passes(&self, tol: f64) -> bool {
        self.membership.passes(tol) && self.absorption.passes(tol)
    }
}

/// Witnesses that a left Drazin inverse is a `(b, c)`-type inverse with `b = c = a^j`.
pub fn bc_witness(a: &CMatrix, x: &CMatrix, j: usize, opts: &DrazinOptions) -> Result<BcWitness, DrazinError> {
    let left = require_left(a, x, j, opts.residual_tol, "(b,c) witness needs a left Drazin inverse")?;
    let n = a.rows();
    let (na, nx) = (a.norm(), x.norm());
    let aj = a.pow(j);
    let member = &x.pow(j + 1) * &aj;
    Ok(BcWitness {
        membership: Residual::between(x, &member, nx + nx.powi(j as i32 + 1) * power_bound(na, j, n)),
        absorption: left.r_index,
    })
}

/// Oblique projector onto `N(A^k)` along `R(A^k)`, `k` the index, built
/// from the kernel and range chains alone.
pub fn chain_spectral_idempotent(a: &CMatrix, opts: &DrazinOptions) -> Result<CMatrix, DrazinError> {
    let chain = chain_for(a, opts)?;
    let n = a.rows();
    let k = chain.descent().expect("rank chain of an n×n matrix stabilizes within n steps");
    let range = &chain.ranges[k];
    let kernel = &chain.kernels[k];
    let (r, m) = (range.dim(), kernel.dim());
    if r + m != n {
        return Err(DrazinError::Precondition(vec![format!(
            "R(A^{k}) and N(A^{k}) have dimensions {r} + {m} ≠ {n}"
        )]));
    }
    if m == 0 {
        return Ok(CMatrix::zeros(n, n));
    }
    if r == 0 {
        return Ok(CMatrix::identity(n));
    }
    let mut w = DMatrix::<Complex64>::zeros(n, n);
    w.view_mut((0, 0), (n, r)).copy_from(range.columns());
    w.view_mut((0, r), (n, m)).copy_from(kernel.columns());
    let w_inv = w.clone().try_inverse().ok_or_else(|| {
        DrazinError::Precondition(vec![format!("R(A^{k}) and N(A^{k}) are not complementary")])
    })?;
    let p = kernel.columns() * w_inv.rows(r, m);
    Ok(CMatrix::from_dmatrix(p)?)
}

#[derive(Debug, Clone)]
pub struct EquationReport {
    pub index: usize,
    /// Solution of the left system from the chain idempotent.
    pub left_solution: CMatrix,
    /// Solution of the commuting system from the Schur split.
    pub drazin: CMatrix,
    pub deviation: f64,
    pub left_residuals: AxiomResiduals,
}

/// Solves `{ABA = BA², B²A = B, BA^{j+1} = A^j}` and the commuting system by
/// unrelated routes and requires the two solutions to agree.
pub fn matrix_equation_equivalence(a: &CMatrix, opts: &DrazinOptions) -> Result<EquationReport, DrazinError> {
    let p = chain_spectral_idempotent(a, opts)?;
    let left = inverse_from_idempotent(a, &p, Side::Left, opts)?;
    let d = drazin_inverse(a, opts)?;
    let deviation = relative_distance(&left.inverse, &d.inverse);
    if deviation > opts.residual_tol {
        return Err(DrazinError::TheoremViolation {
            what: "left-system and commuting-system solutions differ",
            deviation,
            tol: opts.residual_tol,
        });
    }
    Ok(EquationReport {
        index: d.index,
        left_solution: left.inverse,
        drazin: d.inverse,
        deviation,
        left_residuals: left.residuals,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AdjointReport {
    pub residuals: AxiomResiduals,
    pub passes: bool,
}

/// Right axioms of `X*` against `A*` for a left Drazin inverse `X` of `A`.
pub fn adjoint_duality(a: &CMatrix, x: &CMatrix, j: usize, opts: &DrazinOptions) -> Result<AdjointReport, DrazinError> {
    require_left(a, x, j, opts.residual_tol, "adjoint duality needs a left Drazin inverse")?;
    let residuals = check_right_drazin(&a.adjoint(), &x.adjoint(), j)?;
    Ok(AdjointReport {
        passes: residuals.passes(opts.residual_tol),
        residuals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockInvertibility {
    pub whole: bool,
    /// `A` restricted to `R(P)`.
    pub range_block: bool,
    /// `A` restricted to `N(P)`.
    pub kernel_block: bool,
}

impl BlockInvertibility {
    /// `A` is invertible exactly when both compressions are.
    pub fn consistent(&self) -> bool {
        self.whole == (self.range_block && self.kernel_block)
    }
}

/// Invertibility of `A` and of its compressions to `R(P)` and `N(P)` for a
/// commuting idempotent `P`, decided by rank counts.
pub fn idempotent_block_invertibility(
    a: &CMatrix,
    p: &CMatrix,
    opts: &DrazinOptions,
) -> Result<BlockInvertibility, DrazinError> {
    let n = check_pair(a, p)?;
    let tol = opts.residual_tol;
    let (idem, comm) = idempotent_checks(a, p);
    let mut failed = Vec::new();
    if !idem.passes(tol) {
        failed.push(format!("P² ≠ P (relative residual {:.3e})", idem.relative()));
    }
    if !comm.passes(tol) {
        failed.push(format!("AP ≠ PA (relative residual {:.3e})", comm.relative()));
    }
    if !failed.is_empty() {
        return Err(DrazinError::Precondition(failed));
    }
    // Compressions are judged on the scale of A, not their own.
    let cutoff = opts.rank_tol_for(n) * singular_values(a)?[0];
    let block = |q: &CMatrix| -> Result<bool, DrazinError> {
        // Idempotent singular values are 0 or at least 1.
        let basis = range_basis_abs(q, 0.5)?;
        let Some(b) = basis.basis_matrix() else {
            return Ok(true);
        };
        let compressed = &(&b.adjoint() * a) * &b;
        Ok(invertible_abs(&compressed, cutoff)?)
    };
    Ok(BlockInvertibility {
        whole: invertible(a, opts)?,
        range_block: block(p)?,
        kernel_block: block(&(&CMatrix::identity(n) - p))?,
    })
}
