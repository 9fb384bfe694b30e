use serde::Serialize;

use super::{bf_index_from, chain_report, BfIndex, ChainReport, StructureError};
use crate::drazin::{default_structural_tol, Residual};
use crate::linalg::{rank, rank_abs, require_square, CMatrix, LinalgError};

#[derive(Debug, Clone, Serialize)]
pub struct PerturbReport {
    pub n: usize,
    #[serde(skip)]
    pub f1: CMatrix,
    /// `‖(T+F)ⁿ − Tⁿ − F₁‖` against the norms of the three terms.
    pub expansion_residual: Residual,
    pub rank_f: usize,
    pub rank_f1: usize,
    /// Drazin indices of `T` and `T + F`.
    pub index_before: usize,
    pub index_after: usize,
    /// `|rank((T+F)ⁿ) − rank(Tⁿ)|`; the two ranges differ inside `R(F₁)`,
    /// whose dimension is `rank_f1`.
    pub essential_dim_gap: usize,
}

impl PerturbReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.expansion_residual.passes(tol) && self.rank_f1 <= self.n * self.rank_f && self.essential_dim_gap <= self.rank_f1
    }
}

fn same_shape(t: &CMatrix, f: &CMatrix) -> Result<usize, StructureError> {
    let n = require_square(t)?;
    if f.shape() != t.shape() {
        return Err(LinalgError::AmbientMismatch(n, f.rows()).into());
    }
    Ok(n)
}

/// `(T+F)ⁿ = Tⁿ + F₁` with `F₁ = Σ_{i<n} Tⁱ F (T+F)^{n−i−1}`.
pub fn perturb_expand(t: &CMatrix, f: &CMatrix, n: usize) -> Result<PerturbReport, StructureError> {
    let dim = same_shape(t, f)?;
    if n == 0 {
        return Err(StructureError::Precondition("n must be at least 1".into()));
    }
    let tf = t + f;
    let t_powers: Vec<CMatrix> = (0..=n).map(|i| t.pow(i)).collect();
    let tf_powers: Vec<CMatrix> = (0..=n).map(|i| tf.pow(i)).collect();

    let mut f1 = CMatrix::zeros(dim, dim);
    let mut term_scale = 0.0;
    for i in 0..n {
        let term = &(&t_powers[i] * f) * &tf_powers[n - i - 1];
        f1 = &f1 + &term;
        term_scale += t.norm().powi(i as i32) * f.norm() * tf.norm().powi((n - i - 1) as i32);
    }
    let lhs = &tf_powers[n];
    let rhs = &t_powers[n] + &f1;
    let scale = tf.norm().powi(n as i32) + t.norm().powi(n as i32) + term_scale;

    // Roundoff in a computed power scales with the n-th power of the norm,
    // not with the largest singular value of the power itself.
    let tol = default_structural_tol(dim);
    let rank_tn = rank_abs(&t_powers[n], tol * t.norm().powi(n as i32))?;
    let rank_tfn = rank_abs(&tf_powers[n], tol * tf.norm().powi(n as i32))?;
    Ok(PerturbReport {
        n,
        expansion_residual: Residual::between(lhs, &rhs, scale),
        rank_f: rank(f, tol)?,
        rank_f1: rank_abs(&f1, tol * term_scale)?,
        index_before: chain_report(t, tol)?.dsc,
        index_after: chain_report(&tf, tol)?.dsc,
        essential_dim_gap: rank_tn.abs_diff(rank_tfn),
        f1,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub before: ChainReport,
    pub after: ChainReport,
    pub index_before: BfIndex,
    pub index_after: BfIndex,
}

impl StabilityReport {
    pub fn equal(&self) -> bool {
        self.index_before.index == self.index_after.index
    }
}

/// B-Fredholm index of `T` at `dis(T)` and of `T + F` at `dis(T + F)`.
pub fn index_stability(t: &CMatrix, f: &CMatrix) -> Result<StabilityReport, StructureError> {
    let dim = same_shape(t, f)?;
    let tol = default_structural_tol(dim);
    let rank_f = rank(f, tol)?;
    if 2 * rank_f > dim {
        return Err(StructureError::Precondition(format!("rank(F) = {rank_f} exceeds n/2 = {}", dim / 2)));
    }
    let before = chain_report(t, tol)?;
    let after = chain_report(&(t + f), tol)?;
    Ok(StabilityReport {
        index_before: bf_index_from(&before, before.dis)?,
        index_after: bf_index_from(&after, after.dis)?,
        before,
        after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Complex64;

    fn outer(n: usize, i: usize, j: usize) -> CMatrix {
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        entries[i * n + j] = Complex64::new(1.0, 0.0);
        CMatrix::new(n, n, entries).unwrap()
    }

    fn sample(n: usize, seed: u64) -> CMatrix {
        let entries = (0..n * n)
            .map(|k| {
                let x = ((k as u64 * 2654435761 + seed * 40503) % 1000) as f64 / 500.0 - 1.0;
                Complex64::new(x, 0.5 * x * x - 0.2)
            })
            .collect();
        CMatrix::new(n, n, entries).unwrap()
    }

    #[test]
    fn expansion_examples() {
        let t = sample(4, 1);
        let r = perturb_expand(&t, &CMatrix::zeros(4, 4), 3).unwrap();
        assert_eq!(r.f1.max_abs(), 0.0);
        assert_eq!(r.expansion_residual.abs, 0.0);

        let f = outer(4, 1, 2);
        let r = perturb_expand(&t, &f, 1).unwrap();
        assert_eq!(r.f1, f);

        let t = sample(6, 2);
        let f = &outer(6, 0, 5).scale_real(0.7) + &outer(6, 3, 5).scale_real(-1.1);
        let r = perturb_expand(&t, &f, 3).unwrap();
        // Cube expanded by hand.
        let tf = &t + &f;
        let cube = &(&tf * &tf) * &tf;
        let direct = &cube - &t.pow(3);
        assert!(direct.distance(&r.f1) <= 1e-12 * tf.norm().powi(3));
        assert!(r.expansion_residual.abs <= 1e-12 * tf.norm().powi(3));
        assert_eq!(r.rank_f, 1);
        assert!(r.rank_f1 <= 3);
        assert!(r.passes(1e-12));
        assert!(perturb_expand(&t, &f, 0).is_err());
        assert!(perturb_expand(&t, &CMatrix::zeros(5, 5), 1).is_err());
    }

    #[test]
    fn stability_examples() {
        let s = index_stability(&CMatrix::identity(3), &CMatrix::zeros(3, 3)).unwrap();
        assert!(s.equal());
        assert_eq!(s.index_before.index, 0);

        // Rank-one corner e₃ ⊗ e₁ closes the Jordan chain into a cycle.
        let s = index_stability(&CMatrix::jordan_zero(3), &outer(3, 2, 0)).unwrap();
        assert!(s.equal());
        assert_eq!(s.before.dis, 3);
        assert_eq!(s.after.dis, 0);
        let s = index_stability(&CMatrix::jordan_zero(3), &outer(3, 0, 2)).unwrap();
        assert!(s.equal());
        assert_eq!(s.after.dsc, 3);

        let big = &outer(2, 0, 0) + &outer(2, 1, 1);
        assert!(index_stability(&CMatrix::zeros(2, 2), &big).is_err());
    }
}
