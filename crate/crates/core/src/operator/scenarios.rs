use num_complex::Complex64;
use serde::Serialize;

use super::shift::{make_shift, norm_bound, power_norm_bound, qnil_certificate, Direction, QnilCertificate, Weights};
use super::{verify_on_basis, BandedOp, OperatorError, SeqVec};
use crate::drazin::Side;

/// Allowance for floating-point coefficient arithmetic in window checks.
/// Structural identities of the shift algebra come out exactly 0.
pub const ARITHMETIC_TOL: f64 = 1e-12;

/// Terms of the truncated Neumann series for `(I + T₂)⁻¹`.
pub const NEUMANN_TERMS: usize = 40;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// A named window identity and its largest coefficient deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowCheck {
    pub name: String,
    pub deviation: f64,
}

impl WindowCheck {
    fn new(name: &str, lhs: &BandedOp, rhs: &BandedOp, n: usize) -> Self {
        Self {
            name: name.to_string(),
            deviation: verify_on_basis(lhs, rhs, n),
        }
    }

    pub fn exact(&self) -> bool {
        self.deviation == 0.0
    }
}

/// A left generalized Drazin inverse together with the witnesses that the
/// lab verifies rather than derives.
#[derive(Debug, Clone)]
pub struct LeftGdData {
    pub t: BandedOp,
    /// Left generalized Drazin inverse of `t`.
    pub s: BandedOp,
    /// `I − S T`.
    pub p: BandedOp,
    /// A left inverse of `T + P`.
    pub c: BandedOp,
    /// Certified bound on `‖c(T + P) − I‖`.
    pub c_defect: f64,
    /// An expression equal to `T P` whose power norms are known.
    pub tp: BandedOp,
}

impl LeftGdData {
    /// The shift pair `T = T₁`, `S = ` left shift, `P = 0`.
    pub fn unilateral_shift() -> Self {
        let t1 = make_shift(Direction::Right, Weights::unit());
        let l = make_shift(Direction::Left, Weights::unit());
        Self {
            t: t1,
            s: l.clone(),
            p: BandedOp::zero(),
            c: l,
            c_defect: 0.0,
            tp: BandedOp::zero(),
        }
    }
}

/// The functional `x ↦ x_index` vanishes on every column of the operator.
/// Columns beyond `index + bandwidth` cannot reach `index`, so checking the
/// columns up to there covers all of them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeAnnihilator {
    pub index: usize,
    pub columns_checked: usize,
    pub max_coefficient: f64,
}

impl RangeAnnihilator {
    pub fn holds(&self) -> bool {
        self.max_coefficient == 0.0
    }
}

fn range_annihilator(op: &BandedOp, index: usize) -> RangeAnnihilator {
    let columns_checked = index + op.bandwidth();
    let max_coefficient = (1..=columns_checked).map(|k| op.column(k).get(index).norm()).fold(0.0, f64::max);
    RangeAnnihilator {
        index,
        columns_checked,
        max_coefficient,
    }
}

/// `T = T₁ ⊕ T₂`, its left generalized Drazin inverse `S₁ = L ⊕ 0` and the
/// idempotent `P = I − S₁T = 0 ⊕ I`, with every claim checked on a window.
#[derive(Debug, Clone)]
pub struct ExampleB1 {
    pub data: LeftGdData,
    pub t1: BandedOp,
    pub t2: BandedOp,
    pub window: usize,
    pub checks: Vec<WindowCheck>,
    pub tp_certificate: QnilCertificate,
    /// Largest `‖(c(T + P) − I) e_k‖` on the window.
    pub left_inverse_residual: f64,
    /// Bound on `‖(I + T₂)⁻¹ − Σ_{k ≤ K} (−T₂)^k‖`.
    pub neumann_budget: f64,
    /// `T + P` misses `e₁` of the first block.
    pub non_invertibility: RangeAnnihilator,
}

impl ExampleB1 {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(WindowCheck::exact)
            && self.tp_certificate.verdict
            && self.left_inverse_residual <= self.data.c_defect + ARITHMETIC_TOL
            && self.non_invertibility.holds()
    }

    pub fn check(&self, name: &str) -> Option<&WindowCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn factorial_tail(from: usize) -> f64 {
    // Σ_{k ≥ from} 1/k!, summed until the terms vanish.
    let mut term: f64 = (1..=from).map(|i| 1.0 / i as f64).product();
    let mut sum = 0.0;
    let mut k = from;
    while term > 0.0 && term > sum * f64::EPSILON {
        sum += term;
        k += 1;
        term /= k as f64;
    }
    sum
}

pub fn example_b1(window: usize) -> Result<ExampleB1, OperatorError> {
    let t1 = make_shift(Direction::Right, Weights::unit());
    let l = make_shift(Direction::Left, Weights::unit());
    let t2 = make_shift(Direction::Right, Weights::harmonic());
    let zero = BandedOp::zero();
    let id = BandedOp::identity();

    let t = BandedOp::direct_sum(&[t1.clone(), t2.clone()])?;
    let s1 = BandedOp::direct_sum(&[l.clone(), zero.clone()])?;
    let p = id.sub(&s1.compose(&t)?)?;
    let tp = t.compose(&p)?;
    let t_plus_p = t.add(&p)?;

    let alternating: Vec<Complex64> =
        (0..=NEUMANN_TERMS).map(|k| Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
    let neumann = t2.polynomial(&alternating)?;
    let c = BandedOp::direct_sum(&[l.clone(), neumann])?;

    let n = window;
    let checks = vec![
        WindowCheck::new("T S1 T = S1 T^2", &t.compose(&s1)?.compose(&t)?, &s1.compose(&t.pow(2)?)?, n),
        WindowCheck::new("S1^2 T = S1", &s1.pow(2)?.compose(&t)?, &s1, n),
        WindowCheck::new("P = 0 + I", &p, &BandedOp::direct_sum(&[zero.clone(), id.clone()])?, n),
        WindowCheck::new("P^2 = P", &p.pow(2)?, &p, n),
        WindowCheck::new("T P = P T", &tp, &p.compose(&t)?, n),
        WindowCheck::new("T P = 0 + T2", &tp, &BandedOp::direct_sum(&[zero.clone(), t2.clone()])?, n),
        WindowCheck::new("T + P = T1 + (I + T2)", &t_plus_p, &BandedOp::direct_sum(&[t1.clone(), id.add(&t2)?])?, n),
    ];

    let tp_witness = BandedOp::direct_sum(&[zero, t2.clone()])?;
    let tp_certificate = qnil_certificate(&tp_witness, 60, 0.05)?;

    let left_identity = c.compose(&t_plus_p)?;
    let left_inverse_residual = (1..=n)
        .map(|k| left_identity.column(k).sub(&SeqVec::basis(k)).norm())
        .fold(0.0, f64::max);
    // c(T + P) − I = 0 ⊕ (−(−T₂)^{K+1}).
    let c_defect = power_norm_bound(&t2, NEUMANN_TERMS + 1).0;

    Ok(ExampleB1 {
        non_invertibility: range_annihilator(&t_plus_p, 1),
        data: LeftGdData {
            t,
            s: s1,
            p,
            c,
            c_defect,
            tp: tp_witness,
        },
        t1,
        t2,
        window,
        checks,
        tp_certificate,
        left_inverse_residual,
        neumann_budget: factorial_tail(NEUMANN_TERMS + 1),
    })
}

fn left_gd_axioms(t: &BandedOp, s: &BandedOp, n: usize) -> Result<(f64, f64), OperatorError> {
    let weak = verify_on_basis(&t.compose(s)?.compose(t)?, &s.compose(&t.pow(2)?)?, n);
    let inner = verify_on_basis(&s.pow(2)?.compose(t)?, s, n);
    Ok((weak, inner))
}

fn require_axioms(weak: f64, inner: f64, side: &str) -> Result<(), OperatorError> {
    let mut failed = Vec::new();
    if weak > ARITHMETIC_TOL {
        failed.push(format!("{side} weak commutation deviates by {weak:e}"));
    }
    if inner > ARITHMETIC_TOL {
        failed.push(format!("{side} inner axiom deviates by {inner:e}"));
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(OperatorError::Precondition(failed))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasipolarReport {
    /// `q = S T`: `q² = q` and `T q = q T`.
    pub q_idempotent: f64,
    pub q_commutes: f64,
    /// `b = q S q`: `b T = q`, `T b T = b T²`, `b² T = b`.
    pub b_recovers_q: f64,
    pub b_weak_commute: f64,
    pub b_inner: f64,
    /// `‖(b − S) e_k‖` on the window.
    pub b_minus_s: f64,
}

impl QuasipolarReport {
    pub fn max_deviation(&self) -> f64 {
        [self.q_idempotent, self.q_commutes, self.b_recovers_q, self.b_weak_commute, self.b_inner]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn passes(&self) -> bool {
        self.max_deviation() <= ARITHMETIC_TOL
    }
}

/// Left generalized Drazin inverse to left quasi-polar idempotent and back.
pub fn quasipolar_left_witness(t: &BandedOp, s: &BandedOp, n: usize) -> Result<QuasipolarReport, OperatorError> {
    let (weak, inner) = left_gd_axioms(t, s, n)?;
    require_axioms(weak, inner, "left")?;
    let q = s.compose(t)?;
    let b = q.compose(s)?.compose(&q)?;
    Ok(QuasipolarReport {
        q_idempotent: verify_on_basis(&q.pow(2)?, &q, n),
        q_commutes: verify_on_basis(&t.compose(&q)?, &q.compose(t)?, n),
        b_recovers_q: verify_on_basis(&b.compose(t)?, &q, n),
        b_weak_commute: verify_on_basis(&t.compose(&b)?.compose(t)?, &b.compose(&t.pow(2)?)?, n),
        b_inner: verify_on_basis(&b.pow(2)?.compose(t)?, &b, n),
        b_minus_s: verify_on_basis(&b, s, n),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventReport {
    pub lambda: [f64; 2],
    pub terms: usize,
    /// Terms of the Neumann series for `(λ − TP)⁻¹`.
    pub nil_terms: usize,
    pub c_norm: f64,
    /// Truncation bound on `‖L(λ − T)x − x‖` for unit `x`.
    pub bound: f64,
    /// Floating-point allowance: `ε` times the number of terms times the
    /// summed term magnitudes. Small `|λ|` makes the nil series large.
    pub roundoff: f64,
    pub max_residual: f64,
}

impl ResolventReport {
    pub fn passes(&self) -> bool {
        self.max_residual <= self.bound + self.roundoff + ARITHMETIC_TOL
    }
}

const NIL_REMAINDER: f64 = 1e-30;
const NIL_TERMS_CAP: usize = 2000;

/// Truncated left resolvent
/// `L = −Σ_{k ≤ K} λ^k c^{k+1} (I − P) + Σ_{k ≤ K'} λ^{−k−1} (TP)^k P`,
/// checked as a left inverse of `λ − T` on `e_1..e_N`.
pub fn left_resolvent(
    data: &LeftGdData,
    lambda: Complex64,
    terms: usize,
    n: usize,
) -> Result<ResolventReport, OperatorError> {
    let modulus = lambda.norm();
    if modulus == 0.0 || !modulus.is_finite() {
        return Err(OperatorError::Precondition(vec![format!("λ = {lambda} must be finite and nonzero")]));
    }
    let c_norm = norm_bound(&data.c);
    let product = modulus * c_norm;
    if product >= 1.0 {
        return Err(OperatorError::OutOfDisk {
            modulus,
            c_norm,
            product,
        });
    }
    let tp_check = verify_on_basis(&data.t.compose(&data.p)?, &data.tp, n);
    if tp_check > ARITHMETIC_TOL {
        return Err(OperatorError::Precondition(vec![format!("T P differs from its witness by {tp_check:e}")]));
    }

    let mut nil_terms = 0;
    let nil_remainder = loop {
        let r = power_norm_bound(&data.tp, nil_terms + 1).0 / modulus.powi(nil_terms as i32 + 1);
        if r <= NIL_REMAINDER {
            break r;
        }
        nil_terms += 1;
        if nil_terms > NIL_TERMS_CAP {
            return Err(OperatorError::Precondition(vec![format!(
                "(TP/λ)^k does not fall below {NIL_REMAINDER:e} within {NIL_TERMS_CAP} terms at λ = {lambda}"
            )]));
        }
    };
    let id = BandedOp::identity();
    let complement = id.sub(&data.p)?;
    let bound = (product.powi(terms as i32 + 1) + data.c_defect) / (1.0 - product) * norm_bound(&complement)
        + nil_remainder * norm_bound(&data.p);

    let y_norm = modulus + norm_bound(&data.t);
    let core_mass: f64 = (0..=terms).map(|k| modulus.powi(k as i32) * c_norm.powi(k as i32 + 1)).sum::<f64>()
        * norm_bound(&complement);
    let nil_mass: f64 = (0..=nil_terms)
        .map(|k| power_norm_bound(&data.tp, k).0 / modulus.powi(k as i32 + 1))
        .sum::<f64>()
        * norm_bound(&data.p);
    let roundoff = 4.0 * f64::EPSILON * (terms + nil_terms + 2) as f64 * (core_mass + nil_mass) * y_norm;

    let mut max_residual: f64 = 0.0;
    for k in 1..=n {
        let x = SeqVec::basis(k);
        let mut y = x.scaled(lambda);
        y.add_scaled(&data.t.apply(&x), -one());

        let r1 = complement.apply(&y);
        let mut acc = data.c.apply(&r1);
        for _ in 0..terms {
            let mut inner = r1.clone();
            inner.add_scaled(&acc, lambda);
            acc = data.c.apply(&inner);
        }
        let mut image = acc.scaled(-one());

        let r2 = data.p.apply(&y);
        if r2.support_len() > 0 {
            let mut acc = r2.clone();
            for _ in 0..nil_terms {
                let mut inner = r2.clone();
                inner.add_scaled(&data.tp.apply(&acc), 1.0 / lambda);
                acc = inner;
            }
            image.add_scaled(&acc, 1.0 / lambda);
        }
        max_residual = max_residual.max(image.sub(&x).norm());
    }

    Ok(ResolventReport {
        lambda: [lambda.re, lambda.im],
        terms,
        nil_terms,
        c_norm,
        bound,
        roundoff,
        max_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutantReport {
    pub side: String,
    /// `‖(WT − TW) e_k‖` on the widened window.
    pub commutator: f64,
    /// `WP − PWP` (left) or `PW − PWP` (right) on the window.
    pub deviation: f64,
}

/// With `P = I − ST` (left) or `P = I − TS` (right), every `W` commuting with
/// `T` leaves `P` invariant.
pub fn commutant_invariance(
    t: &BandedOp,
    s: &BandedOp,
    w: &BandedOp,
    side: Side,
    n: usize,
) -> Result<CommutantReport, OperatorError> {
    let widened = n + t.bandwidth() + w.bandwidth();
    let commutator = verify_on_basis(&w.compose(t)?, &t.compose(w)?, widened);
    if commutator > ARITHMETIC_TOL {
        return Err(OperatorError::Precondition(vec![format!("W T − T W = {commutator:e} on the window")]));
    }
    let id = BandedOp::identity();
    let (p, lhs) = match side {
        Side::Left => {
            let p = id.sub(&s.compose(t)?)?;
            let lhs = w.compose(&p)?;
            (p, lhs)
        }
        Side::Right => {
            let p = id.sub(&t.compose(s)?)?;
            let lhs = p.compose(w)?;
            (p, lhs)
        }
    };
    let pwp = p.compose(w)?.compose(&p)?;
    Ok(CommutantReport {
        side: format!("{side:?}").to_lowercase(),
        commutator,
        deviation: verify_on_basis(&lhs, &pwp, n),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjointDualityReport {
    /// `T* S* T* = (T*)² S*`.
    pub weak_commute: f64,
    /// `T* (S*)² = S*`.
    pub inner: f64,
    /// Certificate for the adjoint of a supplied witness of `T − TST`.
    pub residual_certificate: Option<QnilCertificate>,
}

impl AdjointDualityReport {
    pub fn passes(&self) -> bool {
        self.weak_commute <= ARITHMETIC_TOL
            && self.inner <= ARITHMETIC_TOL
            && self.residual_certificate.as_ref().is_none_or(|c| c.verdict)
    }
}

/// The band adjoint of a left generalized Drazin pair is a right pair. When
/// `residual` is given it must equal `T − TST` on the window, and its adjoint
/// is certified quasi-nilpotent.
pub fn operator_adjoint_duality(
    t: &BandedOp,
    s: &BandedOp,
    residual: Option<&BandedOp>,
    n: usize,
) -> Result<AdjointDualityReport, OperatorError> {
    let (weak, inner) = left_gd_axioms(t, s, n)?;
    require_axioms(weak, inner, "left")?;
    let ta = t.band_adjoint();
    let sa = s.band_adjoint();
    let residual_certificate = match residual {
        Some(q) => {
            let actual = t.sub(&t.compose(s)?.compose(t)?)?;
            let dev = verify_on_basis(&actual, q, n);
            if dev > ARITHMETIC_TOL {
                return Err(OperatorError::Precondition(vec![format!(
                    "T − TST differs from the witness by {dev:e}"
                )]));
            }
            Some(qnil_certificate(&q.band_adjoint(), 60, 0.05)?)
        }
        None => None,
    };
    Ok(AdjointDualityReport {
        weak_commute: verify_on_basis(&ta.compose(&sa)?.compose(&ta)?, &ta.pow(2)?.compose(&sa)?, n),
        inner: verify_on_basis(&ta.compose(&sa.pow(2)?)?, &sa, n),
        residual_certificate,
    })
}

/// Inverse of `I + T₂` applied to a finitely supported vector by forward
/// substitution on the lower bidiagonal system, continued until the
/// solution underflows.
fn solve_i_plus_t2(x: &SeqVec) -> SeqVec {
    let Some(start) = x.entries().next().map(|(k, _)| k) else {
        return SeqVec::zero();
    };
    let last = x.entries().last().map(|(k, _)| k).unwrap_or(start);
    let mut y = SeqVec::zero();
    let mut prev = Complex64::new(0.0, 0.0);
    let mut m = start;
    loop {
        let w = if m > 1 { 1.0 / (m - 1) as f64 } else { 0.0 };
        let value = x.get(m) - prev * w;
        y.push(m, value);
        prev = value;
        if m >= last && (value.norm() < 1e-300 || m > last + 400) {
            break;
        }
        m += 1;
    }
    y
}

/// The right inverse `(I + T₂)⁻¹ ⊕ 0` on the interleaved space.
fn right_inverse_apply(x: &SeqVec) -> SeqVec {
    let mut first = SeqVec::zero();
    for (k, c) in x.entries() {
        if k % 2 == 1 {
            first.push((k + 1) / 2, c);
        }
    }
    let mut out = SeqVec::zero();
    for (l, c) in solve_i_plus_t2(&first).entries() {
        out.push(2 * l - 1, c);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub window: usize,
    /// Left axioms for `S_l = N_K ⊕ 0`, `N_K` the Neumann polynomial.
    pub left_weak_commute: f64,
    pub left_inner: f64,
    /// Right axioms for `S_r`, computed by forward substitution.
    pub right_weak_commute: f64,
    pub right_inner: f64,
    /// `max_k ‖(S_l − S_r) e_k‖`.
    pub deviation: f64,
    /// The same distance for Neumann polynomials of increasing order.
    pub decay: Vec<(usize, f64)>,
}

impl UniquenessReport {
    pub fn passes(&self, tol: f64) -> bool {
        [self.left_weak_commute, self.left_inner, self.right_weak_commute, self.right_inner, self.deviation]
            .into_iter()
            .all(|d| d <= tol)
    }
}

/// `T = (I + T₂) ⊕ T₂` has a left inverse built from a Neumann polynomial
/// and a right inverse built by forward substitution; the two coincide.
pub fn uniqueness_example(window: usize) -> Result<UniquenessReport, OperatorError> {
    let t2 = make_shift(Direction::Right, Weights::harmonic());
    let id = BandedOp::identity();
    let t = BandedOp::direct_sum(&[id.add(&t2)?, t2.clone()])?;
    let neumann = |k: usize| -> Result<BandedOp, OperatorError> {
        let coeffs: Vec<Complex64> =
            (0..=k).map(|i| Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        BandedOp::direct_sum(&[t2.polynomial(&coeffs)?, BandedOp::zero()])
    };
    let s_l = neumann(NEUMANN_TERMS)?;
    let (left_weak_commute, left_inner) = left_gd_axioms(&t, &s_l, window)?;

    let mut right_weak_commute: f64 = 0.0;
    let mut right_inner: f64 = 0.0;
    let mut deviation: f64 = 0.0;
    let columns: Vec<SeqVec> = (1..=window).map(|k| right_inverse_apply(&SeqVec::basis(k))).collect();
    for (k, sr) in (1..=window).zip(&columns) {
        let e = SeqVec::basis(k);
        let lhs = t.apply(&right_inverse_apply(&t.apply(&e)));
        let rhs = t.apply(&t.apply(sr));
        right_weak_commute = right_weak_commute.max(lhs.max_abs_diff(&rhs));
        right_inner = right_inner.max(t.apply(&right_inverse_apply(sr)).max_abs_diff(sr));
        deviation = deviation.max(s_l.column(k).sub(sr).norm());
    }
    let mut decay = Vec::new();
    for order in [2, 5, 10, 20, 30, NEUMANN_TERMS] {
        let s = neumann(order)?;
        let d = (1..=window).zip(&columns).map(|(k, sr)| s.column(k).sub(sr).norm()).fold(0.0, f64::max);
        decay.push((order, d));
    }
    Ok(UniquenessReport {
        window,
        left_weak_commute,
        left_inner,
        right_weak_commute,
        right_inner,
        deviation,
        decay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: usize = 128;

    #[test]
    fn bundle_identities_are_exact() {
        let b = example_b1(N).unwrap();
        for c in &b.checks {
            assert_eq!(c.deviation, 0.0, "{}", c.name);
        }
        assert!(b.tp_certificate.verdict);
        // ‖T₂^{40}‖ = 1/40!.
        let r40 = b.tp_certificate.root_at(40).unwrap();
        let oracle = (1..=40).map(|i| (i as f64).ln()).sum::<f64>() / 40.0;
        assert!((r40.ln() + oracle).abs() < 1e-12);
        assert!(b.non_invertibility.holds());
        assert_eq!(b.non_invertibility.columns_checked, 1 + b.data.t.add(&b.data.p).unwrap().bandwidth());
        assert!(b.left_inverse_residual <= 1e-15);
        assert!(b.neumann_budget < 1e-48);
        assert!(b.passes());
    }

    #[test]
    fn quasipolar_examples() {
        let id = BandedOp::identity();
        let r = quasipolar_left_witness(&id, &id, 32).unwrap();
        assert!(r.passes() && r.b_minus_s == 0.0);

        let b = example_b1(N).unwrap();
        let r = quasipolar_left_witness(&b.data.t, &b.data.s, N).unwrap();
        assert_eq!(r.max_deviation(), 0.0);
        assert_eq!(r.b_minus_s, 0.0);

        let r = quasipolar_left_witness(&b.t2, &BandedOp::zero(), N).unwrap();
        assert_eq!(r.max_deviation(), 0.0);

        // T₁ with itself as candidate fails the inner axiom.
        let err = quasipolar_left_witness(&b.t1, &b.t1, 16).unwrap_err();
        assert!(matches!(err, OperatorError::Precondition(_)));
    }

    #[test]
    fn resolvent_of_the_unilateral_shift() {
        let data = LeftGdData::unilateral_shift();
        let r = left_resolvent(&data, Complex64::new(0.25, 0.0), 64, 64).unwrap();
        assert!(r.bound <= 0.25f64.powi(65) / 0.75 * (1.0 + 1e-12));
        assert!(r.max_residual <= r.bound);

        let identity = LeftGdData {
            t: BandedOp::identity(),
            s: BandedOp::identity(),
            p: BandedOp::zero(),
            c: BandedOp::identity(),
            c_defect: 0.0,
            tp: BandedOp::zero(),
        };
        let r = left_resolvent(&identity, Complex64::new(0.1, 0.0), 30, 8).unwrap();
        assert!(r.passes());
        assert!(matches!(
            left_resolvent(&identity, Complex64::new(1.5, 0.0), 30, 8),
            Err(OperatorError::OutOfDisk { .. })
        ));
        assert!(left_resolvent(&identity, Complex64::new(0.0, 0.0), 30, 8).is_err());
    }

    #[test]
    fn resolvent_ring_on_the_bundle() {
        let b = example_b1(N).unwrap();
        for i in 0..8 {
            let lambda = Complex64::from_polar(0.2, i as f64 * std::f64::consts::TAU / 8.0);
            let r = left_resolvent(&b.data, lambda, 64, 48).unwrap();
            assert!(r.passes(), "{r:?}");
            assert!(r.nil_terms > 0);
        }
    }

    #[test]
    fn commutant_examples() {
        let b = example_b1(N).unwrap();
        let t = &b.data.t;
        let id = BandedOp::identity();
        let poly = t
            .polynomial(&[Complex64::new(2.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 0.0), one()])
            .unwrap();
        for w in [id.clone(), t.clone(), t.pow(2).unwrap(), poly] {
            let r = commutant_invariance(t, &b.data.s, &w, Side::Left, N).unwrap();
            assert!(r.deviation <= ARITHMETIC_TOL, "{r:?}");
        }
        let shifted = BandedOp::direct_sum(&[b.t1.clone(), b.t1.clone()]).unwrap();
        assert!(commutant_invariance(t, &b.data.s, &shifted, Side::Left, N).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let id = BandedOp::identity();
        assert!(operator_adjoint_duality(&id, &id, None, 16).unwrap().passes());
        let data = LeftGdData::unilateral_shift();
        assert!(operator_adjoint_duality(&data.t, &data.s, None, N).unwrap().passes());

        let b = example_b1(N).unwrap();
        let r = operator_adjoint_duality(&b.data.t, &b.data.s, Some(&b.data.tp), N).unwrap();
        assert_eq!((r.weak_commute, r.inner), (0.0, 0.0));
        let cert = r.residual_certificate.as_ref().unwrap();
        assert!(cert.verdict && cert.exact);
    }

    #[test]
    fn left_and_right_inverses_coincide() {
        let r = uniqueness_example(N).unwrap();
        assert!(r.passes(1e-10), "{r:?}");
        // The Neumann approximants converge to the forward-substitution inverse.
        assert!(r.decay.windows(2).all(|w| w[1].1 <= w[0].1));
        assert!(r.decay[0].1 > 1e-3);
    }

    #[test]
    fn forward_substitution_inverts() {
        let x = SeqVec::basis(3);
        let y = solve_i_plus_t2(&x);
        let id = BandedOp::identity();
        let t2 = make_shift(Direction::Right, Weights::harmonic());
        let back = id.add(&t2).unwrap().apply(&y);
        assert!(back.max_abs_diff(&x) < 1e-300 + f64::EPSILON);
        assert_eq!(y.get(4), Complex64::new(-1.0 / 3.0, 0.0));
    }
}
