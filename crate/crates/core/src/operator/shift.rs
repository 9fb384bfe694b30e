use num_complex::Complex64;
use serde::Serialize;

use super::{BandedOp, Node, OperatorError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Right,
    Left,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Right => Direction::Left,
            Direction::Left => Direction::Right,
        }
    }
}

/// Shift weights attached to the edges of the basis: `w_k` joins `e_k` and
/// `e_{k+1}`. A right shift sends `e_k ↦ w_k e_{k+1}`; a left shift sends
/// `e_{k+1} ↦ w_k e_k`, so the two are adjoint under conjugated weights.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Constant(Complex64),
    /// `w_k = 1/(k + offset)`.
    Harmonic { offset: u64 },
    /// `w_1..w_m` as listed, then `tail` forever.
    Listed { values: Vec<Complex64>, tail: Complex64 },
}

impl Weights {
    pub fn unit() -> Self {
        Weights::Constant(Complex64::new(1.0, 0.0))
    }

    pub fn harmonic() -> Self {
        Weights::Harmonic { offset: 0 }
    }

    pub fn at(&self, k: usize) -> Complex64 {
        match self {
            Weights::Constant(c) => *c,
            Weights::Harmonic { offset } => Complex64::new(1.0 / (k as f64 + *offset as f64), 0.0),
            Weights::Listed { values, tail } => values.get(k - 1).copied().unwrap_or(*tail),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Weights::Constant(c) => Weights::Constant(c.conj()),
            Weights::Harmonic { offset } => Weights::Harmonic { offset: *offset },
            Weights::Listed { values, tail } => Weights::Listed {
                values: values.iter().map(Complex64::conj).collect(),
                tail: tail.conj(),
            },
        }
    }

    fn is_finite(&self) -> bool {
        let ok = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
        match self {
            Weights::Constant(c) => ok(c),
            Weights::Harmonic { .. } => true,
            Weights::Listed { values, tail } => values.iter().all(ok) && ok(tail),
        }
    }

    /// `sup_k |w_k ⋯ w_{k+n−1}|`.
    fn window_sup(&self, n: usize) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let window = |k: usize| (k..k + n).map(|i| self.at(i).norm()).product::<f64>();
        match self {
            Weights::Constant(c) => c.norm().powi(n as i32),
            // Positive and decreasing, so the first window is the largest.
            Weights::Harmonic { .. } => window(1),
            // Windows starting past the list see only the tail.
            Weights::Listed { values, tail } => {
                (1..=values.len()).map(window).fold(tail.norm().powi(n as i32), f64::max)
            }
        }
    }
}

/// Right shift `e_k ↦ w_k e_{k+1}` or left shift `e_{k+1} ↦ w_k e_k`.
pub fn make_shift(direction: Direction, weights: Weights) -> BandedOp {
    assert!(weights.is_finite(), "shift weights must be finite");
    BandedOp::shift(direction, weights)
}

/// `‖Tⁿ‖` on ℓ² for a single weighted shift: the largest modulus of a
/// product of `n` consecutive weights.
pub fn weighted_power_norm(t: &BandedOp, n: usize) -> Result<f64, OperatorError> {
    let (_, weights) = t.as_shift().ok_or(OperatorError::NotWeightedShift)?;
    Ok(weights.window_sup(n))
}

/// Upper bound on `‖T‖` from the expression: exact for shifts, direct sums
/// and scalars, subadditive and submultiplicative otherwise.
pub fn norm_bound(t: &BandedOp) -> f64 {
    power_norm_bound(t, 1).0
}

/// Upper bound on `‖Tⁿ‖`, and whether it is exact.
pub fn power_norm_bound(t: &BandedOp, n: usize) -> (f64, bool) {
    if n == 0 {
        return (1.0, true);
    }
    match &*t.node {
        Node::Zero => (0.0, true),
        Node::Identity => (1.0, true),
        Node::Shift { weights, .. } => (weights.window_sup(n), true),
        Node::Scale(c, op) => {
            let (b, exact) = power_norm_bound(op, n);
            (c.norm().powi(n as i32) * b, exact)
        }
        Node::Power(op, m) => power_norm_bound(op, m * n),
        Node::DirectSum(parts) => parts.iter().map(|p| power_norm_bound(p, n)).fold((0.0, true), |acc, b| {
            (acc.0.max(b.0), acc.1 && b.1)
        }),
        Node::Sum(terms) => {
            let b: f64 = terms.iter().map(norm_bound).sum();
            (b.powi(n as i32), n == 1 && terms.len() == 1)
        }
        Node::Compose(factors) => {
            let b: f64 = factors.iter().map(norm_bound).product();
            (b.powi(n as i32), false)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QnilSample {
    pub n: usize,
    pub bound: f64,
    pub root: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QnilCertificate {
    pub samples: Vec<QnilSample>,
    pub threshold: f64,
    /// Whether every bound is the exact norm rather than an estimate.
    pub exact: bool,
    pub verdict: bool,
}

impl QnilCertificate {
    pub fn root_at(&self, n: usize) -> Option<f64> {
        self.samples.iter().find(|s| s.n == n).map(|s| s.root)
    }
}

/// Samples `‖Tⁿ‖^{1/n}` at `n = 2, 4, …, n_max`. The verdict holds when the
/// last root is below `threshold` and the roots do not increase over the
/// second half of the samples.
pub fn qnil_certificate(t: &BandedOp, n_max: usize, threshold: f64) -> Result<QnilCertificate, OperatorError> {
    if n_max < 2 {
        return Err(OperatorError::Precondition(vec![format!("n_max = {n_max} < 2")]));
    }
    let mut exact = true;
    let samples: Vec<QnilSample> = (2..=n_max)
        .step_by(2)
        .map(|n| {
            let (bound, e) = power_norm_bound(t, n);
            exact &= e;
            QnilSample {
                n,
                bound,
                root: bound.powf(1.0 / n as f64),
            }
        })
        .collect();
    let last = samples.last().expect("n_max ≥ 2").root;
    let tail_monotone = samples[samples.len() / 2..].windows(2).all(|w| w[1].root <= w[0].root);
    Ok(QnilCertificate {
        verdict: last < threshold && tail_monotone,
        samples,
        threshold,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::SeqVec;

    fn t2() -> BandedOp {
        make_shift(Direction::Right, Weights::harmonic())
    }

    #[test]
    fn example_shifts() {
        let t1 = make_shift(Direction::Right, Weights::unit());
        assert_eq!(t1.column(5), SeqVec::basis(6));
        let l = make_shift(Direction::Left, Weights::unit());
        assert_eq!(l.column(1).support_len(), 0);
        assert_eq!(l.column(6), SeqVec::basis(5));
        // T₂(x₁, x₂, x₃, …) = (0, x₁, x₂/2, x₃/3, …).
        let x: SeqVec = {
            let mut v = SeqVec::zero();
            for k in 1..=3 {
                v.push(k, Complex64::new(6.0, 0.0));
            }
            v
        };
        let y = t2().apply(&x);
        assert_eq!(y.get(1), Complex64::new(0.0, 0.0));
        assert_eq!(y.get(2), Complex64::new(6.0, 0.0));
        assert_eq!(y.get(3), Complex64::new(3.0, 0.0));
        assert_eq!(y.get(4), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn power_norms_of_shifts() {
        let t1 = make_shift(Direction::Right, Weights::unit());
        for n in [1, 5, 17] {
            assert_eq!(weighted_power_norm(&t1, n).unwrap(), 1.0);
        }
        // Four applications to e₁ multiply the weights 1, 1/2, 1/3, 1/4.
        let direct = (0..4).fold(SeqVec::basis(1), |v, _| t2().apply(&v));
        assert!((direct.norm() - 1.0 / 24.0).abs() < 1e-17);
        assert!((weighted_power_norm(&t2(), 4).unwrap() - 1.0 / 24.0).abs() < 1e-17);
        assert!(matches!(
            weighted_power_norm(&t1.compose(&t1).unwrap(), 2),
            Err(OperatorError::NotWeightedShift)
        ));

        let listed = Weights::Listed {
            values: vec![Complex64::new(0.5, 0.0), Complex64::new(4.0, 0.0), Complex64::new(0.25, 0.0)],
            tail: Complex64::new(1.0, 0.0),
        };
        let w = make_shift(Direction::Left, listed);
        assert_eq!(weighted_power_norm(&w, 2).unwrap(), 2.0);
        assert_eq!(weighted_power_norm(&w, 3).unwrap(), 1.0);
        assert_eq!(weighted_power_norm(&w, 5).unwrap(), 1.0);
    }

    #[test]
    fn certificates() {
        let zero = qnil_certificate(&BandedOp::zero(), 10, 0.05).unwrap();
        assert!(zero.verdict && zero.samples.iter().all(|s| s.root == 0.0));

        let t1 = make_shift(Direction::Right, Weights::unit());
        let c = qnil_certificate(&t1, 10, 0.05).unwrap();
        assert!(!c.verdict && c.samples.iter().all(|s| s.root == 1.0));

        let c = qnil_certificate(&t2(), 60, 0.05).unwrap();
        assert!(c.verdict && c.exact);
        assert!(c.root_at(60).unwrap() < 0.05);
        assert!(qnil_certificate(&t2(), 1, 0.05).is_err());
    }

    #[test]
    fn norm_bounds_combine() {
        let s = make_shift(Direction::Right, Weights::Constant(Complex64::new(0.5, 0.0)));
        let op = BandedOp::direct_sum(&[s.clone(), t2()]).unwrap();
        // max(0.5³, 1/3!)
        assert_eq!(power_norm_bound(&op, 3), (1.0 / 6.0, true));
        let (b, exact) = power_norm_bound(&s.add(&t2()).unwrap(), 2);
        assert_eq!(b, 2.25);
        assert!(!exact);
    }
}
