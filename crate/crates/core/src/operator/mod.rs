//! Banded operators on the standard basis of ℓ²(ℕ).
//!
//! An operator is an expression over shifts, identities and scalars. Its
//! action on a finitely supported vector is evaluated exactly: every column
//! `Op·e_k` is a finite list of coefficients, so two operators that agree on
//! `e_1..e_N` agree on those vectors with no truncation. Direct sums
//! interleave their components, the `i`-th of `m` blocks owning the global
//! indices `i+1, i+1+m, i+1+2m, …`.

mod scenarios;
mod shift;
pub mod spec;

pub use scenarios::{
    commutant_invariance, example_b1, left_resolvent, operator_adjoint_duality, quasipolar_left_witness,
    uniqueness_example, AdjointDualityReport, CommutantReport, ExampleB1, LeftGdData, QuasipolarReport,
    ResolventReport, UniquenessReport, ARITHMETIC_TOL, NEUMANN_TERMS,
};
pub use shift::{
    make_shift, norm_bound, power_norm_bound, qnil_certificate, weighted_power_norm, Direction, QnilCertificate,
    QnilSample, Weights,
};

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

/// Default cap on the bandwidth of composed operators.
pub const DEFAULT_BANDWIDTH_CAP: usize = 1 << 14;

/// Default number of basis vectors in a window check.
pub const DEFAULT_WINDOW: usize = 128;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("bandwidth {bandwidth} exceeds the cap {cap}")]
    Bandwidth { bandwidth: usize, cap: usize },
    #[error("block structure mismatch: {0} vs {1} components")]
    BlockMismatch(usize, usize),
    #[error("not a single weighted shift")]
    NotWeightedShift,
    #[error("non-finite coefficient {0}")]
    NonFinite(String),
    #[error("precondition failed: {}", .0.join("; "))]
    Precondition(Vec<String>),
    #[error("|λ|·‖c‖ = {product} is not below 1 (|λ| = {modulus}, ‖c‖ ≤ {c_norm})")]
    OutOfDisk { modulus: f64, c_norm: f64, product: f64 },
    #[error("operator spec: {0}")]
    Spec(String),
}

/// A finitely supported vector in ℓ²(ℕ), indexed from 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeqVec(BTreeMap<usize, Complex64>);

impl SeqVec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(k: usize) -> Self {
        assert!(k >= 1, "basis vectors are indexed from 1");
        let mut v = Self::zero();
        v.0.insert(k, Complex64::new(1.0, 0.0));
        v
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.0.get(&k).copied().unwrap_or_default()
    }

    pub fn push(&mut self, k: usize, c: Complex64) {
        *self.0.entry(k).or_default() += c;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.0.iter().map(|(&k, &c)| (k, c))
    }

    pub fn support_len(&self) -> usize {
        self.0.len()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.0.values_mut().for_each(|v| *v *= c);
        out.prune();
        out
    }

    pub fn add_scaled(&mut self, other: &SeqVec, c: Complex64) {
        for (k, v) in other.entries() {
            self.push(k, v * c);
        }
        self.prune();
    }

    pub fn sub(&self, other: &SeqVec) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, Complex64::new(-1.0, 0.0));
        out
    }

    /// Largest coefficient-wise difference.
    pub fn max_abs_diff(&self, other: &SeqVec) -> f64 {
        let keys = self.0.keys().chain(other.0.keys());
        keys.map(|&k| (self.get(k) - other.get(k)).norm()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.0.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Exact zeros carry no information and only widen the support.
    fn prune(&mut self) {
        self.0.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Zero,
    Identity,
    Shift { direction: Direction, weights: Weights },
    Scale(Complex64, BandedOp),
    Sum(Vec<BandedOp>),
    /// Factors applied right to left.
    Compose(Vec<BandedOp>),
    Power(BandedOp, usize),
    DirectSum(Vec<BandedOp>),
}

/// An exact banded operator on ℓ²(ℕ).
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOp {
    node: Arc<Node>,
    bandwidth: usize,
    /// Number of direct-sum components of the space it acts on; `None` for
    /// operators that act on any space (zero, identity).
    blocks: Option<usize>,
}

fn unify(a: Option<usize>, b: Option<usize>) -> Result<Option<usize>, OperatorError> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => Err(OperatorError::BlockMismatch(x, y)),
        (Some(x), _) | (_, Some(x)) => Ok(Some(x)),
        (None, None) => Ok(None),
    }
}

fn check_cap(bandwidth: usize, cap: usize) -> Result<(), OperatorError> {
    if bandwidth > cap {
        Err(OperatorError::Bandwidth { bandwidth, cap })
    } else {
        Ok(())
    }
}

impl BandedOp {
    fn from_node(node: Node, bandwidth: usize, blocks: Option<usize>) -> Self {
        Self {
            node: Arc::new(node),
            bandwidth,
            blocks,
        }
    }

    pub fn zero() -> Self {
        Self::from_node(Node::Zero, 0, None)
    }

    pub fn identity() -> Self {
        Self::from_node(Node::Identity, 0, None)
    }

    pub(crate) fn shift(direction: Direction, weights: Weights) -> Self {
        Self::from_node(Node::Shift { direction, weights }, 1, Some(1))
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Direct-sum components, if this operator is a direct sum.
    pub fn components(&self) -> Option<&[BandedOp]> {
        match &*self.node {
            Node::DirectSum(parts) => Some(parts),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(*self.node, Node::Zero)
    }

    fn is_identity(&self) -> bool {
        matches!(*self.node, Node::Identity)
    }

    /// The shift data when this is a single weighted shift.
    pub(crate) fn as_shift(&self) -> Option<(Direction, &Weights)> {
        match &*self.node {
            Node::Shift { direction, weights } => Some((*direction, weights)),
            _ => None,
        }
    }

    /// `self` with `m` components when it is polymorphic, so that it can be
    /// combined block by block with an `m`-fold direct sum.
    fn spread(&self, m: usize) -> Option<Vec<BandedOp>> {
        match &*self.node {
            Node::DirectSum(parts) if parts.len() == m => Some(parts.clone()),
            Node::Zero | Node::Identity => Some(vec![self.clone(); m]),
            _ => None,
        }
    }

    pub fn direct_sum(parts: &[BandedOp]) -> Result<Self, OperatorError> {
        if parts.is_empty() {
            return Err(OperatorError::Precondition(vec!["direct sum of no components".into()]));
        }
        let m = parts.len();
        let bandwidth = parts.iter().map(|p| p.bandwidth).max().unwrap_or(0) * m;
        check_cap(bandwidth, DEFAULT_BANDWIDTH_CAP)?;
        Ok(Self::from_node(Node::DirectSum(parts.to_vec()), bandwidth, Some(m)))
    }

    pub fn scale(&self, c: Complex64) -> Result<Self, OperatorError> {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(OperatorError::NonFinite(c.to_string()));
        }
        if c == Complex64::new(0.0, 0.0) || self.is_zero() {
            return Ok(Self::zero());
        }
        if c == Complex64::new(1.0, 0.0) {
            return Ok(self.clone());
        }
        if let Some(parts) = self.components() {
            let scaled: Result<Vec<_>, _> = parts.iter().map(|p| p.scale(c)).collect();
            return Self::direct_sum(&scaled?);
        }
        Ok(Self::from_node(Node::Scale(c, self.clone()), self.bandwidth, self.blocks))
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0)).expect("finite factor")
    }

    pub fn add(&self, other: &BandedOp) -> Result<Self, OperatorError> {
        let blocks = unify(self.blocks, other.blocks)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if let Some(m) = blocks.filter(|&m| m > 1) {
            if let (Some(x), Some(y)) = (self.spread(m), other.spread(m)) {
                let parts: Result<Vec<_>, _> = x.iter().zip(&y).map(|(a, b)| a.add(b)).collect();
                return Self::direct_sum(&parts?);
            }
        }
        let mut terms = Vec::new();
        for op in [self, other] {
            match &*op.node {
                Node::Sum(inner) => terms.extend(inner.iter().cloned()),
                _ => terms.push(op.clone()),
            }
        }
        let bandwidth = self.bandwidth.max(other.bandwidth);
        Ok(Self::from_node(Node::Sum(terms), bandwidth, blocks))
    }

    pub fn sub(&self, other: &BandedOp) -> Result<Self, OperatorError> {
        self.add(&other.neg())
    }

    /// `self ∘ other`, capped at [`DEFAULT_BANDWIDTH_CAP`].
    pub fn compose(&self, other: &BandedOp) -> Result<Self, OperatorError> {
        self.compose_capped(other, DEFAULT_BANDWIDTH_CAP)
    }

    pub fn compose_capped(&self, other: &BandedOp, cap: usize) -> Result<Self, OperatorError> {
        let blocks = unify(self.blocks, other.blocks)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        if self.is_identity() {
            return Ok(other.clone());
        }
        if other.is_identity() {
            return Ok(self.clone());
        }
        if let Some(m) = blocks.filter(|&m| m > 1) {
            if let (Some(x), Some(y)) = (self.spread(m), other.spread(m)) {
                let parts: Result<Vec<_>, _> = x.iter().zip(&y).map(|(a, b)| a.compose_capped(b, cap)).collect();
                return Self::direct_sum(&parts?);
            }
        }
        let bandwidth = self.bandwidth + other.bandwidth;
        check_cap(bandwidth, cap)?;
        let mut factors = Vec::new();
        for op in [self, other] {
            match &*op.node {
                Node::Compose(inner) => factors.extend(inner.iter().cloned()),
                _ => factors.push(op.clone()),
            }
        }
        Ok(Self::from_node(Node::Compose(factors), bandwidth, blocks))
    }

    /// `selfⁿ`, kept as a power so norm bounds can use exact shift powers.
    pub fn pow(&self, n: usize) -> Result<Self, OperatorError> {
        if n == 0 {
            return Ok(Self::identity());
        }
        if n == 1 || self.is_zero() || self.is_identity() {
            return Ok(self.clone());
        }
        if let Some(parts) = self.components() {
            let powered: Result<Vec<_>, _> = parts.iter().map(|p| p.pow(n)).collect();
            return Self::direct_sum(&powered?);
        }
        let bandwidth = self.bandwidth.checked_mul(n).unwrap_or(usize::MAX);
        check_cap(bandwidth, DEFAULT_BANDWIDTH_CAP)?;
        Ok(Self::from_node(Node::Power(self.clone(), n), bandwidth, self.blocks))
    }

    /// `Σ cᵢ selfⁱ`.
    pub fn polynomial(&self, coefficients: &[Complex64]) -> Result<Self, OperatorError> {
        let mut acc = Self::zero();
        for (i, &c) in coefficients.iter().enumerate() {
            acc = acc.add(&self.pow(i)?.scale(c)?)?;
        }
        Ok(acc)
    }

    /// The Hilbert-space adjoint: the band transposed with conjugated
    /// coefficients.
    pub fn band_adjoint(&self) -> Self {
        let node = match &*self.node {
            Node::Zero => Node::Zero,
            Node::Identity => Node::Identity,
            Node::Shift { direction, weights } => Node::Shift {
                direction: direction.flip(),
                weights: weights.conj(),
            },
            Node::Scale(c, op) => Node::Scale(c.conj(), op.band_adjoint()),
            Node::Sum(terms) => Node::Sum(terms.iter().map(BandedOp::band_adjoint).collect()),
            Node::Compose(factors) => Node::Compose(factors.iter().rev().map(BandedOp::band_adjoint).collect()),
            Node::Power(op, n) => Node::Power(op.band_adjoint(), *n),
            Node::DirectSum(parts) => Node::DirectSum(parts.iter().map(BandedOp::band_adjoint).collect()),
        };
        Self::from_node(node, self.bandwidth, self.blocks)
    }

    /// Exact action on a finitely supported vector.
    pub fn apply(&self, v: &SeqVec) -> SeqVec {
        let mut out = match &*self.node {
            Node::Zero => SeqVec::zero(),
            Node::Identity => v.clone(),
            Node::Shift { direction, weights } => {
                let mut out = SeqVec::zero();
                for (k, c) in v.entries() {
                    match direction {
                        Direction::Right => out.push(k + 1, weights.at(k) * c),
                        Direction::Left if k >= 2 => out.push(k - 1, weights.at(k - 1) * c),
                        Direction::Left => {}
                    }
                }
                out
            }
            Node::Scale(c, op) => op.apply(v).scaled(*c),
            Node::Sum(terms) => {
                let mut out = SeqVec::zero();
                for t in terms {
                    out.add_scaled(&t.apply(v), Complex64::new(1.0, 0.0));
                }
                out
            }
            Node::Compose(factors) => factors.iter().rev().fold(v.clone(), |acc, f| f.apply(&acc)),
            Node::Power(op, n) => (0..*n).fold(v.clone(), |acc, _| op.apply(&acc)),
            Node::DirectSum(parts) => {
                let m = parts.len();
                let mut pieces = vec![SeqVec::zero(); m];
                for (k, c) in v.entries() {
                    pieces[(k - 1) % m].push((k - 1) / m + 1, c);
                }
                let mut out = SeqVec::zero();
                for (i, (part, piece)) in parts.iter().zip(&pieces).enumerate() {
                    if piece.support_len() == 0 {
                        continue;
                    }
                    for (l, c) in part.apply(piece).entries() {
                        out.push((l - 1) * m + i + 1, c);
                    }
                }
                out
            }
        };
        out.prune();
        out
    }

    /// `self · e_k`.
    pub fn column(&self, k: usize) -> SeqVec {
        self.apply(&SeqVec::basis(k))
    }
}

/// Largest coefficient difference between `lhs·e_k` and `rhs·e_k` over
/// `k = 1..=n`. Zero means the two agree exactly on those basis vectors.
pub fn verify_on_basis(lhs: &BandedOp, rhs: &BandedOp, n: usize) -> f64 {
    (1..=n).map(|k| lhs.column(k).max_abs_diff(&rhs.column(k))).fold(0.0, f64::max)
}

/// Global index of local index `l` (from 1) in component `i` of an `m`-fold
/// direct sum.
pub fn block_index(i: usize, l: usize, m: usize) -> usize {
    (l - 1) * m + i + 1
}
