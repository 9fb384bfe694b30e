//! JSON operator specs.
//!
//! ```json
//! {"kind": "direct_sum", "blocks": [
//!     {"kind": "shift", "direction": "right"},
//!     {"kind": "weighted_shift", "direction": "right", "weights": "harmonic"}
//! ]}
//! ```
//!
//! Scalars are JSON numbers, strings holding an exact rational `"p/q"`, or
//! `{"re": …, "im": …}`. Rationals stay exact in the parsed spec and become
//! floats only when the operator is built.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Deserialize;

use super::shift::{make_shift, Direction, Weights};
use super::{BandedOp, OperatorError};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RealSpec {
    Exact(#[serde(deserialize_with = "de_ratio")] Ratio<i64>),
    Float(f64),
}

fn de_ratio<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Ratio<i64>, D::Error> {
    let s = String::deserialize(d)?;
    s.trim().parse::<Ratio<i64>>().map_err(|e| serde::de::Error::custom(format!("rational {s:?}: {e}")))
}

impl RealSpec {
    pub fn to_f64(&self) -> f64 {
        match self {
            RealSpec::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            RealSpec::Float(x) => *x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ScalarSpec {
    Real(RealSpec),
    Complex { re: RealSpec, im: RealSpec },
}

impl ScalarSpec {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            ScalarSpec::Real(r) => Complex64::new(r.to_f64(), 0.0),
            ScalarSpec::Complex { re, im } => Complex64::new(re.to_f64(), im.to_f64()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    /// `"unit"` or `"harmonic"`.
    Named(String),
    Harmonic { harmonic_offset: u64 },
    Constant { constant: ScalarSpec },
    Listed { values: Vec<ScalarSpec>, tail: ScalarSpec },
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionSpec {
    Right,
    Left,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpSpec {
    Identity,
    Zero,
    Shift { direction: DirectionSpec },
    WeightedShift { direction: DirectionSpec, weights: WeightSpec },
    Scale { factor: ScalarSpec, op: Box<OpSpec> },
    Sum { terms: Vec<OpSpec> },
    /// The last factor acts first.
    Compose { factors: Vec<OpSpec> },
    Power { op: Box<OpSpec>, exponent: usize },
    DirectSum { blocks: Vec<OpSpec> },
}

fn direction(d: DirectionSpec) -> Direction {
    match d {
        DirectionSpec::Right => Direction::Right,
        DirectionSpec::Left => Direction::Left,
    }
}

fn weights(w: &WeightSpec) -> Result<Weights, OperatorError> {
    Ok(match w {
        WeightSpec::Named(name) => match name.as_str() {
            "unit" => Weights::unit(),
            "harmonic" => Weights::harmonic(),
            other => return Err(OperatorError::Spec(format!("unknown weight family {other:?}"))),
        },
        WeightSpec::Harmonic { harmonic_offset } => Weights::Harmonic {
            offset: *harmonic_offset,
        },
        WeightSpec::Constant { constant } => Weights::Constant(constant.to_complex()),
        WeightSpec::Listed { values, tail } => Weights::Listed {
            values: values.iter().map(ScalarSpec::to_complex).collect(),
            tail: tail.to_complex(),
        },
    })
}

fn finite(c: Complex64) -> Result<Complex64, OperatorError> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(c)
    } else {
        Err(OperatorError::NonFinite(c.to_string()))
    }
}

impl OpSpec {
    pub fn build(&self) -> Result<BandedOp, OperatorError> {
        match self {
            OpSpec::Identity => Ok(BandedOp::identity()),
            OpSpec::Zero => Ok(BandedOp::zero()),
            OpSpec::Shift { direction: d } => Ok(make_shift(direction(*d), Weights::unit())),
            OpSpec::WeightedShift { direction: d, weights: w } => {
                let w = weights(w)?;
                let probe = match &w {
                    Weights::Listed { values, tail } => values.iter().chain([tail]).copied().try_for_each(|c| finite(c).map(drop)),
                    Weights::Constant(c) => finite(*c).map(drop),
                    Weights::Harmonic { .. } => Ok(()),
                };
                probe?;
                Ok(make_shift(direction(*d), w))
            }
            OpSpec::Scale { factor, op } => op.build()?.scale(finite(factor.to_complex())?),
            OpSpec::Sum { terms } => terms.iter().try_fold(BandedOp::zero(), |acc, t| acc.add(&t.build()?)),
            OpSpec::Compose { factors } => {
                factors.iter().try_fold(BandedOp::identity(), |acc, f| acc.compose(&f.build()?))
            }
            OpSpec::Power { op, exponent } => op.build()?.pow(*exponent),
            OpSpec::DirectSum { blocks } => {
                let parts: Result<Vec<_>, _> = blocks.iter().map(OpSpec::build).collect();
                BandedOp::direct_sum(&parts?)
            }
        }
    }
}

pub fn parse_spec(json: &str) -> Result<OpSpec, OperatorError> {
    serde_json::from_str(json).map_err(|e| OperatorError::Spec(e.to_string()))
}

pub fn load_op(json: &str) -> Result<BandedOp, OperatorError> {
    parse_spec(json)?.build()
}
