//! Drazin, group and one-sided Drazin inverses of complex matrices, exact
//! banded operators on sequence space, and kernel/range chain analysis.

pub mod drazin;
pub mod lab;
pub mod linalg;
pub mod operator;
pub mod structure;
