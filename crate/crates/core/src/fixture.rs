//! Built-in fixtures.

use crate::coeff::CoeffKind;
use crate::error::Result;
use crate::matrix::StarMatrix;
use crate::parse::parse_series;
use crate::star::{standard_theta, StarAlgebra};

/// Entries of the rank-one projection onto the line through `(1, x + ip)`
/// over the plane, row-major.
pub const BOTT_ENTRIES: [&str; 4] = [
    "1/(1 + x1^2 + x2^2)",
    "(x1 - i*x2)/(1 + x1^2 + x2^2)",
    "(x1 + i*x2)/(1 + x1^2 + x2^2)",
    "(x1^2 + x2^2)/(1 + x1^2 + x2^2)",
];

/// Moyal-Weyl on the plane, with rational-function coefficients.
pub fn moyal_plane(order: usize) -> Result<StarAlgebra> {
    StarAlgebra::moyal(1, &standard_theta(1), CoeffKind::Rational, order)
}

pub fn bott_projection(alg: &StarAlgebra) -> Result<StarMatrix> {
    let entries = BOTT_ENTRIES.iter().map(|s| parse_series(s, alg.ring(), alg.order())).collect::<Result<_>>()?;
    StarMatrix::square(2, entries)
}
