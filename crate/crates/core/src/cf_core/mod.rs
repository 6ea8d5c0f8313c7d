//! Exact continued-fraction arithmetic.
//!
//! A point `ω ∈ (0, 1)` is written `ω = [a_1, a_2, …] = 1/(a_1 + 1/(a_2 + …))`.
//! Finite prefixes of the digit sequence are tracked through the convergent
//! recursion `p_k = a_k p_{k-1} + p_{k-2}`, `q_k = a_k q_{k-1} + q_{k-2}` and
//! identify the cylinder `I(a_1, …, a_n)` of all points sharing the prefix.

mod convergent;
mod cylinder;
mod digit;
mod expand;
pub mod highprec;

pub use convergent::{evaluate_word, push_digit, ConvergentState};
pub use cylinder::{
    cylinder_endpoints, cylinder_length, gauss_measure_interval, Cylinder, Orientation,
};
pub use digit::{format_word, parse_word, Digit};
pub use expand::{canonicalize, expand_point, expand_rational};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational number in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Builds `num/den` as an exact rational.
///
/// Panics if `den == 0`.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Natural logarithm of 2, used to normalise the Gauss density.
pub const LN_2: f64 = std::f64::consts::LN_2;
