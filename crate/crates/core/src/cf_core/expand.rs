use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Digit, Rational};
use crate::error::{Error, Result};

/// Euclidean expansion of `num/den ∈ (0, 1)`.
///
/// The Euclidean algorithm already yields the canonical form (final digit
/// `≥ 2` unless the word is a single digit). At most `max_digits` digits are
/// returned; a shorter result means the expansion terminated.
pub fn expand_rational(num: &BigInt, den: &BigInt, max_digits: usize) -> Result<Vec<Digit>> {
    let outside = || Error::OutsideUnitInterval(format!("{num}/{den}"));
    if den.is_zero() {
        return Err(outside());
    }
    let value = Rational::new(num.clone(), den.clone());
    if !value.is_positive() || value >= Rational::one() {
        return Err(outside());
    }
    // value = n/d in lowest terms with 0 < n < d
    let mut n: BigUint = value.numer().magnitude().clone();
    let mut d: BigUint = value.denom().magnitude().clone();
    let mut digits = Vec::new();
    while !n.is_zero() && digits.len() < max_digits {
        let (a, r) = d.div_rem(&n);
        digits.push(Digit::from_biguint(a)?);
        d = std::mem::replace(&mut n, r);
    }
    Ok(digits)
}

/// Rewrites a trailing `…, a, 1` as `…, a + 1`, the canonical finite form.
pub fn canonicalize(word: &[Digit]) -> Vec<Digit> {
    let mut out = word.to_vec();
    if out.len() >= 2 && out.last().is_some_and(Digit::is_one) {
        out.pop();
        let last = out.pop().expect("len >= 2");
        out.push(Digit::from_biguint(last.to_biguint() + 1u32).expect("positive"));
    }
    out
}

/// First `n` partial quotients shared by every point of the open bracket
/// `(lo, hi) ⊂ (0, 1)`.
///
/// Both endpoints are pushed through the Gauss map `x ↦ 1/x - ⌊1/x⌋` in
/// exact arithmetic; a digit is emitted only while the whole bracket maps
/// into a single branch. Fails with [`Error::InsufficientPrecision`] (carrying
/// the digits obtained so far) once the bracket straddles a branch boundary.
pub fn expand_point(bracket: (&Rational, &Rational), n: usize) -> Result<Vec<Digit>> {
    let (lo, hi) = bracket;
    if lo >= hi {
        return Err(Error::InvalidInterval {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    if lo.is_negative() || hi > &Rational::one() {
        return Err(Error::OutsideUnitInterval(format!("({lo}, {hi})")));
    }
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    let mut digits = Vec::with_capacity(n);
    while digits.len() < n {
        if lo.is_zero() {
            return Err(Error::InsufficientPrecision { obtained: digits });
        }
        let inv_hi = hi.recip();
        let inv_lo = lo.recip();
        let a = inv_hi.floor();
        // every x in (lo, hi) has 1/x in (1/hi, 1/lo) ⊂ [a, a + 1]
        if inv_lo > &a + Rational::one() {
            return Err(Error::InsufficientPrecision { obtained: digits });
        }
        let digit = Digit::from_biguint(a.to_integer().magnitude().clone())?;
        lo = inv_hi - &a;
        hi = inv_lo - &a;
        digits.push(digit);
    }
    Ok(digits)
}
