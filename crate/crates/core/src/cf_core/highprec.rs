//! Rigorous rational brackets around a few transcendental points.
//!
//! These feed [`expand_point`](super::expand_point) when a long prefix of an
//! irrational's expansion is needed.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Open bracket around `e - 2` from the partial sum of `Σ 1/k!` up to `terms`.
///
/// With `S_N = Σ_{k≤N} 1/k!`, `e ∈ (S_N, S_N + 1/(N!·N))`, so the width is
/// `1/(N!·N)`. About 250 terms suffice for 10⁻⁴⁰⁰.
pub fn e_minus_2_bracket(terms: u32) -> (Rational, Rational) {
    let terms = terms.max(2);
    let mut factorial = BigUint::one();
    // numerator of S_N over N!: Σ N!/k!
    let mut numerator = BigUint::zero();
    let mut tail_products = vec![BigUint::one()];
    for k in 1..=terms {
        factorial *= k;
        tail_products.push(factorial.clone());
    }
    for k in 0..=terms {
        numerator += &factorial / &tail_products[k as usize];
    }
    let fact = BigInt::from(factorial.clone());
    let lower =
        Rational::new(BigInt::from(numerator), fact.clone()) - Rational::from_integer(2.into());
    let width = Rational::new(BigInt::one(), fact * BigInt::from(terms));
    let upper = &lower + width;
    (lower, upper)
}

/// Bracket of width about `2^-bits` around `2^u - 1` for `u ∈ (0, 1)`.
///
/// `u` is taken as the exact dyadic rational it represents. The computation
/// uses fixed point with 64 guard bits; every truncation error is bounded and
/// absorbed into a conservative margin.
pub fn exp2_minus_one_bracket(u: f64, bits: u32) -> Result<(Rational, Rational)> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::UniformOutOfRange(u));
    }
    let precision = bits + 64;
    let one = BigUint::one() << precision;

    // ln 2 = Σ_{k≥1} 1/(k 2^k); truncated terms and the tail each cost < 1 ulp.
    let mut ln2 = BigUint::zero();
    for k in 1..=precision {
        ln2 += (&one >> k) / k;
    }

    // u = mantissa · 2^-shift exactly
    let (mantissa, shift) = dyadic(u);
    let x = (&ln2 * mantissa) >> shift;

    // exp(x) by Taylor series with x < ln 2
    let mut sum = one.clone();
    let mut term = one.clone();
    let mut count = 0u32;
    for k in 1u32.. {
        term = (&term * &x) / (&one * k);
        if term.is_zero() {
            break;
        }
        sum += &term;
        count = k;
    }

    let margin = BigUint::from(4u32 * (precision + count + 8));
    let scale = BigInt::from(one);
    let lower = Rational::new(BigInt::from(&sum - &margin), scale.clone()) - Rational::one();
    let upper = Rational::new(BigInt::from(&sum + &margin), scale) - Rational::one();
    Ok((lower, upper))
}

/// Splits a positive finite `f64` in `(0, 1)` into `(m, s)` with `v = m / 2^s`.
fn dyadic(v: f64) -> (BigUint, u32) {
    let bits = v.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i32;
    let fraction = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if exponent == 0 {
        (fraction, -1074)
    } else {
        (fraction | (1u64 << 52), exponent - 1075)
    };
    debug_assert!(exp < 0);
    (BigUint::from(mantissa), (-exp) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf_core::{expand_point, format_word};
    use num_traits::ToPrimitive;

    #[test]
    fn e_bracket_contains_e() {
        let (lo, hi) = e_minus_2_bracket(30);
        let e2 = std::f64::consts::E - 2.0;
        assert!(lo.to_f64().unwrap() <= e2 + 1e-15);
        assert!(hi.to_f64().unwrap() >= e2 - 1e-15);
        let width = (&hi - &lo).to_f64().unwrap();
        assert!(width < 1e-32);
    }

    #[test]
    fn e_minus_2_digits() {
        // about 10^-60
        let (lo, hi) = e_minus_2_bracket(50);
        let w = expand_point((&lo, &hi), 8).unwrap();
        assert_eq!(format_word(&w), "1,2,1,1,4,1,1,6");
    }

    #[test]
    fn exp2_bracket_matches_float() {
        for &u in &[0.5, 0.125, 0.9, 1e-3, (1.5f64).log2()] {
            let (lo, hi) = exp2_minus_one_bracket(u, 200).unwrap();
            assert!(lo < hi);
            let expect = (u * std::f64::consts::LN_2).exp_m1();
            let mid = ((&lo + &hi) / Rational::from_integer(2.into()))
                .to_f64()
                .unwrap();
            assert!(
                (mid - expect).abs() <= 4.0 * f64::EPSILON * expect.max(1e-300),
                "{u}"
            );
            assert!((&hi - &lo).to_f64().unwrap() < 1e-55);
        }
    }

    #[test]
    fn exp2_bracket_of_half_contains_sqrt2_minus_1() {
        // (√2 − 1)² = 3 − 2√2, so x = √2 − 1 solves x² + 2x − 1 = 0;
        // the quadratic is increasing on (0, 1)
        let (lo, hi) = exp2_minus_one_bracket(0.5, 300).unwrap();
        let f = |x: &Rational| x * x + x * Rational::from_integer(2.into()) - Rational::one();
        assert!(f(&lo) < Rational::zero());
        assert!(f(&hi) > Rational::zero());
    }

    #[test]
    fn exp2_domain() {
        assert!(exp2_minus_one_bracket(0.0, 64).is_err());
        assert!(exp2_minus_one_bracket(1.0, 64).is_err());
    }
}
