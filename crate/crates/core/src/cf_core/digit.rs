use std::fmt;
use std::num::NonZeroU64;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A partial quotient: a positive integer of arbitrary size.
///
/// Values that fit in a `u64` are stored inline; the representation is
/// normalised so equal digits always compare and hash equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digit(Repr);

// Variant order matters for the derived `Ord`: every `Big` exceeds `u64::MAX`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Small(NonZeroU64),
    Big(Box<BigUint>),
}

impl Digit {
    pub const ONE: Digit = Digit(Repr::Small(NonZeroU64::MIN));

    pub fn new(value: u64) -> Result<Self> {
        NonZeroU64::new(value)
            .map(|v| Digit(Repr::Small(v)))
            .ok_or_else(|| Error::ZeroDigit(value.to_string()))
    }

    pub fn from_biguint(value: BigUint) -> Result<Self> {
        if value.is_zero() {
            return Err(Error::ZeroDigit("0".into()));
        }
        Ok(match value.to_u64() {
            Some(v) => Digit(Repr::Small(NonZeroU64::new(v).expect("nonzero"))),
            None => Digit(Repr::Big(Box::new(value))),
        })
    }

    /// `2^exp`, the representative digits used by the `F(c)` construction.
    pub fn power_of_two(exp: u32) -> Self {
        if exp < 64 {
            Digit::new(1u64 << exp).expect("nonzero")
        } else {
            Digit(Repr::Big(Box::new(BigUint::one() << exp)))
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match &self.0 {
            Repr::Small(v) => Some(v.get()),
            Repr::Big(_) => None,
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match &self.0 {
            Repr::Small(v) => BigUint::from(v.get()),
            Repr::Big(b) => (**b).clone(),
        }
    }

    /// Nearest `f64`; saturates to infinity for astronomically large digits.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(v) => v.get() as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::INFINITY),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(v) if v.get() == 1)
    }

    /// `self * x + y` on big integers, the core step of the convergent recursion.
    pub(crate) fn mul_add(&self, x: &BigUint, y: &BigUint) -> BigUint {
        match &self.0 {
            Repr::Small(v) => x * v.get() + y,
            Repr::Big(b) => x * &**b + y,
        }
    }
}

impl From<NonZeroU64> for Digit {
    fn from(v: NonZeroU64) -> Self {
        Digit(Repr::Small(v))
    }
}

impl TryFrom<u64> for Digit {
    type Error = Error;
    fn try_from(v: u64) -> Result<Self> {
        Digit::new(v)
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(v) => write!(f, "{v}"),
            Repr::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Digit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let malformed = || Error::MalformedDigit {
            position: 0,
            token: s.to_string(),
        };
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let value = BigUint::from_str(s).map_err(|_| malformed())?;
        Digit::from_biguint(value).map_err(|_| malformed())
    }
}

impl serde::Serialize for Digit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.0 {
            Repr::Small(v) => s.serialize_u64(v.get()),
            Repr::Big(b) => s.serialize_str(&b.to_string()),
        }
    }
}

/// Comma-separated decimal rendering of a word, e.g. `1,2,1,1,4`.
pub fn format_word(word: &[Digit]) -> String {
    let mut out = String::new();
    for (i, d) in word.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&d.to_string());
    }
    out
}

/// Parses whitespace- and/or comma-separated decimal digits.
///
/// Errors name the zero-based position of the first malformed token.
pub fn parse_word(text: &str) -> Result<Vec<Digit>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(position, token)| {
            token.parse::<Digit>().map_err(|_| Error::MalformedDigit {
                position,
                token: token.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_rejected() {
        assert!(Digit::new(0).is_err());
        assert!(Digit::from_biguint(BigUint::zero()).is_err());
        assert!("0".parse::<Digit>().is_err());
    }

    #[test]
    fn representation_is_normalised() {
        let small = Digit::new(u64::MAX).unwrap();
        let via_big = Digit::from_biguint(BigUint::from(u64::MAX)).unwrap();
        assert_eq!(small, via_big);
        let big = Digit::power_of_two(64);
        assert!(big.as_u64().is_none());
        assert!(big > small);
        assert_eq!(big.to_string(), "18446744073709551616");
        assert_eq!(Digit::power_of_two(3).as_u64(), Some(8));
    }

    #[test]
    fn parse_reports_position() {
        let w = parse_word("1, 2 3,\n4").unwrap();
        assert_eq!(format_word(&w), "1,2,3,4");
        match parse_word("1,2,x,4") {
            Err(Error::MalformedDigit { position, token }) => {
                assert_eq!(position, 2);
                assert_eq!(token, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_word("3 0"),
            Err(Error::MalformedDigit { position: 1, .. })
        ));
    }
}
