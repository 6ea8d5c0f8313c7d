use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ConvergentState, Digit, Rational, LN_2};
use crate::error::{Error, Result};

/// Which end of a cylinder interval is closed.
///
/// Only matters for boundary points, which carry no measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `[p_n/q_n, (p_n+p_{n-1})/(q_n+q_{n-1}))`, even depth.
    LeftClosed,
    /// `((p_n+p_{n-1})/(q_n+q_{n-1}), p_n/q_n]`, odd depth.
    RightClosed,
}

/// The cylinder `I(a_1, …, a_n)` of points whose expansion starts with `word`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    word: Vec<Digit>,
    conv: ConvergentState,
    orientation: Orientation,
}

impl Cylinder {
    pub fn new(word: Vec<Digit>) -> Self {
        let conv = ConvergentState::from_word(&word);
        let orientation = if word.len() % 2 == 0 {
            Orientation::LeftClosed
        } else {
            Orientation::RightClosed
        };
        Cylinder {
            word,
            conv,
            orientation,
        }
    }

    pub fn from_u64s(digits: &[u64]) -> Result<Self> {
        let word = digits
            .iter()
            .map(|&d| Digit::new(d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(word))
    }

    pub fn word(&self) -> &[Digit] {
        &self.word
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }

    pub fn convergents(&self) -> &ConvergentState {
        &self.conv
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Extends the cylinder by one digit, i.e. `I(a_1, …, a_n, d)`.
    pub fn child(&self, d: Digit) -> Self {
        let mut word = self.word.clone();
        let mut conv = self.conv.clone();
        conv.push(&d);
        word.push(d);
        let orientation = match self.orientation {
            Orientation::LeftClosed => Orientation::RightClosed,
            Orientation::RightClosed => Orientation::LeftClosed,
        };
        Cylinder {
            word,
            conv,
            orientation,
        }
    }

    fn require_nonempty(&self) -> Result<()> {
        if self.word.is_empty() {
            Err(Error::EmptyCylinder)
        } else {
            Ok(())
        }
    }

    /// Ordered endpoints `lo < hi`.
    pub fn endpoints(&self) -> Result<(Rational, Rational)> {
        self.require_nonempty()?;
        let c = &self.conv;
        let convergent = c.value();
        let mediant = Rational::new(
            BigInt::from(&c.p_cur + &c.p_prev),
            BigInt::from(&c.q_cur + &c.q_prev),
        );
        Ok(match self.orientation {
            Orientation::LeftClosed => (convergent, mediant),
            Orientation::RightClosed => (mediant, convergent),
        })
    }

    /// Exact length `1/(q_n (q_n + q_{n-1}))`.
    pub fn length(&self) -> Result<Rational> {
        self.require_nonempty()?;
        Ok(Rational::new(
            BigInt::one(),
            BigInt::from(self.length_denominator()),
        ))
    }

    pub(crate) fn length_denominator(&self) -> BigUint {
        &self.conv.q_cur * (&self.conv.q_cur + &self.conv.q_prev)
    }

    /// Gauss measure `log2((1 + hi)/(1 + lo))` of the cylinder.
    ///
    /// The ratio `(1 + hi)/(1 + lo)` equals `1 + 1/N` for an integer `N`, so a
    /// single `ln_1p` evaluation keeps full relative accuracy at any depth
    /// (until `f64` underflow).
    pub fn gauss_measure(&self) -> Result<f64> {
        self.require_nonempty()?;
        Ok(big_ln_1p_recip(&self.measure_denominator()) / LN_2)
    }

    /// The integer `N` with `(1 + hi)/(1 + lo) = 1 + 1/N`.
    pub(crate) fn measure_denominator(&self) -> BigUint {
        let c = &self.conv;
        match self.orientation {
            Orientation::LeftClosed => (&c.q_cur + &c.q_prev) * (&c.q_cur + &c.p_cur),
            Orientation::RightClosed => &c.q_cur * (&c.q_cur + &c.q_prev + &c.p_cur + &c.p_prev),
        }
    }
}

/// `ln(1 + 1/n)` for a positive big integer.
pub(crate) fn big_ln_1p_recip(n: &BigUint) -> f64 {
    match n.to_f64() {
        Some(x) if x.is_finite() => (1.0 / x).ln_1p(),
        _ => 0.0,
    }
}

pub fn cylinder_endpoints(cyl: &Cylinder) -> Result<(Rational, Rational)> {
    cyl.endpoints()
}

pub fn cylinder_length(cyl: &Cylinder) -> Result<Rational> {
    cyl.length()
}

/// Gauss measure `(ln(1+hi) - ln(1+lo))/ln 2` of an interval in `[0, 1]`.
pub fn gauss_measure_interval(lo: &Rational, hi: &Rational) -> Result<f64> {
    if lo >= hi {
        return Err(Error::InvalidInterval {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    let one = Rational::one();
    if lo.is_negative() || hi > &one {
        return Err(Error::InvalidInterval {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    // ln((1+hi)/(1+lo)) = ln_1p((hi-lo)/(1+lo)), exact up to the final rounding.
    let rel = (hi - lo) / (&one + lo);
    debug_assert!(!rel.is_zero());
    let x = rel.to_f64().unwrap_or(0.0);
    Ok(x.ln_1p() / LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf_core::ratio;

    fn cyl(ds: &[u64]) -> Cylinder {
        Cylinder::from_u64s(ds).unwrap()
    }

    #[test]
    fn endpoints_of_first_order_cylinders() {
        assert_eq!(cyl(&[1]).endpoints().unwrap(), (ratio(1, 2), ratio(1, 1)));
        assert_eq!(cyl(&[2]).endpoints().unwrap(), (ratio(1, 3), ratio(1, 2)));
        assert_eq!(cyl(&[1]).orientation(), Orientation::RightClosed);
    }

    #[test]
    fn endpoints_of_second_order_cylinder() {
        let c = cyl(&[1, 1]);
        assert_eq!(c.orientation(), Orientation::LeftClosed);
        assert_eq!(c.endpoints().unwrap(), (ratio(1, 2), ratio(2, 3)));
    }

    #[test]
    fn lengths() {
        assert_eq!(cyl(&[1]).length().unwrap(), ratio(1, 2));
        assert_eq!(cyl(&[1, 1]).length().unwrap(), ratio(1, 6));
        assert_eq!(cyl(&[2, 2]).length().unwrap(), ratio(1, 35));
        for ds in [&[1u64][..], &[1, 1], &[2, 2], &[3, 1, 4, 1, 5]] {
            let c = cyl(ds);
            let (lo, hi) = c.endpoints().unwrap();
            assert_eq!(hi - lo, c.length().unwrap());
        }
    }

    #[test]
    fn depth_zero_is_an_error() {
        let c = Cylinder::new(vec![]);
        assert!(matches!(c.endpoints(), Err(Error::EmptyCylinder)));
        assert!(matches!(c.length(), Err(Error::EmptyCylinder)));
        assert!(matches!(c.gauss_measure(), Err(Error::EmptyCylinder)));
    }

    #[test]
    fn gauss_measures() {
        let full = gauss_measure_interval(&ratio(0, 1), &ratio(1, 1)).unwrap();
        assert!((full - 1.0).abs() < 1e-15);
        let pi1 = (4.0f64 / 3.0).log2();
        assert!((pi1 - 0.415037).abs() < 1e-6);
        let m1 = gauss_measure_interval(&ratio(1, 2), &ratio(1, 1)).unwrap();
        assert!((m1 - pi1).abs() < 1e-15);
        assert!((cyl(&[1]).gauss_measure().unwrap() - pi1).abs() < 1e-15);
        let m11 = (10.0f64 / 9.0).log2();
        assert!((m11 - 0.152003).abs() < 1e-6);
        assert!((cyl(&[1, 1]).gauss_measure().unwrap() - m11).abs() < 1e-15);
    }

    #[test]
    fn interval_errors() {
        assert!(gauss_measure_interval(&ratio(1, 2), &ratio(1, 2)).is_err());
        assert!(gauss_measure_interval(&ratio(2, 3), &ratio(1, 2)).is_err());
        assert!(gauss_measure_interval(&ratio(-1, 2), &ratio(1, 2)).is_err());
        assert!(gauss_measure_interval(&ratio(1, 2), &ratio(3, 2)).is_err());
    }

    #[test]
    fn deep_cylinder_keeps_relative_accuracy() {
        let c = cyl(&[7; 40]);
        let (lo, hi) = c.endpoints().unwrap();
        let a = c.gauss_measure().unwrap();
        let b = gauss_measure_interval(&lo, &hi).unwrap();
        assert!(a > 0.0);
        assert!(((a - b) / a).abs() < 1e-14);
    }
}
