use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::{Digit, Rational};
use crate::error::{Error, Result};

/// Rolling window `(p_{n-1}, p_n, q_{n-1}, q_n)` of the convergent recursion.
///
/// Starts from `p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConvergentState {
    pub p_prev: BigUint,
    pub p_cur: BigUint,
    pub q_prev: BigUint,
    pub q_cur: BigUint,
}

impl Default for ConvergentState {
    fn default() -> Self {
        Self::new()
    }
}

impl ConvergentState {
    pub fn new() -> Self {
        ConvergentState {
            p_prev: BigUint::one(),
            p_cur: BigUint::zero(),
            q_prev: BigUint::zero(),
            q_cur: BigUint::one(),
        }
    }

    pub fn from_word<'a>(word: impl IntoIterator<Item = &'a Digit>) -> Self {
        let mut state = Self::new();
        for d in word {
            state.push(d);
        }
        state
    }

    /// Advances the recursion by one digit in place.
    pub fn push(&mut self, d: &Digit) {
        let p_next = d.mul_add(&self.p_cur, &self.p_prev);
        let q_next = d.mul_add(&self.q_cur, &self.q_prev);
        self.p_prev = std::mem::replace(&mut self.p_cur, p_next);
        self.q_prev = std::mem::replace(&mut self.q_cur, q_next);
    }

    /// The current convergent `p_n / q_n` in lowest terms.
    pub fn value(&self) -> Rational {
        Rational::new(
            BigInt::from(self.p_cur.clone()),
            BigInt::from(self.q_cur.clone()),
        )
    }

    /// `p_n q_{n-1} - p_{n-1} q_n`, which equals `(-1)^{n-1}` after `n ≥ 1` digits.
    pub fn determinant(&self) -> BigInt {
        BigInt::from(&self.p_cur * &self.q_prev) - BigInt::from(&self.p_prev * &self.q_cur)
    }
}

/// Returns the state advanced by `d`; the input is left untouched.
pub fn push_digit(conv: &ConvergentState, d: &Digit) -> ConvergentState {
    let mut next = conv.clone();
    next.push(d);
    next
}

/// Value `p_n / q_n` of a finite word.
pub fn evaluate_word(word: &[Digit]) -> Result<Rational> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(ConvergentState::from_word(word).value())
}
