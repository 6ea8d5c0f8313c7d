//! Special digit sequences and the dimension machinery built on them.
//!
//! * `E_B(β)`: digit `k` at position `⌊k^{1/β}⌋`, every other digit in
//!   `{1, …, B}`; the range grows like `n^β`.
//! * `F(c)` representatives: digit `2^m` at position `⌊m/c⌋`, ones elsewhere;
//!   the range grows like `c n`.
//! * `e - 2 = [1, 2, 1, 1, 4, 1, 1, 6, …]`, a natural member of `F(1/3)`.
//!
//! Dimension side: Good's `σ_n` (root of `Σ q_n^{-2s} = 1` over bounded
//! digit tuples) and the pressure sums `Z_n(t)` of non-autonomous systems of
//! digit-block Möbius maps.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf_core::highprec::e_minus_2_bracket;
use crate::cf_core::{expand_point, ConvergentState, Digit, LN_2};
use crate::error::{Error, Result};

/// Largest tuple count [`good_sigma_n`] will enumerate.
pub const SIGMA_ENUMERATION_LIMIT: u128 = 100_000_000;

/// Largest number of composed maps [`pressure_zn`] will enumerate.
pub const PRESSURE_ENUMERATION_LIMIT: u128 = 10_000_000;

/// Digits of `e - 2` checked against its expansion when first used.
pub const E_MINUS_2_VALIDATED: usize = 200;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filler {
    #[default]
    One,
    /// Uniform on `{1, …, B}` from the stream seed.
    Seeded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum ConstructionSpec {
    EBeta {
        #[serde(rename = "B")]
        b: u64,
        beta: f64,
        #[serde(default)]
        filler: Filler,
    },
    FC {
        c: f64,
    },
    #[serde(rename = "e_minus_2")]
    EMinus2,
}

impl ConstructionSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ConstructionSpec::EBeta { b, beta, .. } => {
                if b < 2 {
                    return Err(Error::InvalidParameter(format!(
                        "B must be at least 2, got {b}"
                    )));
                }
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "β must lie in (0, 1), got {beta}"
                    )));
                }
            }
            ConstructionSpec::FC { c } => {
                if !(c > 0.0 && c <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "c must lie in (0, 1], got {c}"
                    )));
                }
            }
            ConstructionSpec::EMinus2 => {}
        }
        Ok(())
    }

    /// An endless digit iterator; `seed` only matters for a seeded filler.
    pub fn stream(&self, seed: u64) -> Result<ConstructionStream> {
        self.validate()?;
        Ok(match *self {
            ConstructionSpec::EBeta { b, beta, filler } => ConstructionStream::EBeta(EBetaDigits {
                b,
                gamma: 1.0 / beta,
                position: 0,
                next_k: 1,
                next_special: 1,
                filler: match filler {
                    Filler::One => None,
                    Filler::Seeded => Some(ChaCha8Rng::seed_from_u64(seed)),
                },
            }),
            ConstructionSpec::FC { c } => ConstructionStream::FC(FcDigits {
                c,
                position: 0,
                next_m: 1,
                next_special: special_position(1, c),
            }),
            ConstructionSpec::EMinus2 => {
                validate_e_minus_2_pattern()?;
                ConstructionStream::EMinus2(EMinus2Digits { position: 0 })
            }
        })
    }
}

/// `⌊k^γ⌋`, with integer arithmetic when `γ` is a small integer.
fn floor_pow(k: u64, gamma: f64) -> u64 {
    if gamma.fract() == 0.0 && gamma <= 64.0 {
        if let Some(v) = k.checked_pow(gamma as u32) {
            return v;
        }
    }
    let v = (k as f64).powf(gamma).floor();
    if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v as u64
    }
}

fn special_position(m: u64, c: f64) -> u64 {
    (m as f64 / c).floor() as u64
}

pub struct EBetaDigits {
    b: u64,
    gamma: f64,
    position: u64,
    next_k: u64,
    next_special: u64,
    filler: Option<ChaCha8Rng>,
}

impl Iterator for EBetaDigits {
    type Item = Digit;

    fn next(&mut self) -> Option<Digit> {
        self.position += 1;
        // ⌊k^γ⌋ is strictly increasing for γ > 1, so at most one k lands here
        let value = if self.position == self.next_special {
            let k = self.next_k;
            self.next_k += 1;
            self.next_special = floor_pow(self.next_k, self.gamma);
            k
        } else {
            match &mut self.filler {
                None => 1,
                Some(rng) => rng.random_range(1..=self.b),
            }
        };
        Some(Digit::new(value).expect("positive"))
    }
}

pub struct FcDigits {
    c: f64,
    position: u64,
    next_m: u64,
    next_special: u64,
}

impl Iterator for FcDigits {
    type Item = Digit;

    fn next(&mut self) -> Option<Digit> {
        self.position += 1;
        if self.position == self.next_special {
            let m = self.next_m;
            self.next_m += 1;
            self.next_special = special_position(self.next_m, self.c);
            Some(Digit::power_of_two(m as u32))
        } else {
            Some(Digit::ONE)
        }
    }
}

pub struct EMinus2Digits {
    position: u64,
}

impl Iterator for EMinus2Digits {
    type Item = Digit;

    fn next(&mut self) -> Option<Digit> {
        self.position += 1;
        Some(Digit::new(e_minus_2_digit(self.position)).expect("positive"))
    }
}

/// Digit `a_p` of `e - 2`: `a_1 = 1`, `a_{3m+2} = 2(m+1)`, `a_{3m+3} = a_{3m+4} = 1`.
fn e_minus_2_digit(position: u64) -> u64 {
    if position >= 2 && (position - 2) % 3 == 0 {
        2 * ((position - 2) / 3 + 1)
    } else {
        1
    }
}

fn validate_e_minus_2_pattern() -> Result<()> {
    static CHECK: OnceLock<std::result::Result<(), String>> = OnceLock::new();
    CHECK
        .get_or_init(|| {
            let (lo, hi) = e_minus_2_bracket(400);
            let expansion =
                expand_point((&lo, &hi), E_MINUS_2_VALIDATED).map_err(|e| e.to_string())?;
            for (i, d) in expansion.iter().enumerate() {
                let expected = e_minus_2_digit(i as u64 + 1);
                if d.as_u64() != Some(expected) {
                    return Err(format!(
                        "e - 2 pattern disagrees with its expansion at position {}: {} vs {}",
                        i + 1,
                        expected,
                        d
                    ));
                }
            }
            Ok(())
        })
        .clone()
        .map_err(Error::Precondition)
}

pub enum ConstructionStream {
    EBeta(EBetaDigits),
    FC(FcDigits),
    EMinus2(EMinus2Digits),
}

impl Iterator for ConstructionStream {
    type Item = Digit;

    fn next(&mut self) -> Option<Digit> {
        match self {
            ConstructionStream::EBeta(it) => it.next(),
            ConstructionStream::FC(it) => it.next(),
            ConstructionStream::EMinus2(it) => it.next(),
        }
    }
}

/// First `n` digits of the `E_B(β)` construction.
pub fn digits_e_beta(b: u64, beta: f64, filler: Filler, n: usize, seed: u64) -> Result<Vec<Digit>> {
    let spec = ConstructionSpec::EBeta { b, beta, filler };
    Ok(spec.stream(seed)?.take(n).collect())
}

/// Checks a prefix of an `E_B(β)` stream position by position, returning the
/// first 1-based position that breaks the rules.
///
/// Works from the position side: `p` is special when some `k` near `p^β`
/// has `⌊k^{1/β}⌋ = p`.
pub fn check_e_beta(
    b: u64,
    beta: f64,
    filler: Filler,
    digits: &[Digit],
) -> std::result::Result<(), usize> {
    let gamma = 1.0 / beta;
    for (i, d) in digits.iter().enumerate() {
        let p = i as u64 + 1;
        let guess = (p as f64).powf(beta).round() as u64;
        let special = (guess.saturating_sub(2)..=guess + 2)
            .filter(|&k| k >= 1)
            .find(|&k| floor_pow(k, gamma) == p);
        let ok = match (special, filler) {
            (Some(k), _) => d.as_u64() == Some(k),
            (None, Filler::One) => d.is_one(),
            (None, Filler::Seeded) => d.as_u64().is_some_and(|v| v <= b),
        };
        if !ok {
            return Err(p as usize);
        }
    }
    Ok(())
}

/// First `n` digits of the `F(c)` representative with `2^m` at `⌊m/c⌋`.
pub fn digits_f_c(c: f64, n: usize) -> Result<Vec<Digit>> {
    Ok(ConstructionSpec::FC { c }.stream(0)?.take(n).collect())
}

/// First `n` partial quotients of `e - 2`.
pub fn digits_e_minus_2(n: usize) -> Result<Vec<Digit>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(ConstructionSpec::EMinus2.stream(0)?.take(n).collect())
}

// ---------------------------------------------------------------------------
// Good's σ_n

/// Multiset of `q_n(a_1, …, a_n)` over `{1, …, B}^n`.
#[derive(Clone, Debug)]
pub struct DenominatorHistogram {
    /// `(ln q, multiplicity)` pairs.
    entries: Vec<(f64, u64)>,
}

impl DenominatorHistogram {
    pub fn enumerate(b: u64, n: u32) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidParameter(format!(
                "B must be at least 2, got {b}"
            )));
        }
        let total = (b as u128).checked_pow(n).unwrap_or(u128::MAX);
        if total > SIGMA_ENUMERATION_LIMIT {
            return Err(Error::EnumerationTooLarge(total));
        }
        // split on the first digit: after a_1 the state is (q_0, q_1) = (1, a_1)
        let merged = (1..=b)
            .into_par_iter()
            .map(|a1| {
                let mut counts = HashMap::new();
                walk_denominators(b, n - 1, 1, a1 as u128, &mut counts);
                counts
            })
            .reduce(HashMap::new, |mut acc, part| {
                for (q, c) in part {
                    *acc.entry(q).or_insert(0u64) += c;
                }
                acc
            });
        let mut entries: Vec<(u128, u64)> = merged.into_iter().collect();
        entries.sort_unstable();
        Ok(DenominatorHistogram {
            entries: entries
                .into_iter()
                .map(|(q, c)| ((q as f64).ln(), c))
                .collect(),
        })
    }

    /// `Σ q_n^{-2s}`, strictly decreasing in `s`.
    pub fn sum(&self, s: f64) -> f64 {
        self.entries
            .iter()
            .map(|&(ln_q, count)| count as f64 * (-2.0 * s * ln_q).exp())
            .sum()
    }

    pub fn tuples(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| c).sum()
    }
}

fn walk_denominators(
    b: u64,
    remaining: u32,
    q_prev: u128,
    q_cur: u128,
    counts: &mut HashMap<u128, u64>,
) {
    if remaining == 0 {
        *counts.entry(q_cur).or_insert(0) += 1;
        return;
    }
    for a in 1..=b as u128 {
        walk_denominators(b, remaining - 1, q_cur, a * q_cur + q_prev, counts);
    }
}

/// Good's `σ_n`: the root of `Σ_{a ∈ {1..B}^n} q_n(a)^{-2s} = 1`, by bisection
/// on `[0.2, 2.0]` until the sum is within `tol` of 1.
pub fn good_sigma_n(b: u64, n: u32, tol: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if n == 1 {
        // the all-ones tuple has q_1 = 1, so the sum never drops below 1
        return Err(Error::DegenerateStage);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let hist = DenominatorHistogram::enumerate(b, n)?;
    bisect_decreasing(|s| hist.sum(s) - 1.0, 0.2, 2.0, tol)
}

/// Root of a strictly decreasing `f` on `[lo, hi]`, stopping once `|f| ≤ tol`.
fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    if !(f(lo) > 0.0 && f(hi) < 0.0) {
        return Err(Error::RootNotBracketed { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let value = f(mid);
        if value.abs() <= tol || hi - lo <= f64::EPSILON * mid {
            return Ok(mid);
        }
        if value > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Non-autonomous IFS of digit-block maps

/// One stage of a non-autonomous system: each block `(d_1, …, d_m)` is the map
/// `x ↦ [d_1, …, d_{m-1}, d_m + x]` on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IfsStage {
    pub index: usize,
    blocks: Vec<Vec<Digit>>,
}

impl IfsStage {
    /// Distinct blocks map `(0, 1)` onto disjoint cylinders, which is the open
    /// set condition; duplicates and empty blocks are rejected.
    pub fn new(index: usize, blocks: Vec<Vec<Digit>>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(Vec::is_empty) {
            return Err(Error::InvalidParameter(
                "stage needs nonempty blocks".into(),
            ));
        }
        let mut sorted = blocks.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate block in stage".into()));
        }
        Ok(IfsStage { index, blocks })
    }

    pub fn blocks(&self) -> &[Vec<Digit>] {
        &self.blocks
    }

    /// `(‖Dφ‖, |||Dφ|||)` per map.
    pub fn derivative_norms(&self) -> Vec<(f64, f64)> {
        self.blocks
            .iter()
            .map(|b| block_derivative_bounds(b))
            .collect()
    }
}

/// `x ↦ (p_m + x p_{m-1})/(q_m + x q_{m-1})` has `|φ'(x)| = 1/(q_m + x q_{m-1})²`;
/// the sup sits at `x = 0`, the inf at `x = 1`.
pub fn block_derivative_bounds(block: &[Digit]) -> (f64, f64) {
    let conv = ConvergentState::from_word(block);
    let sup = (-2.0 * ln_big(&conv.q_cur)).exp();
    let inf = (-2.0 * ln_big(&(&conv.q_cur + &conv.q_prev))).exp();
    (sup, inf)
}

/// Natural log of a positive big integer without overflowing `f64`.
fn ln_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (v >> shift).to_f64().expect("finite").ln() + shift as f64 * LN_2
}

/// `Z_n(t) = Σ_{i ∈ I^n} ‖Dφ_i‖^t` over all compositions of one map per stage.
///
/// Composing block maps concatenates blocks, so `‖Dφ_i‖ = q(i)^{-2}` for the
/// concatenated word.
pub fn pressure_zn(stages: &[IfsStage], t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t must be non-negative, got {t}"
        )));
    }
    let total = stages
        .iter()
        .try_fold(1u128, |acc, s| acc.checked_mul(s.blocks.len() as u128))
        .unwrap_or(u128::MAX);
    if total > PRESSURE_ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge(total));
    }
    if stages.is_empty() {
        return Ok(1.0);
    }
    let first = &stages[0];
    Ok(first
        .blocks
        .par_iter()
        .map(|block| {
            let conv = ConvergentState::from_word(block);
            pressure_walk(&stages[1..], conv, t)
        })
        .sum())
}

fn pressure_walk(stages: &[IfsStage], conv: ConvergentState, t: f64) -> f64 {
    match stages.split_first() {
        None => (-2.0 * t * ln_big(&conv.q_cur)).exp(),
        Some((stage, rest)) => stage
            .blocks
            .iter()
            .map(|block| {
                let mut next = conv.clone();
                for d in block {
                    next.push(d);
                }
                pressure_walk(rest, next, t)
            })
            .sum(),
    }
}

/// Number of leading ones in stage `n` of the `G` system: `⌊(n+1)/c⌋ - ⌊n/c⌋ - 1`.
fn g_stage_ones(c: f64, n: u32) -> u64 {
    let k_n = special_position(n as u64, c);
    let k_next = special_position(n as u64 + 1, c);
    k_next - k_n - 1
}

fn g_block(ones: u64, k: &Digit) -> Vec<Digit> {
    let mut block = vec![Digit::ONE; ones as usize];
    block.push(k.clone());
    block
}

fn check_c(c: f64) -> Result<()> {
    ConstructionSpec::FC { c }.validate()
}

/// Stage `n` of the `G` system: maps `[1, …, 1, k + x]` for `2^n ≤ k < 2^{n+1}`.
pub fn g_stage(c: f64, n: u32) -> Result<IfsStage> {
    check_c(c)?;
    if n == 0 || n > 24 {
        return Err(Error::InvalidParameter(format!(
            "stage index must be in 1..=24 to enumerate, got {n}"
        )));
    }
    let ones = g_stage_ones(c, n);
    let blocks = ((1u64 << n)..(1u64 << (n + 1)))
        .map(|k| g_block(ones, &Digit::new(k).expect("positive")))
        .collect();
    IfsStage::new(n as usize, blocks)
}

/// Growth rates of stage `n` of the `G` system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IfsRates {
    /// `(1/n) log ♯I^(n)`.
    pub a_n: f64,
    /// `min_j (1/n) log(1/‖Dφ_j^(n)‖)`.
    pub b_n_min: f64,
    /// `max_j (1/n) log(1/‖Dφ_j^(n)‖)`.
    pub b_n_max: f64,
}

impl IfsRates {
    /// Implied dimension `a/b`, as `(a/b_max, a/b_min)`.
    pub fn dimension_range(&self) -> (f64, f64) {
        (self.a_n / self.b_n_max, self.a_n / self.b_n_min)
    }
}

/// `a_n` and the extreme `b_n` for stage `n` of the `G` system.
///
/// `q` of `[1, …, 1, k]` is increasing in `k`, so the extremes over the
/// `2^n` maps sit at `k = 2^n` and `k = 2^{n+1} - 1`.
pub fn ifs_rates_g(c: f64, n: u32) -> Result<IfsRates> {
    check_c(c)?;
    if n == 0 || n >= 127 {
        return Err(Error::InvalidParameter(format!(
            "stage index must be in 1..127, got {n}"
        )));
    }
    let ones = g_stage_ones(c, n);
    let nf = n as f64;
    // ♯I^(n) = 2^n, so (1/n) log ♯I^(n) = log 2 with log2 ♯I^(n) / n = 1 exactly
    let count_log2 = n as f64;
    let a_n = LN_2 * (count_log2 / nf);
    let lo = Digit::from_biguint(BigUint::one() << n as usize)?;
    let hi = Digit::from_biguint((BigUint::one() << (n as usize + 1)) - 1u32)?;
    let rate = |k: &Digit| {
        let q = ConvergentState::from_word(&g_block(ones, k)).q_cur;
        2.0 * ln_big(&q) / nf
    };
    Ok(IfsRates {
        a_n,
        b_n_min: rate(&lo),
        b_n_max: rate(&hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf_core::format_word;

    fn values(ds: &[Digit]) -> Vec<u64> {
        ds.iter().map(|d| d.as_u64().unwrap()).collect()
    }

    #[test]
    fn e_beta_square_positions() {
        let ds = digits_e_beta(5, 0.5, Filler::One, 20, 0).unwrap();
        let v = values(&ds);
        assert_eq!(v[0], 1);
        assert_eq!(v[3], 2);
        assert_eq!(v[8], 3);
        assert_eq!(v[15], 4);
        for (i, &d) in v.iter().enumerate() {
            if ![0, 3, 8, 15].contains(&i) {
                assert_eq!(d, 1, "position {}", i + 1);
            }
        }
    }

    #[test]
    fn e_beta_seeded_filler_is_bounded() {
        let ds = digits_e_beta(3, 0.5, Filler::Seeded, 10_000, 9).unwrap();
        for (i, d) in ds.iter().enumerate() {
            let p = i as u64 + 1;
            let k = (p as f64).sqrt().round() as u64;
            if k * k != p {
                assert!(d.as_u64().unwrap() <= 3);
            }
        }
        assert!(ds.iter().any(|d| d.as_u64() == Some(3)));
        assert_eq!(
            ds,
            digits_e_beta(3, 0.5, Filler::Seeded, 10_000, 9).unwrap()
        );
    }

    #[test]
    fn e_beta_parameter_errors() {
        assert!(digits_e_beta(2, 1.0, Filler::One, 5, 0).is_err());
        assert!(digits_e_beta(2, 0.0, Filler::One, 5, 0).is_err());
        assert!(digits_e_beta(1, 0.5, Filler::One, 5, 0).is_err());
    }

    #[test]
    fn f_c_full_density() {
        let ds = digits_f_c(1.0, 70).unwrap();
        assert_eq!(ds[0].as_u64(), Some(2));
        assert_eq!(ds[3].as_u64(), Some(16));
        assert_eq!(ds[69], Digit::power_of_two(70));
        let mut sorted = ds.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 70);
        assert!(digits_f_c(0.0, 5).is_err());
        assert!(digits_f_c(1.5, 5).is_err());
    }

    #[test]
    fn f_c_half() {
        let ds = digits_f_c(0.5, 8).unwrap();
        assert_eq!(format_word(&ds), "1,2,1,4,1,8,1,16");
    }

    #[test]
    fn e_minus_2_prefix() {
        let ds = digits_e_minus_2(8).unwrap();
        assert_eq!(format_word(&ds), "1,2,1,1,4,1,1,6");
        assert!(digits_e_minus_2(0).is_err());
        validate_e_minus_2_pattern().unwrap();
    }

    #[test]
    fn e_minus_2_distinct_count() {
        for m in 1..50usize {
            let ds = digits_e_minus_2(3 * m + 1).unwrap();
            let mut v = values(&ds);
            v.sort();
            v.dedup();
            assert_eq!(v.len(), m + 1);
        }
    }

    #[test]
    fn sigma_two_two() {
        let s = good_sigma_n(2, 2, 1e-12).unwrap();
        let direct = 2.0 * 9f64.powf(-s) + 4f64.powf(-s) + 25f64.powf(-s);
        assert!((direct - 1.0).abs() < 1e-11);
        assert!((s - 0.6545).abs() < 1e-3, "{s}");
    }

    #[test]
    fn sigma_errors() {
        assert!(matches!(
            good_sigma_n(2, 1, 1e-9),
            Err(Error::DegenerateStage)
        ));
        assert!(matches!(
            good_sigma_n(100, 5, 1e-9),
            Err(Error::EnumerationTooLarge(_))
        ));
        assert!(good_sigma_n(1, 3, 1e-9).is_err());
        assert!(good_sigma_n(2, 3, 0.0).is_err());
    }

    #[test]
    fn histogram_counts_tuples() {
        let h = DenominatorHistogram::enumerate(3, 4).unwrap();
        assert_eq!(h.tuples(), 81);
        assert!((h.sum(0.0) - 81.0).abs() < 1e-12);
    }

    #[test]
    fn single_map_derivative() {
        for k in 1..10u64 {
            let (sup, inf) = block_derivative_bounds(&[Digit::new(k).unwrap()]);
            assert!((sup - 1.0 / (k * k) as f64).abs() < 1e-15);
            assert!((inf - 1.0 / ((k + 1) * (k + 1)) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn pressure_counts_maps_at_zero() {
        let stage = IfsStage::new(1, vec![vec![Digit::ONE], vec![Digit::new(2).unwrap()]]).unwrap();
        assert_eq!(pressure_zn(std::slice::from_ref(&stage), 0.0).unwrap(), 2.0);
        let z1 = pressure_zn(&[stage], 1.0).unwrap();
        assert!((z1 - 1.25).abs() < 1e-15);
    }

    #[test]
    fn stage_rejects_duplicates() {
        let b = vec![Digit::ONE];
        assert!(IfsStage::new(1, vec![b.clone(), b]).is_err());
        assert!(IfsStage::new(1, vec![]).is_err());
    }

    #[test]
    fn g_rates_small_n_match_enumeration() {
        for n in 1..=8u32 {
            let rates = ifs_rates_g(1.0, n).unwrap();
            let stage = g_stage(1.0, n).unwrap();
            let bs: Vec<f64> = stage
                .derivative_norms()
                .iter()
                .map(|&(sup, _)| (1.0 / sup).ln() / n as f64)
                .collect();
            let min = bs.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = bs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!((rates.b_n_min - min).abs() < 1e-12);
            assert!((rates.b_n_max - max).abs() < 1e-12);
            assert_eq!(rates.a_n, LN_2);
            assert_eq!(
                (stage.blocks().len() as f64).ln() / n as f64 - LN_2 < 1e-15,
                true
            );
        }
    }

    #[test]
    fn g_stage_ones_follow_positions() {
        // c = 1/2: specials at 2, 4, 6, …, one filler between consecutive stages
        let stage = g_stage(0.5, 3).unwrap();
        assert_eq!(stage.blocks()[0].len(), 2);
        assert!(stage.blocks()[0][0].is_one());
        assert_eq!(g_stage(1.0, 3).unwrap().blocks()[0].len(), 1);
    }

    #[test]
    fn e_beta_streams_pass_validator() {
        for &beta in &[0.25, 0.5, 0.75, 0.3] {
            for filler in [Filler::One, Filler::Seeded] {
                let ds = digits_e_beta(4, beta, filler, 20_000, 3).unwrap();
                assert_eq!(check_e_beta(4, beta, filler, &ds), Ok(()), "β={beta}");
            }
        }
        let mut ds = digits_e_beta(4, 0.5, Filler::One, 20, 0).unwrap();
        ds[8] = Digit::ONE;
        assert_eq!(check_e_beta(4, 0.5, Filler::One, &ds), Err(9));
    }

    fn distinct(ds: &[Digit]) -> usize {
        let mut v = ds.to_vec();
        v.sort();
        v.dedup();
        v.len()
    }

    #[test]
    fn e_beta_range_growth() {
        let n = 10_000;
        let ds = digits_e_beta(2, 0.5, Filler::One, n, 0).unwrap();
        assert!((distinct(&ds) as i64 - 100).abs() <= 2);
        for &beta in &[0.25, 0.5, 0.75] {
            let ds = digits_e_beta(2, beta, Filler::One, n, 0).unwrap();
            let slope = (distinct(&ds) as f64).ln() / (n as f64).ln();
            assert!((slope - beta).abs() <= 0.03, "β={beta} slope={slope}");
        }
    }

    #[test]
    fn f_c_range_density() {
        let ds = digits_f_c(0.5, 10_000).unwrap();
        assert!((distinct(&ds) as f64 / 1e4 - 0.5).abs() <= 0.001);
        let ds = digits_f_c(1.0 / 3.0, 30_000).unwrap();
        assert!((distinct(&ds) as f64 / 3e4 - 1.0 / 3.0).abs() <= 0.001);
        let ds = digits_f_c(1.0, 500).unwrap();
        assert_eq!(distinct(&ds), 500);
    }

    #[test]
    fn e_minus_2_density() {
        let ds = digits_e_minus_2(30_000).unwrap();
        assert!((distinct(&ds) as f64 / 3e4 - 1.0 / 3.0).abs() <= 0.01);
    }

    #[test]
    fn sigma_root_is_isolated() {
        let tol = 1e-10;
        for &(b, n) in &[(2u64, 3u32), (3, 4), (5, 3)] {
            let s = good_sigma_n(b, n, tol).unwrap();
            let h = DenominatorHistogram::enumerate(b, n).unwrap();
            assert!((h.sum(s) - 1.0).abs() <= tol);
            assert!(h.sum(s - 10.0 * tol) > 1.0);
            assert!(h.sum(s + 10.0 * tol) < 1.0);
        }
    }

    #[test]
    fn sigma_monotone() {
        let by_b: Vec<f64> = (2..=6)
            .map(|b| good_sigma_n(b, 3, 1e-12).unwrap())
            .collect();
        assert!(by_b.windows(2).all(|w| w[0] < w[1]), "{by_b:?}");
        let by_n: Vec<f64> = (2..=5)
            .map(|n| good_sigma_n(2, n, 1e-12).unwrap())
            .collect();
        assert!(by_n.windows(2).all(|w| w[0] > w[1]), "{by_n:?}");
    }

    #[test]
    fn pressure_two_g_stages_brute_force() {
        let stages = [g_stage(1.0, 1).unwrap(), g_stage(1.0, 2).unwrap()];
        for &t in &[0.0, 0.3, 0.5, 1.0] {
            let mut direct = 0.0;
            for a in 2..4u64 {
                for b in 4..8u64 {
                    let q = (a * b + 1) as f64;
                    direct += q.powf(-2.0 * t);
                }
            }
            let z = pressure_zn(&stages, t).unwrap();
            assert!((z - direct).abs() < 1e-14 * direct.max(1.0), "t={t}");
        }
    }

    #[test]
    fn g_rates_at_thirty() {
        let r = ifs_rates_g(1.0, 30).unwrap();
        assert_eq!(r.a_n, LN_2);
        for b in [r.b_n_min, r.b_n_max] {
            assert!((b / (2.0 * LN_2) - 1.0).abs() <= 0.05, "{b}");
        }
        let (lo, hi) = r.dimension_range();
        assert!(lo <= 0.5 && (hi - 0.5).abs() < 1e-12);
        let far = ifs_rates_g(1.0, 120).unwrap();
        assert!((far.dimension_range().0 - 0.5).abs() < 0.01);
    }
}
