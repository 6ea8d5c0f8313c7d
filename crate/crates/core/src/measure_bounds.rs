//! Checks of the cylinder-measure inequalities: quasi-independence of
//! concatenated cylinders, monotonicity of `μ(I(·))` under digit domination,
//! the `q_n` deletion ratio, and bracketed mixing ratios.

mod chebyshev;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf_core::{format_word, ConvergentState, Cylinder, Digit, Rational, LN_2};
use crate::error::{Error, Result};
use chebyshev::Chebyshev;

/// Lower quasi-independence constant `log 2`.
pub const QI_LOWER: f64 = LN_2;
/// Upper quasi-independence constant `2 log 2`.
pub const QI_UPPER: f64 = 2.0 * LN_2;

/// Interpolation degree of the transfer iterates in [`mixing_bracket`].
pub const CHEBYSHEV_DEGREE: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordPair {
    x: Vec<Digit>,
    y: Vec<Digit>,
}

impl WordPair {
    pub fn new(x: Vec<Digit>, y: Vec<Digit>) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(WordPair { x, y })
    }

    pub fn from_u64s(x: &[u64], y: &[u64]) -> Result<Self> {
        Self::new(digits(x)?, digits(y)?)
    }

    pub fn x(&self) -> &[Digit] {
        &self.x
    }

    pub fn y(&self) -> &[Digit] {
        &self.y
    }

    pub fn concatenated(&self) -> Vec<Digit> {
        [self.x.as_slice(), self.y.as_slice()].concat()
    }
}

fn digits(v: &[u64]) -> Result<Vec<Digit>> {
    v.iter().map(|&d| Digit::new(d)).collect()
}

fn measure(word: &[Digit]) -> Result<f64> {
    Cylinder::new(word.to_vec()).gauss_measure()
}

/// `μ(I(x̃ỹ)) / (μ(I(x̃)) μ(I(ỹ)))`.
pub fn quasi_independence_ratio(pair: &WordPair) -> Result<f64> {
    Ok(measure(&pair.concatenated())? / (measure(&pair.x)? * measure(&pair.y)?))
}

/// `|I(x̃ỹ)| / (|I(x̃)| |I(ỹ)|)`, exactly.
pub fn length_ratio(pair: &WordPair) -> Result<Rational> {
    let len = |w: &[Digit]| Cylinder::new(w.to_vec()).length();
    Ok(len(&pair.concatenated())? / (len(&pair.x)? * len(&pair.y)?))
}

/// `μ(I(w_1 ⋯ w_r)) / Π μ(I(w_i))`.
pub fn multi_ratio(words: &[Vec<Digit>]) -> Result<f64> {
    if words.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two words, got {}",
            words.len()
        )));
    }
    if words.iter().any(Vec::is_empty) {
        return Err(Error::EmptyWord);
    }
    let product = words.iter().map(|w| measure(w)).product::<Result<f64>>()?;
    Ok(measure(&words.concat())? / product)
}

/// Bounds `[(log 2)^{r-1}, (2 log 2)^{r-1}]` for [`multi_ratio`] with `r` words.
pub fn multi_ratio_bounds(r: usize) -> (f64, f64) {
    let e = r as i32 - 1;
    (QI_LOWER.powi(e), QI_UPPER.powi(e))
}

/// For `x_k ≥ y_k` componentwise, whether `μ(I(x̃)) ≤ μ(I(ỹ))`.
///
/// Decided exactly: `μ(I(w)) = log2(1 + 1/N(w))` for an integer `N(w)`.
pub fn comparison_check(x: &[Digit], y: &[Digit]) -> Result<bool> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyWord);
    }
    if x.len() != y.len() {
        return Err(Error::Precondition(format!(
            "words differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if let Some(k) = x.iter().zip(y).position(|(a, b)| a < b) {
        return Err(Error::Precondition(format!(
            "x_{} = {} < y_{} = {}",
            k + 1,
            x[k],
            k + 1,
            y[k]
        )));
    }
    let n = |w: &[Digit]| Cylinder::new(w.to_vec()).measure_denominator();
    Ok(n(x) >= n(y))
}

/// `q_n(a) / q_{n-1}(a with a_k removed)` against `[(a_k + 1)/2, a_k + 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QRatio {
    pub ratio: Rational,
    pub lower: Rational,
    pub upper: Rational,
}

impl QRatio {
    pub fn holds(&self) -> bool {
        self.lower <= self.ratio && self.ratio <= self.upper
    }
}

/// `k` is 1-based.
pub fn q_ratio_bounds(word: &[Digit], k: usize) -> Result<QRatio> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    if k == 0 || k > word.len() {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ k ≤ {}, got {k}",
            word.len()
        )));
    }
    let q_full = ConvergentState::from_word(word).q_cur;
    let mut rest = word.to_vec();
    let removed = rest.remove(k - 1);
    let q_rest = ConvergentState::from_word(&rest).q_cur;
    let ak1 = Rational::from_integer(BigInt::from(removed.to_biguint() + 1u32));
    Ok(QRatio {
        ratio: Rational::new(BigInt::from(q_full), BigInt::from(q_rest)),
        lower: &ak1 / Rational::from_integer(BigInt::from(2)),
        upper: ak1,
    })
}

// ---------------------------------------------------------------------------
// Mixing

/// Bracket for `μ(I(x̃) ∩ T^{-(m+L)} I(ỹ))`, `m = |x̃|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixingBracket {
    /// Mass of `x̃ w ỹ` over middle words `w ∈ {1..cap}^L`.
    pub lower: f64,
    /// `lower` plus the mass of `I(x̃)` whose middle word leaves `{1..cap}^L`.
    pub upper: f64,
    /// `μ(I(x̃)) μ(I(ỹ))`.
    pub product: f64,
}

impl MixingBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn ratio_bracket(&self) -> (f64, f64) {
        (self.lower / self.product, self.upper / self.product)
    }

    /// `|mid / product - 1|`, the bracketed distance from independence.
    pub fn midpoint_error(&self) -> f64 {
        (0.5 * (self.lower + self.upper) / self.product - 1.0).abs()
    }
}

fn check_mixing_args(l: u32, digit_cap: u64) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidParameter("gap L must be at least 1".into()));
    }
    if digit_cap < 2 {
        return Err(Error::InvalidParameter(format!(
            "digit cap must be at least 2, got {digit_cap}"
        )));
    }
    Ok(())
}

fn endpoints_f64(word: &[Digit]) -> Result<(f64, f64)> {
    let (lo, hi) = Cylinder::new(word.to_vec()).endpoints()?;
    Ok((lo.to_f64().unwrap_or(0.0), hi.to_f64().unwrap_or(1.0)))
}

/// Mixing bracket by iterating the transfer operator of the Gauss map,
/// restricted to branches `1..=cap`, on the density of `T^m(μ|I(x̃))`.
///
/// After `L` steps the iterate `h_L` is the density of `T^{m+L}` applied to
/// `μ` restricted to `∪_{w ∈ {1..cap}^L} I(x̃ w)`, so `∫_{I(ỹ)} h_L` is the
/// enumerated lower sum and `μ(I(x̃)) - ∫_0^1 h_L` the omitted mass.
pub fn mixing_bracket(pair: &WordPair, l: u32, digit_cap: u64) -> Result<MixingBracket> {
    check_mixing_args(l, digit_cap)?;
    let c = ConvergentState::from_word(&pair.x);
    let f = |v: &BigUint| v.to_f64().expect("finite");
    let (q, q1) = (f(&c.q_cur), f(&c.q_prev));
    let (pq, pq1) = (f(&(&c.p_cur + &c.q_cur)), f(&(&c.p_prev + &c.q_prev)));
    let mut h = Chebyshev::sample(CHEBYSHEV_DEGREE, |y| {
        1.0 / (LN_2 * (q + y * q1) * (pq + y * pq1))
    });
    for _ in 0..l {
        let prev = h;
        h = Chebyshev::sample(CHEBYSHEV_DEGREE, |y| {
            (1..=digit_cap)
                .rev()
                .map(|j| {
                    let t = j as f64 + y;
                    prev.eval(1.0 / t) / (t * t)
                })
                .sum()
        });
    }
    let (lo, hi) = endpoints_f64(&pair.y)?;
    let lower = h.integrate(lo, hi);
    let mu_x = measure(&pair.x)?;
    let upper = lower + (mu_x - h.integrate(0.0, 1.0)).max(0.0);
    Ok(MixingBracket {
        lower,
        upper,
        product: mu_x * measure(&pair.y)?,
    })
}

/// Largest middle-word count [`mixing_bracket_enumerated`] will visit.
pub const MIXING_ENUMERATION_LIMIT: u128 = 2_000_000;

/// The same bracket by literally summing cylinder measures over every
/// middle word; only for small `cap^L`.
pub fn mixing_bracket_enumerated(pair: &WordPair, l: u32, digit_cap: u64) -> Result<MixingBracket> {
    check_mixing_args(l, digit_cap)?;
    let total = (digit_cap as u128).checked_pow(l).unwrap_or(u128::MAX);
    if total > MIXING_ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge(total));
    }
    let base = Cylinder::new(pair.x.clone());
    let (mut lower, mut covered) = (0.0, 0.0);
    let mut stack = vec![(base.clone(), 0u32)];
    while let Some((cyl, depth)) = stack.pop() {
        if depth == l {
            covered += cyl.gauss_measure()?;
            let mut full = cyl;
            for d in &pair.y {
                full = full.child(d.clone());
            }
            lower += full.gauss_measure()?;
            continue;
        }
        for j in 1..=digit_cap {
            stack.push((cyl.child(Digit::new(j)?), depth + 1));
        }
    }
    let mu_x = base.gauss_measure()?;
    Ok(MixingBracket {
        lower,
        upper: lower + (mu_x - covered).max(0.0),
        product: mu_x * measure(&pair.y)?,
    })
}

// ---------------------------------------------------------------------------
// Scans

/// Extremes of one bound family over a scan.
#[derive(Clone, Debug, Serialize)]
pub struct BoundFamily {
    pub family: String,
    pub bound: (f64, f64),
    pub count: u64,
    pub min: f64,
    pub max: f64,
    pub argmin: String,
    pub argmax: String,
    pub violations: u64,
    pub first_violation: Option<String>,
}

impl BoundFamily {
    fn new(family: &str, bound: (f64, f64)) -> Self {
        BoundFamily {
            family: family.into(),
            bound,
            count: 0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            argmin: String::new(),
            argmax: String::new(),
            violations: 0,
            first_violation: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn observe(&mut self, value: f64, ok: bool, describe: impl Fn() -> String) {
        self.count += 1;
        if value < self.min {
            self.min = value;
            self.argmin = describe();
        }
        if value > self.max {
            self.max = value;
            self.argmax = describe();
        }
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(describe());
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        if other.min < self.min {
            self.min = other.min;
            self.argmin = other.argmin;
        }
        if other.max > self.max {
            self.max = other.max;
            self.argmax = other.argmax;
        }
        self.count += other.count;
        self.violations += other.violations;
        if self.first_violation.is_none() {
            self.first_violation = other.first_violation;
        }
        self
    }
}

/// Convergent matrix `[[p_{n-1}, p_n], [q_{n-1}, q_n]]` of a short word.
#[derive(Clone, Copy, Debug)]
struct SmallWord {
    p_prev: u128,
    p: u128,
    q_prev: u128,
    q: u128,
    len: usize,
}

impl SmallWord {
    fn of(word: &[u64]) -> Self {
        let (mut p_prev, mut p, mut q_prev, mut q) = (1u128, 0, 0, 1);
        for &a in word {
            let a = a as u128;
            (p_prev, p) = (p, a * p + p_prev);
            (q_prev, q) = (q, a * q + q_prev);
        }
        SmallWord {
            p_prev,
            p,
            q_prev,
            q,
            len: word.len(),
        }
    }

    #[cfg(test)]
    fn concat(&self, o: &SmallWord) -> Self {
        SmallWord {
            p_prev: self.p_prev * o.p_prev + self.p * o.q_prev,
            p: self.p_prev * o.p + self.p * o.q,
            q_prev: self.q_prev * o.p_prev + self.q * o.q_prev,
            q: self.q_prev * o.p + self.q * o.q,
            len: self.len + o.len,
        }
    }

    /// `N` with `μ(I(w)) = log2(1 + 1/N)`.
    fn measure_denominator(&self) -> u128 {
        if self.len % 2 == 0 {
            (self.q + self.q_prev) * (self.q + self.p)
        } else {
            self.q * (self.q + self.q_prev + self.p + self.p_prev)
        }
    }

    fn measure(&self) -> f64 {
        (1.0 / self.measure_denominator() as f64).ln_1p() / LN_2
    }

    /// `1 / |I(w)|`.
    fn length_denominator(&self) -> u128 {
        self.q * (self.q + self.q_prev)
    }
}

/// All words of exactly `len` letters from `{1..max_digit}`.
fn words_u64(len: usize, max_digit: u64) -> Vec<Vec<u64>> {
    let mut words = vec![Vec::new()];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w| {
                (1..=max_digit).map(move |a| {
                    let mut next = w.clone();
                    next.push(a);
                    next
                })
            })
            .collect();
    }
    words
}

/// Word-length combination scanned exhaustively up to a digit bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScanTier {
    pub x_len: usize,
    pub y_len: usize,
    pub max_digit: u64,
}

/// Every pair of words of length ≤ 3 with digits ≤ 50.
pub fn default_tiers() -> Vec<ScanTier> {
    let mut tiers = Vec::new();
    for x_len in 1..=3 {
        for y_len in 1..=3 {
            tiers.push(ScanTier {
                x_len,
                y_len,
                max_digit: 50,
            });
        }
    }
    tiers
}

/// Convergent matrix entries of a word as floats, with `μ` and `1/|I|`.
#[derive(Default)]
struct FloatWords {
    p_prev: Vec<f64>,
    p: Vec<f64>,
    q_prev: Vec<f64>,
    q: Vec<f64>,
    /// `1/(ln 2 · μ(I(w)))`
    inv_measure: Vec<f64>,
    length_den: Vec<f64>,
}

impl FloatWords {
    fn of(words: &[Vec<u64>]) -> Self {
        let mut out = FloatWords::default();
        for w in words {
            let s = SmallWord::of(w);
            out.p_prev.push(s.p_prev as f64);
            out.p.push(s.p as f64);
            out.q_prev.push(s.q_prev as f64);
            out.q.push(s.q as f64);
            out.inv_measure.push(1.0 / (LN_2 * s.measure()));
            out.length_den.push(s.length_denominator() as f64);
        }
        out
    }
}

/// `ln(1 + 1/N) = 2 artanh(z)` with `z = 1/(2N + 1) ≤ 1/19` for every
/// concatenation of two words; seven odd terms reach `f64` precision.
#[inline(always)]
fn ln_1p_recip(n: f64) -> f64 {
    let z = 1.0 / (2.0 * n + 1.0);
    let z2 = z * z;
    let series = 1.0
        + z2 * (1.0 / 3.0
            + z2 * (1.0 / 5.0
                + z2 * (1.0 / 7.0
                    + z2 * (1.0 / 9.0 + z2 * (1.0 / 11.0 + z2 * (1.0 / 13.0 + z2 / 15.0))))));
    2.0 * z * series
}

const LANES: usize = 8;

/// Both ratios of `x y` before the `x` factors; `y` is
/// `(p', p, q', q, 1/(ln 2 μ), 1/|I|)`.
#[inline(always)]
fn pair_ratios<const EVEN: bool>(x: (f64, f64, f64, f64), y: [f64; 6]) -> (f64, f64) {
    let (xpp, xp, xqp, xq) = x;
    let [ypp, yp, yqp, yq, inv_measure, length_den] = y;
    let pp = xpp * ypp + xp * yqp;
    let p = xpp * yp + xp * yq;
    let qp = xqp * ypp + xq * yqp;
    let q = xqp * yp + xq * yq;
    let n = if EVEN {
        (q + qp) * (q + p)
    } else {
        q * (q + qp + p + pp)
    };
    (ln_1p_recip(n) * inv_measure, length_den / (q * (q + qp)))
}

#[inline(always)]
fn pair_ratios_at(x: (f64, f64, f64, f64), even: bool, y: &FloatWords, j: usize) -> (f64, f64) {
    let yj = [
        y.p_prev[j],
        y.p[j],
        y.q_prev[j],
        y.q[j],
        y.inv_measure[j],
        y.length_den[j],
    ];
    if even {
        pair_ratios::<true>(x, yj)
    } else {
        pair_ratios::<false>(x, yj)
    }
}

/// Extremes of one row, for both ratios, before the `x` factors.
fn row_extremes<const EVEN: bool>(x: (f64, f64, f64, f64), y: &FloatWords) -> [f64; 4] {
    let ny = y.q.len();
    let (mut g, mut l) = (vec![0.0; ny], vec![0.0; ny]);
    let cols = (
        &y.p_prev[..ny],
        &y.p[..ny],
        &y.q_prev[..ny],
        &y.q[..ny],
        &y.inv_measure[..ny],
        &y.length_den[..ny],
    );
    for j in 0..ny {
        (g[j], l[j]) = pair_ratios::<EVEN>(
            x,
            [
                cols.0[j], cols.1[j], cols.2[j], cols.3[j], cols.4[j], cols.5[j],
            ],
        );
    }
    let (g_min, g_max) = extremes(&g);
    let (l_min, l_max) = extremes(&l);
    [g_min, g_max, l_min, l_max]
}

fn extremes(v: &[f64]) -> (f64, f64) {
    let mut lo = [f64::INFINITY; LANES];
    let mut hi = [f64::NEG_INFINITY; LANES];
    let chunks = v.chunks_exact(LANES);
    let rest = chunks.remainder();
    for c in chunks {
        for lane in 0..LANES {
            lo[lane] = if c[lane] < lo[lane] {
                c[lane]
            } else {
                lo[lane]
            };
            hi[lane] = if c[lane] > hi[lane] {
                c[lane]
            } else {
                hi[lane]
            };
        }
    }
    let fold = |a: &[f64], init: f64, f: fn(f64, f64) -> f64| a.iter().copied().fold(init, f);
    (
        fold(rest, fold(&lo, f64::INFINITY, f64::min), f64::min),
        fold(rest, fold(&hi, f64::NEG_INFINITY, f64::max), f64::max),
    )
}

/// Quasi-independence and length ratios over every pair in the tiers.
///
/// Convergent products are formed in `f64`; the relative error of each ratio
/// stays near `10⁻¹⁵`, far below the distance of the extremes to the bounds.
/// Rows whose extremes leave a bound are rescanned pair by pair.
pub fn scan_quasi_independence(tiers: &[ScanTier]) -> (BoundFamily, BoundFamily) {
    let mut result = (
        BoundFamily::new("gauss_measure_ratio", (QI_LOWER, QI_UPPER)),
        BoundFamily::new("length_ratio", (0.5, 2.0)),
    );
    for tier in tiers {
        let xs = words_u64(tier.x_len, tier.max_digit);
        let ys = words_u64(tier.y_len, tier.max_digit);
        let (fx, fy) = (FloatWords::of(&xs), FloatWords::of(&ys));
        let even = (tier.x_len + tier.y_len) % 2 == 0;
        let x_of = |i: usize| (fx.p_prev[i], fx.p[i], fx.q_prev[i], fx.q[i]);
        // per x: the two ratios are the row values times these factors
        let scale = |i: usize| (fx.inv_measure[i] * LN_2, fx.length_den[i]);
        let rows: Vec<[f64; 4]> = (0..xs.len())
            .into_par_iter()
            .map(|i| {
                let [g0, g1, l0, l1] = if even {
                    row_extremes::<true>(x_of(i), &fy)
                } else {
                    row_extremes::<false>(x_of(i), &fy)
                };
                let (gs, ls) = scale(i);
                [g0 * gs, g1 * gs, l0 * ls, l1 * ls]
            })
            .collect();
        let fams = [&mut result.0, &mut result.1];
        for (f, fam) in fams.into_iter().enumerate() {
            let (lo, hi) = fam.bound;
            let mut part = BoundFamily::new(&fam.family, fam.bound);
            part.count = (xs.len() * ys.len()) as u64;
            let exact_row = |i: usize, j: usize| {
                let (g, l) = pair_ratios_at(x_of(i), even, &fy, j);
                let (gs, ls) = scale(i);
                if f == 0 {
                    g * gs
                } else {
                    l * ls
                }
            };
            let describe =
                |i: usize, j: usize| format!("x=({}) y=({})", join(&xs[i]), join(&ys[j]));
            let locate = |i: usize, target: f64| {
                (0..ys.len())
                    .find(|&j| exact_row(i, j) == target)
                    .unwrap_or(0)
            };
            let (mut argmin, mut argmax) = (0, 0);
            for (i, r) in rows.iter().enumerate() {
                let (min, max) = (r[2 * f], r[2 * f + 1]);
                if min < part.min {
                    (part.min, argmin) = (min, i);
                }
                if max > part.max {
                    (part.max, argmax) = (max, i);
                }
                if min < lo || max > hi {
                    for j in 0..ys.len() {
                        let v = exact_row(i, j);
                        if !(lo..=hi).contains(&v) {
                            part.violations += 1;
                            part.first_violation.get_or_insert_with(|| describe(i, j));
                        }
                    }
                }
            }
            part.argmin = describe(argmin, locate(argmin, part.min));
            part.argmax = describe(argmax, locate(argmax, part.max));
            *fam = std::mem::replace(fam, BoundFamily::new("", (0.0, 0.0))).merge(part);
        }
    }
    result
}

fn join(w: &[u64]) -> String {
    w.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Every dominated pair `y ≤ x` of length `len` with digits ≤ `max_digit`.
pub fn scan_comparison_exhaustive(len: usize, max_digit: u64) -> BoundFamily {
    let mut family = BoundFamily::new(
        &format!("comparison_exhaustive(len {len}, digits ≤ {max_digit})"),
        (0.0, 1.0),
    );
    let words = words_u64(len, max_digit);
    let n: Vec<u128> = words
        .iter()
        .map(|w| SmallWord::of(w).measure_denominator())
        .collect();
    let index = |w: &[u64]| {
        w.iter().fold(0usize, |acc, &d| {
            acc * max_digit as usize + (d as usize - 1)
        })
    };
    for (x, &nx) in words.iter().zip(&n) {
        for y in words_u64_dominated(x) {
            let ny = n[index(&y)];
            // μ(x)/μ(y) ≤ 1 iff N(x) ≥ N(y)
            let ratio = ((1.0 / nx as f64).ln_1p()) / ((1.0 / ny as f64).ln_1p());
            family.observe(ratio, nx >= ny, || {
                format!("x=({}) y=({})", join(x), join(&y))
            });
        }
    }
    family
}

fn words_u64_dominated(x: &[u64]) -> Vec<Vec<u64>> {
    let mut words = vec![Vec::new()];
    for &xi in x {
        words = words
            .into_iter()
            .flat_map(|w| {
                (1..=xi).map(move |a| {
                    let mut next = w.clone();
                    next.push(a);
                    next
                })
            })
            .collect();
    }
    words
}

/// Random dominated pairs with lengths up to `max_len` and digits up to
/// `max_digit`, decided with big integers.
pub fn scan_comparison_fuzz(
    count: usize,
    max_len: usize,
    max_digit: u64,
    seed: u64,
) -> Result<BoundFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut family = BoundFamily::new(
        &format!("comparison_fuzz(len ≤ {max_len}, digits ≤ {max_digit})"),
        (0.0, 1.0),
    );
    for _ in 0..count {
        let len = rng.random_range(1..=max_len);
        let x: Vec<u64> = (0..len).map(|_| rng.random_range(1..=max_digit)).collect();
        let y: Vec<u64> = x.iter().map(|&xi| rng.random_range(1..=xi)).collect();
        let (dx, dy) = (digits(&x)?, digits(&y)?);
        let ok = comparison_check(&dx, &dy)?;
        let ratio = measure(&dx)? / measure(&dy)?;
        family.observe(ratio, ok, || format!("x=({}) y=({})", join(&x), join(&y)));
    }
    Ok(family)
}

/// The deletion ratio over every word of length ≤ `max_len`, digits ≤ `max_digit`, every `k`.
pub fn scan_q_ratio(max_len: usize, max_digit: u64) -> Result<BoundFamily> {
    let mut family = BoundFamily::new(
        &format!("q_ratio(len ≤ {max_len}, digits ≤ {max_digit})"),
        (0.5, 1.0),
    );
    for len in 1..=max_len {
        for w in words_u64(len, max_digit) {
            let dw = digits(&w)?;
            for k in 1..=len {
                let r = q_ratio_bounds(&dw, k)?;
                // normalized by a_k + 1, so the bound reads [1/2, 1]
                let scaled = (&r.ratio / &r.upper).to_f64().unwrap_or(f64::NAN);
                family.observe(scaled, r.holds(), || format!("word=({}) k={k}", join(&w)));
            }
        }
    }
    Ok(family)
}

/// Optimality families: `x̃ = ỹ = (a)` tends to `log 2`, `x̃ = (a), ỹ = (1, a)` to `2 log 2`.
pub fn extremal_ratios(a: u64) -> Result<(f64, f64)> {
    let low = quasi_independence_ratio(&WordPair::from_u64s(&[a], &[a])?)?;
    let high = quasi_independence_ratio(&WordPair::from_u64s(&[a], &[1, a])?)?;
    Ok((low, high))
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub families: Vec<BoundFamily>,
    pub extremal: Vec<ExtremalCheck>,
    pub mixing: Vec<MixingCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalCheck {
    pub family: String,
    pub a: u64,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
}

impl ExtremalCheck {
    pub fn passed(&self) -> bool {
        (self.value - self.target).abs() <= self.tolerance
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingCheck {
    pub x: String,
    pub y: String,
    pub gap: u32,
    pub digit_cap: u64,
    pub bracket: MixingBracket,
    pub ratio_bracket: (f64, f64),
    pub midpoint_error: f64,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(BoundFamily::passed)
            && self.extremal.iter().all(ExtremalCheck::passed)
            && self
                .mixing
                .iter()
                .all(|m| m.bracket.lower <= m.bracket.upper)
    }
}

/// The full set of scans behind the `verify-bounds` command.
pub fn standard_bounds_report() -> Result<BoundsReport> {
    let (gauss, lengths) = scan_quasi_independence(&default_tiers());
    let mut families = vec![gauss, lengths];
    for (len, max_digit) in [(1, 20), (2, 20), (3, 20), (4, 10), (5, 6), (6, 4)] {
        families.push(scan_comparison_exhaustive(len, max_digit));
    }
    families.push(scan_comparison_fuzz(10_000, 6, 20, 1)?);
    families.push(scan_comparison_fuzz(2_000, 12, 1_000_000_000, 2)?);
    families.push(scan_q_ratio(5, 6)?);

    let a = 1000;
    let (low, high) = extremal_ratios(a)?;
    let triple = |w: &[u64]| -> Result<f64> { multi_ratio(&[digits(w)?, digits(w)?, digits(w)?]) };
    let extremal = vec![
        ExtremalCheck {
            family: "(a),(a)".into(),
            a,
            value: low,
            target: QI_LOWER,
            tolerance: 1e-3,
        },
        ExtremalCheck {
            family: "(a),(1,a)".into(),
            a,
            value: high,
            target: QI_UPPER,
            tolerance: 1e-2,
        },
        ExtremalCheck {
            family: "(a),(a),(a)".into(),
            a,
            value: triple(&[a])?,
            target: QI_LOWER.powi(2),
            tolerance: 0.01 * QI_LOWER.powi(2),
        },
        ExtremalCheck {
            family: "(1,a),(1,a),(1,a)".into(),
            a,
            value: triple(&[1, a])?,
            target: QI_UPPER.powi(2),
            tolerance: 0.01 * QI_UPPER.powi(2),
        },
    ];

    let pair = WordPair::from_u64s(&[1], &[1])?;
    let mixing = [2u32, 6]
        .iter()
        .map(|&gap| {
            let bracket = mixing_bracket(&pair, gap, 1000)?;
            Ok(MixingCheck {
                x: format_word(pair.x()),
                y: format_word(pair.y()),
                gap,
                digit_cap: 1000,
                ratio_bracket: bracket.ratio_bracket(),
                midpoint_error: bracket.midpoint_error(),
                bracket,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundsReport {
        families,
        extremal,
        mixing,
    })
}
