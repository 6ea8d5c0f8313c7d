//! Inclusion–exclusion identities for counting how many events of a family
//! occur, checked by exhaustive enumeration on finite probability spaces.
//!
//! With `N_A(ω) = ♯{i : ω ∈ A_i}` and `S_r = Σ_{|I|=r} P(∩_{i∈I} A_i)`:
//!
//! * `P(N_A ≥ 1) = Σ_{r≥1} (-1)^{r-1} S_r`
//! * `P(N_A ≥ k) = Σ_{r≥k} (-1)^{r-k} C(r-1, k-1) S_r`
//! * for a second family with `A_i ∩ B_i = ∅`,
//!   `P(N_A ≥ k, N_B ≥ k) = Σ_{r≥2k} (-1)^r Σ_{a+b=r; a,b≥k} C(a-1,k-1) C(b-1,k-1) Σ_{|I|=a,|J|=b, I∩J=∅} P(A_I ∩ B_J)`,
//!   whose `k = 1` case is the plain pair formula.
//!
//! Intersection probabilities come from a superset-sum transform over the
//! event membership masks, so a family of `n` events costs `O(n 2^n)` (or
//! `O(n 3^n)` for pairs) after one pass over the outcomes.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use twofloat::TwoFloat;

use crate::cf_core::{Cylinder, Rational};
use crate::error::{Error, Result};
use crate::theory::pi_x;

/// Largest single family the identities accept.
pub const MAX_EVENTS: usize = 12;
/// Largest paired family the identities accept.
pub const MAX_PAIRED_EVENTS: usize = 10;

/// Outcome weights: exact rationals, or double-double floats compared with a
/// tolerance.
pub trait Weight: Clone + Send + Sync + fmt::Display + 'static {
    fn zero() -> Self;
    fn add_assign(&mut self, other: &Self);
    fn sub_assign(&mut self, other: &Self);
    fn scaled(&self, c: u64) -> Self;
    fn is_negative(&self) -> bool;
    fn agrees(lhs: &Self, rhs: &Self) -> bool;
    fn to_f64(&self) -> f64;
}

impl Weight for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn scaled(&self, c: u64) -> Self {
        self * Rational::from_integer(BigInt::from(c))
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn agrees(lhs: &Self, rhs: &Self) -> bool {
        lhs == rhs
    }
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Absolute tolerance for double-double weighted spaces.
pub const FLOAT_TOLERANCE: f64 = 1e-15;

impl Weight for TwoFloat {
    fn zero() -> Self {
        TwoFloat::from(0.0)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += *other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= *other;
    }
    fn scaled(&self, c: u64) -> Self {
        *self * c as f64
    }
    fn is_negative(&self) -> bool {
        self.is_sign_negative() && *self != TwoFloat::from(0.0)
    }
    fn agrees(lhs: &Self, rhs: &Self) -> bool {
        (*lhs - *rhs).abs().hi() <= FLOAT_TOLERANCE
    }
    fn to_f64(&self) -> f64 {
        self.hi() + self.lo()
    }
}

/// Words over `{1, …, alphabet}` with one weight each.
#[derive(Clone, Debug)]
pub struct FiniteProbSpace<W> {
    label: String,
    outcomes: Vec<Vec<u32>>,
    weights: Vec<W>,
}

/// Every word of length `len` over `{1, …, alphabet}`, lexicographic.
pub fn all_words(alphabet: u32, len: usize) -> Vec<Vec<u32>> {
    let mut words = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w| {
                (1..=alphabet).map(move |a| {
                    let mut next = w.clone();
                    next.push(a);
                    next
                })
            })
            .collect();
    }
    words
}

fn check_shape(outcomes: &[Vec<u32>], weights: usize) -> Result<()> {
    if outcomes.is_empty() || outcomes.len() != weights {
        return Err(Error::InvalidParameter(format!(
            "{} outcomes but {} weights",
            outcomes.len(),
            weights
        )));
    }
    Ok(())
}

impl<W> FiniteProbSpace<W> {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn outcomes(&self) -> &[Vec<u32>] {
        &self.outcomes
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

impl FiniteProbSpace<Rational> {
    /// Weights must be non-negative and sum to exactly 1.
    pub fn new(
        label: impl Into<String>,
        outcomes: Vec<Vec<u32>>,
        weights: Vec<Rational>,
    ) -> Result<Self> {
        check_shape(&outcomes, weights.len())?;
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::InvalidParameter("negative weight".into()));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(FiniteProbSpace {
            label: label.into(),
            outcomes,
            weights,
        })
    }

    /// Scales non-negative, not all zero weights to total 1.
    pub fn normalized(
        label: impl Into<String>,
        outcomes: Vec<Vec<u32>>,
        weights: Vec<Rational>,
    ) -> Result<Self> {
        check_shape(&outcomes, weights.len())?;
        let total: Rational = weights.iter().sum();
        if !Signed::is_positive(&total) {
            return Err(Error::InvalidParameter(
                "weights have no positive mass".into(),
            ));
        }
        let weights = weights.into_iter().map(|w| w / &total).collect();
        Self::new(label, outcomes, weights)
    }

    pub fn uniform(alphabet: u32, len: usize) -> Result<Self> {
        let outcomes = all_words(alphabet, len);
        let w = Rational::new(One::one(), BigInt::from(outcomes.len()));
        let weights = vec![w; outcomes.len()];
        Self::new(format!("uniform({alphabet}^{len})"), outcomes, weights)
    }

    /// Independent coordinates with the given marginal on `{1, …, m}`.
    pub fn product(label: impl Into<String>, marginal: &[Rational], len: usize) -> Result<Self> {
        let outcomes = all_words(marginal.len() as u32, len);
        let weights = outcomes
            .iter()
            .map(|w| {
                w.iter()
                    .map(|&a| marginal[a as usize - 1].clone())
                    .product()
            })
            .collect();
        Self::normalized(label, outcomes, weights)
    }

    /// Product of the digit law restricted to `{1, …, alphabet}`; each `π_x`
    /// enters as the exact value of its nearest double.
    pub fn pi_product(alphabet: u32, len: usize) -> Result<Self> {
        let marginal = (1..=alphabet as u64)
            .map(|x| exact_rational(pi_x(x).expect("positive digit")))
            .collect::<Vec<_>>();
        Self::product(format!("pi_product({alphabet}^{len})"), &marginal, len)
    }

    /// Words weighted by the Lebesgue length of their cylinder.
    pub fn cylinder_lengths(alphabet: u32, len: usize) -> Result<Self> {
        let outcomes = all_words(alphabet, len);
        let weights = outcomes
            .iter()
            .map(|w| cylinder_of(w).length())
            .collect::<Result<Vec<_>>>()?;
        Self::normalized(
            format!("cylinder_lengths({alphabet}^{len})"),
            outcomes,
            weights,
        )
    }

    /// Words weighted by the Gauss measure of their cylinder, each measure
    /// taken as the exact value of its nearest double.
    pub fn gauss_cylinders_exact(alphabet: u32, len: usize) -> Result<Self> {
        let outcomes = all_words(alphabet, len);
        let weights = outcomes
            .iter()
            .map(|w| cylinder_of(w).gauss_measure().map(exact_rational))
            .collect::<Result<Vec<_>>>()?;
        Self::normalized(
            format!("gauss_cylinders_exact({alphabet}^{len})"),
            outcomes,
            weights,
        )
    }

    /// Integer weights in `1..=100` drawn from `seed`.
    pub fn random(alphabet: u32, len: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let outcomes = all_words(alphabet, len);
        let weights = outcomes
            .iter()
            .map(|_| Rational::from_integer(BigInt::from(rng.random_range(1..=100u32))))
            .collect();
        Self::normalized(
            format!("random({alphabet}^{len}, seed {seed})"),
            outcomes,
            weights,
        )
    }
}

impl FiniteProbSpace<TwoFloat> {
    /// Words weighted by the Gauss measure of their cylinder, normalized in
    /// double-double arithmetic.
    pub fn gauss_cylinders(alphabet: u32, len: usize) -> Result<Self> {
        let outcomes = all_words(alphabet, len);
        let raw = outcomes
            .iter()
            .map(|w| cylinder_of(w).gauss_measure().map(TwoFloat::from))
            .collect::<Result<Vec<_>>>()?;
        let total = raw.iter().fold(TwoFloat::from(0.0), |acc, &w| acc + w);
        let weights = raw.into_iter().map(|w| dd_div(w, total)).collect();
        Ok(FiniteProbSpace {
            label: format!("gauss_cylinders({alphabet}^{len})"),
            outcomes,
            weights,
        })
    }
}

/// `a / b` refined by one correction step; the crate's own quotient is only
/// accurate to about one double.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q = a / b;
    q + (a - q * b) / b
}

fn cylinder_of(word: &[u32]) -> Cylinder {
    let digits: Vec<u64> = word.iter().map(|&a| a as u64).collect();
    Cylinder::from_u64s(&digits).expect("letters are positive")
}

fn exact_rational(x: f64) -> Rational {
    Rational::from_float(x).expect("finite")
}

type Predicate = Arc<dyn Fn(&[u32]) -> bool + Send + Sync>;

/// `n` indexed events, each a predicate on outcomes.
#[derive(Clone)]
pub struct EventFamily {
    label: String,
    events: Vec<Predicate>,
}

impl fmt::Debug for EventFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EventFamily({}, n={})", self.label, self.events.len())
    }
}

impl EventFamily {
    pub fn from_fn(
        label: impl Into<String>,
        n: usize,
        f: impl Fn(usize, &[u32]) -> bool + Send + Sync + 'static,
    ) -> Self {
        let f = Arc::new(f);
        let events = (0..n)
            .map(|i| {
                let f = Arc::clone(&f);
                Arc::new(move |w: &[u32]| f(i, w)) as Predicate
            })
            .collect();
        EventFamily {
            label: label.into(),
            events,
        }
    }

    /// `A_i = {w_i = value}` for `i < len`.
    pub fn coordinate(len: usize, value: u32) -> Self {
        Self::from_fn(format!("coordinate(value {value})"), len, move |i, w| {
            w[i] == value
        })
    }

    /// `A_i = {w_1 = i + 1}`: pairwise disjoint.
    pub fn first_letter(n: usize) -> Self {
        Self::from_fn("first_letter", n, |i, w| w[0] as usize == i + 1)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_fn("empty", n, |_, _| false)
    }

    /// `A_i = {w_i > w_{i+1}}`, indices cyclic.
    pub fn descents(len: usize) -> Self {
        Self::from_fn("descents", len, move |i, w| w[i] > w[(i + 1) % len])
    }

    /// `B_i = {w_i < w_{i+1}}`, indices cyclic.
    pub fn ascents(len: usize) -> Self {
        Self::from_fn("ascents", len, move |i, w| w[i] < w[(i + 1) % len])
    }

    /// Each outcome joins each event independently with probability `density`.
    pub fn random<W>(space: &FiniteProbSpace<W>, n: usize, density: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sets: Vec<HashSet<Vec<u32>>> = (0..n)
            .map(|_| {
                space
                    .outcomes
                    .iter()
                    .filter(|_| rng.random_bool(density))
                    .cloned()
                    .collect()
            })
            .collect();
        Self::from_sets(
            format!("random(n {n}, density {density}, seed {seed})"),
            sets,
        )
    }

    /// Two families with `A_i ∩ B_i = ∅`: each outcome lands in `A_i`, `B_i`
    /// or neither, uniformly.
    pub fn random_disjoint_pair<W>(
        space: &FiniteProbSpace<W>,
        n: usize,
        seed: u64,
    ) -> (Self, Self) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![HashSet::new(); n];
        let mut b = vec![HashSet::new(); n];
        for w in &space.outcomes {
            for i in 0..n {
                match rng.random_range(0..3u8) {
                    0 => {
                        a[i].insert(w.clone());
                    }
                    1 => {
                        b[i].insert(w.clone());
                    }
                    _ => {}
                }
            }
        }
        let label = format!("random_disjoint(n {n}, seed {seed})");
        (
            Self::from_sets(format!("{label}/A"), a),
            Self::from_sets(format!("{label}/B"), b),
        )
    }

    fn from_sets(label: String, sets: Vec<HashSet<Vec<u32>>>) -> Self {
        let events = sets
            .into_iter()
            .map(|set| Arc::new(move |w: &[u32]| set.contains(w)) as Predicate)
            .collect();
        EventFamily { label, events }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn contains(&self, i: usize, word: &[u32]) -> bool {
        (self.events[i])(word)
    }

    /// Bit `i` set iff `word ∈ A_i`.
    pub fn mask(&self, word: &[u32]) -> u32 {
        self.events
            .iter()
            .enumerate()
            .fold(0, |m, (i, e)| if e(word) { m | 1 << i } else { m })
    }
}

#[derive(Clone, Debug)]
pub struct Evaluation<W> {
    pub lhs: W,
    pub rhs: W,
}

impl<W: Weight> Evaluation<W> {
    pub fn holds(&self) -> bool {
        W::agrees(&self.lhs, &self.rhs)
    }
}

fn check_size(n: usize, bound: usize) -> Result<()> {
    if n > bound {
        return Err(Error::FamilyTooLarge { size: n, bound });
    }
    Ok(())
}

/// `Σ_r ± coeff_r x_r`.
fn signed_sum<W: Weight>(terms: impl Iterator<Item = (bool, u64, W)>) -> W {
    let mut total = W::zero();
    for (negative, coeff, x) in terms {
        let t = x.scaled(coeff);
        if negative {
            total.sub_assign(&t);
        } else {
            total.add_assign(&t);
        }
    }
    total
}

/// Everything the single-family identities need, from one pass over the space.
#[derive(Clone, Debug)]
pub struct SingleSums<W> {
    /// `S_r = Σ_{|I|=r} P(A_I)`
    s: Vec<W>,
    /// `P(N_A = c)`, summed directly over outcomes
    by_count: Vec<W>,
}

impl<W: Weight> SingleSums<W> {
    pub fn new(space: &FiniteProbSpace<W>, a: &EventFamily) -> Result<Self> {
        let n = a.len();
        check_size(n, MAX_EVENTS)?;
        let mut buckets = vec![W::zero(); 1 << n];
        let mut by_count = vec![W::zero(); n + 1];
        for (w, p) in space.outcomes.iter().zip(&space.weights) {
            let m = a.mask(w);
            buckets[m as usize].add_assign(p);
            by_count[m.count_ones() as usize].add_assign(p);
        }
        // superset sums: g[I] = P(A_I)
        for i in 0..n {
            for m in 0..1usize << n {
                if m & (1 << i) == 0 {
                    let upper = buckets[m | 1 << i].clone();
                    buckets[m].add_assign(&upper);
                }
            }
        }
        let mut s = vec![W::zero(); n + 1];
        for (m, v) in buckets.iter().enumerate() {
            s[m.count_ones() as usize].add_assign(v);
        }
        Ok(SingleSums { s, by_count })
    }

    pub fn n(&self) -> usize {
        self.s.len() - 1
    }

    pub fn intersection_sum(&self, r: usize) -> &W {
        &self.s[r]
    }

    /// `P(N_A ≥ k)` against `Σ_{r≥k} (-1)^{r-k} C(r-1,k-1) S_r`.
    pub fn at_least_k(&self, k: usize) -> Result<Evaluation<W>> {
        let n = self.n();
        if k == 0 || k > n.max(1) {
            return Err(Error::InvalidParameter(format!(
                "need 1 ≤ k ≤ n, got k={k}, n={n}"
            )));
        }
        let mut lhs = W::zero();
        for v in &self.by_count[k.min(n + 1)..] {
            lhs.add_assign(v);
        }
        let rhs = signed_sum((k..=n).map(|r| {
            (
                (r - k) % 2 == 1,
                binomial(r as u64 - 1, k as u64 - 1),
                self.s[r].clone(),
            )
        }));
        Ok(Evaluation { lhs, rhs })
    }

    /// Truncations `Σ_{r=1}^{m} (-1)^{r-1} S_r` for `m = 1..=n`.
    pub fn bonferroni(&self) -> Vec<W> {
        let mut acc = W::zero();
        (1..=self.n())
            .map(|r| {
                if r % 2 == 1 {
                    acc.add_assign(&self.s[r]);
                } else {
                    acc.sub_assign(&self.s[r]);
                }
                acc.clone()
            })
            .collect()
    }
}

/// `P(N_A ≥ k)` against `Σ_{r≥k} (-1)^{r-k} C(r-1,k-1) S_r`.
pub fn ie_at_least_k<W: Weight>(
    space: &FiniteProbSpace<W>,
    a: &EventFamily,
    k: usize,
) -> Result<Evaluation<W>> {
    SingleSums::new(space, a)?.at_least_k(k)
}

/// `P(∪ A_i)` against `Σ_{r≥1} (-1)^{r-1} S_r`.
pub fn ie_at_least_one<W: Weight>(
    space: &FiniteProbSpace<W>,
    a: &EventFamily,
) -> Result<Evaluation<W>> {
    ie_at_least_k(space, a, 1)
}

/// Truncations of the alternating series for `P(∪ A_i)`; they alternately
/// over- and under-estimate it.
pub fn bonferroni_partial_sums<W: Weight>(
    space: &FiniteProbSpace<W>,
    a: &EventFamily,
) -> Result<Vec<W>> {
    Ok(SingleSums::new(space, a)?.bonferroni())
}

/// Everything the paired identities need, from one pass over the space.
#[derive(Clone, Debug)]
pub struct PairSums<W> {
    /// `T[a][b] = Σ_{|I|=a, |J|=b, I∩J=∅} P(A_I ∩ B_J)`
    t: Vec<Vec<W>>,
    /// `P(N_A = a, N_B = b)`, summed directly over outcomes
    counts: Vec<Vec<W>>,
}

impl<W: Weight> PairSums<W> {
    pub fn new(space: &FiniteProbSpace<W>, a: &EventFamily, b: &EventFamily) -> Result<Self> {
        let n = a.len();
        if b.len() != n {
            return Err(Error::InvalidParameter(format!(
                "paired families differ in size: {} vs {}",
                n,
                b.len()
            )));
        }
        check_size(n, MAX_PAIRED_EVENTS)?;
        let pow3: Vec<usize> = (0..=n).map(|i| 3usize.pow(i as u32)).collect();
        // per index: 0 neither, 1 in A_i, 2 in B_i
        let mut h = vec![W::zero(); pow3[n]];
        let mut counts = vec![vec![W::zero(); n + 1]; n + 1];
        for (w, p) in space.outcomes.iter().zip(&space.weights) {
            let (ma, mb) = (a.mask(w), b.mask(w));
            if ma & mb != 0 {
                let index = (ma & mb).trailing_zeros() as usize;
                return Err(Error::NotDisjoint {
                    index,
                    outcome: w.clone(),
                });
            }
            let code: usize = (0..n)
                .map(|i| {
                    pow3[i]
                        * if ma >> i & 1 == 1 {
                            1
                        } else if mb >> i & 1 == 1 {
                            2
                        } else {
                            0
                        }
                })
                .sum();
            h[code].add_assign(p);
            counts[ma.count_ones() as usize][mb.count_ones() as usize].add_assign(p);
        }
        // afterwards h[pattern] = P(A_I ∩ B_J), a 0 digit meaning unconstrained
        for i in 0..n {
            for code in 0..pow3[n] {
                if (code / pow3[i]) % 3 == 0 {
                    let mut v = h[code + pow3[i]].clone();
                    v.add_assign(&h[code + 2 * pow3[i]]);
                    h[code].add_assign(&v);
                }
            }
        }
        let mut t = vec![vec![W::zero(); n + 1]; n + 1];
        for (code, v) in h.iter().enumerate() {
            let (mut ones, mut twos, mut c) = (0, 0, code);
            for _ in 0..n {
                match c % 3 {
                    1 => ones += 1,
                    2 => twos += 1,
                    _ => {}
                }
                c /= 3;
            }
            t[ones][twos].add_assign(v);
        }
        Ok(PairSums { t, counts })
    }

    pub fn n(&self) -> usize {
        self.t.len() - 1
    }

    pub fn intersection_sum(&self, a: usize, b: usize) -> &W {
        &self.t[a][b]
    }

    /// `P(N_A ≥ k, N_B ≥ k)` against the double alternating series.
    pub fn at_least_k(&self, k: usize) -> Result<Evaluation<W>> {
        let n = self.n();
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if 2 * k > n {
            return Err(Error::InvalidParameter(format!(
                "need 2k ≤ n, got k={k}, n={n}"
            )));
        }
        let mut lhs = W::zero();
        for (na, row) in self.counts.iter().enumerate() {
            for (nb, v) in row.iter().enumerate() {
                if na >= k && nb >= k {
                    lhs.add_assign(v);
                }
            }
        }
        let kk = k as u64 - 1;
        let terms = (k..=n)
            .flat_map(|x| (k..=n - x).map(move |y| (x, y)))
            .map(|(x, y)| {
                let coeff = binomial(x as u64 - 1, kk) * binomial(y as u64 - 1, kk);
                ((x + y) % 2 == 1, coeff, self.t[x][y].clone())
            });
        Ok(Evaluation {
            lhs,
            rhs: signed_sum(terms),
        })
    }
}

/// `P(N_A ≥ k, N_B ≥ k)` for pointwise disjoint families against the double
/// alternating series.
pub fn ie_pair_at_least_k<W: Weight>(
    space: &FiniteProbSpace<W>,
    a: &EventFamily,
    b: &EventFamily,
    k: usize,
) -> Result<Evaluation<W>> {
    PairSums::new(space, a, b)?.at_least_k(k)
}

/// `P(N_A ≥ 1, N_B ≥ 1)` against `Σ_{r≥2} (-1)^r Σ_{a+b=r} T[a][b]`.
pub fn ie_pair<W: Weight>(
    space: &FiniteProbSpace<W>,
    a: &EventFamily,
    b: &EventFamily,
) -> Result<Evaluation<W>> {
    if a.len() < 2 {
        return Err(Error::InvalidParameter(
            "paired identity needs n ≥ 2".into(),
        ));
    }
    ie_pair_at_least_k(space, a, b, 1)
}

/// Pointwise `1_{N_A ≥ 1}(w) = Σ_{r≥1} (-1)^{r-1} Σ_{|I|=r} 1_{A_I}(w)`,
/// summing every subset literally.
pub fn indicator_identity(word: &[u32], a: &EventFamily) -> Result<bool> {
    let n = a.len();
    check_size(n, MAX_EVENTS)?;
    let mask = a.mask(word);
    let lhs = i64::from(mask != 0);
    let mut rhs = 0i64;
    for subset in 1u32..1 << n {
        if subset & mask == subset {
            rhs += if subset.count_ones() % 2 == 1 { 1 } else { -1 };
        }
    }
    Ok(lhs == rhs)
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub inputs: Value,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> Self {
        SuiteReport {
            suite: suite.into(),
            cases: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record<W: Weight>(&mut self, inputs: Value, outcome: Result<Evaluation<W>>) {
        self.cases += 1;
        match outcome {
            Ok(e) if e.holds() => {}
            Ok(e) => self.failures.push(Failure {
                inputs,
                lhs: e.lhs.to_string(),
                rhs: e.rhs.to_string(),
            }),
            Err(err) => self.failures.push(Failure {
                inputs,
                lhs: format!("error: {err}"),
                rhs: String::new(),
            }),
        }
    }

    fn record_flag(&mut self, inputs: Value, ok: bool, detail: String) {
        self.cases += 1;
        if !ok {
            self.failures.push(Failure {
                inputs,
                lhs: detail,
                rhs: String::new(),
            });
        }
    }

    /// Every single-family identity for `k = 1..=n`, the Bonferroni bracketing
    /// and, for up to `indicator_outcomes` outcomes, the pointwise identity.
    pub fn check_single<W: Weight>(
        &mut self,
        space: &FiniteProbSpace<W>,
        a: &EventFamily,
        indicator_outcomes: usize,
    ) {
        let base = |identity: &str, k: usize| json!({"identity": identity, "space": space.label(), "A": a.label(), "n": a.len(), "k": k});
        match SingleSums::new(space, a) {
            Ok(sums) => {
                for k in 1..=a.len() {
                    self.record(base("at_least_k", k), sums.at_least_k(k));
                }
                let exact = sums
                    .at_least_k(1)
                    .map(|e| e.lhs.to_f64())
                    .unwrap_or(f64::NAN);
                let partials: Vec<f64> = sums.bonferroni().iter().map(W::to_f64).collect();
                let bracketed = partials.iter().enumerate().all(|(i, &p)| {
                    if i % 2 == 0 {
                        p >= exact - FLOAT_TOLERANCE
                    } else {
                        p <= exact + FLOAT_TOLERANCE
                    }
                });
                self.record_flag(
                    base("bonferroni", 1),
                    bracketed,
                    format!("partial sums {partials:?} around {exact}"),
                );
            }
            Err(e) => self.record_flag(base("at_least_k", 0), false, format!("error: {e}")),
        }
        for w in space.outcomes().iter().take(indicator_outcomes) {
            let ok = indicator_identity(w, a).unwrap_or(false);
            self.record_flag(
                json!({"identity": "indicator", "A": a.label(), "word": w}),
                ok,
                "pointwise mismatch".into(),
            );
        }
    }

    /// The paired identities for every admissible `k`.
    pub fn check_pair<W: Weight>(
        &mut self,
        space: &FiniteProbSpace<W>,
        a: &EventFamily,
        b: &EventFamily,
    ) {
        let base = |k: usize| {
            json!({
                "identity": if k == 1 { "pair" } else { "pair_at_least_k" },
                "space": space.label(), "A": a.label(), "B": b.label(), "n": a.len(), "k": k,
            })
        };
        match PairSums::new(space, a, b) {
            Ok(sums) => {
                for k in 1..=a.len() / 2 {
                    self.record(base(k), sums.at_least_k(k));
                }
            }
            Err(e) => self.record_flag(base(0), false, format!("error: {e}")),
        }
    }
}

/// Exhaustive checks over uniform, digit-law product, cylinder-length,
/// Gauss-cylinder and randomly weighted spaces.
pub fn standard_suite() -> Result<SuiteReport> {
    let mut report = SuiteReport::new("inclusion_exclusion");

    let small = FiniteProbSpace::uniform(2, 3)?;
    report.check_single(&small, &EventFamily::coordinate(3, 1), usize::MAX);
    let small3 = FiniteProbSpace::uniform(3, 3)?;
    report.check_pair(
        &small3,
        &EventFamily::coordinate(3, 1),
        &EventFamily::coordinate(3, 2),
    );

    // twelve coordinates, two and three letters
    let pi2 = FiniteProbSpace::pi_product(2, 12)?;
    report.check_single(&pi2, &EventFamily::coordinate(12, 1), 64);
    let u3 = FiniteProbSpace::uniform(3, 10)?;
    report.check_pair(
        &u3,
        &EventFamily::coordinate(10, 1),
        &EventFamily::coordinate(10, 2),
    );

    // five letters
    let pi5 = FiniteProbSpace::pi_product(5, 6)?;
    report.check_single(&pi5, &EventFamily::coordinate(6, 1), 64);
    report.check_single(&pi5, &EventFamily::first_letter(5), 0);
    report.check_pair(
        &pi5,
        &EventFamily::coordinate(6, 1),
        &EventFamily::coordinate(6, 2),
    );
    report.check_pair(&pi5, &EventFamily::descents(6), &EventFamily::ascents(6));
    let pi3 = FiniteProbSpace::pi_product(3, 8)?;
    report.check_single(&pi3, &EventFamily::descents(8), 64);
    report.check_pair(&pi3, &EventFamily::descents(8), &EventFamily::ascents(8));

    let lengths = FiniteProbSpace::cylinder_lengths(5, 4)?;
    report.check_single(&lengths, &EventFamily::coordinate(4, 1), 64);
    report.check_single(&lengths, &EventFamily::random(&lengths, 12, 0.4, 1), 64);
    let (a, b) = EventFamily::random_disjoint_pair(&lengths, 10, 2);
    report.check_pair(&lengths, &a, &b);
    report.check_pair(
        &lengths,
        &EventFamily::coordinate(4, 1),
        &EventFamily::coordinate(4, 2),
    );

    let gauss_exact = FiniteProbSpace::gauss_cylinders_exact(5, 4)?;
    report.check_single(&gauss_exact, &EventFamily::coordinate(4, 2), 64);
    report.check_single(
        &gauss_exact,
        &EventFamily::random(&gauss_exact, 12, 0.5, 3),
        0,
    );
    let (a, b) = EventFamily::random_disjoint_pair(&gauss_exact, 8, 4);
    report.check_pair(&gauss_exact, &a, &b);

    let gauss = FiniteProbSpace::gauss_cylinders(5, 5)?;
    report.check_single(&gauss, &EventFamily::coordinate(5, 1), 0);
    report.check_single(&gauss, &EventFamily::random(&gauss, 12, 0.3, 5), 0);
    let (a, b) = EventFamily::random_disjoint_pair(&gauss, 10, 6);
    report.check_pair(&gauss, &a, &b);

    for seed in 0..4 {
        let space = FiniteProbSpace::random(3, 5, seed)?;
        report.check_single(&space, &EventFamily::random(&space, 6, 0.5, seed + 100), 0);
        let (a, b) = EventFamily::random_disjoint_pair(&space, 6, seed + 200);
        report.check_pair(&space, &a, &b);
    }

    Ok(report)
}
