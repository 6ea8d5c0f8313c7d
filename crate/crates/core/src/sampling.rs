//! Exact samplers for the partial-quotient process.
//!
//! Under the Gauss measure the digits are not independent, but the law of the
//! tail `T^m ω` given the first `m` digits has density proportional to
//! `1/((1 + ωt)(1 + ωs))` on `(0, 1)`, where `t = q_{m-1}/q_m` and
//! `s = (p_{m-1}+q_{m-1})/(p_m+q_m)`. Sampling that density by inverse CDF and
//! reading off `⌊1/ω⌋` gives the next digit; `(t, s)` then updates to
//! `(1/(j+t), 1/(j+s))`. The state is two floats, so streams of millions of
//! digits cost no precision.

use std::path::PathBuf;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cf_core::{parse_word, Digit, LN_2};
use crate::constructions::{ConstructionSpec, ConstructionStream};
use crate::error::{Error, Result};

/// Below this `|t - s|` the `t = s` closed form is used.
pub const SWITCH_THRESHOLD: f64 = 1e-8;

/// Largest digit a sampler emits: `2^63 - 1`.
pub const DIGIT_CAP: u64 = i64::MAX as u64;

/// Parameters of the conditional next-digit law; `(0, 1)` before any digit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailParams {
    t: f64,
    s: f64,
}

impl Default for TailParams {
    fn default() -> Self {
        Self::INITIAL
    }
}

impl TailParams {
    pub const INITIAL: TailParams = TailParams { t: 0.0, s: 1.0 };

    pub fn new(t: f64, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!(
                "tail parameters ({t}, {s}) outside [0, 1]²"
            )));
        }
        Ok(TailParams { t, s })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Parameters after observing digit `j`.
    pub fn after(&self, j: f64) -> Self {
        TailParams {
            t: 1.0 / (j + self.t),
            s: 1.0 / (j + self.s),
        }
    }

    fn degenerate(&self) -> bool {
        (self.t - self.s).abs() < SWITCH_THRESHOLD
    }

    /// Unnormalised CDF `G(x) = ∫_0^x dω/((1+ωt)(1+ωs))`.
    fn unnormalised_cdf(&self, x: f64) -> f64 {
        let (t, s) = (self.t, self.s);
        if self.degenerate() {
            x / (1.0 + x * t)
        } else {
            // ln((1+xt)/(1+xs)) = ln_1p(x(t-s)/(1+xs))
            (x * (t - s) / (1.0 + x * s)).ln_1p() / (t - s)
        }
    }

    /// Conditional CDF of the tail, normalised to 1 at `x = 1`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.unnormalised_cdf(x.clamp(0.0, 1.0)) / self.unnormalised_cdf(1.0)
    }

    /// Exact inverse of [`cdf`](Self::cdf).
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let (t, s) = (self.t, self.s);
        let c = u * self.unnormalised_cdf(1.0);
        let x = if self.degenerate() {
            c / (1.0 - c * t)
        } else {
            // x = (e^{c(t-s)} - 1)/(t - s e^{c(t-s)}), rewritten with expm1
            let d = c * (t - s);
            let em1 = d.exp_m1();
            em1 / ((t - s) - s * em1)
        };
        x.clamp(0.0, 1.0)
    }
}

/// A sampled digit with a flag set when `⌊1/ω⌋` exceeded [`DIGIT_CAP`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Draw {
    pub digit: Digit,
    pub saturated: bool,
}

fn require_open_unit(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::UniformOutOfRange(u))
    }
}

fn digit_of_point(omega: f64) -> (u64, bool) {
    let inv = 1.0 / omega.min(1.0);
    if !(inv < DIGIT_CAP as f64) {
        (DIGIT_CAP, true)
    } else {
        (inv.floor() as u64, false)
    }
}

/// `2^u - 1`: the inverse of the Gauss CDF `F(ω) = log2(1 + ω)`.
pub fn gauss_sample_point(u: f64) -> Result<f64> {
    require_open_unit(u)?;
    Ok((u * LN_2).exp_m1())
}

/// One draw from `π`: `⌊1/(2^u - 1)⌋`.
pub fn iid_digit(u: f64) -> Result<Draw> {
    let omega = gauss_sample_point(u)?;
    let (value, saturated) = digit_of_point(omega);
    Ok(Draw {
        digit: Digit::new(value)?,
        saturated,
    })
}

/// Result of one conditional Gauss step.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussStep {
    pub digit: Digit,
    pub params: TailParams,
    pub saturated: bool,
}

/// Samples the next digit given the history summarised by `tp`.
pub fn gauss_next_digit(tp: TailParams, u: f64) -> Result<GaussStep> {
    require_open_unit(u)?;
    let omega = tp.inverse_cdf(u);
    let (value, saturated) = digit_of_point(omega);
    Ok(GaussStep {
        digit: Digit::new(value)?,
        params: tp.after(value as f64),
        saturated,
    })
}

/// Open-interval uniforms from a ChaCha8 keystream.
///
/// The keystream position equals the number of draws, so a stream's values
/// depend only on its key and not on which thread runs it.
#[derive(Clone, Debug)]
pub struct UniformSource {
    rng: ChaCha8Rng,
}

impl UniformSource {
    pub fn new(seed: [u8; 32]) -> Self {
        UniformSource {
            rng: ChaCha8Rng::from_seed(seed),
        }
    }

    /// Uniform on the open interval `(0, 1)` with 53 random bits.
    pub fn next_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// SHA-256 of `(master seed, stream id, kind tag)`, used as a ChaCha key.
pub fn derive_seed(master: u64, stream_id: u64, tag: &str) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(stream_id.to_le_bytes());
    hasher.update(tag.as_bytes());
    hasher.finalize().into()
}

/// What a digit stream draws from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StreamKind {
    Gauss,
    Iid,
    Construction {
        #[serde(flatten)]
        spec: ConstructionSpec,
    },
    File {
        path: PathBuf,
    },
}

impl StreamKind {
    pub fn tag(&self) -> &'static str {
        match self {
            StreamKind::Gauss => "gauss",
            StreamKind::Iid => "iid",
            StreamKind::Construction { .. } => "construction",
            StreamKind::File { .. } => "file",
        }
    }
}

/// A reproducible digit source: for `gauss` and `iid` the pair
/// `(seed, stream_id)` fixes every digit.
#[derive(Clone, Debug, PartialEq)]
pub struct DigitStreamSpec {
    pub kind: StreamKind,
    pub seed: u64,
    pub stream_id: u64,
}

impl DigitStreamSpec {
    pub fn new(kind: StreamKind, seed: u64) -> Self {
        DigitStreamSpec {
            kind,
            seed,
            stream_id: 0,
        }
    }

    pub fn with_stream_id(mut self, stream_id: u64) -> Self {
        self.stream_id = stream_id;
        self
    }
}

enum Source {
    Gauss {
        uniforms: UniformSource,
        params: TailParams,
    },
    Iid {
        uniforms: UniformSource,
    },
    Construction(ConstructionStream),
    File(std::vec::IntoIter<Digit>),
}

/// Iterator over the digits described by a [`DigitStreamSpec`].
///
/// Infinite for the random and construction kinds, file-bounded otherwise.
pub struct DigitStream {
    source: Source,
    saturations: u64,
}

impl DigitStream {
    /// How many emitted digits were clamped to [`DIGIT_CAP`].
    pub fn saturations(&self) -> u64 {
        self.saturations
    }
}

impl Iterator for DigitStream {
    type Item = Digit;

    fn next(&mut self) -> Option<Digit> {
        match &mut self.source {
            Source::Gauss { uniforms, params } => {
                let step = gauss_next_digit(*params, uniforms.next_open()).expect("open uniform");
                *params = step.params;
                self.saturations += step.saturated as u64;
                Some(step.digit)
            }
            Source::Iid { uniforms } => {
                let draw = iid_digit(uniforms.next_open()).expect("open uniform");
                self.saturations += draw.saturated as u64;
                Some(draw.digit)
            }
            Source::Construction(it) => it.next(),
            Source::File(it) => it.next(),
        }
    }
}

/// Opens the stream described by `spec`.
///
/// File streams are parsed up front; a malformed token is reported with its
/// position.
pub fn digit_stream(spec: &DigitStreamSpec) -> Result<DigitStream> {
    let key = || derive_seed(spec.seed, spec.stream_id, spec.kind.tag());
    let source = match &spec.kind {
        StreamKind::Gauss => Source::Gauss {
            uniforms: UniformSource::new(key()),
            params: TailParams::INITIAL,
        },
        StreamKind::Iid => Source::Iid {
            uniforms: UniformSource::new(key()),
        },
        StreamKind::Construction { spec: c } => {
            Source::Construction(c.stream(spec.seed ^ spec.stream_id.rotate_left(32))?)
        }
        StreamKind::File { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Source::File(parse_word(&text)?.into_iter())
        }
    };
    Ok(DigitStream {
        source,
        saturations: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{pi_tail, pi_x};

    #[test]
    fn iid_digit_boundaries() {
        let boundary = 1.5f64.log2();
        assert!((boundary - 0.584963).abs() < 1e-6);
        assert_eq!(iid_digit(boundary + 1e-12).unwrap().digit, Digit::ONE);
        assert_eq!(iid_digit(boundary - 1e-12).unwrap().digit.as_u64(), Some(2));
        assert_eq!(iid_digit(0.5).unwrap().digit.as_u64(), Some(2));
        assert_eq!(iid_digit(1.0 - 1e-16).unwrap().digit, Digit::ONE);
        assert!(iid_digit(0.0).is_err());
        assert!(iid_digit(1.0).is_err());
        assert!(iid_digit(f64::NAN).is_err());
    }

    #[test]
    fn saturation_is_flagged() {
        let draw = iid_digit(1e-300).unwrap();
        assert!(draw.saturated);
        assert_eq!(draw.digit.as_u64(), Some(DIGIT_CAP));
        assert!(!iid_digit(0.3).unwrap().saturated);
    }

    #[test]
    fn gauss_point_closed_forms() {
        assert!((gauss_sample_point(0.5).unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((gauss_sample_point(1.5f64.log2()).unwrap() - 0.5).abs() < 1e-15);
        assert!(gauss_sample_point(1.0).is_err());
    }

    #[test]
    fn initial_conditional_law_is_gauss() {
        let tp = TailParams::INITIAL;
        for &x in &[0.1, 0.25, 0.5, 0.9] {
            assert!((tp.cdf(x) - (1.0 + x).log2()).abs() < 1e-15);
        }
        // P(digit 1) = P(ω > 1/2) = 1 - log2(3/2) = π_1
        let u = 1.5f64.log2();
        assert!((tp.inverse_cdf(u) - 0.5).abs() < 1e-15);
        assert!((1.0 - tp.cdf(0.5) - pi_x(1).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn update_rule() {
        let tp = TailParams::INITIAL.after(2.0);
        assert_eq!(tp, TailParams::new(0.5, 1.0 / 3.0).unwrap());
        assert!(TailParams::new(1.5, 0.0).is_err());
    }

    #[test]
    fn all_ones_contract_to_golden_ratio() {
        let mut tp = TailParams::INITIAL;
        for _ in 0..50 {
            tp = tp.after(1.0);
            assert!(tp.t() > 0.0 && tp.t() <= 1.0 && tp.s() > 0.0 && tp.s() <= 1.0);
        }
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((tp.t() - golden).abs() < 1e-6);
        assert!((tp.s() - golden).abs() < 1e-6);
    }

    #[test]
    fn inverse_cdf_round_trips_in_both_regimes() {
        let params = [
            TailParams::new(0.0, 1.0).unwrap(),
            TailParams::new(0.3, 0.7).unwrap(),
            TailParams::new(0.5, 0.5 + 1e-9).unwrap(),
            TailParams::new(0.61, 0.61 + 2e-8).unwrap(),
        ];
        for tp in params {
            for i in 1..100 {
                let u = i as f64 / 100.0;
                let x = tp.inverse_cdf(u);
                assert!((tp.cdf(x) - u).abs() < 1e-12, "{tp:?} {u}");
            }
        }
    }

    #[test]
    fn regimes_agree_across_the_switch() {
        let below = TailParams::new(0.4, 0.4 + 0.9 * SWITCH_THRESHOLD).unwrap();
        let above = TailParams::new(0.4, 0.4 + 1.1 * SWITCH_THRESHOLD).unwrap();
        for i in 1..20 {
            let u = i as f64 / 20.0;
            assert!((below.inverse_cdf(u) - above.inverse_cdf(u)).abs() < 1e-8);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        for kind in [StreamKind::Gauss, StreamKind::Iid] {
            let spec = DigitStreamSpec::new(kind, 42).with_stream_id(3);
            let a: Vec<Digit> = digit_stream(&spec).unwrap().take(10_000).collect();
            let b: Vec<Digit> = digit_stream(&spec).unwrap().take(10_000).collect();
            assert_eq!(a, b);
            let other = DigitStreamSpec::new(spec.kind.clone(), 42).with_stream_id(4);
            let c: Vec<Digit> = digit_stream(&other).unwrap().take(100).collect();
            assert_ne!(a[..100], c[..]);
        }
    }

    #[test]
    fn iid_tail_frequencies() {
        let n = 1_000_000;
        let spec = DigitStreamSpec::new(StreamKind::Iid, 7);
        let mut at_least = vec![0u64; 102];
        let mut ones = 0u64;
        for d in digit_stream(&spec).unwrap().take(n) {
            let v = d.as_u64().unwrap().min(101) as usize;
            at_least[v] += 1;
            ones += d.is_one() as u64;
        }
        for x in (1..101).rev() {
            at_least[x] += at_least[x + 1];
        }
        for x in 1..=100u64 {
            let emp = at_least[x as usize] as f64 / n as f64;
            assert!((emp - pi_tail(x).unwrap()).abs() < 0.003, "x={x}");
        }
        assert!((ones as f64 / n as f64 - 0.4150).abs() < 0.003);
    }

    #[test]
    fn gauss_stream_frequencies() {
        let n = 1_000_000;
        let spec = DigitStreamSpec::new(StreamKind::Gauss, 11);
        let mut counts = [0u64; 6];
        for d in digit_stream(&spec).unwrap().take(n) {
            if let Some(v) = d.as_u64().filter(|&v| v <= 5) {
                counts[v as usize] += 1;
            }
        }
        for x in 1..=5u64 {
            let emp = counts[x as usize] as f64 / n as f64;
            assert!((emp - pi_x(x).unwrap()).abs() < 0.003, "x={x} {emp}");
        }
    }

    #[test]
    fn file_stream_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("good.txt");
        std::fs::write(&good, "1, 2 3\n4").unwrap();
        let spec = DigitStreamSpec::new(StreamKind::File { path: good }, 0);
        let ds: Vec<u64> = digit_stream(&spec)
            .unwrap()
            .map(|d| d.as_u64().unwrap())
            .collect();
        assert_eq!(ds, vec![1, 2, 3, 4]);

        let bad = dir.path().join("bad.txt");
        std::fs::write(&bad, "1 2 -3").unwrap();
        let spec = DigitStreamSpec::new(StreamKind::File { path: bad }, 0);
        assert!(matches!(
            digit_stream(&spec),
            Err(Error::MalformedDigit { position: 2, .. })
        ));
        let missing = DigitStreamSpec::new(
            StreamKind::File {
                path: dir.path().join("nope"),
            },
            0,
        );
        assert!(matches!(digit_stream(&missing), Err(Error::Io { .. })));
    }
}
