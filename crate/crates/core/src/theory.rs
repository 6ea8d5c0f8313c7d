//! Closed-form limit constants and the i.i.d. expectation series.
//!
//! Under the Gauss measure (and under the product of its one-digit marginal)
//! the range `R_n` grows like `√(π n / ln 2)`, a fraction `r_k` of the visited
//! values has been seen exactly `k` times and a fraction `r_{k+}` at least `k`
//! times, with
//!
//! ```text
//! r_k   = C(2k, k) / ((2k - 1) 4^k)
//! r_{k+} = Π_{j<k} (1 - 1/(2j)),       r_k / r_{k+} = 1/(2k)
//! ```

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use statrs::function::factorial::ln_binomial;
use statrs::function::gamma::ln_gamma;

use crate::cf_core::{Rational, LN_2};
use crate::error::{Error, Result};

/// Largest `k` for which [`r_k_f64`] goes through exact rationals.
pub const EXACT_K_MAX: u64 = 1000;

fn require_k(k: u64) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidParameter("k must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `π_x = P(a_1 = x) = -log2(1 - 1/(x+1)²)`.
pub fn pi_x(x: u64) -> Result<f64> {
    if x == 0 {
        return Err(Error::InvalidParameter("digit x must be at least 1".into()));
    }
    Ok(pi_x_real(x as f64))
}

/// `π_x` extended to real `x ≥ 1`; used by the series tails.
fn pi_x_real(x: f64) -> f64 {
    let y = 1.0 / (x + 1.0);
    -(-y * y).ln_1p() / LN_2
}

/// `P(a_1 ≥ x) = log2(1 + 1/x)`, the telescoped tail of `π`.
pub fn pi_tail(x: u64) -> Result<f64> {
    if x == 0 {
        return Err(Error::InvalidParameter("digit x must be at least 1".into()));
    }
    Ok((1.0 / x as f64).ln_1p() / LN_2)
}

pub fn r_k(k: u64) -> Result<Rational> {
    require_k(k)?;
    let mut binom = BigInt::one();
    for i in 0..k {
        binom = binom * BigInt::from(2 * k - i) / BigInt::from(i + 1);
    }
    let denom = BigInt::from(2 * k - 1) * (BigInt::one() << (2 * k) as usize);
    Ok(Rational::new(binom, denom))
}

pub fn r_k_plus(k: u64) -> Result<Rational> {
    require_k(k)?;
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 1..k {
        num *= BigInt::from(2 * j - 1);
        den *= BigInt::from(2 * j);
    }
    Ok(Rational::new(num, den))
}

/// `1/(2k)`, the limiting ratio `R_{n,k} / R_{n,k+}`.
pub fn escape_rate(k: u64) -> Result<Rational> {
    require_k(k)?;
    Ok(Rational::new(BigInt::one(), BigInt::from(2 * k)))
}

/// `r_k` as a float: exact rational up to [`EXACT_K_MAX`], log-gamma beyond.
pub fn r_k_f64(k: u64) -> Result<f64> {
    require_k(k)?;
    if k <= EXACT_K_MAX {
        return Ok(r_k(k)?.to_f64().expect("finite"));
    }
    let kf = k as f64;
    let ln_binom = ln_gamma(2.0 * kf + 1.0) - 2.0 * ln_gamma(kf + 1.0);
    Ok((ln_binom - (2.0 * kf - 1.0).ln() - kf * 4f64.ln()).exp())
}

pub fn r_k_plus_f64(k: u64) -> Result<f64> {
    require_k(k)?;
    if k <= EXACT_K_MAX {
        return Ok(r_k_plus(k)?.to_f64().expect("finite"));
    }
    Ok(r_k_f64(k)? * 2.0 * k as f64)
}

/// `√(π / ln 2) ≈ 2.1289`, the almost-sure limit of `R_n / √n`.
pub fn limit_constant() -> f64 {
    (PI / LN_2).sqrt()
}

/// `√(π n / ln 2)`.
pub fn asymptotic_rn(n: u64) -> f64 {
    (PI * n as f64 / LN_2).sqrt()
}

/// Exact per-`k` constants up to a cutoff.
#[derive(Clone, Debug)]
pub struct TheoryConstants {
    pub r_k: Vec<Rational>,
    pub r_k_plus: Vec<Rational>,
    pub limit_const: f64,
}

impl TheoryConstants {
    pub fn up_to(k_max: u64) -> Result<Self> {
        require_k(k_max)?;
        Ok(TheoryConstants {
            r_k: (1..=k_max).map(r_k).collect::<Result<_>>()?,
            r_k_plus: (1..=k_max).map(r_k_plus).collect::<Result<_>>()?,
            limit_const: limit_constant(),
        })
    }

    pub fn k_max(&self) -> u64 {
        self.r_k.len() as u64
    }

    pub fn escape_rate(&self, k: u64) -> Result<Rational> {
        escape_rate(k)
    }
}

/// `Ẽ R_n = Σ_x [1 - (1 - π_x)^n]` under the i.i.d. law.
pub fn expected_rn_iid(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let nf = n as f64;
    Ok(iid_series(n, |x| {
        let p = pi_x_real(x);
        -(nf * (-p).ln_1p()).exp_m1()
    }))
}

/// `Ẽ R_{n,k} = Σ_x C(n,k) π_x^k (1 - π_x)^{n-k}` under the i.i.d. law.
pub fn expected_rnk_iid(n: u64, k: u64) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ k ≤ n, got n = {n}, k = {k}"
        )));
    }
    let ln_c = ln_binomial(n, k);
    let (kf, rest) = (k as f64, (n - k) as f64);
    Ok(iid_series(n, |x| {
        let p = pi_x_real(x);
        (ln_c + kf * p.ln() + rest * (-p).ln_1p()).exp()
    }))
}

/// Direct summation below `X = max(1000, 64⌈√n⌉)`, then the midpoint
/// Euler–Maclaurin tail `∫_{X-½}^∞ f - f'(X-½)/24`.
///
/// The summands vary on the scale `√n`, so past `X` the next correction
/// term is below `10⁻¹²` while the tail integral itself can be large; the
/// literal cutoff rule `n log2(1 + 1/X) ≤ 10⁻⁷` would need ~`10⁷ n` terms.
fn iid_series(n: u64, term: impl Fn(f64) -> f64) -> f64 {
    let root = (n as f64).sqrt().ceil() as u64;
    let cut = (64 * root).max(1000);
    // smallest terms first
    let direct: f64 = (1..cut).rev().map(|x| term(x as f64)).sum();
    let a = cut as f64 - 0.5;
    let integral = gauss_legendre_01(|y| {
        let x = a / y;
        term(x) * a / (y * y)
    });
    let h = a * 1e-4;
    let slope = (term(a + h) - term(a - h)) / (2.0 * h);
    direct + integral + slope / 24.0
}

/// Composite 20-point Gauss–Legendre on `(0, 1)`; never evaluates endpoints.
pub(crate) fn gauss_legendre_01(f: impl Fn(f64) -> f64) -> f64 {
    const PANELS: usize = 16;
    let (nodes, weights) = legendre_rule(20);
    let width = 1.0 / PANELS as f64;
    let mut total = 0.0;
    for p in 0..PANELS {
        let mid = (p as f64 + 0.5) * width;
        for (x, w) in nodes.iter().zip(&weights) {
            total += w * f(mid + 0.5 * width * x);
        }
    }
    total * 0.5 * width
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_m`.
fn legendre_rule(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=m {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            deriv = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / deriv;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * deriv * deriv);
    }
    (nodes, weights)
}
