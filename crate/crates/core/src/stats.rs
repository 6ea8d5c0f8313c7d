//! Visiting numbers and range-renewal counts over a digit stream.
//!
//! For a prefix `a_1, …, a_n`:
//! `N_n(x)` counts the occurrences of `x`, `R_n` the distinct values,
//! `R_{n,k}` the values seen exactly `k` times and `R_{n,k+}` those seen at
//! least `k` times.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::Serialize;

use crate::cf_core::Digit;
use crate::error::{Error, Result};
use crate::sampling::{digit_stream, DigitStreamSpec};

#[derive(Clone, Debug, Default)]
pub struct RangeRenewalState {
    counts: HashMap<Digit, u64>,
    /// multiplicity → number of values seen exactly that often
    occupancy: BTreeMap<u64, u64>,
    n: u64,
    distinct: u64,
}

impl RangeRenewalState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_digits<'a>(digits: impl IntoIterator<Item = &'a Digit>) -> Self {
        let mut state = Self::new();
        for d in digits {
            state.observe(d);
        }
        state
    }

    pub fn observe(&mut self, d: &Digit) {
        self.n += 1;
        let slot = match self.counts.get_mut(d) {
            Some(c) => c,
            None => {
                self.distinct += 1;
                self.counts.entry(d.clone()).or_insert(0)
            }
        };
        let old = *slot;
        *slot += 1;
        if old > 0 {
            let bucket = self.occupancy.get_mut(&old).expect("occupied bucket");
            *bucket -= 1;
            if *bucket == 0 {
                self.occupancy.remove(&old);
            }
        }
        *self.occupancy.entry(old + 1).or_insert(0) += 1;
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `N_n(x)`.
    pub fn visits(&self, d: &Digit) -> u64 {
        self.counts.get(d).copied().unwrap_or(0)
    }

    pub fn r_n(&self) -> u64 {
        self.distinct
    }

    pub fn r_nk(&self, k: u64) -> u64 {
        self.occupancy.get(&k).copied().unwrap_or(0)
    }

    pub fn r_nk_plus(&self, k: u64) -> u64 {
        self.occupancy.range(k..).map(|(_, &c)| c).sum()
    }

    /// Nonzero `(k, R_{n,k})` pairs in increasing `k`.
    pub fn occupancy(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.occupancy.iter().map(|(&k, &c)| (k, c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrajectoryRow {
    pub n: u64,
    pub r_n: u64,
    pub r_nk: BTreeMap<u64, u64>,
    pub r_nk_plus: BTreeMap<u64, u64>,
}

fn check_checkpoints(checkpoints: &[u64], ks: &[u64]) -> Result<()> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "checkpoints must be strictly ascending".into(),
        ));
    }
    if ks.contains(&0) {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    Ok(())
}

fn row(state: &RangeRenewalState, ks: &[u64]) -> TrajectoryRow {
    TrajectoryRow {
        n: state.n(),
        r_n: state.r_n(),
        r_nk: ks.iter().map(|&k| (k, state.r_nk(k))).collect(),
        r_nk_plus: ks.iter().map(|&k| (k, state.r_nk_plus(k))).collect(),
    }
}

/// Rows at each checkpoint of an arbitrary digit iterator.
pub fn trajectory_of(
    digits: impl IntoIterator<Item = Digit>,
    checkpoints: &[u64],
    ks: &[u64],
) -> Result<Vec<TrajectoryRow>> {
    check_checkpoints(checkpoints, ks)?;
    let mut digits = digits.into_iter();
    let mut state = RangeRenewalState::new();
    let mut rows = Vec::with_capacity(checkpoints.len());
    for &target in checkpoints {
        while state.n() < target {
            match digits.next() {
                Some(d) => state.observe(&d),
                None => {
                    return Err(Error::InvalidParameter(format!(
                        "stream ended after {} digits, before checkpoint {target}",
                        state.n()
                    )))
                }
            }
        }
        rows.push(row(&state, ks));
    }
    Ok(rows)
}

pub fn trajectory(
    spec: &DigitStreamSpec,
    checkpoints: &[u64],
    ks: &[u64],
) -> Result<Vec<TrajectoryRow>> {
    trajectory_of(digit_stream(spec)?, checkpoints, ks)
}

/// CSV with columns `n,R_n`, then `R_n_k<k>,R_n_k<k>_plus` per requested `k`.
pub fn write_trajectory_csv(
    rows: &[TrajectoryRow],
    ks: &[u64],
    mut out: impl Write,
) -> std::io::Result<()> {
    let mut header = String::from("n,R_n");
    for k in ks {
        header.push_str(&format!(",R_n_k{k},R_n_k{k}_plus"));
    }
    writeln!(out, "{header}")?;
    for r in rows {
        let mut line = format!("{},{}", r.n, r.r_n);
        for k in ks {
            line.push_str(&format!(",{},{}", r.r_nk[k], r.r_nk_plus[k]));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}
