//! Monte Carlo runs of the range-renewal statistics over many independent
//! streams, summarized per checkpoint against the theoretical limits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{DigitStreamSpec, StreamKind};
use crate::stats::{trajectory, TrajectoryRow};
use crate::theory::{escape_rate, limit_constant, r_k_f64};

/// `10², 10³, 10⁴, 10⁵`.
pub const DEFAULT_CHECKPOINTS: [u64; 4] = [100, 1_000, 10_000, 100_000];

pub const CSV_HEADER: &str = "n,stat,k,mean,stderr,theory";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub stream: StreamKind,
    /// Checkpoints; a single number is accepted.
    #[serde(default = "default_checkpoints", deserialize_with = "one_or_many")]
    pub n: Vec<u64>,
    #[serde(default = "one")]
    pub trials: u64,
    #[serde(default = "default_ks")]
    pub ks: Vec<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Threads; defaults to the available parallelism.
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_checkpoints() -> Vec<u64> {
    DEFAULT_CHECKPOINTS.to_vec()
}

fn one() -> u64 {
    1
}

fn default_ks() -> Vec<u64> {
    vec![1, 2, 3, 4]
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<u64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(u64),
        Many(Vec<u64>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(n) => vec![n],
        OneOrMany::Many(v) => v,
    })
}

impl ExperimentConfig {
    pub fn new(stream: StreamKind) -> Self {
        ExperimentConfig {
            stream,
            n: default_checkpoints(),
            trials: 1,
            ks: default_ks(),
            seed: 0,
            out: None,
            workers: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.n.is_empty() || self.n[0] == 0 || self.n.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "checkpoints must be positive and strictly ascending".into(),
            ));
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return Err(Error::InvalidParameter(
                "ks must be nonempty and positive".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Stream of trial `index`; its seed material is `(seed, index, kind)`.
    pub fn trial_spec(&self, index: u64) -> DigitStreamSpec {
        DigitStreamSpec::new(self.stream.clone(), self.seed).with_stream_id(index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stat {
    /// `R_n / √n`
    RnOverSqrtN,
    /// `R_{n,k} / R_n`
    RnkOverRn,
    /// `R_{n,k} / R_{n,k+}`
    RnkOverRnkPlus,
}

impl Stat {
    pub fn name(self) -> &'static str {
        match self {
            Stat::RnOverSqrtN => "Rn_over_sqrt_n",
            Stat::RnkOverRn => "Rnk_over_Rn",
            Stat::RnkOverRnkPlus => "Rnk_over_Rnk_plus",
        }
    }

    fn value(self, row: &TrajectoryRow, k: Option<u64>) -> Option<f64> {
        let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
        match (self, k) {
            (Stat::RnOverSqrtN, _) => Some(row.r_n as f64 / (row.n as f64).sqrt()),
            (Stat::RnkOverRn, Some(k)) => ratio(row.r_nk[&k], row.r_n),
            (Stat::RnkOverRnkPlus, Some(k)) => ratio(row.r_nk[&k], row.r_nk_plus[&k]),
            _ => None,
        }
    }

    fn theory(self, k: Option<u64>) -> Result<f64> {
        match (self, k) {
            (Stat::RnOverSqrtN, _) => Ok(limit_constant()),
            (Stat::RnkOverRn, Some(k)) => r_k_f64(k),
            (Stat::RnkOverRnkPlus, Some(k)) => Ok(escape_rate(k)?.to_f64().expect("finite")),
            _ => Err(Error::InvalidParameter("stat needs k".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: u64,
    pub stat: Stat,
    pub k: Option<u64>,
    /// Mean over trials where the ratio is defined.
    pub mean: f64,
    /// Standard error of the mean; `NaN` with fewer than two defined trials.
    pub stderr: f64,
    /// How many trials had a defined ratio.
    pub trials: u64,
    pub theory: f64,
}

/// Mean and standard error, summed in trial order.
fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Runs every trial on a pool of `workers` threads and aggregates in trial
/// order, so the result does not depend on the worker count.
pub fn run_montecarlo(config: &ExperimentConfig) -> Result<Vec<SummaryRow>> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let trajectories: Vec<Vec<TrajectoryRow>> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| trajectory(&config.trial_spec(t), &config.n, &config.ks))
            .collect::<Result<Vec<_>>>()
    })?;
    summarize(config, &trajectories)
}

fn summarize(
    config: &ExperimentConfig,
    trajectories: &[Vec<TrajectoryRow>],
) -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::new();
    for (i, &n) in config.n.iter().enumerate() {
        let mut stats = vec![(Stat::RnOverSqrtN, None)];
        for stat in [Stat::RnkOverRn, Stat::RnkOverRnkPlus] {
            stats.extend(config.ks.iter().map(|&k| (stat, Some(k))));
        }
        for (stat, k) in stats {
            let values: Vec<f64> = trajectories
                .iter()
                .filter_map(|t| stat.value(&t[i], k))
                .collect();
            let (mean, stderr) = mean_stderr(&values);
            rows.push(SummaryRow {
                n,
                stat,
                k,
                mean,
                stderr,
                trials: values.len() as u64,
                theory: stat.theory(k)?,
            });
        }
    }
    Ok(rows)
}

/// CSV with header [`CSV_HEADER`]; `k` is empty for `Rn_over_sqrt_n`.
pub fn write_summary_csv(rows: &[SummaryRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let k = r.k.map(|k| k.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            r.stat.name(),
            k,
            r.mean,
            r.stderr,
            r.theory
        )?;
    }
    Ok(())
}

pub fn summary_csv_string(rows: &[SummaryRow]) -> String {
    let mut buf = Vec::new();
    write_summary_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

/// Writes the CSV to `path`, reporting the path on failure.
pub fn write_summary_file(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_summary_csv(rows, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Runs the experiment and writes the CSV to `config.out` when set.
pub fn run_and_write(config: &ExperimentConfig) -> Result<Vec<SummaryRow>> {
    let rows = run_montecarlo(config)?;
    if let Some(path) = &config.out {
        write_summary_file(&rows, path)?;
    }
    Ok(rows)
}
