use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use cf_renewal::cf_core::{evaluate_word, expand_rational, format_word, parse_word};
use cf_renewal::constructions::good_sigma_n;
use cf_renewal::experiments::{run_montecarlo, write_summary_csv, ExperimentConfig};
use cf_renewal::identities::standard_suite;
use cf_renewal::measure_bounds::standard_bounds_report;
use cf_renewal::sampling::{digit_stream, DigitStreamSpec, StreamKind};
use cf_renewal::stats::{trajectory, write_trajectory_csv};
use cf_renewal::theory::{asymptotic_rn, escape_rate, expected_rn_iid, r_k, r_k_plus};
use cf_renewal::{Error, Result};

#[derive(Parser)]
#[command(
    name = "cf-renewal",
    version,
    about = "Range-renewal statistics of continued-fraction digits"
)]
struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON configuration (stream, checkpoints, trials, ks, seed, out, workers).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Continued-fraction digits of a rational, or the value of a digit word.
    Expand(ExpandArgs),
    /// Print the first digits of a stream.
    Sample {
        #[command(flatten)]
        stream: StreamArgs,
        /// Number of digits.
        #[arg(short, long, default_value_t = 20)]
        n: u64,
    },
    /// R_n, R_{n,k}, R_{n,k+} along one stream.
    Stats {
        #[command(flatten)]
        stream: StreamArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [100u64, 1_000, 10_000, 100_000])]
        checkpoints: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3, 4])]
        ks: Vec<u64>,
    },
    /// Exact limit constants r_k, r_k+ and 1/(2k).
    Theory {
        #[arg(long, default_value_t = 10)]
        k_max: u64,
        /// Instead list the i.i.d. expectation of R_n at these n.
        #[arg(long, value_delimiter = ',')]
        expected: Vec<u64>,
    },
    /// Run the inclusion-exclusion identity suites.
    Verify,
    /// Run the measure-bound scans.
    VerifyBounds,
    /// Good's σ_n for the digits bounded by B.
    Dimension {
        #[arg(long = "B", value_delimiter = ',', default_values_t = [2u64])]
        b: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3, 4, 5])]
        n: Vec<u32>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Many independent trials, summarized against the limits.
    Montecarlo(MontecarloArgs),
}

#[derive(Args)]
struct ExpandArgs {
    /// A fraction p/q in (0, 1).
    #[arg(long, conflicts_with = "word", required_unless_present = "word")]
    rational: Option<String>,
    /// Comma-separated digits to evaluate.
    #[arg(long)]
    word: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    max_digits: usize,
}

#[derive(Args, Default)]
struct StreamArgs {
    /// gauss, iid, construction or file.
    #[arg(long)]
    kind: Option<String>,
    /// e_beta, f_c or e_minus_2.
    #[arg(long)]
    construction: Option<String>,
    #[arg(long = "B")]
    b: Option<u64>,
    #[arg(long)]
    beta: Option<f64>,
    /// one or seeded.
    #[arg(long)]
    filler: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    /// Digit file, for kind = file.
    #[arg(long)]
    path: Option<PathBuf>,
}

impl StreamArgs {
    fn is_empty(&self) -> bool {
        self.kind.is_none()
    }

    fn to_kind(&self) -> Result<StreamKind> {
        let mut m = Map::new();
        let kind = self.kind.as_deref().unwrap_or("gauss");
        m.insert("kind".into(), json!(kind));
        if let Some(v) = &self.construction {
            m.insert("construction".into(), json!(v));
        }
        if let Some(v) = self.b {
            m.insert("B".into(), json!(v));
        }
        if let Some(v) = self.beta {
            m.insert("beta".into(), json!(v));
        }
        if let Some(v) = &self.filler {
            m.insert("filler".into(), json!(v));
        }
        if let Some(v) = self.c {
            m.insert("c".into(), json!(v));
        }
        if let Some(v) = &self.path {
            m.insert("path".into(), json!(v));
        }
        serde_json::from_value(Value::Object(m)).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Args)]
struct MontecarloArgs {
    #[command(flatten)]
    stream: StreamArgs,
    /// Checkpoints.
    #[arg(short, long, value_delimiter = ',')]
    n: Vec<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    ks: Vec<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

enum Outcome {
    Ok,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let config = cli
        .config
        .as_deref()
        .map(ExperimentConfig::load)
        .transpose()?;
    let seed = cli.seed.or(config.as_ref().map(|c| c.seed)).unwrap_or(0);
    let out_path = cli
        .out
        .clone()
        .or(config.as_ref().and_then(|c| c.out.clone()));
    let mut buf = Vec::new();
    let stream_kind = |args: &StreamArgs| -> Result<StreamKind> {
        match &config {
            Some(c) if args.is_empty() => Ok(c.stream.clone()),
            _ => args.to_kind(),
        }
    };
    let mut outcome = Outcome::Ok;

    match &cli.command {
        Command::Expand(args) => expand(args, cli.format, &mut buf)?,
        Command::Sample { stream, n } => {
            let spec = DigitStreamSpec::new(stream_kind(stream)?, seed);
            let digits: Vec<_> = digit_stream(&spec)?.take(*n as usize).collect();
            match cli.format {
                Format::Csv => writeln!(buf, "{}", format_word(&digits)),
                Format::Json => writeln!(buf, "{}", json!(digits)),
            }
            .expect("in-memory write");
        }
        Command::Stats {
            stream,
            checkpoints,
            ks,
        } => {
            let spec = DigitStreamSpec::new(stream_kind(stream)?, seed);
            let rows = trajectory(&spec, checkpoints, ks)?;
            match cli.format {
                Format::Csv => write_trajectory_csv(&rows, ks, &mut buf).expect("in-memory write"),
                Format::Json => {
                    let v: Vec<Value> = rows
                        .iter()
                        .map(|r| json!({"n": r.n, "R_n": r.r_n, "R_n_k": r.r_nk, "R_n_k_plus": r.r_nk_plus}))
                        .collect();
                    writeln!(buf, "{}", Value::Array(v)).expect("in-memory write");
                }
            }
        }
        Command::Theory { k_max, expected } => theory(*k_max, expected, cli.format, &mut buf)?,
        Command::Verify => {
            let report = standard_suite()?;
            if !report.passed() {
                outcome = Outcome::VerificationFailed;
            }
            writeln!(buf, "{}", pretty(&report)).expect("in-memory write");
        }
        Command::VerifyBounds => {
            let report = standard_bounds_report()?;
            if !report.passed() {
                outcome = Outcome::VerificationFailed;
            }
            writeln!(buf, "{}", pretty(&report)).expect("in-memory write");
        }
        Command::Dimension { b, n, tol } => {
            let mut rows = Vec::new();
            for &b in b {
                for &n in n {
                    rows.push((b, n, good_sigma_n(b, n, *tol)?));
                }
            }
            match cli.format {
                Format::Csv => {
                    writeln!(buf, "B,n,sigma_n").expect("in-memory write");
                    for (b, n, s) in rows {
                        writeln!(buf, "{b},{n},{s}").expect("in-memory write");
                    }
                }
                Format::Json => {
                    let v: Vec<Value> = rows
                        .iter()
                        .map(|(b, n, s)| json!({"B": b, "n": n, "sigma_n": s}))
                        .collect();
                    writeln!(buf, "{}", Value::Array(v)).expect("in-memory write");
                }
            }
        }
        Command::Montecarlo(args) => {
            let mut c = match config.clone() {
                Some(c) => c,
                None => ExperimentConfig::new(args.stream.to_kind()?),
            };
            if !args.stream.is_empty() {
                c.stream = args.stream.to_kind()?;
            }
            c.seed = seed;
            if !args.n.is_empty() {
                c.n = args.n.clone();
            }
            if let Some(t) = args.trials {
                c.trials = t;
            }
            if !args.ks.is_empty() {
                c.ks = args.ks.clone();
            }
            if args.workers.is_some() {
                c.workers = args.workers;
            }
            let rows = run_montecarlo(&c)?;
            match cli.format {
                Format::Csv => write_summary_csv(&rows, &mut buf).expect("in-memory write"),
                Format::Json => writeln!(buf, "{}", pretty(&rows)).expect("in-memory write"),
            }
        }
    }

    match &out_path {
        Some(path) => std::fs::write(path, &buf).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?,
        None => io::stdout().write_all(&buf).map_err(|e| Error::Io {
            path: "<stdout>".into(),
            source: e,
        })?,
    }
    Ok(outcome)
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn expand(args: &ExpandArgs, format: Format, buf: &mut Vec<u8>) -> Result<()> {
    if let Some(word) = &args.word {
        let value = evaluate_word(&parse_word(word)?)?;
        match format {
            Format::Csv => writeln!(buf, "{value}"),
            Format::Json => writeln!(buf, "{}", json!({"value": value.to_string()})),
        }
        .expect("in-memory write");
        return Ok(());
    }
    let text = args
        .rational
        .as_deref()
        .expect("clap enforces one of --rational, --word");
    let bad = || Error::Config(format!("expected p/q, got {text:?}"));
    let (p, q) = text.split_once('/').ok_or_else(bad)?;
    let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
    let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
    let digits = expand_rational(&p, &q, args.max_digits)?;
    match format {
        Format::Csv => writeln!(buf, "{}", format_word(&digits)),
        Format::Json => writeln!(buf, "{}", json!({"digits": digits})),
    }
    .expect("in-memory write");
    Ok(())
}

fn theory(k_max: u64, expected: &[u64], format: Format, buf: &mut Vec<u8>) -> Result<()> {
    if !expected.is_empty() {
        let mut rows = Vec::new();
        for &n in expected {
            rows.push((n, expected_rn_iid(n)?, asymptotic_rn(n)));
        }
        match format {
            Format::Csv => {
                writeln!(buf, "n,expected_Rn_iid,sqrt_pi_n_over_ln2").expect("in-memory write");
                for (n, e, a) in rows {
                    writeln!(buf, "{n},{e},{a}").expect("in-memory write");
                }
            }
            Format::Json => {
                let v: Vec<Value> = rows
                    .iter()
                    .map(|(n, e, a)| json!({"n": n, "expected_Rn_iid": e, "sqrt_pi_n_over_ln2": a}))
                    .collect();
                writeln!(buf, "{}", Value::Array(v)).expect("in-memory write");
            }
        }
        return Ok(());
    }
    let mut rows = Vec::new();
    for k in 1..=k_max {
        rows.push((k, r_k(k)?, r_k_plus(k)?, escape_rate(k)?));
    }
    match format {
        Format::Csv => {
            writeln!(buf, "k,r_k,r_k_plus,escape_rate").expect("in-memory write");
            for (k, a, b, c) in rows {
                writeln!(buf, "{k},{a},{b},{c}").expect("in-memory write");
            }
        }
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(k, a, b, c)| {
                    json!({"k": k, "r_k": a.to_string(), "r_k_plus": b.to_string(), "escape_rate": c.to_string()})
                })
                .collect();
            writeln!(buf, "{}", Value::Array(v)).expect("in-memory write");
        }
    }
    Ok(())
}
