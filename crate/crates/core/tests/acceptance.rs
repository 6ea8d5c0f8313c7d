//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::f64::consts::{LN_2, PI};
use std::time::{Duration, Instant};

use cf_renewal::cf_core::expand_point;
use cf_renewal::cf_core::highprec::e_minus_2_bracket;
use cf_renewal::constructions::{
    digits_e_beta, digits_e_minus_2, digits_f_c, good_sigma_n, ifs_rates_g, ConstructionSpec,
    DenominatorHistogram, Filler,
};
use cf_renewal::experiments::{
    run_montecarlo, summary_csv_string, ExperimentConfig, Stat, SummaryRow,
};
use cf_renewal::identities::standard_suite;
use cf_renewal::measure_bounds::{
    default_tiers, extremal_ratios, mixing_bracket, scan_comparison_exhaustive,
    scan_comparison_fuzz, scan_quasi_independence, WordPair,
};
use cf_renewal::sampling::{digit_stream, DigitStreamSpec, StreamKind};
use cf_renewal::stats::RangeRenewalState;
use cf_renewal::theory::{asymptotic_rn, expected_rn_iid};

const RUNTIME_LIMIT: Duration = Duration::from_secs(60);

const LIMIT_CONSTANT_TOL: f64 = 0.05;
const RATIO_TOL: f64 = 0.02;
/// `max |Ẽ R_n − √(πn/ln 2)|` over `n ∈ {10², …, 10⁶}`, from the series run.
const IID_OFFSET_FROZEN: f64 = 1.499_549_4;
const IID_OFFSET_FROZEN_TOL: f64 = 1e-6;
const IID_OFFSET_CEILING: f64 = 5.0;
const QI_LOW_TOL: f64 = 1e-3;
const QI_HIGH_TOL: f64 = 1e-2;
const MIXING_FACTOR: f64 = 5.0;
const E_MINUS_2_DENSITY_TOL: f64 = 0.01;
const GROWTH_TOL: f64 = 0.03;
const DENSITY_TOL: f64 = 0.005;
const SIGMA_EQUATION_TOL: f64 = 1e-8;
const SIGMA_NEAR: (f64, f64) = (0.655, 1e-3);
const RATE_REL_TOL: f64 = 0.05;

struct Report {
    lines: Vec<(usize, bool, String)>,
}

impl Report {
    fn record(&mut self, id: usize, ok: bool, detail: String) {
        println!(
            "criterion {id:>2}: {} {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        self.lines.push((id, ok, detail));
    }
}

fn row(rows: &[SummaryRow], stat: Stat, k: Option<u64>) -> &SummaryRow {
    rows.iter()
        .find(|r| r.stat == stat && r.k == k)
        .expect("row present")
}

fn identity_suite(report: &mut Report) {
    let t = Instant::now();
    let suite = standard_suite().expect("suite runs");
    let elapsed = t.elapsed();
    report.record(
        1,
        suite.passed() && suite.cases > 0 && elapsed < RUNTIME_LIMIT,
        format!(
            "{} cases, {} failures, {elapsed:.1?}",
            suite.cases,
            suite.failures.len()
        ),
    );
}

fn gauss_montecarlo(report: &mut Report) {
    let mut config = ExperimentConfig::new(StreamKind::Gauss);
    config.n = vec![100_000];
    config.trials = 200;
    config.seed = 2024;
    let t = Instant::now();
    let rows = run_montecarlo(&config).expect("montecarlo");
    let elapsed = t.elapsed();

    let main = row(&rows, Stat::RnOverSqrtN, None);
    let target = (PI / LN_2).sqrt();
    report.record(
        2,
        (main.mean - target).abs() <= LIMIT_CONSTANT_TOL && elapsed < RUNTIME_LIMIT,
        format!(
            "mean R_n/sqrt(n) = {:.4} ± {:.4} (target {target:.4}), {elapsed:.1?}",
            main.mean, main.stderr
        ),
    );

    let r_k = [1.0 / 2.0, 1.0 / 8.0, 1.0 / 16.0, 5.0 / 128.0];
    let mut ok = true;
    let mut detail = Vec::new();
    for (k, target) in (1..=4).zip(r_k) {
        let r = row(&rows, Stat::RnkOverRn, Some(k));
        ok &= (r.mean - target).abs() <= RATIO_TOL;
        detail.push(format!("k={k}: {:.4}/{target:.4}", r.mean));
    }
    report.record(3, ok, detail.join(", "));

    let mut ok = true;
    let mut detail = Vec::new();
    for k in 1..=4u64 {
        let target = 1.0 / (2 * k) as f64;
        let r = row(&rows, Stat::RnkOverRnkPlus, Some(k));
        ok &= (r.mean - target).abs() <= RATIO_TOL;
        detail.push(format!("k={k}: {:.4}/{target:.4}", r.mean));
    }
    report.record(4, ok, detail.join(", "));
}

fn iid_series(report: &mut Report) {
    let worst = [100u64, 1_000, 10_000, 100_000, 1_000_000]
        .into_iter()
        .map(|n| (expected_rn_iid(n).expect("series") - asymptotic_rn(n)).abs())
        .fold(0.0, f64::max);
    report.record(
        5,
        worst <= IID_OFFSET_CEILING && (worst - IID_OFFSET_FROZEN).abs() <= IID_OFFSET_FROZEN_TOL,
        format!("max offset {worst:.7} (frozen {IID_OFFSET_FROZEN}, ceiling {IID_OFFSET_CEILING})"),
    );
}

fn quasi_independence(report: &mut Report) {
    let (gauss, lengths) = scan_quasi_independence(&default_tiers());
    let (low, high) = extremal_ratios(1000).expect("extremal");
    let low_ok = (low - LN_2).abs() <= QI_LOW_TOL;
    let high_ok = (high - 2.0 * LN_2).abs() <= QI_HIGH_TOL;
    report.record(
        6,
        gauss.passed() && lengths.passed() && gauss.count > 0 && low_ok && high_ok,
        format!(
            "{} pairs; gauss ratio in [{:.4}, {:.4}], {} violations; length ratio in [{:.4}, {:.4}], {} violations; \
             (a),(a) at a=1000: {low:.6} vs ln2 (|diff| {:.2e}, tol {QI_LOW_TOL:e}); (a),(1,a): {high:.6} vs 2ln2 (|diff| {:.2e}, tol {QI_HIGH_TOL:e})",
            gauss.count,
            gauss.min,
            gauss.max,
            gauss.violations,
            lengths.min,
            lengths.max,
            lengths.violations,
            (low - LN_2).abs(),
            (high - 2.0 * LN_2).abs(),
        ),
    );
}

fn comparison(report: &mut Report) {
    let mut families: Vec<_> = [(1, 20), (2, 20), (3, 20), (4, 10), (5, 6), (6, 4)]
        .into_iter()
        .map(|(len, d)| scan_comparison_exhaustive(len, d))
        .collect();
    families.push(scan_comparison_fuzz(10_000, 6, 20, 7).expect("fuzz"));
    let pairs: u64 = families.iter().map(|f| f.count).sum();
    let violations: u64 = families.iter().map(|f| f.violations).sum();
    report.record(
        7,
        violations == 0 && pairs > 10_000,
        format!("{pairs} pairs, {violations} violations"),
    );
}

fn mixing(report: &mut Report) {
    let pair = WordPair::from_u64s(&[1], &[1]).expect("pair");
    let e2 = mixing_bracket(&pair, 2, 1000)
        .expect("bracket")
        .midpoint_error();
    let e6 = mixing_bracket(&pair, 6, 1000)
        .expect("bracket")
        .midpoint_error();
    let mut nested = true;
    for l in [1, 2, 4, 6] {
        let brackets: Vec<_> = [10, 100, 1000, 10_000]
            .into_iter()
            .map(|cap| mixing_bracket(&pair, l, cap).expect("bracket"))
            .collect();
        for w in brackets.windows(2) {
            nested &=
                w[0].lower <= w[1].lower && w[1].upper <= w[0].upper && w[1].lower <= w[1].upper;
        }
    }
    report.record(
        8,
        MIXING_FACTOR * e6 <= e2 && nested,
        format!(
            "error L=2 {e2:.3e}, L=6 {e6:.3e}, ratio {:.2}; nested {nested}",
            e2 / e6
        ),
    );
}

fn e_minus_2(report: &mut Report) {
    let (lo, hi) = e_minus_2_bracket(400);
    let oracle = expand_point((&lo, &hi), 200).expect("oracle digits");
    let pattern_ok = digits_e_minus_2(200).expect("pattern") == oracle;
    let n = 30_000;
    let spec = DigitStreamSpec::new(
        StreamKind::Construction {
            spec: ConstructionSpec::EMinus2,
        },
        0,
    );
    let digits: Vec<_> = digit_stream(&spec).expect("stream").take(n).collect();
    let density = RangeRenewalState::from_digits(&digits).r_n() as f64 / n as f64;
    report.record(
        9,
        pattern_ok && (density - 1.0 / 3.0).abs() <= E_MINUS_2_DENSITY_TOL,
        format!("200-digit pattern matches oracle: {pattern_ok}; R_n/n at 30000 = {density:.5}"),
    );
}

fn constructions(report: &mut Report) {
    let n = 10_000;
    let mut ok = true;
    let mut detail = Vec::new();
    for beta in [0.25, 0.5, 0.75] {
        let digits = digits_e_beta(2, beta, Filler::One, n, 0).expect("e_beta");
        let growth = (RangeRenewalState::from_digits(&digits).r_n() as f64).ln() / (n as f64).ln();
        ok &= (growth - beta).abs() <= GROWTH_TOL;
        detail.push(format!("beta {beta}: {growth:.4}"));
    }
    for c in [1.0 / 3.0, 0.5, 1.0] {
        let digits = digits_f_c(c, n).expect("f_c");
        let density = RangeRenewalState::from_digits(&digits).r_n() as f64 / n as f64;
        ok &= (density - c).abs() <= DENSITY_TOL;
        detail.push(format!("c {c:.4}: {density:.4}"));
    }
    report.record(10, ok, detail.join(", "));
}

/// Root of `2^{-2s} + 2·3^{-2s} + 5^{-2s} = 1`, the `B = 2, n = 2` equation
/// written out by hand (`q_2` of 11, 12, 21, 22).
fn sigma_2_2_oracle() -> f64 {
    let f = |s: f64| 2f64.powf(-2.0 * s) + 2.0 * 3f64.powf(-2.0 * s) + 5f64.powf(-2.0 * s) - 1.0;
    let (mut lo, mut hi) = (0.0, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn good_sigma(report: &mut Report) {
    let s = good_sigma_n(2, 2, 1e-12).expect("sigma");
    let residual = (DenominatorHistogram::enumerate(2, 2)
        .expect("histogram")
        .sum(s)
        - 1.0)
        .abs();
    let oracle = sigma_2_2_oracle();
    let root_ok = residual <= SIGMA_EQUATION_TOL
        && (s - oracle).abs() < 1e-9
        && (s - SIGMA_NEAR.0).abs() < SIGMA_NEAR.1;
    let in_b: Vec<f64> = (2..=8)
        .map(|b| good_sigma_n(b, 3, 1e-12).expect("sigma"))
        .collect();
    let in_n: Vec<f64> = (2..=5)
        .map(|n| good_sigma_n(2, n, 1e-12).expect("sigma"))
        .collect();
    let increasing = in_b.windows(2).all(|w| w[0] < w[1]);
    let decreasing = in_n.windows(2).all(|w| w[0] > w[1]);
    report.record(
        11,
        root_ok && increasing && decreasing,
        format!(
            "sigma_2(2) = {s:.10} (oracle {oracle:.10}, residual {residual:.1e}); increasing in B: {increasing}; decreasing in n: {decreasing}"
        ),
    );
}

fn g_system(report: &mut Report) {
    let r = ifs_rates_g(1.0, 30).expect("rates");
    let target = 2.0 * LN_2;
    let b_ok = [r.b_n_min, r.b_n_max]
        .iter()
        .all(|b| ((b - target) / target).abs() <= RATE_REL_TOL);
    let ratio_ok = [r.a_n / r.b_n_min, r.a_n / r.b_n_max]
        .iter()
        .all(|d| ((d - 0.5) / 0.5).abs() <= RATE_REL_TOL);
    report.record(
        12,
        r.a_n == LN_2 && b_ok && ratio_ok,
        format!(
            "c = 1, n = 30: a_n {} b_n in [{:.5}, {:.5}] vs {target:.5}",
            r.a_n, r.b_n_min, r.b_n_max
        ),
    );
}

fn determinism(report: &mut Report) {
    let mut config = ExperimentConfig::new(StreamKind::Gauss);
    config.trials = 8;
    config.seed = 99;
    let csv = |workers: usize| {
        let mut c = config.clone();
        c.workers = Some(workers);
        summary_csv_string(&run_montecarlo(&c).expect("montecarlo"))
    };
    let (a, b, c) = (csv(1), csv(1), csv(8));
    let mut single = config.clone();
    single.trials = 1;
    let once = summary_csv_string(&run_montecarlo(&single).expect("montecarlo"));
    let twice = summary_csv_string(&run_montecarlo(&single).expect("montecarlo"));
    report.record(
        13,
        a == b && a == c && once == twice,
        format!(
            "repeat identical: {}; 1 vs 8 workers identical: {}",
            a == b && once == twice,
            a == c
        ),
    );
}

#[test]
fn acceptance() {
    let mut report = Report { lines: Vec::new() };
    identity_suite(&mut report);
    gauss_montecarlo(&mut report);
    iid_series(&mut report);
    quasi_independence(&mut report);
    comparison(&mut report);
    mixing(&mut report);
    e_minus_2(&mut report);
    constructions(&mut report);
    good_sigma(&mut report);
    g_system(&mut report);
    determinism(&mut report);

    report.lines.sort_by_key(|l| l.0);
    let failed: Vec<usize> = report.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    println!(
        "{} of {} criteria pass",
        report.lines.len() - failed.len(),
        report.lines.len()
    );
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
