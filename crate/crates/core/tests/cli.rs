use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cf-renewal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn expand_rational_and_word() {
    let o = cli(&["expand", "--rational", "2/3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1,2");
    let o = cli(&["expand", "--rational", "355/1000"]);
    assert_eq!(stdout(&o).trim(), "2,1,4,2,6");
    let o = cli(&["expand", "--word", "2,1,4,2,5,1"]);
    assert_eq!(stdout(&o).trim(), "71/200");
    let o = cli(&["--format", "json", "expand", "--rational", "2/3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["digits"], serde_json::json!([1, 2]));
}

#[test]
fn theory_table() {
    let o = cli(&["theory", "--k-max", "10"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "k,r_k,r_k_plus,escape_rate");
    assert_eq!(lines.len(), 11);
    assert_eq!(lines[1], "1,1/2,1,1/2");
    assert_eq!(lines[4], "4,5/128,5/16,1/8");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cli(&["--bogus"]).status.code(), Some(2));
    assert_eq!(cli(&["nonsense"]).status.code(), Some(2));
    assert_eq!(cli(&["expand"]).status.code(), Some(2));
    let o = cli(&["expand", "--rational", "3/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside the open unit interval"));
    assert_eq!(cli(&["sample", "--kind", "nope"]).status.code(), Some(2));
}

#[test]
fn sample_and_stats() {
    let a = cli(&["--seed", "4", "sample", "--kind", "gauss", "-n", "50"]);
    let b = cli(&["--seed", "4", "sample", "--kind", "gauss", "-n", "50"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).trim().split(',').count(), 50);

    let o = cli(&[
        "sample",
        "--kind",
        "construction",
        "--construction",
        "e_minus_2",
        "-n",
        "8",
    ]);
    assert_eq!(stdout(&o).trim(), "1,2,1,1,4,1,1,6");

    let o = cli(&[
        "stats",
        "--kind",
        "iid",
        "--checkpoints",
        "10,100",
        "--ks",
        "1,2",
    ]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,R_n,R_n_k1,R_n_k1_plus,R_n_k2,R_n_k2_plus");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("10,"));
}

#[test]
fn dimension_table() {
    let o = cli(&["dimension", "--B", "2", "--n", "2", "--tol", "1e-10"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    let sigma: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((sigma - 0.6545).abs() < 1e-4);
}

#[test]
fn montecarlo_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let out = dir.path().join("summary.csv");
    std::fs::write(
        &config,
        format!(
            r#"{{"kind": "gauss", "n": [100, 1000], "trials": 4, "ks": [1, 2], "seed": 3, "out": {:?}, "workers": 2}}"#,
            out
        ),
    )
    .unwrap();
    let o = cli(&["--config", config.to_str().unwrap(), "montecarlo"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(&out).unwrap();
    assert!(first.starts_with("n,stat,k,mean,stderr,theory\n"));
    assert_eq!(first.lines().count(), 1 + 2 * 5);

    let o = cli(&[
        "--config",
        config.to_str().unwrap(),
        "montecarlo",
        "--workers",
        "1",
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);

    let missing = dir.path().join("no/such/dir/x.csv");
    let o = cli(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        missing.to_str().unwrap(),
        "montecarlo",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no/such/dir"));
}

#[test]
fn verify_passes() {
    let o = cli(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["failures"], serde_json::json!([]));
    assert!(v["cases"].as_u64().unwrap() > 0);
}
