use std::process::{Command, Output};

use serde_json::Value;

fn hlcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlcert"))
        .args(args)
        .env_remove("HLCERT_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = hlcert(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap()
}

fn close(v: &Value, want: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() < 1e-12
}

#[test]
fn constants_at_two() {
    let v = json(&["constants", "--q", "2", "--field", "real"]);
    assert!(close(&v["result"]["constants"][0]["value"], 1.0));
    let v = json(&["constants", "--q", "1"]);
    assert!(close(&v["result"]["constants"][0]["value"], 0.5f64.sqrt()));
    assert!(close(
        &v["result"]["constants"][1]["value"],
        std::f64::consts::PI.sqrt() / 2.0
    ));
}

#[test]
fn exponents_example() {
    let v = json(&["exponents", "--m", "3", "--p", "4", "--lambda0", "1"]);
    let r = &v["result"];
    assert!(close(&r["s"], 2.0) && close(&r["eta1"], 4.0) && close(&r["constant"], 2.0));
    assert_eq!(r["admissible"], Value::Bool(true));
}

#[test]
fn region_reports_empty() {
    let out = hlcert(&["region", "--m", "2", "--lambda0", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("region: empty"));
    let v = json(&["region", "--m", "2", "--lambda0", "2"]);
    assert_eq!(v["result"]["upper"], Value::String("inf".into()));
}

#[test]
fn json_round_trips() {
    for args in [
        vec![
            "exponents",
            "--m",
            "2",
            "--p",
            "inf",
            "--lambda0",
            "2",
            "--format",
            "json",
        ],
        vec![
            "verify",
            "--m",
            "2",
            "--n",
            "2",
            "--p",
            "inf",
            "--lambda0",
            "2",
            "--trials",
            "10",
            "--seed",
            "1",
            "--format",
            "json",
        ],
        vec![
            "chain-check",
            "--m",
            "2",
            "--n",
            "2",
            "--lambda0",
            "1",
            "--s",
            "2",
            "--seed",
            "2",
            "--format",
            "json",
        ],
    ] {
        let text = stdout(&hlcert(&args));
        let v: Value = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
        assert_eq!(again, text);
    }
}

#[test]
fn usage_and_domain_errors_exit_one() {
    assert_eq!(hlcert(&["bogus"]).status.code(), Some(1));
    assert_eq!(hlcert(&["region", "--m", "2"]).status.code(), Some(1));
    assert_eq!(hlcert(&["constants", "--q", "3"]).status.code(), Some(1));
    let out = hlcert(&[
        "verify",
        "--m",
        "3",
        "--n",
        "2",
        "--p",
        "8",
        "--lambda0",
        "1",
        "--seed",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("s >= 2"));
    let out = hlcert(&[
        "verify",
        "--m",
        "2",
        "--n",
        "2",
        "--p",
        "4",
        "--lambda0",
        "1",
        "--seed",
        "0",
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
    assert_eq!(hlcert(&["--help"]).status.code(), Some(0));
}

#[test]
fn omitted_seed_is_printed_and_reproducible() {
    let out = hlcert(&[
        "verify",
        "--m",
        "3",
        "--n",
        "2",
        "--p",
        "4",
        "--lambda0",
        "1",
        "--trials",
        "8",
    ]);
    let text = stdout(&out);
    let header = text.lines().next().unwrap();
    let seed: u64 = header
        .split("seed ")
        .nth(1)
        .and_then(|s| s.split(',').next())
        .and_then(|s| s.parse().ok())
        .expect("seed in header");
    let args = |s: &str| {
        vec![
            "verify",
            "--m",
            "3",
            "--n",
            "2",
            "--p",
            "4",
            "--lambda0",
            "1",
            "--trials",
            "8",
            "--seed",
            s,
            "--format",
            "json",
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>()
    };
    let seed = seed.to_string();
    let a = args(&seed);
    let a: Vec<&str> = a.iter().map(String::as_str).collect();
    let first = stdout(&hlcert(&a));
    assert_eq!(first, stdout(&hlcert(&a)));
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["result"]["seed"].as_u64().unwrap().to_string(), seed);
}

#[test]
fn jobs_are_recorded_and_do_not_change_results() {
    let base = [
        "verify",
        "--m",
        "3",
        "--n",
        "2",
        "--p",
        "5",
        "--lambda0",
        "1.5",
        "--trials",
        "40",
        "--seed",
        "9",
    ];
    let run = |jobs: &str| {
        let mut args = base.to_vec();
        args.extend(["--jobs", jobs, "--format", "json"]);
        let v: Value = serde_json::from_str(&stdout(&hlcert(&args))).unwrap();
        v
    };
    let (mut one, mut three) = (run("1"), run("3"));
    assert_eq!(one["jobs"], 1);
    assert_eq!(three["jobs"], 3);
    for v in [&mut one, &mut three] {
        v["jobs"] = Value::Null;
        v["result"]["jobs"] = Value::Null;
    }
    assert_eq!(one, three);

    let out = Command::new(env!("CARGO_BIN_EXE_hlcert"))
        .args(["region", "--m", "3", "--lambda0", "1", "--format", "json"])
        .env("HLCERT_JOBS", "2")
        .output()
        .unwrap();
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["jobs"], 2);
}

#[test]
fn csv_columns_match_help() {
    let cases: [(&[&str], &str); 4] = [
        (&["sweep", "--m", "2", "--p", "4", "--grid", "1,1.5,2"], "lambda0,s,eta1,constant,admissible,extrapolated,max_ratio_conservative"),
        (&["exponents", "--m", "3", "--p", "4", "--lambda0", "1"], "m,p,lambda0,field,s,eta1,constant,admissible,extrapolated"),
        (
            &["verify", "--m", "2", "--n", "2", "--p", "inf", "--lambda0", "2", "--trials", "3", "--seed", "1"],
            "trial,trial_seed,kind,lhs,norm_lower,norm_upper,norm_method,ratio_conservative,ratio_empirical,classification,retried",
        ),
        (&["chain-check", "--m", "2", "--n", "2", "--lambda0", "1", "--s", "2", "--seed", "1"], "index,name,kind,lhs,rhs,slack,noise,pass"),
    ];
    for (args, header) in cases {
        let mut full = args.to_vec();
        full.extend(["--format", "csv"]);
        let text = stdout(&hlcert(&full));
        assert_eq!(text.lines().next().unwrap(), header);
        let help = stdout(&hlcert(&[args[0], "--help"]));
        assert!(help.contains(header), "{} --help lacks its columns", args[0]);
    }
    let text = stdout(&hlcert(&[
        "sweep", "--m", "2", "--p", "4", "--grid", "1,1.5,2", "--format", "csv",
    ]));
    let admissible: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(admissible, ["false", "true", "false"]);
}

#[test]
fn search_then_verify_saved_form() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("best.json");
    let path_str = path.to_str().unwrap();
    let v = json(&[
        "search",
        "--m",
        "3",
        "--n",
        "2",
        "--p",
        "4",
        "--lambda0",
        "1",
        "--budget",
        "100",
        "--seed",
        "3",
        "--save",
        path_str,
    ]);
    let ratio = v["result"]["best_ratio_conservative"].as_f64().unwrap();
    assert!((1.0 - 1e-12..=2.0 + 1e-9).contains(&ratio));
    let w = json(&[
        "verify",
        "--p",
        "4",
        "--lambda0",
        "1",
        "--tensor",
        path_str,
        "--seed",
        "0",
    ]);
    assert_eq!(w["result"]["classification"], "pass");
    let c = json(&["chain-check", "--lambda0", "1", "--p", "4", "--tensor", path_str]);
    assert_eq!(c["result"].as_array().unwrap().len(), 3);
}

#[test]
fn checks_report_passing_inequalities() {
    let v = json(&["khinchin-check", "--q", "1", "--a", "1,1"]);
    assert!(close(&v["result"]["ratio"], 1.0));
    let v = json(&[
        "khinchin-check",
        "--q",
        "1.5",
        "--a",
        "1+1i,-2i",
        "--samples",
        "20000",
        "--seed",
        "4",
    ]);
    assert_eq!(v["result"]["field"], "complex");
    let v = json(&[
        "contraction-check",
        "--t",
        "2",
        "--m",
        "2",
        "--n",
        "2",
        "--kind",
        "signs",
        "--seed",
        "5",
    ]);
    assert_eq!(v["result"]["pass"], true);
    let v = json(&[
        "transfer",
        "--p",
        "4,4,4",
        "--q",
        "inf,inf,inf",
        "--lambda0",
        "1",
        "--s",
        "2",
    ]);
    assert!(close(&v["result"]["eta1"], 4.0));
    let v = json(&["classical", "--m", "2", "--p", "inf"]);
    assert_eq!(v["result"]["p"], "inf");
}
