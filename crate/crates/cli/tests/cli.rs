use std::path::Path;
use std::process::{Command, Output};

fn hedge_nash(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hedge-nash"))
        .args(args)
        .env_remove("HEDGE_NASH_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn dir_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

/// Parses `final eps_average=<v> target=<t> bound=<b>`.
fn summary(out: &Output) -> (f64, String, f64) {
    let text = stdout(out);
    let line = text
        .lines()
        .find(|l| l.starts_with("final "))
        .expect("summary line");
    let fields: Vec<&str> = line.split_whitespace().collect();
    let value = |prefix: &str| {
        fields
            .iter()
            .find_map(|f| f.strip_prefix(prefix))
            .unwrap()
            .to_string()
    };
    (
        value("eps_average=").parse().unwrap(),
        value("target="),
        value("bound=").parse().unwrap(),
    )
}

#[test]
fn run_rps_with_schedule_hits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = hedge_nash(&[
        "run",
        "--family",
        "rps",
        "--n",
        "3",
        "--eps",
        "0.2",
        "--output-dir",
        &dir_arg(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (eps, target, _) = summary(&out);
    assert!(eps <= 1e-12);
    assert_eq!(target, "0.2");
    for f in ["trajectory.csv", "report.json", "schedule.json"] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let schedule: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("schedule.json")).unwrap())
            .unwrap();
    assert_eq!(schedule["K"], 1451);
}

#[test]
fn run_zero_sum_meets_target() {
    let dir = tempfile::tempdir().unwrap();
    let out = hedge_nash(&[
        "run",
        "--family",
        "symmetric_zero_sum",
        "--n",
        "5",
        "--seed",
        "7",
        "--eps",
        "0.2",
        "--output-dir",
        &dir_arg(dir.path()),
    ]);
    assert!(out.status.success());
    let (eps, _, bound) = summary(&out);
    assert!(eps <= 0.2);
    assert!(bound > 0.0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["epsilon"].as_f64().unwrap(), eps);
}

#[test]
fn run_from_game_file_has_expected_rows() {
    let dir = tempfile::tempdir().unwrap();
    let game = dir.path().join("g.json");
    std::fs::write(&game, r#"{"n": 2, "payoffs": [0.2, 0.9, 0.4, 0.1]}"#).unwrap();
    for (stride, rows) in [(None, 1001), (Some("7"), 144), (Some("1000"), 2)] {
        let out_dir = dir.path().join(format!("out-{rows}"));
        let mut args = vec![
            "run".to_string(),
            "--game".into(),
            dir_arg(&game),
            "--alpha".into(),
            "0.1".into(),
            "--K".into(),
            "1000".into(),
            "--output-dir".into(),
            dir_arg(&out_dir),
        ];
        if let Some(s) = stride {
            args.extend(["--observe-every".to_string(), s.to_string()]);
        }
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = hedge_nash(&refs);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(summary(&out).1, "n/a");
        let csv = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "k,eps_iterate,eps_average,bound_rhs,regret_avg"
        );
        let body: Vec<&str> = lines.collect();
        assert_eq!(body.len(), rows, "stride {stride:?}");
        assert!(body.last().unwrap().starts_with("1000,"));
        assert!(!out_dir.join("schedule.json").exists());
    }
}

#[test]
fn run_rejects_conflicting_or_missing_parameters() {
    for args in [
        vec!["run", "--family", "rps", "--n", "3"],
        vec!["run", "--family", "rps", "--n", "3", "--alpha", "0.1"],
        vec![
            "run", "--family", "rps", "--n", "3", "--alpha", "0.1", "--K", "10", "--eps", "0.2",
        ],
        vec!["run", "--family", "rps", "--n", "4", "--eps", "0.2"],
        vec!["run", "--game", "/nonexistent/game.json", "--eps", "0.2"],
    ] {
        assert_eq!(hedge_nash(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn schedule_prints_pinned_values() {
    let out = hedge_nash(&["schedule", "--n", "3", "--eps", "0.2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["k_hat"], 1450);
    assert_eq!(v["K"], 1451);
    assert_eq!(v["k_prime"], 6);
    assert!((v["alpha"].as_f64().unwrap() - 0.021_968_923_141_759_35).abs() < 1e-12);

    let one = hedge_nash(&["schedule", "--n", "1", "--eps", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&one)).unwrap();
    assert_eq!(v["K"], 18);

    for eps in ["abc", "0", "1.5", "-0.2"] {
        let bad = hedge_nash(&["schedule", "--n", "3", "--eps", eps]);
        assert_eq!(bad.status.code(), Some(2), "eps {eps}");
    }
}

#[test]
fn check_passes_on_rps_and_random_game() {
    for extra in [
        &["--family", "rps", "--n", "3"][..],
        &["--family", "random_uniform", "--n", "5", "--seed", "1"],
    ] {
        let dir = tempfile::tempdir().unwrap();
        let mut args = vec!["check", "--output-dir"];
        let d = dir_arg(dir.path());
        args.push(&d);
        args.extend_from_slice(extra);
        let out = hedge_nash(&args);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        let reports: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("reports.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(reports["reports"].as_array().unwrap().len(), 10);
    }
}

#[test]
fn check_flags_injected_fault_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = hedge_nash(&[
        "check",
        "--family",
        "random_uniform",
        "--n",
        "5",
        "--seed",
        "1",
        "--inject-fault",
        "1e-3",
        "--output-dir",
        &dir_arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("telescoping_identity asserted FAIL"));
    let text =
        std::fs::read_to_string(dir.path().join("witnesses/telescoping_identity.json")).unwrap();
    let w: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["lemma", "game", "alpha", "k", "lhs", "rhs", "violation"] {
        assert!(w.get(key).is_some(), "missing {key}");
    }
    assert_eq!(w["lemma"], "telescoping_identity");
    assert!(w["violation"].as_f64().unwrap() > 1e-8);
}

#[test]
fn oracle_writes_equilibria() {
    let dir = tempfile::tempdir().unwrap();
    let out = hedge_nash(&[
        "oracle",
        "--family",
        "coordination",
        "--n",
        "2",
        "--output-dir",
        &dir_arg(dir.path()),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("equilibria.json")).unwrap())
            .unwrap();
    let masses: Vec<Vec<f64>> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            e["masses"]
                .as_array()
                .unwrap()
                .iter()
                .map(|m| m.as_f64().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(masses, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]);

    let too_big = hedge_nash(&[
        "oracle",
        "--family",
        "coordination",
        "--n",
        "13",
        "--output-dir",
        &dir_arg(dir.path()),
    ]);
    assert_eq!(too_big.status.code(), Some(2));
}

#[test]
fn spec_json_source_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"family": "doubly_symmetric", "n": 4, "seed": 3}"#,
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out_a = hedge_nash(&[
        "run",
        "--spec-json",
        &dir_arg(&spec),
        "--alpha",
        "0.2",
        "--K",
        "50",
        "--output-dir",
        &dir_arg(&a),
    ]);
    let out_b = hedge_nash(&[
        "run",
        "--family",
        "doubly_symmetric",
        "--n",
        "4",
        "--seed",
        "3",
        "--alpha",
        "0.2",
        "--K",
        "50",
        "--output-dir",
        &dir_arg(&b),
    ]);
    assert!(out_a.status.success() && out_b.status.success());
    assert_eq!(
        std::fs::read(a.join("trajectory.csv")).unwrap(),
        std::fs::read(b.join("trajectory.csv")).unwrap()
    );
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen: Vec<Vec<Vec<u8>>> = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{i}"));
        let d = dir_arg(&out_dir);
        let run = hedge_nash(&[
            "run",
            "--family",
            "random_uniform",
            "--n",
            "4",
            "--seed",
            "9",
            "--eps",
            "0.2",
            "--output-dir",
            &d,
        ]);
        assert!(run.status.success());
        let campaign = Command::new(env!("CARGO_BIN_EXE_hedge-nash"))
            .args(["campaign", "--samples", "5", "--output-dir", &d])
            .env("HEDGE_NASH_THREADS", threads)
            .output()
            .unwrap();
        assert!(
            campaign.status.success(),
            "{}",
            String::from_utf8_lossy(&campaign.stderr)
        );
        let files = [
            "trajectory.csv",
            "report.json",
            "schedule.json",
            "campaign_report.md",
        ];
        seen.push(
            files
                .iter()
                .map(|f| std::fs::read(out_dir.join(f)).unwrap())
                .collect(),
        );
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn normalize_flag_rescales_game_file() {
    let dir = tempfile::tempdir().unwrap();
    let game = dir.path().join("g.json");
    std::fs::write(&game, r#"{"n": 2, "payoffs": [2, -1, 5, 3]}"#).unwrap();
    let plain = hedge_nash(&[
        "oracle",
        "--game",
        &dir_arg(&game),
        "--output-dir",
        &dir_arg(dir.path()),
    ]);
    assert_eq!(plain.status.code(), Some(2));
    let scaled = hedge_nash(&[
        "oracle",
        "--game",
        &dir_arg(&game),
        "--normalize",
        "--output-dir",
        &dir_arg(dir.path()),
    ]);
    assert!(
        scaled.status.success(),
        "{}",
        String::from_utf8_lossy(&scaled.stderr)
    );
    // Rescaled to [[0.5, 0], [1, 0.667]]: strategy 1 strictly dominates.
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("equilibria.json")).unwrap())
            .unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["support"], serde_json::json!([1]));
}
