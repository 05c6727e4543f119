use std::process::{Command, Output};

fn sinc_pi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sinc-pi"))
        .args(args)
        .env_remove("PI_SINC_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn reference_pi_exact() {
    let o = sinc_pi(&["reference-pi", "--digits", "38"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "3.1415926535897932384626433832795028841\n");
}

#[test]
fn pi_json_round_trips() {
    let o = sinc_pi(&[
        "pi",
        "--series",
        "eq16",
        "--L",
        "1000000000000",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(
        keys,
        [
            "series",
            "L",
            "method",
            "digits",
            "value",
            "coinciding",
            "error_bound",
            "wall_time_s"
        ]
    );
    assert_eq!(v["L"], "1000000000000");
    assert_eq!(v["method"], "accelerated");
    assert_eq!(v["coinciding"], 12);
    assert_eq!(format!("{}\n", serde_json::to_string(&v).unwrap()), text);
}

#[test]
fn auto_method_switches_above_a_million() {
    let at = |l: &str| {
        let o = sinc_pi(&["pi", "--series", "midpoint", "--L", l, "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        v["method"].as_str().unwrap().to_string()
    };
    assert_eq!(at("1000000"), "direct");
    assert_eq!(at("1000001"), "accelerated");
}

#[test]
fn exit_status_contract() {
    let refused = sinc_pi(&[
        "pi",
        "--series",
        "eq15",
        "--L",
        "1000000000000",
        "--method",
        "direct",
    ]);
    assert_eq!(refused.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("cap"));
    let unreachable = sinc_pi(&[
        "pi",
        "--series",
        "eq15",
        "--L",
        "3",
        "--method",
        "accelerated",
    ]);
    assert_eq!(unreachable.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unreachable.stderr).contains("reachable"));
    assert_eq!(
        sinc_pi(&["pi", "--series", "eq17", "--L", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sinc_pi(&["reference-pi", "--digits", "10001"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(sinc_pi(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        sinc_pi(&["pi", "--series", "eq15", "--L", "5", "--threads", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn threads_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_sinc-pi"))
        .args(["pi", "--series", "eq15", "--L", "1000", "--format", "csv"])
        .env("PI_SINC_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_sinc-pi"))
        .args(["pi", "--series", "eq15", "--L", "1000"])
        .env("PI_SINC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn table_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let o = sinc_pi(&[
        "pi-table",
        "--series",
        "eq15",
        "--L-list",
        "23,1000,1000000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(
        rows[0].join(","),
        "kind,L,method,value,coinciding,pattern_p1,pattern_p2,wall_time_s"
    );
    let counts: Vec<&str> = rows[1..].iter().map(|r| r[4]).collect();
    assert_eq!(counts, ["4", "7", "13"]);
    assert!(rows[1..].iter().all(|r| r[5].is_empty() && r[6].is_empty()));
    // only the target file remains in the directory
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

    let single = sinc_pi(&["pi", "--series", "eq15", "--L", "1000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&single)).unwrap();
    assert_eq!(v["value"], rows[2][3]);

    let bad = sinc_pi(&[
        "pi-table",
        "--series",
        "eq15",
        "--L-list",
        "23",
        "--out",
        "/proc/none/x.csv",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn erf_profile_rows() {
    let o = sinc_pi(&[
        "erf-profile",
        "--L",
        "8",
        "--x-min",
        "0",
        "--x-max",
        "6",
        "--steps",
        "60",
        "--digits",
        "20",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 62);
    assert!(lines[1]
        .starts_with("0.00000000000000000000,0.00000000000000000000,0.00000000000000000000,"));
    for l in &lines[1..] {
        let x: f64 = l.split(',').next().unwrap().parse().unwrap();
        let expected = 8.0 * std::f64::consts::PI >= 12.0 * x;
        assert_eq!(l.ends_with(",true"), expected, "{l}");
    }
    // numeric fields are plain decimals
    assert!(lines[1..]
        .iter()
        .all(|l| l.split(',').take(4).all(|f| !f.contains('e'))));
}

#[test]
fn sinc_check_report() {
    let o = sinc_pi(&[
        "sinc-check",
        "--M",
        "4",
        "--samples",
        "50",
        "--digits",
        "30",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains(") ok"), "{text}");
    assert!(text.contains("half-width 47.1239"), "{text}");
    let one = sinc_pi(&["sinc-check", "--L", "1", "--samples", "1"]);
    assert!(one.status.success());
    assert!(!stdout(&one).contains("NaN"));
}

#[test]
fn identities_below_threshold() {
    let o = sinc_pi(&["verify-identities", "--digits", "16", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let threshold: f64 = 1e-12;
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    for row in rows {
        let v: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(v < threshold, "{row}");
    }
}
