use std::process::{Command, Output};

fn kolmo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kolmo"))
        .env_remove("KOLMO_FORMAT")
        .env_remove("KOLMO_OUT")
        .env_remove("KOLMO_SEED")
        .arg("--no-timestamp")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_lines(s: &str) -> Vec<&str> {
    s.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn moments_csv() {
    let o = kolmo(&["moments", "--p", "1", "--q", "1", "--k", "0"]);
    assert!(o.status.success());
    assert_eq!(data_lines(&stdout(&o)), vec!["p,q,k,re,im", "1,1,0,4/5,0/1"]);
}

#[test]
fn negative_indices_are_accepted() {
    let o = kolmo(&["moments", "--p", "-2", "--q", "1", "--k", "1", "--verify"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn coefficients_verify_against_oracle() {
    let o = kolmo(&["coeffs", "--a", "2", "--k", "3", "--verify"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("# status=PASS"));
    assert_eq!(data_lines(&out).len(), 1 + 4);
}

#[test]
fn kernel_grid_row_counts() {
    for (what, rows) in [("C", 25), ("R", 25), ("S", 5)] {
        let o = kolmo(&["kernel-grid", "--N", "4", "--grid", "5", "--what", what]);
        assert!(o.status.success());
        assert_eq!(data_lines(&stdout(&o)).len(), rows + 1, "{what}");
    }
    let exact = kolmo(&["kernel-grid", "--N", "3", "--grid", "3", "--what", "C", "--exact"]);
    let float = kolmo(&["kernel-grid", "--N", "3", "--grid", "3", "--what", "C"]);
    let values = |o: &Output| -> Vec<f64> {
        data_lines(&stdout(o))[1..].iter().map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect()
    };
    for (e, f) in values(&exact).iter().zip(values(&float)) {
        assert!((e - f).abs() < 1e-15);
    }
}

#[test]
fn sampling_is_deterministic() {
    let args = ["sample", "--N", "3", "--M", "8", "--R", "4", "--seed", "11"];
    let a = kolmo(&args);
    let b = kolmo(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(data_lines(&stdout(&a)).len(), 1 + 4 * 9);
    let c = kolmo(&["sample", "--N", "3", "--M", "8", "--R", "4", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn json_output_is_versioned() {
    let o = kolmo(&["--format", "json", "decorr", "--s", "0.5", "--beta", "0.5", "--t", "1", "--N-list", "100,400"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["meta"].get("timestamp").is_none());
}

#[test]
fn hankel_check_reports_pass() {
    let o = kolmo(&["hankel-check", "--N", "5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["meta"]["status"], "PASS");
}

#[test]
fn asymptotics_and_fluctuation_run() {
    let o = kolmo(&["asymptotics", "--family", "integral", "--n-list", "50,100", "--points", "101"]);
    assert!(o.status.success());
    assert_eq!(data_lines(&stdout(&o)).len(), 3);
    let f = kolmo(&["fluctuation", "--N-list", "4,8", "--t-list", "0.5", "--R", "500", "--seed", "3"]);
    assert!(f.status.success());
    assert_eq!(data_lines(&stdout(&f)).len(), 3);
}

#[test]
fn verify_exact_level_passes() {
    let o = kolmo(&["verify-all", "--level", "exact"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn exit_codes() {
    assert_eq!(kolmo(&["kernel-grid", "--N", "0", "--grid", "3", "--what", "C"]).status.code(), Some(2));
    assert_eq!(kolmo(&["decorr", "--s", "1.5", "--beta", "0.5", "--t", "1", "--N-list", "10"]).status.code(), Some(2));
    assert_eq!(kolmo(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(kolmo(&["hankel-check", "--N", "40"]).status.code(), Some(2));
}

#[test]
fn writes_to_file() {
    let path = std::env::temp_dir().join(format!("kolmo-cli-{}.csv", std::process::id()));
    let o = kolmo(&["--out", path.to_str().unwrap(), "coeffs", "--a", "0", "--k", "0"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.contains("a,k,l,b"));
}
