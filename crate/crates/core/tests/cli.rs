use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galorb")).args(args).env_remove("LMFDB_BASE_URL").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn scalar_commands() {
    assert_eq!(stdout(&["lo", "2", "4"]).trim(), "6");
    let v: serde_json::Value = serde_json::from_str(&stdout(&["--format", "json", "bound", "256"])).unwrap();
    assert_eq!(v["bound"], 10);
    assert_eq!(v["rigorous"], true);
}

#[test]
fn csv_has_header_and_rows() {
    let text = stdout(&["--format", "csv", "lt", "5", "4", "--brute"]);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert!(rdr.headers().unwrap().iter().any(|h| h == "total"));
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert!(rows.len() >= 2);
}

#[test]
fn json_is_newline_terminated_and_deterministic() {
    for args in [
        &["--format", "json", "types", "2", "6"][..],
        &["--format", "json", "lo", "7", "4", "--derived"],
        &["--format", "json", "compare", "256", "12", "--offline"],
        &["--format", "json", "unitgroup", "3", "-3", "4"],
    ] {
        let a = stdout(args);
        assert!(a.ends_with("}\n"), "{args:?}");
        assert_eq!(a, stdout(args), "{args:?}");
        serde_json::from_str::<serde_json::Value>(&a).unwrap();
    }
}

#[test]
fn comparison_report() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&["--format", "json", "compare", "256", "12", "--offline"])).unwrap();
    assert_eq!(v["ncm"], 12);
    assert_eq!(v["satisfied"], true);
    assert_eq!(v["anomalies"][0]["gap"], 2);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["lt", "4", "2"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "0"]).status.code(), Some(2));
    assert_eq!(run(&["unitgroup", "13", "2", "9"]).status.code(), Some(3));
    assert_eq!(run(&["--budget", "100", "lt", "7", "4", "--brute"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["compare", "13", "12", "--offline"]).status.code(), Some(1));
    let out = run(&["lt", "4", "2"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not prime"));
}

#[test]
fn small_audit_is_clean() {
    let out = run(&["--format", "json", "audit", "--pmax", "5", "--nmax", "3", "--nmax2", "5"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["unexpected"].as_array().map(Vec::len), Some(0));
    assert_eq!(out.status.code(), Some(0));
}
