use std::process::{Command, Output};

fn spinexp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinexp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_b4_all_passes() {
    let o = spinexp(&["verify", "--family", "B", "--n", "4", "--suite", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let reports = v.as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r["status"] == "pass"));
    assert!(reports.iter().all(|r| r["params"]["n"] == 4));
}

#[test]
fn verify_json_is_byte_identical() {
    let args = ["verify", "--family", "D", "--n", "4", "--suite", "vanishing,dn_top", "--seed", "11"];
    let a = spinexp(&args);
    let b = spinexp(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("\"seed\": 11"));
}

#[test]
fn bounds_rows() {
    let o = spinexp(&["bounds", "--imax", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0], rows[0][3], rows[0][4]), ("3", "2", "4"));
    assert_eq!((rows[1][0], rows[1][3], rows[1][4]), ("4", "3", "7"));
    assert_eq!(spinexp(&["bounds", "--imax", "4"]).stdout, o.stdout);
}

#[test]
fn bounds_override() {
    let o = spinexp(&["bounds", "--imax", "5", "--m", "5=2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[2]["g"], "6");
    assert_eq!(v[2]["m_source"], "user");
}

#[test]
fn spin_orbit_d4_has_eight_weights() {
    let o = spinexp(&["orbit", "--family", "D", "--n", "4", "--k", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 8);
}

#[test]
fn phi_of_orbit_sum() {
    let o = spinexp(&["phi", "--family", "B", "--n", "3", "--i", "2", "--weight", "1,0,0", "--orbit-sum"]);
    assert_eq!(stdout(&o).trim(), "e1^2 + e2^2 + e3^2");
}

#[test]
fn tau_b3_degree_two() {
    let o = spinexp(&["tau", "--family", "B", "--n", "3", "--i", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["tau"], "2");
    assert_eq!(v[0]["millis"], serde_json::Value::Null);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(spinexp(&["orbit", "--family", "C", "--n", "4", "--k", "1"]).status.code(), Some(2));
    assert_eq!(spinexp(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(spinexp(&["orbit", "--family", "D", "--n", "2", "--k", "1"]).status.code(), Some(2));
    assert_eq!(spinexp(&["frobnicate"]).status.code(), Some(2));
}
