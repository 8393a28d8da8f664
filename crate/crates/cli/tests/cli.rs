use std::collections::HashMap;
use std::fs;
use std::process::{Command, Output};

fn mesd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mesd"))
        .args(args)
        .env_remove("MESD_THREADS")
        .output()
        .expect("mesd runs")
}

fn fields(out: &Output) -> HashMap<String, String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| l.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn num(f: &HashMap<String, String>, key: &str) -> f64 {
    f[key].parse().unwrap()
}

#[test]
fn two_state_records() {
    let out = mesd(&["two", "--prior", "0.5", "--overlap", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let f = fields(&out);
    assert!((num(&f, "helstrom") - 0.8535534).abs() < 1e-7);
    assert!((num(&f, "nc_bound") - 0.75).abs() < 1e-12);
    assert_eq!(f["advantage"], "true");

    let f = fields(&mesd(&["two", "--prior", "0.5", "--overlap", "0"]));
    assert_eq!(f["helstrom"], "1");
    assert_eq!(f["nc_bound"], "1");
    assert_eq!(f["advantage"], "false");
}

#[test]
fn out_of_range_flags_exit_2() {
    let out = mesd(&["two", "--prior", "1.5", "--overlap", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--prior"));
    let out = mesd(&["three", "--theta-deg", "95", "--prior", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--theta"));
    assert_eq!(mesd(&["three", "--theta-deg", "30", "--prior", "0.6"]).status.code(), Some(2));
    assert_eq!(mesd(&["three", "--theta", "1", "--theta-deg", "30", "--prior", "0.2"]).status.code(), Some(2));
    assert_eq!(mesd(&["map", "--theta-steps", "1"]).status.code(), Some(2));
}

#[test]
fn three_state_records() {
    let f = fields(&mesd(&["three", "--theta-deg", "60", "--prior", "0.3333333"]));
    assert!((num(&f, "s_quantum") - 0.6666667).abs() < 1e-7);
    assert!((num(&f, "s_nc_bound") - 0.8333333).abs() < 1e-7);
    assert_eq!(f["advantage"], "false");
    assert_eq!(f["branch"], "low-prior");

    let f = fields(&mesd(&["three", "--theta-deg", "60", "--prior", "0.5"]));
    assert!((num(&f, "s_quantum") - 0.9330127).abs() < 1e-7);
    assert!((num(&f, "s_nc_bound") - 0.875).abs() < 1e-12);
    assert_eq!(f["advantage"], "true");
    assert_eq!(f["branch"], "high-prior");

    let f = fields(&mesd(&["three", "--theta-deg", "45", "--prior", "0.5"]));
    assert_eq!(f["s_quantum"], "1");
    assert_eq!(f["s_nc_bound"], "1");
    assert_eq!(f["advantage"], "false");
}

#[test]
fn radians_and_degrees_agree() {
    let a = mesd(&["three", "--theta-deg", "60", "--prior", "0.4"]);
    let b = mesd(&["three", "--theta", &std::f64::consts::FRAC_PI_3.to_string(), "--prior", "0.4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_record_parses() {
    let out = mesd(&["two", "--prior", "0.1", "--overlap", "0.5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["helstrom"].as_f64().unwrap() - 0.9527693).abs() < 1e-7);
    assert!((v["gap"].as_f64().unwrap() - 0.0027693).abs() < 1e-7);
}

#[test]
fn oracle_commands() {
    let out = mesd(&["oracle-three", "--theta-deg", "60", "--prior", "0.3333333", "--tol", "1e-3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(num(&fields(&out), "difference") <= 1e-3);

    let out = mesd(&["oracle-two", "--sep-deg", "90", "--prior", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let f = fields(&out);
    assert_eq!(f["analytic"], "1");
    assert_eq!(f["oracle"], "1");

    assert_eq!(mesd(&["oracle-two", "--prior", "0.5"]).status.code(), Some(2));
}

#[test]
fn oracle_tolerance_failure_exits_4() {
    // a deliberately coarse search cannot meet a 1e-12 tolerance
    let out = mesd(&[
        "oracle-three", "--theta", "1.5", "--prior", "0.15", "--grid-n", "16", "--restarts", "0",
        "--refine-iters", "0", "--tol", "1e-12",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let f = fields(&out);
    assert!(num(&f, "difference") > 1e-12);
    assert_eq!(f["within_tol"], "false");
}

#[test]
fn ontic_check_command() {
    let out = mesd(&["ontic-check", "--num-models", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model 0:"));
    assert_eq!(fields(&out)["failures"], "0");

    let out = mesd(&["ontic-check", "--num-models", "2000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fields(&out)["two_state_pass"], "2000");

    assert_eq!(mesd(&["ontic-check", "--num-models", "0"]).status.code(), Some(2));
}

#[test]
fn map_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.csv");
    let out = mesd(&["map", "--theta-steps", "7", "--prior-steps", "6", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let produced = fs::read_to_string(&path).unwrap();
    let golden = include_str!("golden/map_7x6.csv");
    assert_eq!(produced, golden);
}

#[test]
fn map_trine_row_changes_sign_between_046_and_047() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.csv");
    let out = mesd(&["map", "--theta-steps", "181", "--prior-steps", "101", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,prior,s_quantum,s_nc_bound,gap,advantage"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 181 * 101);

    // θ = π/3 is row block 120
    let trine: Vec<&Vec<String>> = rows[120 * 101..121 * 101].iter().collect();
    assert_eq!(trine[0][0], "1.04719755");
    let gap_at = |j: usize| trine[j][4].parse::<f64>().unwrap();
    assert_eq!(trine[92][1], "0.46");
    assert_eq!(trine[94][1], "0.47");
    assert!(gap_at(92) < 0.0);
    assert!(gap_at(93) > 0.0 && gap_at(94) > 0.0);

    for r in &rows {
        let v: Vec<f64> = r[..5].iter().map(|s| s.parse().unwrap()).collect();
        // definitional within the printed precision
        assert!((v[4] - (v[2] - v[3])).abs() <= 2e-9, "{r:?}");
        if r[0] == "0.785398163" && r[1] == "0.5" {
            assert_eq!(r[4], "0");
        }
    }
}

#[test]
fn map_json_has_config_echo() {
    let out = mesd(&["map", "--theta-steps", "3", "--prior-steps", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["theta_steps"], 3);
    assert_eq!(v["config"]["prior_steps"], 2);
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 6);
    let keys: Vec<&str> = cells[0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["theta", "prior", "s_quantum", "s_nc_bound", "gap", "advantage"]);
}

#[test]
fn map_unwritable_path_exits_3() {
    let out = mesd(&["map", "--theta-steps", "3", "--prior-steps", "3", "--out", "/nonexistent-dir/x/map.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_thread_override_exits_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_mesd"))
        .args(["map", "--theta-steps", "3", "--prior-steps", "3"])
        .env("MESD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
