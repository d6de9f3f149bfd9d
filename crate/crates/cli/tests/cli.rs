use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fiberqi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_fiberqi")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&run(args)).unwrap()
}

#[test]
fn check_sc_reports_exact_ratios() {
    let genus2 = scratch("g2.txt", "gens: a b c d\nrel: [a,b][c,d]\n");
    let v = json(&["check-sc", "--lambda", "1/6", genus2.to_str().unwrap()]);
    assert_eq!(v["worstRatio"], "1/8");
    assert_eq!(v["satisfied"], true);
}

#[test]
fn hall_and_coords() {
    let v = json(&["hall", "--m", "2", "--weight", "3"]);
    assert_eq!(v["levels"], serde_json::json!([2, 1, 2]));
    assert_eq!(v["basis"][2]["expr"], "[x2,x1]");
    let v = json(&["coords", "--q", "2", "--word", "[x1,x2]^3"]);
    assert_eq!(v["coords"], serde_json::json!([-3]));
}

#[test]
fn mu_of_a_matrix_file() {
    let m = scratch("m.json", r#"[["1","1"],["0","1/3"]]"#);
    let v = json(&["mu", "--place", "p:3", "--matrix", m.to_str().unwrap()]);
    assert_eq!(v["n"], serde_json::json!([-1, 0]));
    assert_eq!(v["exact"], serde_json::json!(["1·log3", "0"]));
}

#[test]
fn config_file_mirrors_flags() {
    let cfg = scratch("qie.cfg", "nmax=3\nbfs_nmax=0\nrep=pilambda:2\nplace=p:2\n");
    let csv = run(&["experiment", "qie", "--config", cfg.to_str().unwrap()]);
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# experiment=qie seed=7 place=p:2"));
    assert_eq!(lines[1], "d,n,beta,coord_value,mu_norm,bfs_len");
    assert_eq!(lines[2..], ["1,1,5,1,0.000000000000,", "1,2,5,32,0.000000000000,", "1,3,5,243,0.000000000000,"]);
    let csv = run(&["experiment", "qie", "--config", cfg.to_str().unwrap(), "--nmax", "1"]);
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn area_and_dehn() {
    let z2 = scratch("z2.txt", "gens: a b\nrel: [a,b]\n");
    let v = json(&["area", "--word", "[a^2,b^2]", "--cap", "6", z2.to_str().unwrap()]);
    assert_eq!(v["area"], "4");
    let out = Command::new(env!("CARGO_BIN_EXE_fiberqi"))
        .args(["dehn", "--word", "a", z2.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
