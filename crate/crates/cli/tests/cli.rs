use std::path::PathBuf;
use std::process::{Command, Output};

fn rho1(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rho1")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rho1-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn compute_trefoil_pd() {
    let o = rho1(&["compute", "--pd", "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("delta: T^-1-1+T\n"), "{s}");
    assert!(s.contains("rho1: -T^-2+2*T^-1-2+2*T-T^2\n"), "{s}");
}

#[test]
fn compute_empty_and_malformed() {
    let o = rho1(&["compute", "--pd", ""]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("delta: 1\nrho1: 0\n"));
    let o = rho1(&["compute", "--pd", "X[1,2,3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let o = rho1(&["compute", "--dt", "3 5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rho1(&["compute"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compute_json_input_and_output() {
    let d = rho1::diagram::samples::d3();
    let p = scratch("d3.json", &d.to_json().to_string());
    let o = rho1(&["compute", "--json", p.to_str().unwrap(), "--format", "json", "--factored"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["delta_text"], "T^-1-1+T");
    assert_eq!(v["rho1_factored"], "-1 * (T-1)^2 * (T^-2+1)");
    assert_eq!((v["w"].as_i64(), v["phi"].as_i64()), (Some(3), Some(-1)));
    assert_eq!(v["rho1"]["2"], "-1");
}

#[test]
fn table_small_knots() {
    let text = std::fs::read_to_string(data("knots_le12.csv")).unwrap();
    let upto6: String = text.lines().take(8).map(|l| format!("{l}\n")).collect();
    let p = scratch("le6.csv", &upto6);
    let seq = rho1(&["table", p.to_str().unwrap(), "--parallel", "1", "--no-timing"]);
    let par = rho1(&["table", p.to_str().unwrap(), "--parallel", "4", "--no-timing"]);
    assert!(seq.status.success());
    assert_eq!(seq.stdout, par.stdout);
    let s = stdout(&seq);
    assert_eq!(s.lines().count(), 8);
    assert!(s.contains("4_1,-T^-1+3-T,0\n"));
    assert!(s.contains("6_3,T^-2-3*T^-1+5-3*T+T^2,0\n"));
    let json = rho1(&["table", p.to_str().unwrap(), "--format", "json"]);
    let first: serde_json::Value = serde_json::from_str(stdout(&json).lines().next().unwrap()).unwrap();
    assert_eq!(first["name"], "3_1");
    assert!(first["seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn table_edge_cases() {
    let empty = scratch("empty.csv", "");
    let o = rho1(&["table", empty.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let bad = scratch("bad.csv", "name,dt\n3_1,4 6 2\nx,3 5\n");
    let o = rho1(&["table", bad.to_str().unwrap(), "--no-timing"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1 of 2 rows skipped"));
    let header = scratch("header.csv", "knot,code\n");
    assert_eq!(rho1(&["table", header.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(rho1(&["table", "/nonexistent/file.csv"]).status.code(), Some(2));
}

#[test]
fn table_writes_out_file() {
    let p = scratch("one.csv", "name,dt\n3_1,4 6 2\n");
    let out = p.with_file_name("one.out.csv");
    let o = rho1(&["table", p.to_str().unwrap(), "--out", out.to_str().unwrap(), "--no-timing"]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(out).unwrap(), "name,delta,rho1\n3_1,T^-1-1+T,-T^-2+2*T^-1-2+2*T-T^2\n");
}

#[test]
fn separation_small() {
    let p = scratch("single.csv", "name,dt\n3_1,4 6 2\n");
    let s = stdout(&rho1(&["separation", p.to_str().unwrap()]));
    assert_eq!(s, "total: 1\ndistinct: 1\ndeficit: 0\n");
    let p = scratch("pair.csv", "name,dt\na,4 6 2\nb,-4 -6 -2\n");
    assert!(stdout(&rho1(&["separation", p.to_str().unwrap()])).contains("distinct: 2\n"));
    let s = stdout(&rho1(&["separation", p.to_str().unwrap(), "--unoriented", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(s.trim()).unwrap();
    assert_eq!(v["distinct_values"], 1);
    assert_eq!(v["collision_classes"][0][1], "b");
}

#[test]
fn verify_suites() {
    let o = rho1(&["verify", "--grules"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 6);
    assert!(s.lines().all(|l| l.ends_with(": holds")));
    assert_eq!(rho1(&["grules-check"]).stdout, o.stdout);

    let a = rho1(&["verify", "--moves", "25", "--seed", "3"]);
    let b = rho1(&["verify", "--moves", "25", "--seed", "3"]);
    assert!(a.status.success(), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("moves: 25 trials"));

    let o = rho1(&["verify", "--oracle"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains(": pass"));
}
