use std::path::Path;
use std::process::{Command, Output};

fn matfact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matfact")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const QUADRIC: &str = "\
ring 2 q
W = x1^2 + x2^2
action 2 : 1 1

factorization k
  p0 = x1, -x2; x2, x1
  p1 = x1, x2; -x2, x1

structure e on k
  chars0 = 0; 0
  chars1 = 1; 1
";

#[test]
fn verify_accepts_the_demo_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_string_lossy().into_owned();
    for demo in ["an", "fermat", "brick"] {
        let out = matfact(&["demo", demo, "--out", &out_dir]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let file = dir.path().join(format!("{demo}.mf"));
        let v = matfact(&["verify", file.to_str().unwrap()]);
        assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stdout));
    }
}

#[test]
fn corrupted_entry_fails_with_residual() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.mf", &QUADRIC.replace("p1 = x1, x2;", "p1 = x1, x2 + 1;"));
    let out = matfact(&["verify", &f]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL  factorization k (line 5)"), "{stdout}");
    assert!(stdout.contains("entry (1, 1)"), "{stdout}");
    // other commands refuse to load it
    assert_eq!(matfact(&["hom", &f, "k", "k"]).status.code(), Some(1));
}

#[test]
fn parse_errors_name_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.mf", &QUADRIC.replace("p0 = x1, -x2;", "p0 = x1, -x2 ^;"));
    let out = matfact(&["verify", &f]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 6, column"), "{stderr}");
}

#[test]
fn non_invariant_superpotential_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.mf", "ring 1 q\nW = x1^3 + x1^2\naction 2 : 1\n");
    let out = matfact(&["verify", &f]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not invariant"));
}

#[test]
fn hom_json_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "q.mf", QUADRIC);
    let out = matfact(&["hom", &f, "k", "k", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // End of the Koszul object of x^2 + y^2: (1 + 1) by the tensor count
    assert_eq!(v["total"], 2);
    assert_eq!(v["certified"], true);
    assert!(v["per_degree"].as_array().unwrap().iter().all(|r| r.get("Z").is_some() && r.get("H").is_some()));
    assert_eq!(matfact(&["hom", &f, "k", "nope"]).status.code(), Some(1));

    // ungraded: W is not quasi-homogeneous, so only a truncated answer exists
    let g = write(dir.path(), "u.mf", "ring 1 q\nW = x1^2 + x1^3\nfactorization k\n  p0 = x1\n  p1 = x1 + x1^2\n");
    assert_eq!(matfact(&["hom", &g, "k", "k"]).status.code(), Some(1));
    assert_eq!(matfact(&["hom", &g, "k", "k", "--window", "3"]).status.code(), Some(2));
}

#[test]
fn equivariant_tables_cover_all_twists() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "q.mf", QUADRIC);
    let out = matfact(&["hom", &f, "e", "e", "--equivariant", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let twists = v["twists"].as_array().unwrap();
    assert_eq!(twists.len(), 2);
    let sum: u64 = twists.iter().map(|t| t["total"].as_u64().unwrap()).sum();
    assert_eq!(sum, 2);
}

#[test]
fn trivial_group_output_is_the_plain_output() {
    let dir = tempfile::tempdir().unwrap();
    let plain = QUADRIC.replace("action 2 : 1 1\n", "").replace("structure e on k\n  chars0 = 0; 0\n  chars1 = 1; 1\n", "");
    let f = write(dir.path(), "t.mf", &plain);
    let a = matfact(&["hom", &f, "k", "k", "--json"]);
    let b = matfact(&["hom", &f, "k", "k", "--json", "--equivariant"]);
    assert_eq!(a.stdout, b.stdout);
    let trivial = write(dir.path(), "t1.mf", &plain.replace("ring 2 q\n", "ring 2 q\naction 1 : 0 0\n"));
    let c = matfact(&["hom", &trivial, "k", "k", "--json", "--equivariant"]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn structures_and_cokernels() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "q.mf", QUADRIC);
    let out = matfact(&["structures", &f, "k", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 2);
    let out = matfact(&["cok", &f, "k", "--target", "k", "--shift", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.get("presentation").is_some() && v.get("annihilation_witness").is_some());
    assert_eq!(v["periodicity"]["all_exact"], true);
    assert_eq!(v["total"], 2);
}

#[test]
fn prime_field_flag() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "q.mf", QUADRIC);
    let out = matfact(&["hom", &f, "k", "k", "--field", "p:5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    // not a prime: a usage error, which must not look like a truncated result
    assert_eq!(matfact(&["hom", &f, "k", "k", "--field", "p:4"]).status.code(), Some(1));
}

#[test]
fn demo_outputs_are_deterministic() {
    let a = matfact(&["demo", "an", "--n", "4", "--json"]);
    let b = matfact(&["demo", "an", "--n", "4", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["hom"], serde_json::json!([[1, 1, 1], [1, 2, 1], [1, 1, 1]]));
    let two = matfact(&["demo", "an", "--n", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&two.stdout).unwrap();
    assert_eq!(v["hom"], serde_json::json!([[1]]));
    assert_eq!(matfact(&["demo", "nope"]).status.code(), Some(1));
}
