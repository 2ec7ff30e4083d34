// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qtorus::harness::gen_random;
use qtorus::instance::{parse_str, to_json_string};
use serde_json::Value;

fn qtorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtorus"))
        .args(args)
        .env_remove("QTORUS_TIME_BUDGET_MS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let p = dir.join(name);
    let mut all = vec!["generate"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", p.to_str().unwrap()]);
    assert!(qtorus(&all).status.success());
    p
}

#[test]
fn dim_of_independent_multiparameters() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(dir.path(), "a.json", &["independent", "-n", "3"]);
    let v = json(&qtorus(&["--json", "dim", f.to_str().unwrap()]));
    assert_eq!(v["lower"], 1);
    assert_eq!(v["upper"], 1);
    assert_eq!(v["exact"], true);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["lower", "upper", "exact", "witness"]);
}

#[test]
fn tensor_of_transpose_pair() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, t) = (path(dir.path(), "a.json"), path(dir.path(), "b.json"), path(dir.path(), "t.json"));
    assert!(qtorus(&["generate", "transpose-pair", "-n", "3", "-o", &a, "--out2", &b]).status.success());
    assert!(qtorus(&["--mode", "shared", "tensor", &a, &b, "-o", &t]).status.success());
    let v = json(&qtorus(&["--require-exact", "dim", &t]));
    assert_eq!(v["lower"], 3);
    assert_eq!(v["exact"], true);
}

#[test]
fn center_and_codim() {
    let dir = tempfile::tempdir().unwrap();
    let s = generate(dir.path(), "s.json", &["symplectic", "-n", "4"]);
    let v = json(&qtorus(&["center", s.to_str().unwrap()]));
    assert_eq!(v["center_is_f"], true);
    let c = generate(dir.path(), "c.json", &["commutative", "-n", "2"]);
    let v = json(&qtorus(&["center", c.to_str().unwrap()]));
    assert_eq!(v["center_is_f"], false);
    let i = generate(dir.path(), "i.json", &["independent", "-n", "3"]);
    let v = json(&qtorus(&["codim", i.to_str().unwrap()]));
    assert_eq!((v["rank"].as_u64(), v["codim"].as_u64()), (Some(3), Some(2)));
}

#[test]
fn element_multiplication() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(dir.path(), "b.json", &["independent", "-n", "2"]);
    let f = f.to_str().unwrap();
    let v = json(&qtorus(&["element-mul", f, r#"[{"c":1},{"c":1,"x":[1,0]}]"#, r#"[{"c":1},{"c":-1,"x":[1,0]}]"#]));
    assert_eq!(v["product"], "1 + -1 * X1^2");
    // X1 X2 = q X2 X1
    let xy = json(&qtorus(&["element-mul", f, r#"[{"x":[1,0]}]"#, r#"[{"x":[0,1]}]"#]));
    let yx = json(&qtorus(&["element-mul", f, r#"[{"x":[0,1]}]"#, r#"[{"x":[1,0]}]"#]));
    assert_eq!(xy["terms"][0]["x"], yx["terms"][0]["x"]);
    assert_ne!(xy["terms"][0]["q"], yx["terms"][0]["q"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qtorus(&["dim", &path(dir.path(), "missing.json")]).status.code(), Some(1));
    assert_eq!(qtorus(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qtorus(&["--help"]).status.code(), Some(0));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"rank": 2, "value_group": {"free": ["q"], "torsion_order": 1}, "lambda": [{"i": 1, "j": 1, "exponents": {}}]}"#).unwrap();
    let out = qtorus(&["dim", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda[0]"));

    // With no time at all the bracket cannot close.
    let (a, b, t) = (path(dir.path(), "a.json"), path(dir.path(), "b.json"), path(dir.path(), "t.json"));
    assert!(qtorus(&["generate", "transpose-pair", "-n", "3", "-o", &a, "--out2", &b]).status.success());
    assert!(qtorus(&["tensor", &a, &b, "-o", &t]).status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_qtorus"))
        .args(["--require-exact", "--json", "dim", &t])
        .env("QTORUS_TIME_BUDGET_MS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["exact"], false);
    assert!(v["lower"].as_u64().unwrap() >= 1);
}

#[test]
fn instance_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..20u64 {
        let l = gen_random(1 + (seed % 4) as usize, (seed % 3) as usize, 1 + seed % 3, 2, seed);
        let text = to_json_string(&l).unwrap();
        let f = dir.path().join(format!("r{seed}.json"));
        std::fs::write(&f, &text).unwrap();
        // transpose twice through the binary gives back the same bytes
        let t1 = path(dir.path(), "t1.json");
        let t2 = path(dir.path(), "t2.json");
        assert!(qtorus(&["transpose", f.to_str().unwrap(), "-o", &t1]).status.success());
        assert!(qtorus(&["transpose", &t1, "-o", &t2]).status.success());
        assert_eq!(std::fs::read_to_string(&t2).unwrap(), text);
        assert_eq!(parse_str(&text).unwrap(), l);
    }
}

#[test]
fn fixed_seed_output_is_stable() {
    let a = qtorus(&["--json", "verify", "--trials", "40", "--seed", "11"]);
    let b = qtorus(&["--json", "verify", "--trials", "40", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let g1 = qtorus(&["generate", "random", "-n", "3", "--seed", "5"]);
    let g2 = qtorus(&["generate", "random", "-n", "3", "--seed", "5"]);
    assert_eq!(g1.stdout, g2.stdout);
}
