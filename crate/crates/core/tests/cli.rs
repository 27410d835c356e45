use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singleclass")).args(args).output().unwrap()
}

fn text(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp(name: &str, contents: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("singleclass-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn mass_and_bounds() {
    let o = run(&["mass", "--symbol", "II_{10,0}(3^{-1})"]);
    assert_eq!((text(&o).trim(), o.status.code()), ("1/8360755200", Some(0)));
    let o = run(&["bounds", "--dim", "4"]);
    assert_eq!(text(&o).trim(), "t=1/24 B={3} maxprime=467");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["mass"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let o = run(&["mass", "--symbol", "II_{8,0}(3^{-1}"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position"));
    assert_eq!(run(&["symbol", "--gram", "/nonexistent/gram"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--dim", "11"]).status.code(), Some(2));
    let g = temp("bad", "2\n1 0\n0\n");
    assert_eq!(run(&["aut", "--gram", g.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn construct_symbol_aut_watson() {
    let o = run(&["construct", "--symbol", "II_{9,0}(8_1^{-1})", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let g = temp("c.gram", &text(&o));
    let gs = g.to_str().unwrap();
    assert_eq!(text(&run(&["symbol", "--gram", gs])).trim(), "II_{9,0}(8_1^{-1})");
    assert_eq!(text(&run(&["aut", "--gram", gs])).trim(), "11612160");
    let w = text(&run(&["watson", "--gram", gs, "--p", "2"]));
    let mut lines = w.lines();
    assert_eq!(lines.next(), Some("# L: II_{9,0}(8_1^{-1})"));
    assert_eq!(lines.next(), Some("# Wat_2(L): II_{9,0}(2_1^{+1})"));
    // the output is itself a gram file
    let wg = temp("w.gram", &w);
    assert_eq!(text(&run(&["symbol", "--gram", wg.to_str().unwrap()])).trim(), "II_{9,0}(2_1^{+1})");
    assert_eq!(run(&["watson", "--gram", gs, "--p", "4"]).status.code(), Some(2));
}

#[test]
fn verify_dim_9() {
    let o = run(&["verify", "--dim", "9"]);
    assert_eq!(text(&o).trim(), "4/4 genera matched");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn classify_writes_catalogue() {
    let out = std::env::temp_dir().join(format!("singleclass-cli-{}-dim10.json", std::process::id()));
    let o = run(&["classify", "--dim", "10", "--jobs", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let raw = std::fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&raw).unwrap();
    assert_eq!(v["version"], 1);
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 2);
    // key order as written
    let first = &raw[raw.find("\"records\"").unwrap()..];
    let order = ["dim", "symbol", "gram", "mass_num", "mass_den", "aut_order", "maximal", "qf_maximal", "family_id", "family_annotation"];
    let pos: Vec<usize> = order.iter().map(|k| first.find(&format!("\"{k}\"")).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
    assert_eq!(recs[0]["symbol"], "II_{10,0}(3^{-1})");
    assert_eq!(recs[0]["family_annotation"], "8360755200_{1,1}^{*2}");
    assert_eq!(recs[0]["gram"].as_array().unwrap().len(), 100);
    let o = run(&["classify", "--dim", "10", "--squarefree-only"]);
    let v: serde_json::Value = serde_json::from_str(&text(&o)).unwrap();
    // both members of the family are square-free (3^{-1} and 3^{+9})
    let syms: Vec<&str> = v["records"].as_array().unwrap().iter().map(|r| r["symbol"].as_str().unwrap()).collect();
    assert_eq!(syms, ["II_{10,0}(3^{-1})", "II_{10,0}(3^{-9})"]);
}
