use std::ffi::OsString;
use std::path::PathBuf;

use ontic_cli::run_with;
use serde_json::Value;

fn data(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(rel)
        .display()
        .to_string()
}

fn run_env(args: &[&str], env_seed: Option<&str>) -> (i32, String, String) {
    let argv: Vec<OsString> = std::iter::once("ontic")
        .chain(args.iter().copied())
        .map(OsString::from)
        .collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(argv, env_seed, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_env(args, None)
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let (code, out, err) = run(&a);
    assert!(err.is_empty(), "{err}");
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn verify_exit_codes() {
    let (code, v) = json(&[
        "verify", "--model", "ks", "--engine", "quad:17", "--pairs", "100",
    ]);
    assert_eq!(code, 0);
    assert!(v["result"]["max_deviation"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["engine"], "quad:17");

    let (code, v) = json(&["verify", "--model", "bb:3", "--engine", "closed"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["max_deviation"].as_f64(), Some(0.0));

    let (code, v) = json(&[
        "verify",
        "--model",
        "ws:3",
        "--engine",
        "mc:100000",
        "--pairs",
        "4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["pass"], true);

    assert_eq!(run(&["verify", "--model", "nosuch"]).0, 2);
    assert_eq!(run(&["verify", "--model", "ks", "--engine", "quad:x"]).0, 2);
    assert_eq!(run(&["verify"]).0, 2);
    // closed form cannot integrate a sphere density
    assert_eq!(run(&["verify", "--model", "ks", "--engine", "closed"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn verify_csv_series() {
    let (code, out, _) = run(&[
        "verify", "--model", "bb:2", "--pairs", "3", "--format", "csv",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "trial,outcome,angle,born,predicted,std_error,deviation,pass"
    );
    assert_eq!(lines.len(), 1 + 3 * 2);
}

#[test]
fn table_reproduces_catalogue() {
    let (code, v) = json(&["table"]);
    assert_eq!(code, 0);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    let expect = [
        (1, ["yes", "no", "no"]),
        (2, ["yes", "yes", "no"]),
        (5, ["no", "yes", "no"]),
        (7, ["no", "yes", "yes"]),
    ];
    for (row, cells) in expect {
        let r = &rows[row - 1];
        assert_eq!(r["source"], "measured");
        let m = &r["measured"];
        assert_eq!(
            [&m["reciprocity"], &m["determinism"], &m["contextual"]],
            cells.map(Value::from).each_ref()
        );
    }
    for row in [3, 4, 6] {
        assert_eq!(rows[row - 1]["source"], "unimplemented");
    }
}

#[test]
fn table_negative_control() {
    let (code, out, _) = run(&["table", "--with-fixture", "misdeclared"]);
    assert_eq!(code, 1);
    assert!(
        out.contains("reciprocity: claimed no, measured yes"),
        "{out}"
    );
    let (code, out, _) = run(&["table", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.lines().next().unwrap(),
        "name,type,reciprocity,determinism,contextual,source"
    );
    assert_eq!(run(&["table", "--with-fixture", "nosuch"]).0, 2);
}

#[test]
fn ksval_exit_codes() {
    let (code, v) = json(&["ksval", &data("peres33.vec")]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["result"], "unsat");
    assert_eq!(v["result"]["bases"], 16);
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let (code, v) = json(&["ksval", &data("triad.vec"), "--enumerate", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["valuations"].as_array().unwrap().len(), 3);
    assert_eq!(v["result"]["checker"], "pass");

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("par.vec");
    std::fs::write(&p, "dim=3 radical=0\n1 1 0\n2 2 0\n").unwrap();
    let (code, _, err) = run(&["ksval", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("parallel"), "{err}");
    assert_eq!(run(&["ksval", "/nonexistent/file.vec"]).0, 2);
}

#[test]
fn bound_reports() {
    let (code, v) = json(&["bound", &data("fragments/d2_zx.frag")]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["f_star"].as_f64(), Some(1.0));
    assert_eq!(v["result"]["n_atoms"], 4);

    let (code, v) = json(&["bound", &data("fragments/d3_three_bases.frag")]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["f_star"].as_f64(), Some(0.166666666667));
    assert_eq!(v["result"]["caveat"], "noncontextual-deterministic class");

    let (code, v) = json(&["bound", &data("fragments/d3_peres.frag")]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["n_atoms"], 0);
    assert_eq!(v["result"]["f_star"], Value::Null);
    assert_eq!(v["result"]["certificate"]["verified"], true);
}

#[test]
fn prepctx_reports() {
    let (code, v) = json(&[
        "prepctx",
        "--model",
        "ks",
        "--rho",
        "unpolarized",
        "--ctx",
        "z,x",
    ]);
    assert_eq!(code, 0);
    assert!(v["result"]["distance"]["value"].as_f64().unwrap() > 0.1);
    assert_eq!(v["result"]["verdict"], "contextual");
    assert_eq!(run(&["prepctx", "--model", "ks", "--ctx", "z"]).0, 2);
    assert_eq!(run(&["prepctx", "--model", "ks", "--rho", "pure"]).0, 2);
}

#[test]
fn reports_are_byte_identical() {
    let args = [
        "classify", "--model", "ws:3", "--states", "4", "--draws", "50", "--seed", "11",
        "--format", "json",
    ];
    let a = run(&args).1;
    let b = run(&args).1;
    assert_eq!(a, b);
    let mc = [
        "verify", "--model", "bell2", "--engine", "mc:20000", "--pairs", "3", "--format", "json",
    ];
    let x = run_env(&mc, Some("5")).1;
    assert_eq!(x, run_env(&mc, Some("5")).1);
    assert_ne!(x, run_env(&mc, Some("6")).1);
}

#[test]
fn seed_precedence() {
    let seed_of = |args: &[&str], env: Option<&str>| -> u64 {
        let mut a = args.to_vec();
        a.extend(["--format", "json"]);
        let v: Value = serde_json::from_str(&run_env(&a, env).1).unwrap();
        v["seed"].as_u64().unwrap()
    };
    let base = ["verify", "--model", "bb:2", "--pairs", "1"];
    assert_eq!(seed_of(&base, None), 0);
    assert_eq!(seed_of(&base, Some("7")), 7);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\nseed = 9\npairs = 2\n").unwrap();
    let with_cfg = [&base[..], &["--config", cfg.to_str().unwrap()]].concat();
    assert_eq!(seed_of(&with_cfg, Some("7")), 9);
    let with_flag = [&with_cfg[..], &["--seed", "3"]].concat();
    assert_eq!(seed_of(&with_flag, Some("7")), 3);
    assert_eq!(run_env(&base, Some("abc")).0, 2);
}

#[test]
fn config_supplies_flags_and_output_goes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("report.json");
    std::fs::write(
        &cfg,
        format!(
            "model = bb:3\nengine = closed\npairs = 2\nformat = json\noutput = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let (code, stdout, _) = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["model"], "bb:3");
    assert_eq!(v["result"]["pairs"].as_array().unwrap().len(), 6);
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(run(&["verify", "--config", cfg.to_str().unwrap()]).0, 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ontic");
    let status = |args: &[&str]| {
        std::process::Command::new(bin)
            .args(args)
            .env_remove("ONTIC_SEED")
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(status(&["ksval", &data("peres33.vec")]), Some(1));
    assert_eq!(status(&["ksval", &data("two-triads.vec")]), Some(0));
    assert_eq!(status(&["verify", "--model", "nosuch"]), Some(2));
}
