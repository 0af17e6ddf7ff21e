use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn repo_config(name: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    dir.to_string_lossy().into_owned()
}

fn temp_file(tag: &str, ext: &str, text: &str) -> String {
    let path = std::env::temp_dir().join(format!("phicon-cli-{tag}-{}.{ext}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_phicon"));
    cmd.args(args).env_remove("PHICON_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn error_code(out: &Output) -> String {
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"]["code"].as_str().unwrap().to_string()
}

#[test]
fn walls_report() {
    let out = run(&["walls", "--bare"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out), serde_json::json!({ "walls": ["2/9", "1/3", "4/9"] }));
    let full = stdout_json(&run(&["walls", "--weight", "3/8"]));
    assert_eq!(full["command"], "walls");
    assert_eq!(full["outputs"]["chamber"]["chamber"], "chamber_b");
}

#[test]
fn ruled_type_follows_s() {
    let cfg = repo_config("finite_s_zero.json");
    let out = stdout_json(&run(&["--config", &cfg, "ruled-type", "--bare"]));
    assert_eq!(out["ruled_type"], "F2");
    assert_eq!(out["splitting"], serde_json::json!([0, -2]));
    let cfg = repo_config("finite.toml");
    assert_eq!(stdout_json(&run(&["--config", &cfg, "ruled-type", "--bare"]))["ruled_type"], "P1xP1");
}

#[test]
fn appbun_fiber_has_three_points() {
    let cfg = repo_config("finite.toml");
    let out = run(&["--config", &cfg, "appbun-fiber", "--bare"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["with_multiplicity"], 3);
    assert_eq!(v["draws"].as_array().unwrap().len(), 20);
    let single = stdout_json(&run(&["--config", &cfg, "appbun-fiber", "--a", "-3/7", "--target", "inf", "--bare"]));
    assert_eq!(single["with_multiplicity"], 3);
}

#[test]
fn reports_are_reproducible() {
    let cfg = repo_config("finite.toml");
    for cmd in ["appbun-fiber", "degeneration-check"] {
        let a = run_env(&["--config", &cfg, cmd], &[("PHICON_WORKERS", "1")]);
        let b = run_env(&["--config", &cfg, cmd], &[("PHICON_WORKERS", "4")]);
        assert!(a.status.success() && b.status.success());
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
    let s1 = run(&["--config", &cfg, "--seed", "1", "appbun-fiber"]);
    let s2 = run(&["--config", &cfg, "--seed", "2", "appbun-fiber"]);
    assert_ne!(s1.stdout, s2.stdout);
}

#[test]
fn lambda_family_checks() {
    let cfg = repo_config("finite.toml");
    assert_eq!(stdout_json(&run(&["--config", &cfg, "gluing-check", "--bare"]))["gluing_holds"], true);
    let deg = stdout_json(&run(&["--config", &cfg, "degeneration-check", "--q", "5", "--bare"]));
    assert_eq!(deg["holds"], true);
    let pencil = stdout_json(&run(&["--config", &cfg, "lambda-pencil", "--chart", "a:2", "--point", "1:3", "--bare"]));
    assert_eq!(pencil["point"]["spectral_identity"], true);
    assert_eq!(pencil["point"]["residue_failures"], serde_json::json!([]));
    let boundary = stdout_json(&run(&["--config", &cfg, "lambda-pencil", "--chart", "a:0", "--point", "0:1", "--bare"]));
    assert_eq!(boundary["point"]["apparent"]["error"], "NotDefined");
    let zoi = repo_config("zoi.toml");
    assert_eq!(error_code(&run(&["--config", &zoi, "gluing-check"])), "WrongChart");
}

#[test]
fn normal_form_and_surface_round_trip() {
    let cfg = repo_config("zoi.toml");
    let nf = stdout_json(&run(&["--config", &cfg, "normal-form", "--q", "3", "--p", "1", "--bare"]));
    assert_eq!(nf["spectral_identity"], true);
    assert_eq!(nf["normal_form"]["kind"], "rank3");
    let conn = temp_file("conn", "json", &nf["connection"].to_string());
    let pt = stdout_json(&run(&["to-point", "--connection", &conn, "--bare"]));
    assert_eq!(pt["point"]["coords"], serde_json::json!(["1", "1/3", "1/3"]));

    let rank1 = stdout_json(&run(&["--config", &cfg, "from-point", "--point", "0:1:0", "--bare"]));
    assert_eq!(rank1["rank_of_phi"], 1);
    assert_eq!(rank1["stable"], true);
    let exc = stdout_json(&run(&["--config", &cfg, "from-point", "--exceptional", "0:0:1:0", "--bare"]));
    assert_eq!(exc["rank_of_phi"], 3);
    let exc = stdout_json(&run(&["--config", &cfg, "from-point", "--exceptional", "0:0:0:1", "--bare"]));
    assert_eq!(exc["rank_of_phi"], 2);
    let back = stdout_json(&run(&[
        "--config", &cfg, "to-point", "--kind", "exceptional", "--pole", "1", "--exponent", "2", "--ratio", "1:-2", "--bare",
    ]));
    assert_eq!(back["point"]["kind"], "exceptional");
    assert_eq!(back["point"]["ratio"], serde_json::json!(["1", "-2"]));
}

#[test]
fn surface_side_commands() {
    let cfg = repo_config("zoi.toml");
    let pts = stdout_json(&run(&["--config", &cfg, "surface-points", "--bare"]));
    assert_eq!(pts["all_distinct"], true);
    let all = run(&["--config", &cfg, "degeneracy", "--bare"]);
    assert!(all.status.success());
    assert_eq!(stdout_json(&all)["reports"].as_array().unwrap().len(), 54);
    let one = stdout_json(&run(&["--config", &cfg, "degeneracy", "--select", "0:0,1:0,2:0", "--bare"]));
    assert_eq!(one["agree"], true);
    let ac = stdout_json(&run(&["--config", &cfg, "anticanonical", "--bare"]));
    assert_eq!(ac["sums_to_anticanonical"], true);
}

#[test]
fn stability_and_elm() {
    let cfg = repo_config("zoi.toml");
    let alpha = stdout_json(&run(&["--config", &cfg, "stability", "--q", "3", "--p", "1", "--bare"]));
    assert_eq!(alpha["stable"], true);
    let w = stdout_json(&run(&["--config", &cfg, "stability", "--bundle", "a:2", "--weight", "1/9", "--bare"]));
    assert_eq!(w["stable"], false);
    assert_eq!(w["certificate_verified"], true);
    let w = stdout_json(&run(&["--config", &cfg, "stability", "--bundle", "a:2", "--bare"]));
    assert_eq!(w["weight"], "1/4");
    assert_eq!(w["stable"], true);
    for at in ["0", "1", "2"] {
        for level in ["0", "1", "2", "3"] {
            let out = run(&["--config", &cfg, "elm", "--q", "3", "--p", "1", "--at", at, "--level", level, "--bare"]);
            assert!(out.status.success(), "{at} {level}");
            assert_eq!(stdout_json(&out)["round_trip"], true);
        }
    }
}

#[test]
fn config_errors_are_structured() {
    let dup = temp_file("dup", "toml", "poles = [\"0\", \"0\", \"1\"]\nnu = [[0,0,0],[0,0,0],[2,0,0]]\n");
    assert_eq!(error_code(&run(&["--config", &dup, "ruled-type"])), "DuplicatePoles");
    let fuchs = temp_file("fuchs", "toml", "poles = [0, 1, \"inf\"]\nnu = [[0,0,0],[0,0,0],[2,0,\"-1/4\"]]\n");
    let out = run(&["--config", &fuchs, "ruled-type"]);
    assert_eq!(error_code(&out), "FuchsViolation");
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["discrepancy"], "-1/4");
    assert_eq!(error_code(&run(&["ruled-type"])), "MissingConfig");
}

#[test]
fn malformed_inputs_never_crash() {
    let cfg = repo_config("zoi.toml");
    let fin = repo_config("finite.toml");
    let garbage = temp_file("garbage", "json", "{\"poles\": 3}");
    let cases: Vec<Vec<&str>> = vec![
        vec!["no-such-command"],
        vec!["--config", "/definitely/missing.toml", "walls"],
        vec!["--config", &garbage, "walls"],
        vec!["--config", &cfg, "normal-form", "--q", "1/0", "--p", "1"],
        vec!["--config", &cfg, "normal-form", "--q", "x", "--p", "1"],
        vec!["--config", &cfg, "normal-form", "--p", "1"],
        vec!["--config", &cfg, "normal-form", "--kind", "rank2", "--pole", "7", "--p", "1"],
        vec!["--config", &cfg, "normal-form", "--kind", "exceptional", "--pole", "0", "--exponent", "0", "--ratio", "0:0"],
        vec!["--config", &cfg, "normal-form", "--kind", "exceptional", "--pole", "0", "--exponent", "0", "--ratio", "1"],
        vec!["--config", &cfg, "from-point", "--point", "1:2"],
        vec!["--config", &cfg, "from-point", "--point", "0:0:0"],
        vec!["--config", &cfg, "from-point"],
        vec!["--config", &cfg, "degeneracy", "--select", "0:0,0:1,2:0"],
        vec!["--config", &cfg, "degeneracy", "--select", "a:b"],
        vec!["--config", &cfg, "stability", "--bundle", "c:1", "--weight", "1/4"],
        vec!["--config", &cfg, "stability", "--bundle", "p12", "--weight", "3/4"],
        vec!["--config", &fin, "lambda-pencil", "--chart", "a:1", "--point", "0:0"],
        vec!["--config", &fin, "lambda-pencil", "--chart", "z"],
        vec!["--config", &fin, "appbun-fiber", "--a", "1"],
        vec!["--config", &fin, "degeneration-check", "--q", "1"],
        vec!["--config", &cfg, "elm", "--q", "3", "--p", "1", "--at", "5", "--level", "1"],
        vec!["--config", &cfg, "elm", "--q", "3", "--p", "1", "--at", "0", "--level", "4"],
        vec!["selftest", "--only", "0"],
    ];
    for args in cases {
        let out = run(&args);
        let code = error_code(&out);
        assert!(!code.is_empty(), "{args:?}");
    }
}

#[test]
fn selftest_single_criterion() {
    let out = run(&["selftest", "--only", "2", "--bare"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["criteria"][0]["passed"], true);
}

#[test]
fn help_exits_cleanly() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["normal-form", "lambda-pencil", "appbun-fiber", "selftest"] {
        assert!(text.contains(cmd), "{cmd}");
    }
}
