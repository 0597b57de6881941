//! Integration tests for the command surface: exit-code contract,
//! determinism of result payloads, fixture tamper detection, and one
//! end-to-end run per verb family.

use serde_json::{json, Value};
use wittcalc_cli::run;

fn run_args(args: &[&str]) -> (i32, Value) {
    let argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let out = run(&argv);
    let value = if out.stdout.is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&out.stdout).expect("stdout is JSON")
    };
    (out.exit_code, value)
}

fn tempdir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("wittcalc-test-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn usage_error_exits_one() {
    let (code, _) = run_args(&["no-such-verb"]);
    assert_eq!(code, 1);
}

#[test]
fn witt_eval_and_exit_codes() {
    // [1] + [1] = (0, 1, 0)
    let (code, v) = run_args(&[
        "witt",
        "eval",
        "--json",
        r#"{"ring":"Fq(p=2,k=1)","op":"add","args":[["1","0","0"],["1","0","0"]]}"#,
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["coords"], json!(["0", "1", "0"]));
    // dividing a unit by p is a mathematical no: exit code 2
    let (code, v) = run_args(&[
        "witt",
        "eval",
        "--json",
        r#"{"ring":"Fq(p=2,k=1)","op":"divide-p","args":[["1","0","0"]]}"#,
    ]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "obstruction");
}

#[test]
fn witt_identities_verb() {
    let (code, v) = run_args(&[
        "witt",
        "identities",
        "--ring",
        "Fq(p=2,k=2)",
        "--n",
        "3",
        "--samples",
        "25",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["failures"], json!(0));
}

#[test]
fn fixtures_and_isogeny_verbs() {
    let dir = tempdir("fixtures");
    let dirs = dir.to_str().unwrap();
    let (code, v) = run_args(&["fixtures", "generate", "--dir", dirs]);
    assert_eq!(code, 0);
    assert!(v["result"]["files"]["height_example.json"].is_string());
    let (code, _) = run_args(&["fixtures", "verify", "--dir", dirs]);
    assert_eq!(code, 0);

    // the packaged example: p·identity on height 2 has m = 2
    let he = dir.join("height_example.json");
    let (code, v) = run_args(&["isogeny", "height", "--in", he.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["m"], json!(2));

    // dividing p·identity recovers a morphism (the identity)
    let (code, v) = run_args(&["isogeny", "divide-p", "--in", he.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");

    // inverting the sampled height-one isogeny round-trips
    let sample = dir.join("sample_isogeny.json");
    let (code, v) = run_args(&["isogeny", "invert", "--in", sample.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["height"], json!(1));

    // tampering with a fixture must be caught
    let path = dir.join("p_identity.morphism.json");
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push(' ');
    std::fs::write(&path, text).unwrap();
    let (code, v) = run_args(&["fixtures", "verify", "--dir", dirs]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "error");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn determinism_of_result_payloads() {
    let dir1 = tempdir("det1");
    let dir2 = tempdir("det2");
    for (args, label) in [
        (
            vec![
                "witt",
                "identities",
                "--ring",
                "Fq(p=2,k=2)",
                "--n",
                "3",
                "--samples",
                "10",
                "--seed",
                "99",
            ],
            "identities",
        ),
        (
            vec!["selftest", "lemma-homogeneous", "--seed", "7"],
            "selftest",
        ),
    ] {
        let (c1, mut v1) = run_args(&args);
        let (c2, mut v2) = run_args(&args);
        assert_eq!(c1, c2, "{label}");
        v1["timing_ms"] = json!(0);
        v2["timing_ms"] = json!(0);
        assert_eq!(v1, v2, "{label} not deterministic");
    }
    // fixture regeneration with the same seed is byte-identical
    let d1 = dir1.to_str().unwrap();
    let d2 = dir2.to_str().unwrap();
    run_args(&["fixtures", "generate", "--dir", d1, "--seed", "5"]);
    run_args(&["fixtures", "generate", "--dir", d2, "--seed", "5"]);
    for entry in std::fs::read_dir(&dir1).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name();
        let a = std::fs::read(entry.path()).unwrap();
        let b = std::fs::read(dir2.join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs between regenerations");
    }
    let _ = std::fs::remove_dir_all(&dir1);
    let _ = std::fs::remove_dir_all(&dir2);
}

#[test]
fn solver_verbs() {
    // homogeneous: C with vanishing zeroth coordinate, only X = 0 at
    // the padded level truncates nontrivially
    let input = json!({
        "ring": "Fq(p=2,k=1)",
        "n": 3,
        "e": 1,
        "B": [[["1","0","0"]]],
        "C": [[["0","1","0"]]],
    });
    let (code, v) = run_args(&["solve", "homog", "--json", &input.to_string()]);
    assert_eq!(code, 0);
    assert!(v["result"]["count"].as_u64().unwrap() >= 1);

    // inhomogeneous: A = 0, Y = 0 gives X = 0
    let input = json!({
        "ring": "Fq(p=2,k=2)",
        "n": 4,
        "e": 1,
        "A": [[["0","0","0","0"]]],
        "Y": [[["0","0","0","0"]]],
        "B": [[["1","0","0","0"]]],
        "C": [[["0","1","0","0"]]],
    });
    let (code, v) = run_args(&["solve", "inhom", "--json", &input.to_string()]);
    assert_eq!(code, 0);
    let x = &v["result"]["X"][0][0];
    for c in x.as_array().unwrap() {
        assert_eq!(c, "0");
    }
}

#[test]
fn deformation_verbs() {
    let display = json!({
        "frame": "TWF(Fq(p=2,k=1); n=2)",
        "d": 1,
        "U": [[["0","0"],["1","0"]],[["1","0"],["0","0"]]],
    });
    let (code, v) = run_args(&[
        "deform",
        "tangent",
        "--json",
        &json!({ "display": display }).to_string(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["dimension"], json!(1));
    assert_eq!(v["result"]["count"], json!(2));

    let (code, v) = run_args(&[
        "deform",
        "lift",
        "--json",
        &json!({ "display": display, "rank": 1, "graph": [["e"]] }).to_string(),
    ]);
    assert_eq!(code, 0);
    let lifted = &v["result"]["display"];
    assert_eq!(lifted["frame"], json!("TWF(Eps(Fq(p=2,k=1); rank=1); n=2)"));
}

#[test]
fn lift_extend_verb() {
    // identity on the truncated supersingular display extends to the
    // reference at higher precision
    let trunc = json!({
        "frame": "TWF(Fq(p=2,k=2); n=3)",
        "d": 1,
        "U": [[["0","0","0"],["1","0","0"]],[["1","0","0"],["0","0","0"]]],
    });
    let identity = json!({
        "src": [1, 1],
        "dst": [1, 1],
        "A": [[["1","0","0","0"]]],
        "B": [[["0","0","0"]]],
        "B_in_V_coords": true,
        "C": [[["0","0","0","0"]]],
        "D": [[["1","0","0","0"]]],
    });
    let reference = json!({
        "frame": "WF(Fq(p=2,k=2); N=10)",
        "d": 1,
        "U": [
            [["0","0","0","0","0","0","0","0","0","0"],["1","0","0","0","0","0","0","0","0","0"]],
            [["1","0","0","0","0","0","0","0","0","0"],["0","0","0","0","0","0","0","0","0","0"]]
        ],
    });
    let input = json!({ "display": trunc, "M": identity, "reference": reference });
    let (code, v) = run_args(&[
        "lift",
        "extend",
        "--json",
        &input.to_string(),
        "--precision",
        "6",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["height"], json!(0));
    // the extension of the identity is the reference itself
    assert_eq!(
        v["result"]["display"]["U"][0][1],
        json!(["1", "0", "0", "0", "0", "0"])
    );
}

#[test]
fn moduli_enumeration_is_thread_count_independent() {
    let dir = tempdir("threads");
    let dirs = dir.to_str().unwrap();
    run_args(&["fixtures", "generate", "--dir", dirs]);
    let base = dir.join("supersingular_f2.display.json");
    let base = base.to_str().unwrap();
    let (c1, mut v1) = run_args(&[
        "moduli",
        "enumerate",
        "--base",
        base,
        "--r",
        "1",
        "--s",
        "1",
    ]);
    let (c2, mut v2) = run_args(&[
        "moduli",
        "enumerate",
        "--base",
        base,
        "--r",
        "1",
        "--s",
        "1",
        "--threads",
        "3",
    ]);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    // result payloads agree up to the echoed thread count and timing
    v1["timing_ms"] = json!(0);
    v2["timing_ms"] = json!(0);
    v1["provenance"]["inputs"]["threads"] = json!(0);
    v2["provenance"]["inputs"]["threads"] = json!(0);
    assert_eq!(v1, v2);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn morphism_lift_reports_the_filtration_obstruction() {
    // lifting the identity between the zero lift and a twisted lift: the
    // obstruction is the image of the twist
    let display = json!({
        "frame": "TWF(Fq(p=2,k=1); n=2)",
        "d": 1,
        "U": [[["0","0"],["1","0"]],[["1","0"],["0","0"]]],
    });
    let identity = json!({
        "src": [1, 1],
        "dst": [1, 1],
        "A": [[["1","0","0"]]],
        "B": [[["0","0"]]],
        "B_in_V_coords": true,
        "C": [[["0","0","0"]]],
        "D": [[["1","0","0"]]],
    });
    let input = json!({
        "display": display,
        "rank": 1,
        "graph": [["0"]],
        "morphism": identity,
        "target_display": display,
        "target_graph": [["e"]],
    });
    let (code, v) = run_args(&[
        "deform",
        "lift",
        "--margin",
        "1",
        "--json",
        &input.to_string(),
    ]);
    assert_eq!(code, 0);
    let ml = &v["result"]["morphism_lift"];
    assert_eq!(ml["obstruction_vanishes"], json!(false));
    assert_eq!(ml["obstruction"], json!(["e"]));
    // matching lifts have vanishing obstruction
    let mut matched = input.clone();
    matched["target_graph"] = json!([["0"]]);
    let (code, v) = run_args(&[
        "deform",
        "lift",
        "--margin",
        "1",
        "--json",
        &matched.to_string(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        v["result"]["morphism_lift"]["obstruction_vanishes"],
        json!(true)
    );
}
