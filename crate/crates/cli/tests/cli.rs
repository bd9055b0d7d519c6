use std::path::PathBuf;
use std::process::{Command, Output};

use medgeom::l1embed::cut_lp;
use medgeom::lp::FarkasCertificate;
use medgeom::metric::FiniteMetric;
use medgeom::rat::parse_rat;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn medgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medgeom"))
        .args(args)
        .env_remove("MEDGEOM_POINT_CAP")
        .env_remove("MEDGEOM_LP_CAP")
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> Value {
    let out = medgeom(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn k3_is_not_median() {
    let r = run_ok(&["median", "check", &path("k3.json")]);
    assert_eq!(r["result"]["verdict"], "not_median");
    assert_eq!(r["result"]["witness"], serde_json::json!([0, 1, 2]));
    assert_eq!(r["tool"], "medgeom-cli");
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn closure_counts() {
    for (name, count) in [("y0_points.json", 5), ("y_half_points.json", 12), ("y1_points.json", 8)] {
        let r = run_ok(&["median", "closure", &path(name)]);
        assert_eq!(r["result"]["count"], count, "{name}");
    }
}

#[test]
fn path_embeds_with_resumming_cuts() {
    let r = run_ok(&["embed", "l1", &path("path3.json")]);
    let res = &r["result"];
    assert_eq!(res["verdict"], "decomposed");
    let cuts: Vec<Vec<usize>> = serde_json::from_value(res["cuts"].clone()).unwrap();
    let weights: Vec<_> = res["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| parse_rat(w.as_str().unwrap()).unwrap())
        .collect();
    let metric: FiniteMetric = serde_json::from_value(r["inputs"][0]["data"].clone()).unwrap();
    for x in 0..3 {
        for y in 0..3 {
            let total: medgeom::Rat = cuts
                .iter()
                .zip(&weights)
                .filter(|(c, _)| c.contains(&x) != c.contains(&y))
                .map(|(_, w)| w.clone())
                .sum();
            assert_eq!(&total, metric.dist(x, y));
        }
    }
}

#[test]
fn k23_certificate_verifies_from_report() {
    let r = run_ok(&["embed", "l1", &path("k23.json")]);
    assert_eq!(r["result"]["verdict"], "infeasible");
    let cert: FarkasCertificate = serde_json::from_value(r["result"]["certificate"].clone()).unwrap();
    let metric: FiniteMetric = serde_json::from_value(r["inputs"][0]["data"].clone()).unwrap();
    assert!(cut_lp(metric.matrix(), None).unwrap().check_certificate(&cert));
}

#[test]
fn walls_commands() {
    let r = run_ok(&["walls", "extract", &path("box.json")]);
    assert_eq!(r["result"]["total_weight"], "6");
    assert_eq!(r["result"]["walls"]["walls"].as_array().unwrap().len(), 3);

    let r = run_ok(&["walls", "medianize", &path("tripod_walls.json")]);
    assert_eq!(r["result"]["count"], 4);
    assert_eq!(r["result"]["idempotent"], true);
    assert_eq!(r["result"]["median_check"], "median");

    let r = run_ok(&["walls", "subdivide", &path("box.json"), &path("box_pairs.json")]);
    let sizes: Vec<usize> = r["result"]["partition"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b.as_array().unwrap().len())
        .collect();
    assert_eq!(sizes, vec![1, 2, 4]);
    assert_eq!(r["result"]["sequence"].as_array().unwrap().len(), 8);

    let r = run_ok(&["embed", "from-walls", &path("square_walls.json"), "--base", "2"]);
    assert_eq!(r["result"]["points"]["points"][2], serde_json::json!(["0", "0"]));
}

#[test]
fn kernel_classify_fixtures() {
    let r = run_ok(&["kernel", "classify", &path("kernel_path.json"), "--bound", "2"]);
    assert_eq!(r["result"]["type1"]["verdict"], "yes");
    assert_eq!(r["result"]["hypermetric"]["verdict"], "yes_at_bound");
    assert_eq!(r["result"]["negative_type"]["is_cnd"], true);

    let r = run_ok(&["kernel", "classify", &path("kernel_k23.json")]);
    assert_eq!(r["result"]["type1"]["verdict"], "no_cut_cone");
    assert_eq!(r["result"]["hypermetric"]["verdict"], "no");

    let r = run_ok(&["kernel", "classify", &path("kernel_sq_euclid.json")]);
    assert_eq!(r["result"]["type1"]["verdict"], "no_triangle");
    assert_eq!(r["result"]["negative_type"]["is_cnd"], true);
    assert_eq!(r["result"]["sqrt_type1"]["verdict"], "yes");
}

#[test]
fn random_classification_is_seeded() {
    let a = run_ok(&["kernel", "classify", "--random", "12", "--seed", "5"]);
    let b = run_ok(&["kernel", "classify", "--random", "12", "--seed", "5"]);
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["result"]["inversions"], 0);
    assert_eq!(a["result"]["instances"].as_array().unwrap().len(), 12);
}

#[test]
fn reports_reproducible_modulo_timings() {
    let mut a = run_ok(&["walls", "extract", &path("grid3.json")]);
    let mut b = run_ok(&["walls", "extract", &path("grid3.json")]);
    a.as_object_mut().unwrap().remove("timings");
    b.as_object_mut().unwrap().remove("timings");
    assert_eq!(a, b);
}

#[test]
fn decimal_mirror_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = medgeom(&[
        "median",
        "closure",
        &path("y_half_points.json"),
        "--decimal",
        "3",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["result"]["points"]["points"][0][0], "1/4");
    assert_eq!(r["decimal"]["points"]["points"][0][0], "0.250");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"dist\": [[\"0\", \"1\"],\n  [\"1\" \"0\"]]\n}").unwrap();
    let o = medgeom(&["median", "check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let asym = dir.path().join("asym.json");
    std::fs::write(&asym, r#"{"dist": [["0", "1"], ["2", "0"]]}"#).unwrap();
    assert_eq!(medgeom(&["median", "check", asym.to_str().unwrap()]).status.code(), Some(1));

    assert_eq!(medgeom(&["median", "check", &path("missing.json")]).status.code(), Some(1));
    assert_eq!(medgeom(&["walls", "extract", &path("k3.json")]).status.code(), Some(1));
    assert_eq!(medgeom(&["kernel", "classify", &path("kernel_path.json"), "--bound", "0"]).status.code(), Some(1));
    assert_eq!(medgeom(&["embed", "from-walls", &path("square_walls.json"), "--base", "9"]).status.code(), Some(1));
    assert_eq!(medgeom(&["bogus"]).status.code(), Some(1));
    assert_eq!(medgeom(&["--help"]).status.code(), Some(0));

    assert_eq!(medgeom(&["median", "check", &path("k3.json"), "--point-cap", "2"]).status.code(), Some(2));
    assert_eq!(medgeom(&["median", "closure", &path("y_half_points.json"), "--point-cap", "8"]).status.code(), Some(2));
    assert_eq!(medgeom(&["embed", "l1", &path("k23.json"), "--lp-cap", "4"]).status.code(), Some(2));
    assert_eq!(medgeom(&["walls", "medianize", &path("tripod_walls.json"), "--wall-cap", "2"]).status.code(), Some(2));
    let env_cap = Command::new(env!("CARGO_BIN_EXE_medgeom"))
        .args(["median", "check", &path("k3.json")])
        .env("MEDGEOM_POINT_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(env_cap.status.code(), Some(2));
}

#[test]
fn corpus_never_hits_internal_failure() {
    let metrics = ["k3.json", "path3.json", "square.json", "box.json", "grid3.json", "k23.json"];
    let mut runs: Vec<Vec<String>> = Vec::new();
    for m in metrics {
        for cmd in [["median", "check"], ["walls", "extract"], ["embed", "l1"]] {
            runs.push(vec![cmd[0].into(), cmd[1].into(), path(m)]);
        }
    }
    for p in ["y0_points.json", "y_half_points.json", "y1_points.json"] {
        runs.push(vec!["median".into(), "closure".into(), path(p)]);
    }
    for w in ["square_walls.json", "tripod_walls.json"] {
        runs.push(vec!["walls".into(), "medianize".into(), path(w)]);
        runs.push(vec!["embed".into(), "from-walls".into(), path(w), "--base".into(), "0".into()]);
    }
    for k in ["kernel_path.json", "kernel_k23.json", "kernel_sq_euclid.json"] {
        runs.push(vec!["kernel".into(), "classify".into(), path(k)]);
    }
    for args in runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let code = medgeom(&args).status.code();
        assert!(matches!(code, Some(0) | Some(1)), "{args:?} exited with {code:?}");
    }
}
