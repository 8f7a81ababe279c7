//! End-to-end behavior of the `listgaze` binary: outputs, goldens and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn cli_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_listgaze")).current_dir(dir).args(args).output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn render_phones(dir: &Path, out: &str) {
    let r = run(dir, &["--out", out, "render", "--query", "phones", "--feature", "image", "--position", "3"]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
}

#[test]
fn render_writes_page_layout_spec_and_manifest() {
    let tmp = TempDir::new().unwrap();
    render_phones(tmp.path(), "page");
    for name in ["render.png", "aoi.json", "spec.json", "manifest.json"] {
        assert!(tmp.path().join("page").join(name).is_file(), "{name}");
    }
    let manifest = read_json(&tmp.path().join("page/manifest.json"));
    assert_eq!(manifest["command"], "render --query");
    let outputs: Vec<&str> = manifest["outputs"].as_array().unwrap().iter().map(|o| o["name"].as_str().unwrap()).collect();
    assert_eq!(outputs.len(), 3);
    assert!(outputs.contains(&"render.png"));
}

#[test]
fn short_spec_is_rejected_with_the_required_count() {
    let tmp = TempDir::new().unwrap();
    render_phones(tmp.path(), "page");
    let mut spec = read_json(&tmp.path().join("page/spec.json"));
    spec["products"].as_array_mut().unwrap().truncate(14);
    std::fs::write(tmp.path().join("s14.json"), spec.to_string()).unwrap();
    let r = run(tmp.path(), &["--out", "bad", "render", "s14.json"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("15"), "{}", stderr(&r));
    assert!(!tmp.path().join("bad/render.png").exists());
}

#[test]
fn gaze_input_errors_map_to_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let aoi = core_fixture("cohort_aoi.json");
    let aoi = aoi.to_str().unwrap();
    std::fs::write(tmp.path().join("empty.csv"), "participant_id,stimulus_id,timestamp_ms,x,y\n").unwrap();
    let r = run(tmp.path(), &["analyze-gaze", "empty.csv", aoi]);
    assert_eq!(r.status.code(), Some(2), "{}", stderr(&r));

    std::fs::write(tmp.path().join("bad.csv"), "participant_id,stimulus_id,timestamp_ms,x,y\n1,1,0,5,5\n1,1,abc,5,5\n")
        .unwrap();
    let r = run(tmp.path(), &["analyze-gaze", "bad.csv", aoi]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("line 3"), "{}", stderr(&r));

    let r = run(tmp.path(), &["analyze-gaze", "missing.csv", aoi]);
    assert_eq!(r.status.code(), Some(3), "{}", stderr(&r));

    let gaze = core_fixture("cohort_gaze.csv");
    let r = run(tmp.path(), &["analyze-gaze", gaze.to_str().unwrap(), aoi, "--grouping", "neighborhood"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("--outlier-pos"), "{}", stderr(&r));

    let r = run(tmp.path(), &["render"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn analyze_gaze_matches_golden_tables() {
    let tmp = TempDir::new().unwrap();
    let (gaze, aoi) = (core_fixture("cohort_gaze.csv"), core_fixture("cohort_aoi.json"));
    let r = run(
        tmp.path(),
        &[
            "--out", "g", "analyze-gaze", gaze.to_str().unwrap(), aoi.to_str().unwrap(),
            "--grouping", "kind", "--grouping", "neighborhood", "--outlier-pos", "3", "--kind", "image",
        ],
    );
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    for (got, golden) in [("aggregate.csv", "golden_aggregate.csv"), ("metrics.csv", "golden_metrics.csv")] {
        assert_eq!(
            std::fs::read_to_string(tmp.path().join("g").join(got)).unwrap(),
            std::fs::read_to_string(core_fixture(golden)).unwrap(),
            "{got}"
        );
    }
    let aggregate = std::fs::read_to_string(tmp.path().join("g/aggregate.csv")).unwrap();
    assert!(aggregate.contains("neighborhood,near,ttff,25760.000"));
    assert!(aggregate.contains("neighborhood,distant,ttff,31240.000"));
}

#[test]
fn report_pools_metrics_and_rejects_mixed_inputs() {
    let tmp = TempDir::new().unwrap();
    let golden = core_fixture("golden_metrics.csv");
    std::fs::copy(&golden, tmp.path().join("a.csv")).unwrap();
    std::fs::copy(&golden, tmp.path().join("b.csv")).unwrap();
    let r = run(tmp.path(), &["--out", "rep", "report", "a.csv", "b.csv", "--kw", "--outlier-pos", "3"]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    let report = read_json(&tmp.path().join("rep/report.json"));
    let traces = std::fs::read_to_string(&golden).unwrap().lines().skip(1).map(|l| {
        l.split(',').take(2).collect::<Vec<_>>().join(",")
    }).collect::<std::collections::BTreeSet<_>>().len();
    assert_eq!(report["data"]["traces"].as_u64().unwrap() as usize, 2 * traces);
    let kind = report["data"]["aggregates"][0]["cells"].as_array().unwrap();
    let image_ttff = kind.iter().find(|c| c["group"] == "image" && c["metric"] == "ttff").unwrap();
    let single = read_json(&{
        let r = run(tmp.path(), &["--out", "one", "report", "a.csv"]);
        assert_eq!(r.status.code(), Some(0));
        tmp.path().join("one/report.json")
    });
    let one = single["data"]["aggregates"][0]["cells"].as_array().unwrap();
    let one_ttff = one.iter().find(|c| c["group"] == "image" && c["metric"] == "ttff").unwrap();
    assert_eq!(image_ttff["n"].as_u64().unwrap(), 2 * one_ttff["n"].as_u64().unwrap());
    assert_eq!(image_ttff["coverage"].as_u64().unwrap(), 2 * one_ttff["coverage"].as_u64().unwrap());

    let responses = core_fixture("responses.csv");
    let r = run(tmp.path(), &["--out", "mixed", "report", "a.csv", responses.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("cannot merge"), "{}", stderr(&r));
}

#[test]
fn response_report_matches_golden_text() {
    let tmp = TempDir::new().unwrap();
    let responses = core_fixture("responses.csv");
    let r = run(tmp.path(), &["--out", "rep", "report", responses.to_str().unwrap(), "--kw"]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    let text = std::fs::read_to_string(tmp.path().join("rep/report.txt")).unwrap();
    assert_eq!(text, std::fs::read_to_string(cli_fixture("golden_responses_report.txt")).unwrap());
    assert!(text.contains("tag       4.22 s ->   19.84 s  +370.14%"));
}

#[test]
fn saliency_score_and_detection_report_round_trip() {
    let tmp = TempDir::new().unwrap();
    render_phones(tmp.path(), "page");
    let r = run(tmp.path(), &["--out", "page/itti", "saliency", "page/render.png", "--model", "itti"]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    for name in ["map.png", "map.f32", "overlay.png", "manifest.json"] {
        assert!(tmp.path().join("page/itti").join(name).is_file(), "{name}");
    }
    let manifest = read_json(&tmp.path().join("page/itti/manifest.json"));
    let notes = manifest["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("default")), "{notes:?}");
    assert_eq!(manifest["params"]["model"], "itti");

    let r = run(tmp.path(), &["--out", "scores", "score", "page"]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    let detection = read_json(&tmp.path().join("scores/detection.json"));
    assert!(detection.is_array());

    let r = run(tmp.path(), &["--out", "rep", "report", "scores/detection.json"]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    let report = read_json(&tmp.path().join("rep/report.json"));
    assert_eq!(report["kind"], "detection");
    assert_eq!(report["data"], detection);
}
