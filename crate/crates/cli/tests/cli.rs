use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geocenter"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn tmp(name: &str) -> String {
    let dir = std::env::temp_dir().join(format!("geocenter-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn dist_d1() {
    let v = json(&["dist", "--domain", &data("d1.json"), "--from", "2,5", "--to", "8,5"]);
    let d = v["distance"].as_f64().unwrap();
    assert!((d - (2.0 + 2.0 * 5f64.sqrt())).abs() < 1e-9);
    assert_eq!(v["paths"], 2);
}

#[test]
fn paths_lists_waypoints() {
    let v = json(&["paths", "--domain", &data("d1.json"), "--from", "2,5", "--to", "8,5"]);
    let paths = v["paths"].as_array().unwrap();
    assert_eq!(paths.len(), 2);
    for p in paths {
        assert_eq!(p["waypoints"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn center_of_square() {
    let v = json(&["center", "--domain", &data("square.json")]);
    assert!((v["radius"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    let c = &v["centers"][0];
    assert!((c[0].as_f64().unwrap() - 0.5).abs() < 1e-9 && (c[1].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["centers"].as_array().unwrap().len(), 1);
}

#[test]
fn notch_pirange_is_special() {
    let v = json(&["farthest", "--domain", &data("d3.json"), "--s", "0,0.8"]);
    let far = v["farthest"].as_array().unwrap();
    assert_eq!(far.len(), 1);
    assert_eq!(far[0]["location"]["kind"], "edge");
    let t = format!("{},{}", far[0]["point"][0], far[0]["point"][1]);
    let v = json(&["pirange", "--domain", &data("d3.json"), "--s", "0,0.8", "--t", &t]);
    assert_eq!(v["range"], "empty");
    assert_eq!(v["special"], true);
    let v = json(&["admissible", "--domain", &data("d3.json"), "--s", "0,0.8"]);
    assert_eq!(v["empty"], true);
}

#[test]
fn pirange_range_is_half_circle() {
    let v = json(&["pirange", "--domain", &data("d1.json"), "--s", "2,5", "--t", "6,6"]);
    let arc = &v["range"][0];
    let size = arc["end"].as_f64().unwrap() - arc["start"].as_f64().unwrap();
    assert!((size - std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(v["special"], false);
}

#[test]
fn validate_reports_collinear_triples() {
    let v = json(&["validate", "--domain", &data("d1.json")]);
    assert_eq!(v["valid"], true);
    assert_eq!(v["general_position"], false);
    let v = json(&["validate", "--domain", &data("d2.json")]);
    assert_eq!(v["general_position"], true);
}

#[test]
fn candidates_need_force_on_dirty_domains() {
    let out = run(&["candidates", "--domain", &data("d1.json")]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&["candidates", "--domain", &data("square.json"), "--case", "vertex"]);
    assert_eq!(v["count"], 4);
}

#[test]
fn oracle_brackets_square_radius() {
    let v = json(&["oracle", "--domain", &data("square.json"), "--grid", "0.05"]);
    let r = 0.5f64.sqrt();
    assert!(v["lower"].as_f64().unwrap() <= r && r <= v["value"].as_f64().unwrap());
    let v = json(&[
        "oracle",
        "--domain",
        &data("square.json"),
        "--grid",
        "0.05",
        "--s",
        "0.5,0.5",
    ]);
    assert!(v["lower"].as_f64().unwrap() <= r && r <= v["upper"].as_f64().unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        run(&["dist", "--domain", &data("d1.json"), "--from", "2"])
            .status
            .code(),
        Some(1)
    );
    let out = run(&["dist", "--domain", &data("d1.json"), "--from", "5,5", "--to", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside"));
    let bad = tmp("bad.json");
    std::fs::write(&bad, r#"{"outer": [[0,0],[1,0]]}"#).unwrap();
    assert_eq!(run(&["validate", "--domain", &bad]).status.code(), Some(2));
    // Two paths to an interior point: no closed form applies.
    let out = run(&["pirange", "--domain", &data("d1.json"), "--s", "2,5", "--t", "8,5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn svg_element_counts() {
    let sq = tmp("square.svg");
    json(&["render", "--domain", &data("square.json"), "--out", &sq]);
    let svg = std::fs::read_to_string(&sq).unwrap();
    assert_eq!(svg.matches("<path").count(), 1);

    let d1 = tmp("d1.svg");
    json(&[
        "paths",
        "--domain",
        &data("d1.json"),
        "--from",
        "2,5",
        "--to",
        "8,5",
        "--out",
        &d1,
    ]);
    assert_eq!(std::fs::read_to_string(&d1).unwrap().matches("<polyline").count(), 2);

    let d2 = tmp("d2.svg");
    json(&["center", "--domain", &data("d2.json"), "--out", &d2]);
    assert_eq!(
        std::fs::read_to_string(&d2)
            .unwrap()
            .matches("class=\"center\"")
            .count(),
        3
    );
}

#[test]
fn svg_is_deterministic() {
    let (a, b) = (tmp("a.svg"), tmp("b.svg"));
    for out in [&a, &b] {
        json(&[
            "render",
            "--domain",
            &data("d1.json"),
            "--layers",
            "domain,visibility-graph,paths,pirange-fans,grid-heatmap",
            "--from",
            "2,5",
            "--to",
            "8,5",
            "--s",
            "1,2",
            "--grid",
            "0.5",
            "--out",
            out,
        ]);
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert!(text.contains("class=\"fan\""));
    assert!(text.contains("class=\"heat\""));
}

#[test]
fn seed_jitters_domain() {
    let plain = json(&["validate", "--domain", &data("d1.json")]);
    assert_eq!(plain["general_position"], false);
    let jittered = json(&["validate", "--domain", &data("d1.json"), "--seed", "7"]);
    assert_eq!(jittered["report"]["collinear_triples"].as_array().unwrap().len(), 0);
}
