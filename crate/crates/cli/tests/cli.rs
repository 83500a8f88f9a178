use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use riesz_tiler::report::{grid_function_to_string, GridFormat, InstanceSpec, Pipeline, PipelineOptions, Stage};

const RECT: &str = r#"{"dimension":2,"lattice":{"basis":[["1","0"],["0","1"]]},"region":{"type":"box_union","boxes":[{"lo":["0","0"],"hi":["2","1"]}]},"level":2,"seed":42,"resolution":8}"#;
const NON_TILE: &str = r#"{"dimension":1,"region":{"type":"box_union","boxes":[{"lo":["0"],"hi":["3/2"]}]}}"#;
const THIRDS: &str = r#"{"dimension":1,"region":{"type":"box_union","boxes":[{"lo":["0"],"hi":["1/3"]},{"lo":["4/3"],"hi":["2"]}]}}"#;
const HEXAGON: &str = r#"{"dimension":2,"region":{"type":"polygon2d","vertices":[["0","0"],["2","0"],["3","1"],["3","2"],["1","2"],["0","1"]]},"seed":7}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_riesz-tiler"));
    c.env_remove("RIESZ_TILER_LOG");
    c
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "rect.json", RECT);
    let a = run(&["report", "-g", g.to_str().unwrap()]);
    let b = run(&["report", "-g", g.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["tiling"]["level"], 2);
    assert!(v["roundtrip"]["max_relative_error"].as_f64().unwrap() < 1e-12);
}

#[test]
fn overrides_change_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "rect.json", RECT);
    let o = run(&["select", "-g", g.to_str().unwrap(), "--seed", "5", "--restarts", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["shifts"]["seed"], 5);
    assert_eq!(v["instance"]["restarts"], 3);
    assert!(v.get("riesz").is_none());
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let non_tile = write(dir.path(), "bad.json", NON_TILE);
    let o = run(&["verify", "-g", non_tile.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let mults: Vec<u64> =
        v["tiling"]["violations"].as_array().unwrap().iter().map(|c| c["multiplicity"].as_u64().unwrap()).collect();
    assert_eq!(mults, vec![2, 1]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not tile"));

    let rect = write(dir.path(), "rect.json", RECT);
    assert_eq!(run(&["bounds", "-g", rect.to_str().unwrap(), "--tol", "100"]).status.code(), Some(3));
    let thirds = write(dir.path(), "thirds.json", THIRDS);
    assert_eq!(run(&["roundtrip", "-g", thirds.to_str().unwrap(), "--resolution", "4"]).status.code(), Some(4));
    assert_eq!(run(&["roundtrip", "-g", thirds.to_str().unwrap(), "--resolution", "6"]).status.code(), Some(0));

    let garbage = write(dir.path(), "garbage.json", "{not json");
    assert_eq!(run(&["verify", "-g", garbage.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["verify", "-g", "/no/such/file.json"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--bogus-flag"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "hex.json", HEXAGON);
    let o = run(&["profiles", "-g", g.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("index,translates,support_measure"));
    let spec = InstanceSpec::from_json(HEXAGON).unwrap();
    let mut p = Pipeline::prepare(&spec, PipelineOptions::default()).unwrap();
    p.run_until(Stage::Profiles).unwrap();
    assert_eq!(text.lines().count(), 1 + p.profile_set.unwrap().profiles.len());

    let o = run(&["verify", "-g", g.to_str().unwrap(), "--format", "csv"]);
    assert!(stdout(&o).lines().skip(1).all(|l| l.split(',').nth(1) == Some("5")));
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "hex.json", HEXAGON);
    let out = dir.path().join("hex.svg");
    let o = run(&["render", "-g", g.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    let line = write(dir.path(), "line.json", NON_TILE.replace("3/2", "2").as_str());
    assert_eq!(run(&["render", "-g", line.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn roundtrip_reads_a_grid_function() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "rect.json", RECT);
    let spec = InstanceSpec::from_json(RECT).unwrap();
    let mut p = Pipeline::prepare(&spec, PipelineOptions::default()).unwrap();
    p.run_until(Stage::RoundTrip).unwrap();
    let t = p.transform.as_ref().unwrap();
    let f = riesz_tiler::GridFunction::new(vec![riesz_tiler::Complex::new(1.0, 0.0); t.omega_len()]);
    for (name, fmt) in [("f.json", GridFormat::Json), ("f.csv", GridFormat::Csv)] {
        let input = write(dir.path(), name, &grid_function_to_string(t, &f, fmt));
        let coeffs = dir.path().join("c.json");
        let o = run(&[
            "roundtrip",
            "-g",
            g.to_str().unwrap(),
            "--input",
            input.to_str().unwrap(),
            "--coefficients",
            coeffs.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let c: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&coeffs).unwrap()).unwrap();
        assert_eq!(c.as_array().unwrap().len(), 2 * 64);
    }
}

#[test]
fn log_level_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "rect.json", RECT);
    let o = bin().args(["verify", "-g", g.to_str().unwrap()]).env("RIESZ_TILER_LOG", "debug").output().unwrap();
    assert!(String::from_utf8_lossy(&o.stderr).contains("stage verify done"));
    let o = run(&["verify", "-g", g.to_str().unwrap()]);
    assert!(o.stderr.is_empty());
}
