use std::collections::BTreeSet;

use riesz_tiler::report::{
    export_report, grid_function_to_string, profile_table, render_svg, run_pipeline, ExportFormat, GridFormat,
    InstanceSpec, Pipeline, PipelineError, PipelineOptions, PipelineReport, Stage,
};

const RECT: &str = r#"{"dimension":2,"lattice":{"basis":[["1","0"],["0","1"]]},"region":{"type":"box_union","boxes":[{"lo":["0","0"],"hi":["2","1"]}]},"level":2,"seed":42,"resolution":8}"#;
const HEXAGON: &str = r#"{"dimension":2,"region":{"type":"polygon2d","vertices":[["0","0"],["2","0"],["3","1"],["3","2"],["1","2"],["0","1"]]},"seed":7}"#;
const STAGGERED: &str = r#"{"dimension":2,"region":{"type":"box_union","boxes":[{"lo":["0","0"],"hi":["3/2","1/2"]},{"lo":["1/2","1/2"],"hi":["3/2","1"]},{"lo":["3","1/2"],"hi":["7/2","1"]},{"lo":["5/2","0"],"hi":["3","1"]}]}}"#;

fn spec(text: &str) -> InstanceSpec {
    InstanceSpec::from_json(text).unwrap()
}

fn svg_for(text: &str) -> (String, Pipeline) {
    let mut p = Pipeline::prepare(&spec(text), PipelineOptions::default()).unwrap();
    let svg = render_svg(&mut p).unwrap();
    (svg, p)
}

#[test]
fn svg_is_well_formed_and_lists_every_cell_once() {
    for text in [RECT, HEXAGON, STAGGERED] {
        let (svg, p) = svg_for(text);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let cells: Vec<usize> = doc
            .descendants()
            .filter(|n| n.has_tag_name("polygon") && n.attribute("class") == Some("cell"))
            .map(|n| n.attribute("data-cell").unwrap().parse().unwrap())
            .collect();
        assert_eq!(cells, (0..p.complex.len()).collect::<Vec<_>>());
        let parts = doc.descendants().filter(|n| n.has_tag_name("path") && n.attribute("class") == Some("part")).count();
        assert_eq!(parts, p.level().unwrap());
    }
}

#[test]
fn hexagon_figure_uses_one_color_per_part() {
    let (svg, p) = svg_for(HEXAGON);
    assert_eq!(p.level(), Some(5));
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let fills: BTreeSet<&str> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("part"))
        .map(|n| n.attribute("fill").unwrap())
        .collect();
    assert_eq!(fills.len(), 5);
    assert!(doc.descendants().any(|n| n.attribute("class") == Some("legend")));
}

#[test]
fn figures_need_the_plane() {
    for text in [
        r#"{"dimension":1,"region":{"type":"box_union","boxes":[{"lo":["0"],"hi":["2"]}]}}"#,
        r#"{"dimension":3,"region":{"type":"box_union","boxes":[{"lo":["0","0","0"],"hi":["1","1","1"]}]}}"#,
    ] {
        let mut p = Pipeline::prepare(&spec(text), PipelineOptions::default()).unwrap();
        assert!(matches!(render_svg(&mut p), Err(PipelineError::Dimension(_))));
    }
}

#[test]
fn exports_round_trip_and_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_pipeline(&spec(RECT), PipelineOptions::default()).unwrap();
    let b = run_pipeline(&spec(RECT), PipelineOptions::default()).unwrap();
    let (pa, pb) = (dir.path().join("a.json"), dir.path().join("b.json"));
    export_report(&a, ExportFormat::Json, &pa).unwrap();
    export_report(&b, ExportFormat::Json, &pb).unwrap();
    let (ta, tb) = (std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());
    assert_eq!(ta, tb);
    let reparsed = PipelineReport::from_json(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert_eq!(reparsed, a);

    let pc = dir.path().join("profiles.csv");
    let hex = run_pipeline(&spec(HEXAGON), PipelineOptions::default()).unwrap();
    export_report(&hex, ExportFormat::Csv, &pc).unwrap();
    let mut reader = csv::Reader::from_path(&pc).unwrap();
    assert_eq!(reader.records().count(), hex.profiles.as_ref().unwrap().len());
    assert_eq!(profile_table(&hex).rows.len(), hex.profiles.unwrap().len());
}

#[test]
fn io_errors_carry_the_path() {
    let a = run_pipeline(&spec(RECT), PipelineOptions::default()).unwrap();
    let path = std::path::Path::new("/nonexistent-dir/report.json");
    let err = export_report(&a, ExportFormat::Json, path).unwrap_err();
    assert!(err.to_string().contains("/nonexistent-dir/report.json"));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn stage_tables() {
    let mut p = Pipeline::prepare(&spec(STAGGERED), PipelineOptions::default()).unwrap();
    p.run_until(Stage::RoundTrip).unwrap();
    assert_eq!(p.table(Stage::Split).rows.len(), 2 * p.complex.len());
    assert_eq!(p.table(Stage::Select).rows.len(), 2);
    assert_eq!(p.table(Stage::RoundTrip).rows.len(), 1);
    let t = p.transform.as_ref().unwrap();
    let f = riesz_tiler::GridFunction::zeros(t.omega_len());
    let csv_text = grid_function_to_string(t, &f, GridFormat::Csv);
    assert_eq!(csv_text.lines().count(), t.omega_len() + 1);
}
