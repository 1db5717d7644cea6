mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use dct_core::graph::parse_graph;
use dct_core::planner::parse_plan;

use common::{dct, fixture, report_at, tree};

fn s(p: &Path) -> String {
    p.display().to_string()
}

fn detect_three(dir: &Path) -> String {
    let report = dir.join("report.json");
    let r = dct([
        "detect",
        "--input",
        &s(&fixture("three")),
        "--output",
        &s(&report),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    s(&report)
}

#[test]
fn detect_prints_summary_table() {
    let dir = tempfile::tempdir().unwrap();
    let r = dct([
        "detect",
        "--input",
        &s(&fixture("three")),
        "--output",
        &s(&dir.path().join("r.json")),
    ]);
    assert!(r.stdout.starts_with("data clumps\n"));
    assert!(r.stdout.contains("  total                          3\n"));
    assert_eq!(report_at(&dir.path().join("r.json")).data_clumps.len(), 3);
}

#[test]
fn detect_reads_ast_directories() {
    let dir = tempfile::tempdir().unwrap();
    let ast = dir.path().join("ast");
    assert_eq!(
        dct([
            "extract",
            "--input",
            &s(&fixture("three")),
            "--output",
            &s(&ast)
        ])
        .code,
        0
    );
    let from_ast = dir.path().join("from_ast.json");
    assert_eq!(
        dct(["detect", "--input", &s(&ast), "--output", &s(&from_ast)]).code,
        0
    );
    let from_project = detect_three(dir.path());
    assert_eq!(
        fs::read(&from_ast).unwrap(),
        fs::read(from_project).unwrap()
    );
}

#[test]
fn corrupted_ast_document_fails() {
    let dir = tempfile::tempdir().unwrap();
    let ast = dir.path().join("ast");
    assert_eq!(
        dct([
            "extract",
            "--input",
            &s(&fixture("three")),
            "--output",
            &s(&ast)
        ])
        .code,
        0
    );
    fs::write(
        ast.join("p.B.json"),
        "{\"format_version\": \"1.0\", \"name\": 7}",
    )
    .unwrap();
    let r = dct([
        "detect",
        "--input",
        &s(&ast),
        "--output",
        &s(&dir.path().join("r.json")),
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("p.B.json"), "{}", r.stderr);
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn invalid_min_size_and_usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = s(&dir.path().join("r.json"));
    assert_eq!(
        dct([
            "detect",
            "--input",
            &s(&fixture("three")),
            "--output",
            &out,
            "--min-size",
            "1"
        ])
        .code,
        1
    );
    assert_eq!(dct(["detect", "--bogus"]).code, 1);
    assert_eq!(
        dct(["plan", "--input", "x", "--output", "y", "--all", "--select", "k"]).code,
        1
    );
    assert_eq!(dct(["--help"]).code, 0);
}

#[test]
fn graph_of_empty_report_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("empty.json");
    let r = dct([
        "detect",
        "--input",
        &s(&fixture("empty")),
        "--output",
        &s(&report),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let graph = dir.path().join("graph.json");
    assert_eq!(
        dct(["graph", "--input", &s(&report), "--output", &s(&graph)]).code,
        0
    );
    assert_eq!(
        fs::read_to_string(&graph).unwrap(),
        "{\n  \"edges\": [],\n  \"nodes\": []\n}\n"
    );
}

#[test]
fn graph_counts_and_dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let report = detect_three(dir.path());
    let (graph, dot) = (dir.path().join("g.json"), dir.path().join("g.dot"));
    let r = dct([
        "graph",
        "--input",
        &report,
        "--output",
        &s(&graph),
        "--dot",
        &s(&dot),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let g = parse_graph(&fs::read_to_string(&graph).unwrap()).unwrap();
    // files A,B,C + classes A,B,C + method C.m + three variables under each of A, B and C.m
    assert_eq!(g.nodes.len(), 3 + 3 + 1 + 9);
    // file->class x3, class->method x1, owner->variable x9, plus one clump edge per occurrence
    assert_eq!(g.edges.len(), 3 + 1 + 9 + 3);
    let dot = fs::read_to_string(&dot).unwrap();
    assert!(dot.starts_with("digraph clumps {\n") && dot.ends_with("}\n"));
    assert_eq!(dot.matches("kind=\"clump\"").count(), 3);
}

#[test]
fn graph_rejects_bad_report() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"report_version\": \"9.9\"}").unwrap();
    let r = dct([
        "graph",
        "--input",
        &s(&bad),
        "--output",
        &s(&dir.path().join("g.json")),
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("ERROR "));
}

#[test]
fn plan_all_select_and_names() {
    let dir = tempfile::tempdir().unwrap();
    let report = detect_three(dir.path());
    let plan_path = dir.path().join("plan.json");

    assert_eq!(
        dct([
            "plan",
            "--input",
            &report,
            "--output",
            &s(&plan_path),
            "--all"
        ])
        .code,
        0
    );
    let plan = parse_plan(&fs::read_to_string(&plan_path).unwrap())
        .unwrap()
        .value;
    let keys: usize = plan
        .groups
        .iter()
        .map(|g| g.group.occurrence_keys.len())
        .sum();
    assert_eq!(keys, 3);
    assert_eq!(plan.groups.len(), 1);
    let group_id = plan.groups[0].group.group_id.clone();
    assert_eq!(plan.groups[0].new_class_name, "XYZData");

    let named = format!("{group_id}=PointData");
    let r = dct([
        "plan",
        "--input",
        &report,
        "--output",
        &s(&plan_path),
        "--select",
        &group_id,
        "--name",
        &named,
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let plan = parse_plan(&fs::read_to_string(&plan_path).unwrap())
        .unwrap()
        .value;
    assert_eq!(plan.groups[0].new_class_name, "PointData");
    assert!(plan.groups[0]
        .class_stub
        .contains("public class PointData {"));

    let r = dct([
        "plan",
        "--input",
        &report,
        "--output",
        &s(&plan_path),
        "--select",
        "no|such|key",
    ]);
    assert_eq!(r.code, 1);
    let bad_name = format!("{group_id}=9Lives");
    assert_eq!(
        dct([
            "plan",
            "--input",
            &report,
            "--output",
            &s(&plan_path),
            "--all",
            "--name",
            &bad_name
        ])
        .code,
        1
    );
}

#[test]
fn pipeline_matches_sequential_commands() {
    let dir = tempfile::tempdir().unwrap();
    let input = s(&fixture("shop"));
    let piped = dir.path().join("piped");
    assert_eq!(
        dct([
            "pipeline",
            "--input",
            &input,
            "--output",
            &s(&piped),
            "--aux-root",
            "libs"
        ])
        .code,
        0
    );

    let seq = dir.path().join("seq");
    let ast = seq.join("ast");
    let report = seq.join("report.json");
    assert_eq!(
        dct([
            "extract",
            "--input",
            &input,
            "--output",
            &s(&ast),
            "--aux-root",
            "libs"
        ])
        .code,
        0
    );
    assert_eq!(
        dct(["detect", "--input", &s(&ast), "--output", &s(&report)]).code,
        0
    );
    assert_eq!(
        dct([
            "graph",
            "--input",
            &s(&report),
            "--output",
            &s(&seq.join("graph.json"))
        ])
        .code,
        0
    );
    assert_eq!(tree(&piped), tree(&seq));
}

#[test]
fn pipeline_gate_keeps_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let r = dct([
        "pipeline",
        "--input",
        &s(&fixture("three")),
        "--output",
        &s(&out),
        "--fail-threshold",
        "0",
    ]);
    assert_eq!(r.code, 2);
    let files: Vec<String> = tree(&out).into_keys().collect();
    assert!(
        files.contains(&"report.json".to_string()) && files.contains(&"graph.json".to_string())
    );
}

#[test]
fn pipeline_on_empty_project() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        dct([
            "pipeline",
            "--input",
            &s(&fixture("empty")),
            "--output",
            &s(&out)
        ])
        .code,
        0
    );
    let files: BTreeMap<String, Vec<u8>> = tree(&out);
    assert_eq!(
        files.keys().collect::<Vec<_>>(),
        ["ast/bundle.json", "graph.json", "report.json"]
    );
    assert_eq!(report_at(&out.join("report.json")).summary.total, 0);
}

#[test]
fn module_detection_off_merges_modules() {
    let dir = tempfile::tempdir().unwrap();
    let out = s(&dir.path().join("r.json"));
    let input = s(&fixture("intermodule"));
    let r = dct([
        "detect",
        "--input",
        &input,
        "--output",
        &out,
        "--scope",
        "module",
        "--module-detection",
        "off",
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(report_at(Path::new(&out)).summary.total, 1);
}

#[test]
fn timestamp_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(
        dct([
            "detect",
            "--input",
            &s(&fixture("three")),
            "--output",
            &s(&out),
            "--timestamp"
        ])
        .code,
        0
    );
    assert!(report_at(&out).timestamp.is_some());
    detect_three(dir.path());
    assert!(report_at(&dir.path().join("report.json"))
        .timestamp
        .is_none());
}
