//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::time::{Duration, Instant};

use dct_core::ast::{parse_class_document, serialize_class};
use dct_core::detector::{detect, DetectorConfig, Scope};
use dct_core::graph::{build_graph, validate_graph, EdgeKind};
use dct_core::java::{extract_class_infos, ModuleMap};
use dct_core::planner::{
    build_plan, parse_plan, render_extracted_class, write_plan, GroupVariable,
};
use dct_core::report::{parse_report, write_report};
use dct_testkit::{
    oracle_keys, random_bundle, random_class, random_report, random_variable_set, BundleShape,
};

use common::{dct, fixture, report_at, tree};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn keys(bundle: &dct_core::AstBundle, cfg: &DetectorConfig) -> BTreeSet<String> {
    detect(bundle, cfg)
        .unwrap()
        .data_clumps
        .into_keys()
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let shape = BundleShape::default();
    let mut occurrences = 0;
    for seed in 0..100 {
        let bundle = random_bundle(seed, &shape);
        ensure(bundle.classes.len() <= 40, || {
            format!("seed {seed}: too many classes")
        })?;
        let cfg = DetectorConfig::default();
        let found = keys(&bundle, &cfg);
        let expected = oracle_keys(&bundle, &cfg);
        ensure(found == expected, || {
            format!(
                "seed {seed}: {} keys only in detector, {} only in oracle",
                found.difference(&expected).count(),
                expected.difference(&found).count()
            )
        })?;
        occurrences += found.len();
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    ensure(occurrences > 0, || "no occurrences generated".into())?;
    Ok(format!(
        "100 seeds, {occurrences} occurrences, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn monotonicity() -> Outcome {
    let mut violations = 0;
    for seed in 0..25 {
        let bundle = random_bundle(1000 + seed, &BundleShape::default());
        for k in 2..=4 {
            let at = |min| {
                keys(
                    &bundle,
                    &DetectorConfig {
                        min_clump_size: min,
                        ..DetectorConfig::default()
                    },
                )
            };
            if !at(k + 1).is_subset(&at(k)) {
                violations += 1;
            }
        }
        let module = DetectorConfig {
            scope: Scope::Module,
            ..DetectorConfig::default()
        };
        if !keys(&bundle, &module).is_subset(&keys(&bundle, &DetectorConfig::default())) {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok("25 seeds, 0 violations".into())
}

fn detect_total(args: &[&str]) -> Result<usize, String> {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let mut full: Vec<String> = vec![
        "detect".into(),
        "--output".into(),
        out.display().to_string(),
    ];
    full.extend(args.iter().map(|s| s.to_string()));
    let run = dct(&full);
    ensure(run.code == 0, || {
        format!("detect {args:?} exited {}: {}", run.code, run.stderr)
    })?;
    Ok(report_at(&out).summary.total)
}

fn inter_module_blind_spot() -> Outcome {
    let input = fixture("intermodule").display().to_string();
    let module = detect_total(&["--input", &input, "--scope", "module"])?;
    let project = detect_total(&["--input", &input, "--scope", "project"])?;
    ensure(module == 0 && project == 1, || {
        format!("module={module} project={project}")
    })?;
    Ok("scope=module 0, scope=project 1".into())
}

fn aux_exclusion() -> Outcome {
    let input = fixture("aux").display().to_string();
    let default = detect_total(&["--input", &input, "--aux-root", "libs"])?;
    let with_flag = detect_total(&[
        "--input",
        &input,
        "--aux-root",
        "libs",
        "--include-aux-counterpart",
    ])?;
    let without_root = detect_total(&["--input", &input])?;
    ensure(default == 0 && with_flag >= 1, || {
        format!("default={default} counterpart={with_flag}")
    })?;
    ensure(without_root == 1, || {
        format!("without aux root={without_root}")
    })?;
    Ok(format!("default 0, counterpart {with_flag}"))
}

fn end_to_end_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("shop").display().to_string();
    let run = |name: &str, jobs: &str| -> Result<BTreeMap<String, Vec<u8>>, String> {
        let out = dir.path().join(name);
        let r = dct([
            "pipeline",
            "--input",
            &input,
            "--output",
            &out.display().to_string(),
            "--aux-root",
            "libs",
            "--jobs",
            jobs,
        ]);
        ensure(r.code == 0, || {
            format!("pipeline exited {}: {}", r.code, r.stderr)
        })?;
        Ok(tree(&out))
    };
    let a = run("a", "4")?;
    let b = run("b", "4")?;
    let one = run("one", "1")?;
    let eight = run("eight", "8")?;
    for required in ["report.json", "graph.json", "ast/bundle.json"] {
        ensure(a.contains_key(required), || format!("missing {required}"))?;
    }
    ensure(a == b, || "two runs differ".into())?;
    ensure(one == eight, || "--jobs 1 and --jobs 8 differ".into())?;
    ensure(a == one, || "--jobs 4 and --jobs 1 differ".into())?;
    let total = report_at(&dir.path().join("a/report.json")).summary.total;
    ensure(total > 0, || "fixture produced no clumps".into())?;
    Ok(format!(
        "{} files identical across 4 runs, {total} clumps",
        a.len()
    ))
}

fn cli_extract_contract() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("three");
    let r = dct([
        "extract",
        "--input",
        &fixture("three").display().to_string(),
        "--output",
        &out.display().to_string(),
    ]);
    ensure(r.code == 0, || {
        format!("extract exited {}: {}", r.code, r.stderr)
    })?;
    let files: Vec<String> = tree(&out).into_keys().collect();
    ensure(
        files == ["bundle.json", "p.A.json", "p.B.json", "p.C.json"],
        || format!("wrote {files:?}"),
    )?;

    let malformed = fixture("malformed").display().to_string();
    let out = dir.path().join("malformed");
    let r = dct([
        "extract",
        "--input",
        &malformed,
        "--output",
        &out.display().to_string(),
    ]);
    ensure(r.code == 0, || format!("non-strict exited {}", r.code))?;
    let docs: Vec<String> = tree(&out)
        .into_keys()
        .filter(|f| f != "bundle.json")
        .collect();
    ensure(docs == ["p.A.json", "p.B.json"], || {
        format!("non-strict wrote {docs:?}")
    })?;
    let errors: Vec<&str> = r
        .stderr
        .lines()
        .filter(|l| l.starts_with("ERROR "))
        .collect();
    ensure(
        errors.len() == 1 && errors[0].contains("Broken.java:4"),
        || format!("diagnostics {errors:?}"),
    )?;

    let strict_out = dir.path().join("strict");
    let r = dct([
        "extract",
        "--input",
        &malformed,
        "--output",
        &strict_out.display().to_string(),
        "--strict",
    ]);
    ensure(r.code == 1, || format!("--strict exited {}", r.code))?;

    let r = dct([
        "extract",
        "--input",
        "/nonexistent/dct-project",
        "--output",
        &dir.path().join("x").display().to_string(),
    ]);
    ensure(r.code == 1 && r.stderr.starts_with("ERROR "), || {
        format!("missing input exited {}", r.code)
    })?;
    Ok("3 documents + bundle.json; malformed file skipped, --strict fails".into())
}

fn round_trips() -> Outcome {
    for seed in 0..1000 {
        let class = random_class(seed);
        let doc = serialize_class(&class);
        let parsed = parse_class_document(&doc).map_err(|e| format!("class seed {seed}: {e}"))?;
        ensure(
            parsed.value == class && serialize_class(&parsed.value) == doc,
            || format!("class seed {seed} changed"),
        )?;
    }
    let mut clumps = 0;
    for seed in 0..1000 {
        let report = random_report(seed);
        let doc = write_report(&report);
        let parsed = parse_report(&doc).map_err(|e| format!("report seed {seed}: {e}"))?;
        ensure(
            parsed.value == report && write_report(&parsed.value) == doc,
            || format!("report seed {seed} changed"),
        )?;
        let graph = build_graph(&report).map_err(|e| format!("graph seed {seed}: {e}"))?;
        validate_graph(&graph).map_err(|e| format!("graph seed {seed}: {e}"))?;
        let edges = graph
            .edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Clump)
            .count();
        ensure(edges == report.summary.total, || {
            format!("graph seed {seed}: {edges} clump edges")
        })?;
        clumps += edges;
    }
    Ok(format!(
        "1000 classes, 1000 reports ({clumps} clumps), graphs intact"
    ))
}

fn planner_consistency() -> Outcome {
    for seed in 0..200 {
        let set = random_variable_set(seed);
        let stub =
            render_extracted_class(&set, "ExtractedData", "gen.stub").map_err(|e| e.to_string())?;
        let classes =
            extract_class_infos(&stub, "gen/stub/ExtractedData.java", &ModuleMap::default())
                .map_err(|e| format!("stub seed {seed} does not parse: {e}"))?;
        ensure(classes.len() == 1, || {
            format!("stub seed {seed}: {} classes", classes.len())
        })?;
        let mut fields: Vec<GroupVariable> = classes[0]
            .fields
            .iter()
            .map(|f| GroupVariable {
                name: f.name.clone(),
                ty: f.ty.clone(),
            })
            .collect();
        fields.sort();
        ensure(fields == set, || format!("stub seed {seed}: fields differ"))?;
    }

    for seed in 0..50 {
        let report = random_report(seed);
        let all: Vec<String> = report.data_clumps.keys().cloned().collect();
        let plan = build_plan(&report, &all, &BTreeMap::new())
            .map_err(|e| format!("plan seed {seed}: {e}"))?;
        parse_plan(&write_plan(&plan)).map_err(|e| format!("plan seed {seed}: {e}"))?;
    }

    let dir = tempfile::tempdir().unwrap();
    let input = fixture("three").display().to_string();
    let report = dir.path().join("report.json").display().to_string();
    for (threshold, expected) in [
        (None, 0),
        (Some(0), 2),
        (Some(2), 2),
        (Some(3), 0),
        (Some(10), 0),
    ] {
        let mut args = vec![
            "detect".to_string(),
            "--input".into(),
            input.clone(),
            "--output".into(),
            report.clone(),
        ];
        if let Some(t) = threshold {
            args.extend(["--fail-threshold".to_string(), t.to_string()]);
        }
        let r = dct(&args);
        ensure(r.code == expected, || {
            format!(
                "threshold {threshold:?}: exit {} expected {expected}",
                r.code
            )
        })?;
    }
    let plan_path = dir.path().join("plan.json");
    let r = dct([
        "plan",
        "--input",
        &report,
        "--output",
        &plan_path.display().to_string(),
        "--all",
    ]);
    ensure(r.code == 0, || {
        format!("plan exited {}: {}", r.code, r.stderr)
    })?;
    let plan = parse_plan(&fs::read_to_string(&plan_path).unwrap())
        .map_err(|e| e.to_string())?
        .value;
    plan.verify_against(&fs::read_to_string(&report).unwrap())
        .map_err(|e| e.to_string())?;
    Ok("200 stubs re-parse exactly; plans validate; exit 2 only above threshold".into())
}

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("threshold and scope monotonicity", monotonicity),
        ("inter-module blind spot", inter_module_blind_spot),
        ("aux exclusion", aux_exclusion),
        ("end-to-end determinism", end_to_end_determinism),
        ("cli extract contract", cli_extract_contract),
        ("round trips and graph integrity", round_trips),
        ("planner self-consistency", planner_consistency),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {name}: panicked");
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
