use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use dct_core::ast::{parse_class_document, serialize_class, FORMAT_VERSION};
use dct_core::detector::{detect, DetectError, DetectorConfig, Scope};
use dct_core::graph::{build_graph, to_dot, write_graph};
use dct_core::java::{extract_project, ExtractorConfig, ProjectExtraction};
use dct_core::json::to_canonical_string;
use dct_core::planner::{build_plan_from_document, write_plan};
use dct_core::report::{parse_report, summarize, write_report};
use dct_core::{AstBundle, DataClumpsReport};

use crate::args::{Cli, Command, DetectOpts, ExtractOpts, ScopeArg, Toggle};

pub const MANIFEST: &str = "bundle.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Ok = 0,
    Error = 1,
    BudgetExceeded = 2,
}

/// A fatal error, printed as `ERROR file message`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ERROR {file} {message}")]
pub struct Failure {
    pub file: String,
    pub message: String,
}

impl Failure {
    fn new(file: impl AsRef<Path>, message: impl fmt::Display) -> Self {
        Self {
            file: file.as_ref().display().to_string(),
            message: message.to_string(),
        }
    }
}

/// Index of an AST directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub format_version: String,
    pub project_name: String,
    pub source_root: String,
    pub class_count: usize,
    /// Document file names, one per class, sorted by qualified name.
    pub documents: Vec<String>,
    pub modules: BTreeMap<String, String>,
    pub extractor: ExtractorConfig,
}

pub fn run(cli: &Cli) -> Result<Status, Failure> {
    match &cli.command {
        Command::Extract {
            input,
            output,
            extract,
        } => {
            let ex = extract_from(input, extract)?;
            write_ast_dir(output, &ex, &extractor_config(extract))?;
            println!(
                "extracted {} classes from {} files ({} skipped)",
                ex.bundle.classes.len(),
                ex.files_scanned,
                ex.files_failed
            );
            Ok(Status::Ok)
        }
        Command::Detect {
            input,
            output,
            extract,
            detect,
        } => {
            let bundle = if input.join(MANIFEST).is_file() {
                load_ast_dir(input)?
            } else {
                extract_from(input, extract)?.bundle
            };
            let report = run_detector(&bundle, detect)?;
            write_file(output, &write_report(&report))?;
            print!("{}", summarize(&report));
            Ok(gate(&report, detect))
        }
        Command::Graph { input, output, dot } => {
            let report = read_report(input)?;
            let graph = build_graph(&report).map_err(|e| Failure::new(input, e))?;
            write_file(output, &write_graph(&graph))?;
            if let Some(dot) = dot {
                write_file(dot, &to_dot(&graph))?;
            }
            println!("{} nodes, {} edges", graph.nodes.len(), graph.edges.len());
            Ok(Status::Ok)
        }
        Command::Plan {
            input,
            output,
            select,
            all,
            names,
        } => {
            let text = read_text(input)?;
            let selected: Vec<String> = if *all {
                parse_report(&text)
                    .map_err(|e| Failure::new(input, e))?
                    .value
                    .data_clumps
                    .into_keys()
                    .collect()
            } else {
                select.clone()
            };
            let names: BTreeMap<String, String> = names.iter().cloned().collect();
            let parsed = build_plan_from_document(&text, &selected, &names)
                .map_err(|e| Failure::new(input, e))?;
            for w in &parsed.warnings {
                eprintln!("WARN {} {w}", input.display());
            }
            write_file(output, &write_plan(&parsed.value))?;
            println!("{} groups planned", parsed.value.groups.len());
            Ok(Status::Ok)
        }
        Command::Pipeline {
            input,
            output,
            extract,
            detect,
        } => {
            let ex = extract_from(input, extract)?;
            write_ast_dir(&output.join("ast"), &ex, &extractor_config(extract))?;
            let report = run_detector(&ex.bundle, detect)?;
            write_file(&output.join("report.json"), &write_report(&report))?;
            let graph =
                build_graph(&report).map_err(|e| Failure::new(output.join("report.json"), e))?;
            write_file(&output.join("graph.json"), &write_graph(&graph))?;
            print!("{}", summarize(&report));
            Ok(gate(&report, detect))
        }
    }
}

fn gate(report: &DataClumpsReport, opts: &DetectOpts) -> Status {
    match opts.fail_threshold {
        Some(n) if report.summary.total > n => {
            eprintln!(
                "ERROR {} data clumps exceed the threshold of {n}",
                report.summary.total
            );
            Status::BudgetExceeded
        }
        _ => Status::Ok,
    }
}

fn extractor_config(opts: &ExtractOpts) -> ExtractorConfig {
    ExtractorConfig {
        aux_roots: opts.aux_roots.clone(),
        module_detection: opts.module_detection == Toggle::On,
        ..ExtractorConfig::default()
    }
}

fn detector_config(opts: &DetectOpts) -> DetectorConfig {
    DetectorConfig {
        min_clump_size: opts.min_size,
        match_types: !opts.no_type_match,
        scope: match opts.scope {
            ScopeArg::Project => Scope::Project,
            ScopeArg::Module => Scope::Module,
        },
        include_aux_counterpart: opts.include_aux_counterpart,
        include_own_class_param_field: opts.include_own_class,
        include_overrides: opts.include_overrides,
    }
}

fn extract_from(input: &Path, opts: &ExtractOpts) -> Result<ProjectExtraction, Failure> {
    let ex = extract_project(input, &extractor_config(opts)).map_err(|e| Failure::new(input, e))?;
    for d in &ex.diagnostics {
        eprintln!("{d}");
    }
    if opts.strict && ex.has_errors() {
        return Err(Failure::new(
            input,
            format!(
                "{} of {} files failed to parse (--strict)",
                ex.files_failed, ex.files_scanned
            ),
        ));
    }
    Ok(ex)
}

fn run_detector(bundle: &AstBundle, opts: &DetectOpts) -> Result<DataClumpsReport, Failure> {
    let report = detect(bundle, &detector_config(opts)).map_err(|e| match e {
        DetectError::InvalidBundle(violations) => {
            for v in &violations {
                eprintln!("ERROR {v}");
            }
            Failure::new(
                &bundle.source_root,
                format!("bundle has {} violations", violations.len()),
            )
        }
        DetectError::InvalidConfig(m) => Failure::new("--min-size", m),
    })?;
    Ok(if opts.timestamp {
        report.with_timestamp(Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true))
    } else {
        report
    })
}

fn document_name(qualified_name: &str) -> String {
    format!("{qualified_name}.json")
}

fn write_ast_dir(dir: &Path, ex: &ProjectExtraction, cfg: &ExtractorConfig) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::new(dir, format!("cannot create directory: {e}")))?;
    let classes = &ex.bundle.classes;
    for class in classes {
        write_file(
            &dir.join(document_name(&class.qualified_name)),
            &serialize_class(class),
        )?;
    }
    let manifest = BundleManifest {
        format_version: FORMAT_VERSION.to_string(),
        project_name: ex.bundle.project_name.clone(),
        source_root: ex.bundle.source_root.clone(),
        class_count: classes.len(),
        documents: classes
            .iter()
            .map(|c| document_name(&c.qualified_name))
            .collect(),
        modules: ex.modules.entries.clone(),
        extractor: cfg.clone(),
    };
    write_file(&dir.join(MANIFEST), &to_canonical_string(&manifest))
}

fn load_ast_dir(dir: &Path) -> Result<AstBundle, Failure> {
    let manifest_path = dir.join(MANIFEST);
    let manifest: BundleManifest = serde_json::from_str(&read_text(&manifest_path)?)
        .map_err(|e| Failure::new(&manifest_path, e))?;
    if manifest.class_count != manifest.documents.len() {
        return Err(Failure::new(
            &manifest_path,
            format!(
                "class_count {} but {} documents listed",
                manifest.class_count,
                manifest.documents.len()
            ),
        ));
    }
    let mut classes = Vec::new();
    let mut failed = 0;
    for name in &manifest.documents {
        let path = dir.join(name);
        match read_text(&path)
            .and_then(|t| parse_class_document(&t).map_err(|e| Failure::new(&path, e)))
        {
            Ok(parsed) => {
                for w in &parsed.warnings {
                    eprintln!("WARN {} {w}", path.display());
                }
                classes.push(parsed.value);
            }
            Err(f) => {
                eprintln!("{f}");
                failed += 1;
            }
        }
    }
    if failed > 0 {
        return Err(Failure::new(
            dir,
            format!("{failed} AST documents are invalid"),
        ));
    }
    Ok(AstBundle::new(
        manifest.project_name,
        manifest.source_root,
        classes,
    ))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(path, format!("cannot read: {e}")))
}

fn read_report(path: &Path) -> Result<DataClumpsReport, Failure> {
    let parsed = parse_report(&read_text(path)?).map_err(|e| Failure::new(path, e))?;
    for w in &parsed.warnings {
        eprintln!("WARN {} {w}", path.display());
    }
    Ok(parsed.value)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| Failure::new(parent, format!("cannot create directory: {e}")))?;
    }
    fs::write(path, contents).map_err(|e| Failure::new(path, format!("cannot write: {e}")))
}
