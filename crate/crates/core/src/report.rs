//! The data-clumps report: a self-contained, deterministic document that
//! every downstream consumer (graph, planner, CI gate, visualizer) reads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::detector::{occurrence_key, DataClumpOccurrence, DetectorConfig, OccurrenceKind, Scope};
use crate::json::{self, Parsed};
use crate::{DETECTOR_NAME, DETECTOR_VERSION};

pub const REPORT_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorInfo {
    pub name: String,
    pub version: String,
}

impl Default for DetectorInfo {
    fn default() -> Self {
        Self {
            name: DETECTOR_NAME.into(),
            version: DETECTOR_VERSION.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectInfo {
    pub name: String,
    pub number_of_classes: usize,
    pub number_of_methods: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub fields_to_fields: usize,
    pub parameters_to_parameters: usize,
    pub parameters_to_fields: usize,
}

impl Summary {
    pub fn of<'a>(occurrences: impl IntoIterator<Item = &'a DataClumpOccurrence>) -> Self {
        let mut s = Summary::default();
        for o in occurrences {
            s.total += 1;
            match o.kind {
                OccurrenceKind::FieldsToFields => s.fields_to_fields += 1,
                OccurrenceKind::ParametersToParameters => s.parameters_to_parameters += 1,
                OccurrenceKind::ParametersToFields => s.parameters_to_fields += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataClumpsReport {
    pub report_version: String,
    pub detector: DetectorInfo,
    pub config: DetectorConfig,
    pub project: ProjectInfo,
    pub summary: Summary,
    pub data_clumps: BTreeMap<String, DataClumpOccurrence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl DataClumpsReport {
    /// Builds a report keyed by occurrence key, with a matching summary.
    pub fn new(
        config: DetectorConfig,
        project: ProjectInfo,
        occurrences: impl IntoIterator<Item = DataClumpOccurrence>,
    ) -> Self {
        let data_clumps: BTreeMap<String, DataClumpOccurrence> = occurrences
            .into_iter()
            .map(|o| (o.key.clone(), o))
            .collect();
        Self {
            report_version: REPORT_VERSION.into(),
            detector: DetectorInfo::default(),
            config,
            project,
            summary: Summary::of(data_clumps.values()),
            data_clumps,
            timestamp: None,
        }
    }

    pub fn with_timestamp(mut self, timestamp: impl Into<String>) -> Self {
        self.timestamp = Some(timestamp.into());
        self
    }

    /// Checks every report invariant.
    pub fn validate(&self) -> Result<(), ReportError> {
        if self.report_version != REPORT_VERSION {
            return Err(ReportError::UnsupportedVersion {
                found: self.report_version.clone(),
            });
        }
        if self.config.min_clump_size < 2 {
            return Err(ReportError::MalformedDocument {
                path: "config.min_clump_size".into(),
                message: "must be at least 2".into(),
            });
        }
        let actual = Summary::of(self.data_clumps.values());
        if actual != self.summary {
            return Err(ReportError::SummaryMismatch {
                declared: self.summary,
                actual,
            });
        }
        for (key, o) in &self.data_clumps {
            if *key != o.key {
                return Err(ReportError::KeyMismatch {
                    map_key: key.clone(),
                    occurrence_key: o.key.clone(),
                });
            }
            check_occurrence(o, &self.config)?;
        }
        Ok(())
    }
}

fn check_occurrence(o: &DataClumpOccurrence, cfg: &DetectorConfig) -> Result<(), ReportError> {
    let fail = |message: String| {
        Err(ReportError::InvalidOccurrence {
            key: o.key.clone(),
            message,
        })
    };
    let computed = occurrence_key(o);
    if computed != o.key {
        return fail(format!(
            "key does not match its content (expected `{computed}`)"
        ));
    }
    if o.variables.len() < cfg.min_clump_size {
        return fail(format!(
            "{} variables, below min_clump_size {}",
            o.variables.len(),
            cfg.min_clump_size
        ));
    }
    if o.variables.iter().any(|v| v.name.is_empty()) {
        return fail("empty variable name".into());
    }
    if !o.variables.windows(2).all(|w| w[0].name < w[1].name) {
        return fail("variables not sorted by unique name".into());
    }
    let shape_ok = match o.kind {
        OccurrenceKind::FieldsToFields => !o.from.is_method() && !o.to.is_method(),
        OccurrenceKind::ParametersToParameters => o.from.is_method() && o.to.is_method(),
        OccurrenceKind::ParametersToFields => o.from.is_method() && !o.to.is_method(),
    };
    if !shape_ok {
        return fail(format!("endpoint kinds do not fit {}", o.kind));
    }
    if o.from.reference() == o.to.reference() {
        return fail("both endpoints are the same".into());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("malformed report at `{path}`: {message}")]
    MalformedDocument { path: String, message: String },
    #[error("unsupported report_version `{found}` (expected {REPORT_VERSION})")]
    UnsupportedVersion { found: String },
    #[error("summary {declared:?} disagrees with data_clumps {actual:?}")]
    SummaryMismatch { declared: Summary, actual: Summary },
    #[error("data_clumps entry `{map_key}` holds occurrence keyed `{occurrence_key}`")]
    KeyMismatch {
        map_key: String,
        occurrence_key: String,
    },
    #[error("invalid occurrence `{key}`: {message}")]
    InvalidOccurrence { key: String, message: String },
    #[error("cannot merge reports: {0}")]
    ConfigMismatch(String),
    #[error("conflicting occurrences under key `{0}`")]
    ConflictingOccurrence(String),
    #[error("no reports to merge")]
    NothingToMerge,
}

/// Renders a report as canonical document text.
pub fn write_report(report: &DataClumpsReport) -> String {
    json::to_canonical_string(report)
}

/// Parses and validates a report document; unknown keys become warnings.
pub fn parse_report(text: &str) -> Result<Parsed<DataClumpsReport>, ReportError> {
    let raw: Value = serde_json::from_str(text).map_err(|e| ReportError::MalformedDocument {
        path: "$".into(),
        message: e.to_string(),
    })?;
    if let Some(version) = raw.get("report_version").and_then(Value::as_str) {
        if version != REPORT_VERSION {
            return Err(ReportError::UnsupportedVersion {
                found: version.into(),
            });
        }
    }
    let report: DataClumpsReport = json::from_value_with_path(raw.clone())
        .map_err(|(path, message)| ReportError::MalformedDocument { path, message })?;
    report.validate()?;
    let known = serde_json::to_value(&report).expect("reports serialize");
    let warnings = json::unknown_keys(&raw, &known)
        .into_iter()
        .map(|path| format!("unknown key `{path}` ignored"))
        .collect();
    Ok(Parsed {
        value: report,
        warnings,
    })
}

/// Unions several reports, e.g. one per build module.
///
/// Inputs must agree on version, detector and configuration except for
/// scope; the merged scope is `project` if any input had it. Project names
/// are de-duplicated, sorted and joined with `+`; class and method counts
/// are summed over distinct project names.
pub fn merge_reports(reports: &[DataClumpsReport]) -> Result<DataClumpsReport, ReportError> {
    let first = reports.first().ok_or(ReportError::NothingToMerge)?;
    let scopeless = |r: &DataClumpsReport| DetectorConfig {
        scope: Scope::Project,
        ..r.config.clone()
    };
    for r in reports {
        if r.report_version != first.report_version {
            return Err(ReportError::ConfigMismatch("report versions differ".into()));
        }
        if r.detector != first.detector {
            return Err(ReportError::ConfigMismatch(
                "detector name or version differs".into(),
            ));
        }
        if scopeless(r) != scopeless(first) {
            return Err(ReportError::ConfigMismatch(format!(
                "detector configurations differ: {:?} vs {:?}",
                r.config, first.config
            )));
        }
    }
    for r in reports {
        r.validate()?;
    }

    let mut data_clumps: BTreeMap<String, DataClumpOccurrence> = BTreeMap::new();
    for o in reports.iter().flat_map(|r| r.data_clumps.values()) {
        match data_clumps.get(&o.key) {
            Some(existing) if existing != o => {
                return Err(ReportError::ConflictingOccurrence(o.key.clone()))
            }
            Some(_) => {}
            None => {
                data_clumps.insert(o.key.clone(), o.clone());
            }
        }
    }

    let mut projects: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in reports {
        let entry = projects.entry(r.project.name.as_str()).or_default();
        entry.0 = entry.0.max(r.project.number_of_classes);
        entry.1 = entry.1.max(r.project.number_of_methods);
    }
    let names: BTreeSet<&str> = projects.keys().flat_map(|n| n.split('+')).collect();
    let project = ProjectInfo {
        name: names.into_iter().collect::<Vec<_>>().join("+"),
        number_of_classes: projects.values().map(|c| c.0).sum(),
        number_of_methods: projects.values().map(|c| c.1).sum(),
    };

    let mut config = first.config.clone();
    config.scope = if reports.iter().any(|r| r.config.scope == Scope::Project) {
        Scope::Project
    } else {
        Scope::Module
    };

    Ok(DataClumpsReport {
        report_version: first.report_version.clone(),
        detector: first.detector.clone(),
        config,
        project,
        summary: Summary::of(data_clumps.values()),
        data_clumps,
        timestamp: reports.iter().filter_map(|r| r.timestamp.clone()).max(),
    })
}

/// Number of top classes listed by [`summarize`].
pub const TOP_CLASSES: usize = 10;

/// Occurrence participation per class, highest first, ties by name.
pub fn class_participation(report: &DataClumpsReport) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for o in report.data_clumps.values() {
        let from = o.from.class_qualified_name.as_str();
        let to = o.to.class_qualified_name.as_str();
        *counts.entry(from).or_default() += 1;
        if to != from {
            *counts.entry(to).or_default() += 1;
        }
    }
    let mut out: Vec<(String, usize)> = counts
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

/// Human-readable summary table.
pub fn summarize(report: &DataClumpsReport) -> String {
    let s = &report.summary;
    let mut out = String::new();
    out.push_str("data clumps\n");
    for (label, n) in [
        ("fields_to_fields", s.fields_to_fields),
        ("parameters_to_parameters", s.parameters_to_parameters),
        ("parameters_to_fields", s.parameters_to_fields),
        ("total", s.total),
    ] {
        let _ = writeln!(out, "  {label:<26}{n:>6}");
    }
    out.push_str("top classes\n");
    let top = class_participation(report);
    if top.is_empty() {
        out.push_str("  (none)\n");
    }
    for (class, n) in top.into_iter().take(TOP_CLASSES) {
        let _ = writeln!(out, "  {n:>6}  {class}");
    }
    out
}
