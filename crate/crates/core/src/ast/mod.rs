//! Language-neutral, declaration-level AST documents.
//!
//! One [`ClassInfo`] document is produced per class, interface or enum. The
//! detector never looks at source text, only at these documents, so any
//! language adapter that emits them can feed the rest of the pipeline.

mod types;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::json::{self, Parsed};

pub(crate) use types::{is_ident_part, is_ident_start};
pub use types::{normalize_type, to_source_type, TypeError};

/// Version tag written into every class document.
pub const FORMAT_VERSION: &str = "1.0";

/// A source span; lines and columns are 1-based and the end is inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub start_line: u32,
    pub start_column: u32,
    pub end_line: u32,
    pub end_column: u32,
}

impl Position {
    pub fn new(start_line: u32, start_column: u32, end_line: u32, end_column: u32) -> Self {
        Self {
            start_line,
            start_column,
            end_line,
            end_column,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.start_line >= 1
            && self.start_column >= 1
            && self.end_line >= self.start_line
            && (self.end_line > self.start_line || self.end_column >= self.start_column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariableDecl {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub modifiers: Vec<String>,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MethodInfo {
    pub name: String,
    pub signature: String,
    pub return_type: String,
    pub modifiers: Vec<String>,
    pub is_constructor: bool,
    pub is_override: bool,
    pub parameters: Vec<VariableDecl>,
    pub position: Position,
}

impl MethodInfo {
    /// Canonical `name(type1,type2,...)` text for a method.
    pub fn signature_of(name: &str, parameters: &[VariableDecl]) -> String {
        let types: Vec<&str> = parameters.iter().map(|p| p.ty.as_str()).collect();
        format!("{}({})", name, types.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Class,
    Interface,
    Enum,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassInfo {
    pub format_version: String,
    pub name: String,
    pub qualified_name: String,
    pub kind: ClassKind,
    pub file_path: String,
    pub module: String,
    pub is_aux: bool,
    pub package: String,
    pub extends: Vec<String>,
    pub implements: Vec<String>,
    pub fields: Vec<VariableDecl>,
    pub methods: Vec<MethodInfo>,
    pub position: Position,
}

impl ClassInfo {
    /// Puts member lists into canonical document order.
    pub fn canonicalize(&mut self) {
        self.fields.sort_by(|a, b| a.name.cmp(&b.name));
        self.methods.sort_by(|a, b| a.signature.cmp(&b.signature));
    }

    pub fn canonicalized(mut self) -> Self {
        self.canonicalize();
        self
    }

    pub fn expected_qualified_name(package: &str, name: &str) -> String {
        if package.is_empty() {
            name.to_string()
        } else {
            format!("{package}.{name}")
        }
    }
}

/// The full set of class documents from one extraction run.
///
/// Classes are kept as a list so that duplicate qualified names stay
/// representable and can be reported by [`validate_bundle`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AstBundle {
    pub project_name: String,
    pub source_root: String,
    pub classes: Vec<ClassInfo>,
}

impl AstBundle {
    pub fn new(
        project_name: impl Into<String>,
        source_root: impl Into<String>,
        mut classes: Vec<ClassInfo>,
    ) -> Self {
        classes.sort_by(|a, b| a.qualified_name.cmp(&b.qualified_name));
        Self {
            project_name: project_name.into(),
            source_root: source_root.into(),
            classes,
        }
    }

    pub fn get(&self, qualified_name: &str) -> Option<&ClassInfo> {
        self.classes
            .iter()
            .find(|c| c.qualified_name == qualified_name)
    }

    pub fn by_name(&self) -> BTreeMap<&str, &ClassInfo> {
        self.classes
            .iter()
            .map(|c| (c.qualified_name.as_str(), c))
            .collect()
    }

    pub fn number_of_methods(&self) -> usize {
        self.classes.iter().map(|c| c.methods.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AstError {
    #[error("malformed document at `{path}`: {message}")]
    MalformedDocument { path: String, message: String },
    #[error("unsupported format_version `{found}` (expected {FORMAT_VERSION})")]
    UnsupportedVersion { found: String },
    #[error("invariant violated at `{path}`: {message}")]
    InvariantViolation { path: String, message: String },
}

/// Renders a class as its canonical document text.
pub fn serialize_class(class: &ClassInfo) -> String {
    json::to_canonical_string(&class.clone().canonicalized())
}

/// Parses and validates one class document.
///
/// Member lists are returned in canonical order regardless of the order in
/// the document. Unknown keys are reported as warnings.
pub fn parse_class_document(text: &str) -> Result<Parsed<ClassInfo>, AstError> {
    let raw: Value = serde_json::from_str(text).map_err(|e| AstError::MalformedDocument {
        path: "$".into(),
        message: e.to_string(),
    })?;
    if let Some(version) = raw.get("format_version").and_then(Value::as_str) {
        if version != FORMAT_VERSION {
            return Err(AstError::UnsupportedVersion {
                found: version.to_string(),
            });
        }
    }
    let class: ClassInfo = json::from_value_with_path(raw.clone())
        .map_err(|(path, message)| AstError::MalformedDocument { path, message })?;
    let known = serde_json::to_value(&class).expect("ClassInfo serializes");
    let warnings = json::unknown_keys(&raw, &known)
        .into_iter()
        .map(|path| format!("unknown key `{path}` ignored"))
        .collect();

    if let Some((path, message)) = member_violations(&class).into_iter().next() {
        return Err(AstError::InvariantViolation { path, message });
    }
    Ok(Parsed {
        value: class.canonicalized(),
        warnings,
    })
}

/// One failed invariant inside a bundle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub class: String,
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.class, self.path, self.message)
    }
}

/// Checks every bundle and class invariant; an empty result means valid.
pub fn validate_bundle(bundle: &AstBundle) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for class in &bundle.classes {
        let qn = class.qualified_name.clone();
        if !seen.insert(class.qualified_name.as_str()) {
            out.push(Violation {
                class: qn.clone(),
                path: "qualified_name".into(),
                message: "duplicate qualified_name".into(),
            });
        }
        if class.format_version != FORMAT_VERSION {
            out.push(Violation {
                class: qn.clone(),
                path: "format_version".into(),
                message: format!("unsupported format_version `{}`", class.format_version),
            });
        }
        for (path, message) in member_violations(class) {
            out.push(Violation {
                class: qn.clone(),
                path,
                message,
            });
        }
        if !class.fields.windows(2).all(|w| w[0].name <= w[1].name) {
            out.push(Violation {
                class: qn.clone(),
                path: "fields".into(),
                message: "fields not sorted by name".into(),
            });
        }
        if !class
            .methods
            .windows(2)
            .all(|w| w[0].signature <= w[1].signature)
        {
            out.push(Violation {
                class: qn,
                path: "methods".into(),
                message: "methods not sorted by signature".into(),
            });
        }
    }
    out.sort();
    out
}

/// Invariants that do not depend on list order, in document order.
fn member_violations(class: &ClassInfo) -> Vec<(String, String)> {
    let mut out = Vec::new();
    if class.name.is_empty() {
        out.push(("name".into(), "name must not be empty".into()));
    }
    let expected = ClassInfo::expected_qualified_name(&class.package, &class.name);
    if class.qualified_name != expected {
        out.push((
            "qualified_name".into(),
            format!("expected `{expected}`, found `{}`", class.qualified_name),
        ));
    }
    if !class.position.is_valid() {
        out.push(("position".into(), "invalid position".into()));
    }
    check_variables(&class.fields, "fields", &mut out);

    let mut signatures = HashSet::new();
    for (i, method) in class.methods.iter().enumerate() {
        let base = format!("methods[{i}]");
        if method.name.is_empty() {
            out.push((format!("{base}.name"), "name must not be empty".into()));
        }
        let expected = MethodInfo::signature_of(&method.name, &method.parameters);
        if method.signature != expected {
            out.push((
                format!("{base}.signature"),
                format!("expected `{expected}`, found `{}`", method.signature),
            ));
        } else if !signatures.insert(method.signature.as_str()) {
            out.push((
                format!("{base}.signature"),
                "duplicate method signature".into(),
            ));
        }
        if !method.position.is_valid() {
            out.push((format!("{base}.position"), "invalid position".into()));
        }
        check_variables(&method.parameters, &format!("{base}.parameters"), &mut out);
    }
    out
}

fn check_variables(vars: &[VariableDecl], base: &str, out: &mut Vec<(String, String)>) {
    let mut names = HashSet::new();
    for (i, var) in vars.iter().enumerate() {
        if var.name.is_empty() {
            out.push((format!("{base}[{i}].name"), "name must not be empty".into()));
        } else if !names.insert(var.name.as_str()) {
            out.push((
                format!("{base}[{i}].name"),
                format!("duplicate name `{}`", var.name),
            ));
        }
        if !var.position.is_valid() {
            out.push((format!("{base}[{i}].position"), "invalid position".into()));
        }
    }
}
