//! Built-in Java source adapter.
//!
//! Scans a project tree, parses declarations of the supported subset,
//! resolves type names through imports and the package's own types, assigns
//! build modules, marks auxiliary classes and flags overriding methods.
//!
//! Supported subset: package and import declarations, top-level types plus
//! one level of nesting (class, interface, enum), fields (including
//! multi-declarator fields), methods, constructors, modifiers and
//! extends/implements clauses. Method bodies and initializers are skipped;
//! annotations other than `@Override` are ignored.

mod hierarchy;
mod lexer;
mod parser;
mod scan;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ast::{normalize_type, AstBundle, ClassInfo, MethodInfo, VariableDecl, FORMAT_VERSION};
use crate::diagnostics::Diagnostic;

pub use hierarchy::{mark_aux, resolve_overrides};
pub use scan::{detect_modules, glob_match, scan_project, ScanError, BUILD_DESCRIPTORS};

/// A syntax error; lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl ParseError {
    pub fn new(line: u32, column: u32, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractorConfig {
    /// Patterns matched against project-relative paths (`**`, `*`, `?`).
    pub include_globs: Vec<String>,
    /// Patterns matched against directory names; matching subtrees are skipped.
    pub exclude_dirs: Vec<String>,
    /// Path prefixes whose classes are marked auxiliary.
    pub aux_roots: Vec<String>,
    pub follow_symlinks: bool,
    /// When off, every file belongs to the root module.
    pub module_detection: bool,
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        Self {
            include_globs: vec!["**/*.java".into()],
            exclude_dirs: vec![".*".into(), "build".into(), "out".into(), "target".into()],
            aux_roots: Vec::new(),
            follow_symlinks: false,
            module_detection: true,
        }
    }
}

/// Directory → module id. The root directory is `""`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleMap {
    pub entries: BTreeMap<String, String>,
}

impl Default for ModuleMap {
    fn default() -> Self {
        Self {
            entries: BTreeMap::from([(String::new(), String::new())]),
        }
    }
}

impl ModuleMap {
    /// Module of the deepest entry whose directory contains `file_path`.
    pub fn module_for(&self, file_path: &str) -> &str {
        self.entries
            .iter()
            .filter(|(dir, _)| {
                dir.is_empty()
                    || (file_path.starts_with(dir.as_str())
                        && file_path[dir.len()..].starts_with('/'))
            })
            .max_by_key(|(dir, _)| dir.len())
            .map(|(_, id)| id.as_str())
            .unwrap_or("")
    }
}

/// Classes and warnings extracted from a single file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileExtraction {
    pub classes: Vec<ClassInfo>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Parses one source file.
///
/// Type names resolve through the file's imports and the types the file
/// itself declares; use [`extract_project`] to resolve against every type of
/// the package.
pub fn extract_class_infos(
    source: &str,
    file_path: &str,
    module_map: &ModuleMap,
) -> Result<Vec<ClassInfo>, ParseError> {
    extract_file(source, file_path, module_map).map(|f| f.classes)
}

pub fn extract_file(
    source: &str,
    file_path: &str,
    module_map: &ModuleMap,
) -> Result<FileExtraction, ParseError> {
    let raw = parse_source(source)?;
    let own: BTreeSet<String> = raw
        .types
        .iter()
        .filter(|t| t.outer.is_none())
        .map(|t| t.simple_name.clone())
        .collect();
    lower(&raw, file_path, module_map.module_for(file_path), &own)
}

fn parse_source(source: &str) -> Result<parser::RawFile, ParseError> {
    let tokens = lexer::tokenize(source)?;
    parser::parse(&tokens)
}

fn lower(
    raw: &parser::RawFile,
    file_path: &str,
    module: &str,
    same_package_names: &BTreeSet<String>,
) -> Result<FileExtraction, ParseError> {
    let mut imports = raw.imports.clone();
    for ty in raw.types.iter().filter(|t| t.outer.is_some()) {
        let outer = ty.outer.as_deref().unwrap_or_default();
        let canonical = ClassInfo::expected_qualified_name(
            &raw.package,
            &format!("{outer}.{}", ty.simple_name),
        );
        imports.insert(ty.simple_name.clone(), canonical);
    }
    let resolve = |r: &parser::RawTypeRef| {
        normalize_type(&r.text, &imports, same_package_names, &raw.package)
            .map_err(|e| ParseError::new(r.span.start_line, r.span.start_column, e.to_string()))
    };
    let lower_var = |v: &parser::RawVar| -> Result<VariableDecl, ParseError> {
        Ok(VariableDecl {
            name: v.name.clone(),
            ty: resolve(&v.ty)?,
            modifiers: v.modifiers.clone(),
            position: v.span,
        })
    };

    let mut classes = Vec::with_capacity(raw.types.len());
    for ty in &raw.types {
        let mut fields = Vec::with_capacity(ty.fields.len());
        let mut field_names = HashSet::new();
        for f in &ty.fields {
            if !field_names.insert(f.name.as_str()) {
                return Err(ParseError::new(
                    f.span.start_line,
                    f.span.start_column,
                    format!("duplicate field `{}` in `{}`", f.name, ty.binary_name),
                ));
            }
            fields.push(lower_var(f)?);
        }

        let mut methods = Vec::with_capacity(ty.methods.len());
        let mut signatures = HashSet::new();
        for m in &ty.methods {
            let mut parameters = Vec::with_capacity(m.params.len());
            let mut names = HashSet::new();
            for p in &m.params {
                if !names.insert(p.name.as_str()) {
                    return Err(ParseError::new(
                        p.span.start_line,
                        p.span.start_column,
                        format!("duplicate parameter `{}`", p.name),
                    ));
                }
                parameters.push(lower_var(p)?);
            }
            let signature = MethodInfo::signature_of(&m.name, &parameters);
            if !signatures.insert(signature.clone()) {
                return Err(ParseError::new(
                    m.span.start_line,
                    m.span.start_column,
                    format!("duplicate method `{signature}` in `{}`", ty.binary_name),
                ));
            }
            methods.push(MethodInfo {
                name: m.name.clone(),
                signature,
                return_type: m
                    .return_type
                    .as_ref()
                    .map(resolve)
                    .transpose()?
                    .unwrap_or_default(),
                modifiers: m.modifiers.clone(),
                is_constructor: m.is_constructor,
                is_override: m.override_marker,
                parameters,
                position: m.span,
            });
        }

        let mut class = ClassInfo {
            format_version: FORMAT_VERSION.into(),
            name: ty.binary_name.clone(),
            qualified_name: ClassInfo::expected_qualified_name(&raw.package, &ty.binary_name),
            kind: ty.kind,
            file_path: file_path.to_string(),
            module: module.to_string(),
            is_aux: false,
            package: raw.package.clone(),
            extends: ty.extends.iter().map(resolve).collect::<Result<_, _>>()?,
            implements: ty
                .implements
                .iter()
                .map(resolve)
                .collect::<Result<_, _>>()?,
            fields,
            methods,
            position: ty.span,
        };
        class.canonicalize();
        classes.push(class);
    }

    let diagnostics = raw
        .warnings
        .iter()
        .map(|(line, msg)| Diagnostic::warn(file_path, Some(*line as usize), msg.clone()))
        .collect();
    Ok(FileExtraction {
        classes,
        diagnostics,
    })
}

/// Result of extracting a whole project.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectExtraction {
    pub bundle: AstBundle,
    pub modules: ModuleMap,
    pub files_scanned: usize,
    /// Files skipped because of parse or read errors.
    pub files_failed: usize,
    /// Sorted by file, line, level and message.
    pub diagnostics: Vec<Diagnostic>,
}

impl ProjectExtraction {
    pub fn has_errors(&self) -> bool {
        self.files_failed > 0
    }
}

/// Runs scan → parse → module assignment → aux marking → override
/// resolution over a project tree.
///
/// Files that fail to parse are skipped and reported as error diagnostics.
/// Per-file work runs on the current rayon pool; the result does not depend
/// on its size.
pub fn extract_project(root: &Path, cfg: &ExtractorConfig) -> Result<ProjectExtraction, ScanError> {
    let files = scan_project(root, cfg)?;
    let modules = if cfg.module_detection {
        detect_modules(root)?
    } else {
        ModuleMap::default()
    };
    let sources: Vec<(String, Result<String, Diagnostic>)> = files
        .par_iter()
        .map(|rel| {
            let text = std::fs::read(root.join(rel))
                .map_err(|e| {
                    Diagnostic::error(rel.as_str(), None, format!("cannot read file: {e}"))
                })
                .and_then(|bytes| {
                    String::from_utf8(bytes).map_err(|_| {
                        Diagnostic::error(rel.as_str(), None, "file is not valid UTF-8")
                    })
                });
            (rel.clone(), text)
        })
        .collect();
    Ok(assemble(
        project_name(root),
        root.to_string_lossy().into_owned(),
        sources,
        modules,
        &cfg.aux_roots,
    ))
}

/// Same as [`extract_project`] for in-memory `(path, source)` pairs.
pub fn extract_sources(
    project_name: &str,
    sources: &[(String, String)],
    modules: &ModuleMap,
    aux_roots: &[String],
) -> ProjectExtraction {
    let mut sources: Vec<(String, Result<String, Diagnostic>)> = sources
        .iter()
        .map(|(p, s)| (p.clone(), Ok(s.clone())))
        .collect();
    sources.sort_by(|a, b| a.0.cmp(&b.0));
    assemble(
        project_name.to_string(),
        ".".to_string(),
        sources,
        modules.clone(),
        aux_roots,
    )
}

fn assemble(
    project_name: String,
    source_root: String,
    sources: Vec<(String, Result<String, Diagnostic>)>,
    modules: ModuleMap,
    aux_roots: &[String],
) -> ProjectExtraction {
    let files_scanned = sources.len();
    let as_diagnostic = |rel: &str, e: ParseError| {
        Diagnostic::error(
            rel,
            Some(e.line as usize),
            format!("column {}: {}", e.column, e.message),
        )
    };

    let parsed: Vec<(String, Result<parser::RawFile, Diagnostic>)> = sources
        .into_par_iter()
        .map(|(rel, text)| {
            let raw = text.and_then(|t| parse_source(&t).map_err(|e| as_diagnostic(&rel, e)));
            (rel, raw)
        })
        .collect();

    let mut package_names: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for raw in parsed.iter().filter_map(|(_, r)| r.as_ref().ok()) {
        package_names
            .entry(raw.package.as_str())
            .or_default()
            .extend(
                raw.types
                    .iter()
                    .filter(|t| t.outer.is_none())
                    .map(|t| t.simple_name.clone()),
            );
    }

    let empty = BTreeSet::new();
    let lowered: Vec<(&str, Result<FileExtraction, Diagnostic>)> = parsed
        .par_iter()
        .map(|(rel, result)| {
            let out = match result {
                Ok(raw) => {
                    let names = package_names.get(raw.package.as_str()).unwrap_or(&empty);
                    lower(raw, rel, modules.module_for(rel), names)
                        .map_err(|e| as_diagnostic(rel, e))
                }
                Err(d) => Err(d.clone()),
            };
            (rel.as_str(), out)
        })
        .collect();

    let mut diagnostics = Vec::new();
    let mut classes: Vec<ClassInfo> = Vec::new();
    let mut owners: BTreeMap<String, &str> = BTreeMap::new();
    let mut files_failed = 0;
    // `lowered` is in path order, so the first declaration of a name wins.
    for (rel, result) in lowered {
        match result {
            Ok(file) => {
                diagnostics.extend(file.diagnostics);
                if let Some(dup) = file
                    .classes
                    .iter()
                    .find(|c| owners.contains_key(&c.qualified_name))
                {
                    files_failed += 1;
                    diagnostics.push(Diagnostic::error(
                        rel,
                        Some(dup.position.start_line as usize),
                        format!(
                            "duplicate qualified_name `{}` (already declared in {})",
                            dup.qualified_name, owners[&dup.qualified_name]
                        ),
                    ));
                    continue;
                }
                for class in file.classes {
                    owners.insert(class.qualified_name.clone(), rel);
                    classes.push(class);
                }
            }
            Err(d) => {
                files_failed += 1;
                diagnostics.push(d);
            }
        }
    }
    diagnostics.sort();

    let bundle = AstBundle::new(project_name, source_root, classes);
    let bundle = resolve_overrides(&mark_aux(&bundle, aux_roots));
    ProjectExtraction {
        bundle,
        modules,
        files_scanned,
        files_failed,
        diagnostics,
    }
}

fn project_name(root: &Path) -> String {
    let name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned());
    name(root)
        .or_else(|| root.canonicalize().ok().and_then(|p| name(&p)))
        .unwrap_or_default()
}

impl fmt::Display for ModuleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<&str> = self
            .entries
            .values()
            .map(|id| if id.is_empty() { "<root>" } else { id.as_str() })
            .collect();
        f.write_str(&ids.join(", "))
    }
}
