//! Data clump detection over an [`AstBundle`].
//!
//! Three comparisons are made: field lists of two classes, parameter lists
//! of two methods, and a method's parameters against another class's
//! fields. A pair forms a clump when at least `min_clump_size` variables
//! match by name (and by normalized type unless disabled).

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{
    validate_bundle, AstBundle, ClassInfo, MethodInfo, Position, VariableDecl, Violation,
};
use crate::report::{DataClumpsReport, ProjectInfo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Project,
    Module,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub min_clump_size: usize,
    pub match_types: bool,
    pub scope: Scope,
    pub include_aux_counterpart: bool,
    pub include_own_class_param_field: bool,
    pub include_overrides: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            min_clump_size: 3,
            match_types: true,
            scope: Scope::Project,
            include_aux_counterpart: false,
            include_own_class_param_field: false,
            include_overrides: false,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), DetectError> {
        if self.min_clump_size < 2 {
            return Err(DetectError::InvalidConfig(format!(
                "min_clump_size must be at least 2, got {}",
                self.min_clump_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccurrenceKind {
    FieldsToFields,
    ParametersToParameters,
    ParametersToFields,
}

impl OccurrenceKind {
    pub const ALL: [OccurrenceKind; 3] = [
        OccurrenceKind::FieldsToFields,
        OccurrenceKind::ParametersToParameters,
        OccurrenceKind::ParametersToFields,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OccurrenceKind::FieldsToFields => "fields_to_fields",
            OccurrenceKind::ParametersToParameters => "parameters_to_parameters",
            OccurrenceKind::ParametersToFields => "parameters_to_fields",
        }
    }
}

impl fmt::Display for OccurrenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One side of an occurrence: a class (field clumps) or a method.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Endpoint {
    pub class_qualified_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method_signature: Option<String>,
    pub file_path: String,
    pub module: String,
    pub position: Position,
}

impl Endpoint {
    pub fn for_class(class: &ClassInfo) -> Self {
        Self {
            class_qualified_name: class.qualified_name.clone(),
            method_signature: None,
            file_path: class.file_path.clone(),
            module: class.module.clone(),
            position: class.position,
        }
    }

    pub fn for_method(class: &ClassInfo, method: &MethodInfo) -> Self {
        Self {
            class_qualified_name: class.qualified_name.clone(),
            method_signature: Some(method.signature.clone()),
            file_path: class.file_path.clone(),
            module: class.module.clone(),
            position: method.position,
        }
    }

    /// `Class` or `Class#signature`.
    pub fn reference(&self) -> String {
        match &self.method_signature {
            Some(sig) => format!("{}#{}", self.class_qualified_name, sig),
            None => self.class_qualified_name.clone(),
        }
    }

    pub fn is_method(&self) -> bool {
        self.method_signature.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchedVariable {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub from_position: Position,
    pub to_position: Position,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DataClumpOccurrence {
    pub key: String,
    pub kind: OccurrenceKind,
    pub from: Endpoint,
    pub to: Endpoint,
    pub variables: Vec<MatchedVariable>,
}

/// Stable identity of an occurrence:
/// `kind|fromRef|toRef|name1:type1,name2:type2,...` with variables sorted by
/// name.
pub fn occurrence_key(o: &DataClumpOccurrence) -> String {
    key_of(o.kind, &o.from, &o.to, &o.variables)
}

fn key_of(
    kind: OccurrenceKind,
    from: &Endpoint,
    to: &Endpoint,
    variables: &[MatchedVariable],
) -> String {
    let mut vars: Vec<(&str, &str)> = variables
        .iter()
        .map(|v| (v.name.as_str(), v.ty.as_str()))
        .collect();
    vars.sort();
    let vars: Vec<String> = vars.iter().map(|(n, t)| format!("{n}:{t}")).collect();
    format!(
        "{}|{}|{}|{}",
        kind,
        from.reference(),
        to.reference(),
        vars.join(",")
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetectError {
    #[error("invalid bundle: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidBundle(Vec<Violation>),
    #[error("invalid detector config: {0}")]
    InvalidConfig(String),
}

/// Matches two variable lists by name, and by type when `cfg.match_types`.
///
/// The type recorded for each match is the one from `a`.
pub fn match_variables(
    a: &[VariableDecl],
    b: &[VariableDecl],
    cfg: &DetectorConfig,
) -> Vec<MatchedVariable> {
    let mut out: Vec<MatchedVariable> = a
        .iter()
        .filter_map(|v| {
            let w = b.iter().find(|w| w.name == v.name)?;
            (!cfg.match_types || v.ty == w.ty).then(|| MatchedVariable {
                name: v.name.clone(),
                ty: v.ty.clone(),
                from_position: v.position,
                to_position: w.position,
            })
        })
        .collect();
    out.sort_by(|x, y| x.name.cmp(&y.name));
    out
}

/// An endpoint offered for comparison together with its variables.
#[derive(Debug, Clone)]
pub struct Candidate<'a> {
    pub endpoint: Endpoint,
    pub variables: &'a [VariableDecl],
    pub is_aux: bool,
}

impl<'a> Candidate<'a> {
    pub fn class(class: &'a ClassInfo) -> Self {
        Self {
            endpoint: Endpoint::for_class(class),
            variables: &class.fields,
            is_aux: class.is_aux,
        }
    }

    pub fn method(class: &'a ClassInfo, method: &'a MethodInfo) -> Self {
        Self {
            endpoint: Endpoint::for_method(class, method),
            variables: &method.parameters,
            is_aux: class.is_aux,
        }
    }
}

/// Compares one pair of endpoints.
///
/// Endpoints are put in canonical order first: for `parameters_to_fields`
/// the method is always `from`; otherwise a non-aux endpoint precedes an
/// aux one and ties are broken by reference. Supplying the pair in either
/// order gives the same occurrence.
pub fn detect_pairwise(
    kind: OccurrenceKind,
    left: &Candidate<'_>,
    right: &Candidate<'_>,
    cfg: &DetectorConfig,
) -> Option<DataClumpOccurrence> {
    let swap = match kind {
        OccurrenceKind::ParametersToFields => {
            !left.endpoint.is_method() && right.endpoint.is_method()
        }
        _ => (left.is_aux, left.endpoint.reference()) > (right.is_aux, right.endpoint.reference()),
    };
    let (from, to) = if swap { (right, left) } else { (left, right) };
    let variables = match_variables(from.variables, to.variables, cfg);
    if variables.len() < cfg.min_clump_size {
        return None;
    }
    Some(DataClumpOccurrence {
        key: key_of(kind, &from.endpoint, &to.endpoint, &variables),
        kind,
        from: from.endpoint.clone(),
        to: to.endpoint.clone(),
        variables,
    })
}

/// Finds every data clump in `bundle`.
///
/// Pair comparisons are spread over the current rayon pool; occurrences are
/// merged into a key-sorted map, so the report does not depend on the pool
/// size.
pub fn detect(bundle: &AstBundle, cfg: &DetectorConfig) -> Result<DataClumpsReport, DetectError> {
    cfg.validate()?;
    let violations = validate_bundle(bundle);
    if !violations.is_empty() {
        return Err(DetectError::InvalidBundle(violations));
    }

    let admit = |c: &ClassInfo| !c.is_aux || cfg.include_aux_counterpart;
    let classes: Vec<Candidate> = bundle
        .classes
        .iter()
        .filter(|c| admit(c))
        .map(Candidate::class)
        .filter(|c| c.variables.len() >= cfg.min_clump_size)
        .collect();
    let methods: Vec<Candidate> = bundle
        .classes
        .iter()
        .filter(|c| admit(c))
        .flat_map(|c| {
            c.methods
                .iter()
                .filter(|m| !m.is_override || cfg.include_overrides)
                .map(move |m| Candidate::method(c, m))
        })
        .filter(|c| c.variables.len() >= cfg.min_clump_size)
        .collect();

    let allowed = |a: &Candidate, b: &Candidate| {
        !(a.is_aux && b.is_aux)
            && (cfg.scope == Scope::Project || a.endpoint.module == b.endpoint.module)
    };

    let same_kind_pairs =
        |list: &Vec<Candidate>, kind: OccurrenceKind| -> Vec<DataClumpOccurrence> {
            (0..list.len())
                .into_par_iter()
                .flat_map_iter(|i| {
                    let a = &list[i];
                    list[i + 1..]
                        .iter()
                        .filter(move |b| allowed(a, b))
                        .filter_map(move |b| detect_pairwise(kind, a, b, cfg))
                })
                .collect()
        };

    let mut found = same_kind_pairs(&classes, OccurrenceKind::FieldsToFields);
    found.extend(same_kind_pairs(
        &methods,
        OccurrenceKind::ParametersToParameters,
    ));
    let cross: Vec<DataClumpOccurrence> = methods
        .par_iter()
        .filter(|m| !m.is_aux)
        .flat_map_iter(|m| {
            classes
                .iter()
                .filter(move |c| allowed(m, c))
                .filter(move |c| {
                    cfg.include_own_class_param_field
                        || c.endpoint.class_qualified_name != m.endpoint.class_qualified_name
                })
                .filter_map(move |c| detect_pairwise(OccurrenceKind::ParametersToFields, m, c, cfg))
        })
        .collect();
    found.extend(cross);

    let occurrences: BTreeMap<String, DataClumpOccurrence> =
        found.into_iter().map(|o| (o.key.clone(), o)).collect();
    let project = ProjectInfo {
        name: bundle.project_name.clone(),
        number_of_classes: bundle.classes.len(),
        number_of_methods: bundle.number_of_methods(),
    };
    Ok(DataClumpsReport::new(
        cfg.clone(),
        project,
        occurrences.into_values(),
    ))
}
