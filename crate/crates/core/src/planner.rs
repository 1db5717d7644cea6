//! Extract-class plans: groups occurrences that share an endpoint and a
//! variable set, names the new class and renders a compilable stub.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ast::to_source_type;
use crate::detector::DataClumpOccurrence;
use crate::json::{self, Parsed};
use crate::report::{parse_report, write_report, DataClumpsReport, ReportError};

pub const PLAN_VERSION: &str = "1.0";
pub const MAX_NAME_LEN: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupVariable {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefactorGroup {
    pub group_id: String,
    pub variable_set: Vec<GroupVariable>,
    pub occurrence_keys: Vec<String>,
    pub affected_endpoints: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteAction {
    ReplaceFields,
    ReplaceParameters,
}

impl SiteAction {
    pub fn for_endpoint(reference: &str) -> Self {
        if reference.contains('#') {
            SiteAction::ReplaceParameters
        } else {
            SiteAction::ReplaceFields
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Site {
    pub endpoint: String,
    pub action: SiteAction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedGroup {
    pub group: RefactorGroup,
    pub new_class_name: String,
    pub new_class_package: String,
    pub class_stub: String,
    pub sites: Vec<Site>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefactorPlan {
    pub plan_version: String,
    pub source_report_fingerprint: String,
    pub groups: Vec<PlannedGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("empty group")]
    EmptyGroup,
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid class name `{0}`")]
    InvalidName(String),
    #[error("invalid report: {0}")]
    InvalidReport(#[from] ReportError),
    #[error("malformed plan document at `{path}`: {message}")]
    MalformedDocument { path: String, message: String },
    #[error("unsupported plan_version `{0}`")]
    UnsupportedVersion(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("fingerprint mismatch: plan has {plan}, report hashes to {report}")]
    FingerprintMismatch { plan: String, report: String },
}

/// `[A-Za-z][A-Za-z0-9]*`
pub fn is_valid_class_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

pub fn fingerprint(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

fn variable_set(o: &DataClumpOccurrence) -> Vec<GroupVariable> {
    let mut set: Vec<GroupVariable> = o
        .variables
        .iter()
        .map(|v| GroupVariable {
            name: v.name.clone(),
            ty: v.ty.clone(),
        })
        .collect();
    set.sort();
    set
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Partitions the report's occurrences into refactoring groups, ordered by
/// group id.
pub fn group_occurrences(report: &DataClumpsReport) -> Vec<RefactorGroup> {
    let occurrences: Vec<&DataClumpOccurrence> = report.data_clumps.values().collect();
    let sets: Vec<Vec<GroupVariable>> = occurrences.iter().map(|o| variable_set(o)).collect();
    let mut parent: Vec<usize> = (0..occurrences.len()).collect();
    let mut first_seen: BTreeMap<(&[GroupVariable], String), usize> = BTreeMap::new();
    for (i, o) in occurrences.iter().enumerate() {
        for r in [o.from.reference(), o.to.reference()] {
            match first_seen.get(&(sets[i].as_slice(), r.clone())) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
                None => {
                    first_seen.insert((sets[i].as_slice(), r), i);
                }
            }
        }
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..occurrences.len() {
        let root = find(&mut parent, i);
        members.entry(root).or_default().push(i);
    }
    let mut groups: Vec<RefactorGroup> = members
        .into_values()
        .map(|idx| {
            let keys: BTreeSet<String> = idx.iter().map(|&i| occurrences[i].key.clone()).collect();
            let endpoints: BTreeSet<String> = idx
                .iter()
                .flat_map(|&i| {
                    [
                        occurrences[i].from.reference(),
                        occurrences[i].to.reference(),
                    ]
                })
                .collect();
            let keys: Vec<String> = keys.into_iter().collect();
            RefactorGroup {
                group_id: keys[0].clone(),
                variable_set: sets[idx[0]].clone(),
                occurrence_keys: keys,
                affected_endpoints: endpoints.into_iter().collect(),
            }
        })
        .collect();
    groups.sort_by(|a, b| a.group_id.cmp(&b.group_id));
    groups
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_ascii_uppercase().to_string() + c.as_str(),
        None => String::new(),
    }
}

/// Default class name for a group: sorted variable names, capitalized and
/// concatenated, with a `Data` suffix.
pub fn suggest_name(group: &RefactorGroup) -> Result<String, PlanError> {
    if group.variable_set.is_empty() {
        return Err(PlanError::EmptyGroup);
    }
    let mut names: Vec<String> = group
        .variable_set
        .iter()
        .map(|v| {
            v.name
                .chars()
                .filter(char::is_ascii_alphanumeric)
                .collect::<String>()
        })
        .collect();
    names.sort();
    let mut out: String = names.iter().map(|n| capitalize(n)).collect();
    if !out.starts_with(|c: char| c.is_ascii_alphabetic()) {
        out.insert(0, 'V');
    }
    out.push_str("Data");
    out.truncate(MAX_NAME_LEN);
    Ok(out)
}

fn getter_names(vars: &[GroupVariable]) -> Vec<String> {
    let mut used = BTreeSet::new();
    vars.iter()
        .map(|v| {
            let mut name = format!("get{}", capitalize(&v.name));
            if !used.insert(name.clone()) {
                name = format!("get_{}", v.name);
                used.insert(name.clone());
            }
            name
        })
        .collect()
}

/// Renders the extracted class as Java source: fields, an all-args
/// constructor and one getter per field, all in sorted variable order.
pub fn render_extracted_class(
    vars: &[GroupVariable],
    name: &str,
    package: &str,
) -> Result<String, PlanError> {
    if !is_valid_class_name(name) {
        return Err(PlanError::InvalidName(name.to_string()));
    }
    if vars.is_empty() {
        return Err(PlanError::EmptyGroup);
    }
    let mut vars = vars.to_vec();
    vars.sort();
    let typed: Vec<(String, &str)> = vars
        .iter()
        .map(|v| (to_source_type(&v.ty), v.name.as_str()))
        .collect();

    let mut out = String::new();
    if !package.is_empty() {
        let _ = writeln!(out, "package {package};\n");
    }
    let _ = writeln!(out, "public class {name} {{");
    for (ty, n) in &typed {
        let _ = writeln!(out, "    private {ty} {n};");
    }
    let params: Vec<String> = typed.iter().map(|(ty, n)| format!("{ty} {n}")).collect();
    let _ = writeln!(out, "\n    public {name}({}) {{", params.join(", "));
    for (_, n) in &typed {
        let _ = writeln!(out, "        this.{n} = {n};");
    }
    out.push_str("    }\n");
    for ((ty, n), getter) in typed.iter().zip(getter_names(&vars)) {
        let _ = writeln!(
            out,
            "\n    public {ty} {getter}() {{\n        return {n};\n    }}"
        );
    }
    out.push_str("}\n");
    Ok(out)
}

fn package_of_ref(reference: &str) -> &str {
    let class = reference.split('#').next().unwrap_or(reference);
    class.rfind('.').map_or("", |i| &class[..i])
}

/// Builds a plan fingerprinted with the report's canonical serialization.
pub fn build_plan(
    report: &DataClumpsReport,
    selected: &[String],
    names: &BTreeMap<String, String>,
) -> Result<RefactorPlan, PlanError> {
    build_plan_with_fingerprint(
        report,
        fingerprint(write_report(report).as_bytes()),
        selected,
        names,
    )
}

/// Parses a report document and builds a plan fingerprinted with its exact bytes.
pub fn build_plan_from_document(
    text: &str,
    selected: &[String],
    names: &BTreeMap<String, String>,
) -> Result<Parsed<RefactorPlan>, PlanError> {
    let parsed = parse_report(text)?;
    let plan =
        build_plan_with_fingerprint(&parsed.value, fingerprint(text.as_bytes()), selected, names)?;
    Ok(Parsed {
        value: plan,
        warnings: parsed.warnings,
    })
}

fn build_plan_with_fingerprint(
    report: &DataClumpsReport,
    source_report_fingerprint: String,
    selected: &[String],
    names: &BTreeMap<String, String>,
) -> Result<RefactorPlan, PlanError> {
    report.validate()?;
    if let Some(k) = selected
        .iter()
        .find(|k| !report.data_clumps.contains_key(*k))
    {
        return Err(PlanError::UnknownKey(k.clone()));
    }
    let groups = group_occurrences(report);
    if let Some(gid) = names
        .keys()
        .find(|g| !groups.iter().any(|gr| &gr.group_id == *g))
    {
        return Err(PlanError::UnknownKey(gid.clone()));
    }
    if let Some(bad) = names.values().find(|n| !is_valid_class_name(n)) {
        return Err(PlanError::InvalidName(bad.clone()));
    }
    let selected: BTreeSet<&str> = selected.iter().map(String::as_str).collect();
    let mut planned = Vec::new();
    for group in groups {
        if !group
            .occurrence_keys
            .iter()
            .any(|k| selected.contains(k.as_str()))
        {
            continue;
        }
        let name = match names.get(&group.group_id) {
            Some(n) => n.clone(),
            None => suggest_name(&group)?,
        };
        let package = group
            .affected_endpoints
            .iter()
            .map(|r| package_of_ref(r))
            .min()
            .unwrap_or_default()
            .to_string();
        let class_stub = render_extracted_class(&group.variable_set, &name, &package)?;
        let sites = group
            .affected_endpoints
            .iter()
            .map(|r| Site {
                endpoint: r.clone(),
                action: SiteAction::for_endpoint(r),
            })
            .collect();
        planned.push(PlannedGroup {
            group,
            new_class_name: name,
            new_class_package: package,
            class_stub,
            sites,
        });
    }
    Ok(RefactorPlan {
        plan_version: PLAN_VERSION.to_string(),
        source_report_fingerprint,
        groups: planned,
    })
}

impl RefactorPlan {
    /// Checks the plan's internal consistency, including that every stub is
    /// exactly what the renderer produces for its group.
    pub fn validate(&self) -> Result<(), PlanError> {
        let invalid = |m: String| Err(PlanError::InvalidPlan(m));
        if self.plan_version != PLAN_VERSION {
            return Err(PlanError::UnsupportedVersion(self.plan_version.clone()));
        }
        let fp = &self.source_report_fingerprint;
        let digest = fp.strip_prefix("sha256:").unwrap_or("");
        if digest.len() != 64
            || !digest
                .chars()
                .all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase())
        {
            return invalid(format!("malformed fingerprint `{fp}`"));
        }
        let mut ids = BTreeSet::new();
        for (i, g) in self.groups.iter().enumerate() {
            let group = &g.group;
            if !ids.insert(group.group_id.as_str()) {
                return invalid(format!(
                    "groups[{i}]: duplicate group_id `{}`",
                    group.group_id
                ));
            }
            if !is_valid_class_name(&g.new_class_name) {
                return Err(PlanError::InvalidName(g.new_class_name.clone()));
            }
            let sorted_unique = |v: &[String]| v.windows(2).all(|w| w[0] < w[1]);
            if group.occurrence_keys.is_empty() || !sorted_unique(&group.occurrence_keys) {
                return invalid(format!(
                    "groups[{i}]: occurrence_keys must be non-empty, sorted and unique"
                ));
            }
            if group.group_id != group.occurrence_keys[0] {
                return invalid(format!(
                    "groups[{i}]: group_id is not the first occurrence key"
                ));
            }
            if group.variable_set.is_empty() || !group.variable_set.windows(2).all(|w| w[0] < w[1])
            {
                return invalid(format!(
                    "groups[{i}]: variable_set must be non-empty and sorted"
                ));
            }
            if !sorted_unique(&group.affected_endpoints) {
                return invalid(format!(
                    "groups[{i}]: affected_endpoints must be sorted and unique"
                ));
            }
            let expected_sites: Vec<Site> = group
                .affected_endpoints
                .iter()
                .map(|r| Site {
                    endpoint: r.clone(),
                    action: SiteAction::for_endpoint(r),
                })
                .collect();
            if g.sites != expected_sites {
                return invalid(format!(
                    "groups[{i}]: sites do not match affected_endpoints"
                ));
            }
            let expected_package = group
                .affected_endpoints
                .iter()
                .map(|r| package_of_ref(r))
                .min()
                .unwrap_or_default();
            if g.new_class_package != expected_package {
                return invalid(format!(
                    "groups[{i}]: new_class_package should be `{expected_package}`"
                ));
            }
            if g.class_stub
                != render_extracted_class(
                    &group.variable_set,
                    &g.new_class_name,
                    &g.new_class_package,
                )?
            {
                return invalid(format!("groups[{i}]: class_stub does not match its group"));
            }
        }
        if !self
            .groups
            .windows(2)
            .all(|w| w[0].group.group_id < w[1].group.group_id)
        {
            return invalid("groups not sorted by group_id".into());
        }
        Ok(())
    }

    /// Checks that the plan was built from this report document.
    pub fn verify_against(&self, report_text: &str) -> Result<(), PlanError> {
        let report = fingerprint(report_text.as_bytes());
        if report != self.source_report_fingerprint {
            return Err(PlanError::FingerprintMismatch {
                plan: self.source_report_fingerprint.clone(),
                report,
            });
        }
        let parsed = parse_report(report_text)?.value;
        let groups = group_occurrences(&parsed);
        for g in &self.groups {
            if !groups.contains(&g.group) {
                return Err(PlanError::UnknownKey(g.group.group_id.clone()));
            }
        }
        Ok(())
    }
}

pub fn write_plan(plan: &RefactorPlan) -> String {
    json::to_canonical_string(plan)
}

pub fn parse_plan(text: &str) -> Result<Parsed<RefactorPlan>, PlanError> {
    let raw: serde_json::Value =
        serde_json::from_str(text).map_err(|e| PlanError::MalformedDocument {
            path: "$".into(),
            message: e.to_string(),
        })?;
    if let Some(v) = raw.get("plan_version").and_then(|v| v.as_str()) {
        if v != PLAN_VERSION {
            return Err(PlanError::UnsupportedVersion(v.to_string()));
        }
    }
    let plan: RefactorPlan = json::from_value_with_path(raw.clone())
        .map_err(|(path, message)| PlanError::MalformedDocument { path, message })?;
    let warnings = json::unknown_keys(&raw, &serde_json::to_value(&plan).expect("plan serializes"))
        .into_iter()
        .map(|p| format!("unknown key `{p}` ignored"))
        .collect();
    plan.validate()?;
    Ok(Parsed {
        value: plan,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Position;
    use crate::detector::{
        occurrence_key, DetectorConfig, Endpoint, MatchedVariable, OccurrenceKind,
    };
    use crate::java::{extract_class_infos, ModuleMap};
    use crate::report::ProjectInfo;

    fn endpoint(reference: &str) -> Endpoint {
        let (class, sig) = match reference.split_once('#') {
            Some((c, s)) => (c, Some(s.to_string())),
            None => (reference, None),
        };
        Endpoint {
            class_qualified_name: class.into(),
            method_signature: sig,
            file_path: format!("{}.java", class.replace('.', "/")),
            module: String::new(),
            position: Position::new(1, 1, 1, 1),
        }
    }

    fn occurrence(
        kind: OccurrenceKind,
        from: &str,
        to: &str,
        names: &[&str],
    ) -> DataClumpOccurrence {
        let mut o = DataClumpOccurrence {
            key: String::new(),
            kind,
            from: endpoint(from),
            to: endpoint(to),
            variables: names
                .iter()
                .map(|n| MatchedVariable {
                    name: n.to_string(),
                    ty: "int".into(),
                    from_position: Position::new(1, 1, 1, 1),
                    to_position: Position::new(1, 1, 1, 1),
                })
                .collect(),
        };
        o.key = occurrence_key(&o);
        o
    }

    fn report(occ: Vec<DataClumpOccurrence>) -> DataClumpsReport {
        DataClumpsReport::new(DetectorConfig::default(), ProjectInfo::default(), occ)
    }

    fn vars(pairs: &[(&str, &str)]) -> Vec<GroupVariable> {
        pairs.iter()
            .map(|(n, t)| GroupVariable {
                name: n.to_string(),
                ty: t.to_string(),
            })
            .collect()
    }

    fn group_of(names: &[&str]) -> RefactorGroup {
        RefactorGroup {
            group_id: "g".into(),
            variable_set: vars(&names.iter().map(|n| (*n, "int")).collect::<Vec<_>>()),
            occurrence_keys: vec!["g".into()],
            affected_endpoints: vec![],
        }
    }

    const F2F: OccurrenceKind = OccurrenceKind::FieldsToFields;
    const P2P: OccurrenceKind = OccurrenceKind::ParametersToParameters;

    #[test]
    fn grouping_follows_shared_endpoints() {
        assert!(group_occurrences(&report(vec![])).is_empty());

        let r = report(vec![
            occurrence(F2F, "p.A", "p.B", &["x", "y", "z"]),
            occurrence(F2F, "p.B", "p.C", &["x", "y", "z"]),
        ]);
        let g = group_occurrences(&r);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].occurrence_keys.len(), 2);
        assert_eq!(g[0].affected_endpoints, vec!["p.A", "p.B", "p.C"]);
        assert_eq!(g[0].group_id, g[0].occurrence_keys[0]);

        let r = report(vec![
            occurrence(F2F, "p.A", "p.B", &["x", "y", "z"]),
            occurrence(
                P2P,
                "p.A#m(int,int,int)",
                "p.B#n(int,int,int)",
                &["p", "q", "r"],
            ),
        ]);
        assert_eq!(group_occurrences(&r).len(), 2);
    }

    #[test]
    fn same_set_without_shared_endpoint_stays_apart() {
        let r = report(vec![
            occurrence(F2F, "p.A", "p.B", &["x", "y", "z"]),
            occurrence(F2F, "p.C", "p.D", &["x", "y", "z"]),
        ]);
        assert_eq!(group_occurrences(&r).len(), 2);
    }

    #[test]
    fn suggested_names() {
        assert_eq!(
            suggest_name(&group_of(&["x", "y", "z"])).unwrap(),
            "XYZData"
        );
        assert_eq!(
            suggest_name(&group_of(&["startDate", "endDate"])).unwrap(),
            "EndDateStartDateData"
        );
        assert_eq!(suggest_name(&group_of(&[])), Err(PlanError::EmptyGroup));
        let long = suggest_name(&group_of(&[
            "alphaValue",
            "betaValue",
            "gammaValue",
            "deltaValue",
        ]))
        .unwrap();
        assert_eq!(long.len(), MAX_NAME_LEN);
        assert!(is_valid_class_name(&long));
        let odd = suggest_name(&group_of(&["_1", "$b", "c_d"])).unwrap();
        assert_eq!(odd, "V1BCdData");
    }

    #[test]
    fn stub_layout() {
        let stub = render_extracted_class(&vars(&[("x", "int")]), "XData", "p").unwrap();
        assert_eq!(
            stub,
            "package p;\n\npublic class XData {\n    private int x;\n\n    public XData(int x) {\n        this.x = x;\n    }\n\n    public int getX() {\n        return x;\n    }\n}\n"
        );
        assert!(matches!(
            render_extracted_class(&vars(&[("x", "int")]), "1X", "p"),
            Err(PlanError::InvalidName(_))
        ));
        assert_eq!(
            render_extracted_class(&[], "X", "p"),
            Err(PlanError::EmptyGroup)
        );
    }

    #[test]
    fn stub_reparses_to_its_fields() {
        let set = vars(&[
            ("z", "int"),
            ("x", "java.util.Map<String,java.util.List<?+Number>>"),
            ("y", "int[][]"),
            ("Y", "String"),
        ]);
        let stub = render_extracted_class(&set, "XYZData", "p").unwrap();
        let classes = extract_class_infos(&stub, "p/XYZData.java", &ModuleMap::default()).unwrap();
        assert_eq!(classes.len(), 1);
        let got: Vec<GroupVariable> = classes[0]
            .fields
            .iter()
            .map(|f| GroupVariable {
                name: f.name.clone(),
                ty: f.ty.clone(),
            })
            .collect();
        let mut expected = set.clone();
        expected.sort();
        let mut got_sorted = got.clone();
        got_sorted.sort();
        assert_eq!(got_sorted, expected);
        assert_eq!(classes[0].methods.len(), 5);

        let x = render_extracted_class(
            &vars(&[("x", "int"), ("y", "int"), ("z", "int")]),
            "XYZData",
            "p",
        )
        .unwrap();
        let order: Vec<usize> = ["int x;", "int y;", "int z;"]
            .iter()
            .map(|s| x.find(s).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn plan_for_one_selected_key() {
        let o = occurrence(F2F, "p.A", "q.B", &["x", "y", "z"]);
        let key = o.key.clone();
        let r = report(vec![o]);

        let empty = build_plan(&r, &[], &BTreeMap::new()).unwrap();
        assert!(empty.groups.is_empty());

        let plan = build_plan(&r, std::slice::from_ref(&key), &BTreeMap::new()).unwrap();
        assert_eq!(plan.groups.len(), 1);
        let g = &plan.groups[0];
        assert_eq!(g.new_class_name, "XYZData");
        assert_eq!(g.new_class_package, "p");
        assert_eq!(g.sites.len(), 2);
        assert!(g
            .sites
            .iter()
            .all(|s| s.action == SiteAction::ReplaceFields));
        assert_eq!(
            plan.source_report_fingerprint,
            fingerprint(write_report(&r).as_bytes())
        );
        plan.validate().unwrap();

        let doc = write_plan(&plan);
        assert_eq!(parse_plan(&doc).unwrap().value, plan);
        assert_eq!(
            write_plan(&build_plan(&r, std::slice::from_ref(&key), &BTreeMap::new()).unwrap()),
            doc
        );
        plan.verify_against(&write_report(&r)).unwrap();

        let names = BTreeMap::from([(key.clone(), "PointData".to_string())]);
        assert_eq!(
            build_plan(&r, std::slice::from_ref(&key), &names)
                .unwrap()
                .groups[0]
                .new_class_name,
            "PointData"
        );
    }

    #[test]
    fn plan_errors() {
        let o = occurrence(F2F, "p.A", "p.B", &["x", "y", "z"]);
        let key = o.key.clone();
        let r = report(vec![o]);
        assert_eq!(
            build_plan(&r, &["nope".into()], &BTreeMap::new()),
            Err(PlanError::UnknownKey("nope".into()))
        );
        let bad = BTreeMap::from([(key.clone(), "not valid".to_string())]);
        assert_eq!(
            build_plan(&r, std::slice::from_ref(&key), &bad),
            Err(PlanError::InvalidName("not valid".into()))
        );
        let stray = BTreeMap::from([("other".to_string(), "Fine".to_string())]);
        assert_eq!(
            build_plan(&r, &[key], &stray),
            Err(PlanError::UnknownKey("other".into()))
        );
    }

    #[test]
    fn method_sites_replace_parameters() {
        let o = occurrence(
            P2P,
            "p.A#m(int,int,int)",
            "p.B#n(int,int,int)",
            &["x", "y", "z"],
        );
        let key = o.key.clone();
        let plan = build_plan(&report(vec![o]), &[key], &BTreeMap::new()).unwrap();
        assert!(plan.groups[0]
            .sites
            .iter()
            .all(|s| s.action == SiteAction::ReplaceParameters));
    }

    #[test]
    fn tampered_plans_rejected() {
        let o = occurrence(F2F, "p.A", "p.B", &["x", "y", "z"]);
        let key = o.key.clone();
        let r = report(vec![o]);
        let doc = write_plan(&build_plan(&r, &[key], &BTreeMap::new()).unwrap());
        let stub_edit = doc.replace("private int x;", "private long x;");
        assert!(matches!(
            parse_plan(&stub_edit),
            Err(PlanError::InvalidPlan(_))
        ));
        let version = doc.replace("\"plan_version\": \"1.0\"", "\"plan_version\": \"2.0\"");
        assert!(matches!(
            parse_plan(&version),
            Err(PlanError::UnsupportedVersion(_))
        ));
        let plan = parse_plan(&doc).unwrap().value;
        let other = write_report(&report(vec![]));
        assert!(matches!(
            plan.verify_against(&other),
            Err(PlanError::FingerprintMismatch { .. })
        ));
    }

    #[test]
    fn document_fingerprint_uses_exact_bytes() {
        let r = report(vec![occurrence(F2F, "p.A", "p.B", &["x", "y", "z"])]);
        let canonical = write_report(&r);
        let spaced = format!("{}\n", canonical);
        let a = build_plan_from_document(&canonical, &[], &BTreeMap::new())
            .unwrap()
            .value;
        let b = build_plan_from_document(&spaced, &[], &BTreeMap::new())
            .unwrap()
            .value;
        assert_ne!(a.source_report_fingerprint, b.source_report_fingerprint);
        assert_eq!(
            a.source_report_fingerprint,
            fingerprint(canonical.as_bytes())
        );
    }
}
