//! Clump graph: files, classes, methods and matched variables as nodes,
//! joined by containment edges and one clump edge per occurrence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detector::Endpoint;
use crate::json;
use crate::report::DataClumpsReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    File,
    Class,
    Method,
    Variable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Contains,
    Clump,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub kind: EdgeKind,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occurrence_key: Option<String>,
}

/// Nodes and edges, each sorted by id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClumpGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl ClumpGraph {
    pub fn clump_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Clump)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid report: {0}")]
    InvalidReport(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("malformed graph document at `{path}`: {message}")]
    MalformedDocument { path: String, message: String },
}

pub fn file_node_id(path: &str) -> String {
    format!("file:{path}")
}

pub fn variable_node_id(endpoint_ref: &str, name: &str) -> String {
    format!("{endpoint_ref}/{name}")
}

#[derive(Default)]
struct Builder {
    nodes: BTreeMap<String, Node>,
    edges: BTreeMap<String, Edge>,
}

impl Builder {
    fn node(
        &mut self,
        id: String,
        kind: NodeKind,
        label: String,
        parent: Option<String>,
    ) -> Result<String, GraphError> {
        if let Some(existing) = self.nodes.get(&id) {
            if existing.kind != kind || existing.parent != parent {
                return Err(GraphError::InvalidReport(format!(
                    "node `{id}` appears with conflicting placement ({:?} vs {:?})",
                    existing.parent, parent
                )));
            }
            return Ok(id);
        }
        if let Some(parent) = &parent {
            let edge_id = format!("contains:{parent}->{id}");
            self.edges.insert(
                edge_id.clone(),
                Edge {
                    id: edge_id,
                    kind: EdgeKind::Contains,
                    source: parent.clone(),
                    target: id.clone(),
                    occurrence_key: None,
                },
            );
        }
        self.nodes.insert(
            id.clone(),
            Node {
                id: id.clone(),
                kind,
                label,
                parent,
            },
        );
        Ok(id)
    }

    fn endpoint(&mut self, e: &Endpoint) -> Result<String, GraphError> {
        let file = self.node(
            file_node_id(&e.file_path),
            NodeKind::File,
            e.file_path.clone(),
            None,
        )?;
        let class_label = e
            .class_qualified_name
            .rsplit('.')
            .next()
            .unwrap_or(&e.class_qualified_name)
            .to_string();
        let class = self.node(
            e.class_qualified_name.clone(),
            NodeKind::Class,
            class_label,
            Some(file),
        )?;
        match &e.method_signature {
            Some(sig) => self.node(e.reference(), NodeKind::Method, sig.clone(), Some(class)),
            None => Ok(class),
        }
    }
}

/// Builds the graph for a report.
pub fn build_graph(report: &DataClumpsReport) -> Result<ClumpGraph, GraphError> {
    report
        .validate()
        .map_err(|e| GraphError::InvalidReport(e.to_string()))?;
    let mut b = Builder::default();
    for o in report.data_clumps.values() {
        let from = b.endpoint(&o.from)?;
        let to = b.endpoint(&o.to)?;
        for v in &o.variables {
            for owner in [&from, &to] {
                b.node(
                    variable_node_id(owner, &v.name),
                    NodeKind::Variable,
                    v.name.clone(),
                    Some(owner.clone()),
                )?;
            }
        }
        let id = format!("clump:{}", o.key);
        b.edges.insert(
            id.clone(),
            Edge {
                id,
                kind: EdgeKind::Clump,
                source: from,
                target: to,
                occurrence_key: Some(o.key.clone()),
            },
        );
    }
    Ok(ClumpGraph {
        nodes: b.nodes.into_values().collect(),
        edges: b.edges.into_values().collect(),
    })
}

/// Checks id uniqueness, ordering and referential integrity.
pub fn validate_graph(g: &ClumpGraph) -> Result<(), GraphError> {
    let invalid = |m: String| Err(GraphError::InvalidGraph(m));
    if !g.nodes.windows(2).all(|w| w[0].id < w[1].id) {
        return invalid("node ids not unique and sorted".into());
    }
    if !g.edges.windows(2).all(|w| w[0].id < w[1].id) {
        return invalid("edge ids not unique and sorted".into());
    }
    let ids: BTreeSet<&str> = g.nodes.iter().map(|n| n.id.as_str()).collect();
    for n in &g.nodes {
        if let Some(p) = &n.parent {
            if !ids.contains(p.as_str()) {
                return invalid(format!("node `{}` has missing parent `{p}`", n.id));
            }
        }
    }
    for e in &g.edges {
        for end in [&e.source, &e.target] {
            if !ids.contains(end.as_str()) {
                return invalid(format!("edge `{}` references missing node `{end}`", e.id));
            }
        }
        if (e.kind == EdgeKind::Clump) != e.occurrence_key.is_some() {
            return invalid(format!(
                "edge `{}`: only clump edges carry an occurrence key",
                e.id
            ));
        }
    }
    Ok(())
}

pub fn write_graph(g: &ClumpGraph) -> String {
    json::to_canonical_string(g)
}

pub fn parse_graph(text: &str) -> Result<ClumpGraph, GraphError> {
    let raw: serde_json::Value =
        serde_json::from_str(text).map_err(|e| GraphError::MalformedDocument {
            path: "$".into(),
            message: e.to_string(),
        })?;
    let g: ClumpGraph = json::from_value_with_path(raw)
        .map_err(|(path, message)| GraphError::MalformedDocument { path, message })?;
    validate_graph(&g)?;
    Ok(g)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders the graph as a DOT digraph; clump edges are drawn bold and red.
pub fn to_dot(g: &ClumpGraph) -> String {
    let mut out = String::from("digraph clumps {\n");
    let mut nodes: Vec<&Node> = g.nodes.iter().collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    for n in nodes {
        let kind = match n.kind {
            NodeKind::File => "file",
            NodeKind::Class => "class",
            NodeKind::Method => "method",
            NodeKind::Variable => "variable",
        };
        let _ = writeln!(
            out,
            "  {} [kind={}, label={}];",
            quote(&n.id),
            quote(kind),
            quote(&n.label)
        );
    }
    let mut edges: Vec<&Edge> = g.edges.iter().collect();
    edges.sort_by(|a, b| a.id.cmp(&b.id));
    for e in edges {
        let attrs = match e.kind {
            EdgeKind::Contains => "kind=\"contains\"".to_string(),
            EdgeKind::Clump => format!(
                "kind=\"clump\", style=\"bold\", color=\"red\", dir=\"none\", tooltip={}",
                quote(e.occurrence_key.as_deref().unwrap_or_default())
            ),
        };
        let _ = writeln!(
            out,
            "  {} -> {} [{attrs}];",
            quote(&e.source),
            quote(&e.target)
        );
    }
    out.push_str("}\n");
    out
}

/// Connected components over clump edges. Each cluster is the sorted list
/// of endpoint node ids; clusters are ordered by their first member.
pub fn components(g: &ClumpGraph) -> Vec<Vec<String>> {
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for e in g.clump_edges() {
        for end in [e.source.as_str(), e.target.as_str()] {
            let next = index.len();
            index.entry(end).or_insert(next);
        }
    }
    let mut parent: Vec<usize> = (0..index.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in g.clump_edges() {
        let a = find(&mut parent, index[e.source.as_str()]);
        let b = find(&mut parent, index[e.target.as_str()]);
        parent[a.max(b)] = a.min(b);
    }
    let mut clusters: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (&id, &i) in &index {
        let root = find(&mut parent, i);
        clusters.entry(root).or_default().push(id.to_string());
    }
    let mut out: Vec<Vec<String>> = clusters.into_values().collect();
    for c in &mut out {
        c.sort();
    }
    out.sort();
    out
}
