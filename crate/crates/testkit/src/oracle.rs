//! Brute-force detector written directly from the clump rules: every ordered
//! pair of endpoints is tried, variables are intersected with nested loops
//! and the key is formatted by hand.

use std::collections::BTreeSet;

use dct_core::ast::{AstBundle, ClassInfo, VariableDecl};
use dct_core::detector::{DetectorConfig, Scope};

struct Point<'a> {
    class: &'a ClassInfo,
    method: Option<usize>,
    vars: &'a [VariableDecl],
    overrides: bool,
}

impl Point<'_> {
    fn reference(&self) -> String {
        match self.method {
            Some(i) => format!(
                "{}#{}",
                self.class.qualified_name, self.class.methods[i].signature
            ),
            None => self.class.qualified_name.clone(),
        }
    }
}

pub fn oracle_keys(bundle: &AstBundle, cfg: &DetectorConfig) -> BTreeSet<String> {
    let mut points = Vec::new();
    for c in &bundle.classes {
        points.push(Point {
            class: c,
            method: None,
            vars: &c.fields,
            overrides: false,
        });
        for (i, m) in c.methods.iter().enumerate() {
            points.push(Point {
                class: c,
                method: Some(i),
                vars: &m.parameters,
                overrides: m.is_override,
            });
        }
    }

    let mut keys = BTreeSet::new();
    for (i, from) in points.iter().enumerate() {
        for (j, to) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let kind = match (from.method.is_some(), to.method.is_some()) {
                (false, false) => "fields_to_fields",
                (true, true) => "parameters_to_parameters",
                (true, false) => "parameters_to_fields",
                (false, true) => continue,
            };
            if from.overrides && !cfg.include_overrides || to.overrides && !cfg.include_overrides {
                continue;
            }
            if from.class.is_aux {
                continue;
            }
            if to.class.is_aux && !cfg.include_aux_counterpart {
                continue;
            }
            if kind != "parameters_to_fields"
                && !to.class.is_aux
                && from.reference() >= to.reference()
            {
                continue;
            }
            if cfg.scope == Scope::Module && from.class.module != to.class.module {
                continue;
            }
            if kind == "parameters_to_fields"
                && !cfg.include_own_class_param_field
                && from.class.qualified_name == to.class.qualified_name
            {
                continue;
            }
            let mut shared: Vec<(String, String)> = Vec::new();
            for v in from.vars {
                for w in to.vars {
                    if v.name == w.name && (!cfg.match_types || v.ty == w.ty) {
                        shared.push((v.name.clone(), v.ty.clone()));
                    }
                }
            }
            if shared.len() < cfg.min_clump_size {
                continue;
            }
            shared.sort();
            let vars: Vec<String> = shared.iter().map(|(n, t)| format!("{n}:{t}")).collect();
            keys.insert(format!(
                "{kind}|{}|{}|{}",
                from.reference(),
                to.reference(),
                vars.join(",")
            ));
        }
    }
    keys
}
