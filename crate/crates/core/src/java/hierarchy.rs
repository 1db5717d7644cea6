use std::collections::{BTreeMap, HashSet};

use crate::ast::{AstBundle, ClassInfo};

/// Marks every class whose file lies under one of `aux_roots` as auxiliary.
pub fn mark_aux(bundle: &AstBundle, aux_roots: &[String]) -> AstBundle {
    let mut out = bundle.clone();
    for class in &mut out.classes {
        if aux_roots
            .iter()
            .any(|root| class.file_path.starts_with(root.as_str()))
        {
            class.is_aux = true;
        }
    }
    out
}

/// Flags methods that override a method of some supertype declared in the
/// bundle. Flags already set (from `@Override`) are kept; supertypes outside
/// the bundle contribute nothing.
pub fn resolve_overrides(bundle: &AstBundle) -> AstBundle {
    let by_name: BTreeMap<&str, &ClassInfo> = bundle.by_name();
    let inherited: Vec<HashSet<String>> = bundle
        .classes
        .iter()
        .map(|class| inherited_signatures(class, &by_name))
        .collect();

    let mut out = bundle.clone();
    for (class, inherited) in out.classes.iter_mut().zip(inherited) {
        for method in class.methods.iter_mut().filter(|m| !m.is_constructor) {
            if inherited.contains(&method.signature) {
                method.is_override = true;
            }
        }
    }
    out
}

fn inherited_signatures(
    class: &ClassInfo,
    by_name: &BTreeMap<&str, &ClassInfo>,
) -> HashSet<String> {
    let mut visited: HashSet<&str> = HashSet::from([class.qualified_name.as_str()]);
    let mut stack: Vec<&ClassInfo> = supertypes(class, by_name);
    let mut out = HashSet::new();
    while let Some(sup) = stack.pop() {
        if !visited.insert(sup.qualified_name.as_str()) {
            continue;
        }
        out.extend(
            sup.methods
                .iter()
                .filter(|m| !m.is_constructor)
                .map(|m| m.signature.clone()),
        );
        stack.extend(supertypes(sup, by_name));
    }
    out
}

fn supertypes<'a>(
    class: &ClassInfo,
    by_name: &BTreeMap<&str, &'a ClassInfo>,
) -> Vec<&'a ClassInfo> {
    class
        .extends
        .iter()
        .chain(&class.implements)
        .filter_map(|ty| lookup(ty, by_name))
        .collect()
}

/// Finds a supertype by its normalized type text. Generic arguments are
/// ignored and `Outer.Inner` also matches the nested class `Outer$Inner`.
fn lookup<'a>(ty: &str, by_name: &BTreeMap<&str, &'a ClassInfo>) -> Option<&'a ClassInfo> {
    let erased: String = {
        let mut depth = 0usize;
        ty.chars()
            .filter(|&c| {
                match c {
                    '<' => depth += 1,
                    '>' => depth = depth.saturating_sub(1),
                    _ => return depth == 0,
                }
                false
            })
            .collect()
    };
    if let Some(found) = by_name.get(erased.as_str()) {
        return Some(found);
    }
    let mut candidate = erased;
    while let Some(dot) = candidate.rfind('.') {
        candidate.replace_range(dot..=dot, "$");
        if let Some(found) = by_name.get(candidate.as_str()) {
            return Some(found);
        }
    }
    None
}
