use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dct_core::ast::{
    AstBundle, ClassInfo, ClassKind, MethodInfo, Position, VariableDecl, FORMAT_VERSION,
};
use dct_core::detector::{detect, DetectorConfig, Scope};
use dct_core::planner::GroupVariable;
use dct_core::DataClumpsReport;

pub const NAME_POOL: [&str; 12] = [
    "x", "y", "z", "width", "height", "depth", "street", "city", "zip", "start", "end", "step",
];
pub const TYPE_POOL: [&str; 4] = ["int", "long", "String", "java.util.List<String>"];
const METHOD_NAMES: [&str; 6] = ["run", "apply", "move", "resize", "locate", "span"];
const MODULES: [&str; 3] = ["", "core", "app"];
const PACKAGES: [&str; 3] = ["", "p", "q.r"];
const MODIFIERS: [&str; 4] = ["public", "private", "static", "final"];

/// Size limits for generated bundles.
#[derive(Debug, Clone, Copy)]
pub struct BundleShape {
    pub max_classes: usize,
    pub max_fields: usize,
    pub max_methods: usize,
    pub max_params: usize,
}

impl Default for BundleShape {
    fn default() -> Self {
        Self {
            max_classes: 40,
            max_fields: 8,
            max_methods: 10,
            max_params: 6,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn position(rng: &mut impl Rng) -> Position {
    let line = rng.gen_range(1..500);
    let col = rng.gen_range(1..80);
    Position::new(
        line,
        col,
        line + rng.gen_range(0..3),
        col + rng.gen_range(0..20),
    )
}

fn modifiers(rng: &mut impl Rng) -> Vec<String> {
    MODIFIERS
        .iter()
        .filter(|_| rng.gen_bool(0.3))
        .map(|m| m.to_string())
        .collect()
}

fn variables(rng: &mut impl Rng, max: usize) -> Vec<VariableDecl> {
    let n = rng.gen_range(0..=max.min(NAME_POOL.len()));
    let mut names: Vec<&str> = NAME_POOL.choose_multiple(rng, n).copied().collect();
    names.shuffle(rng);
    names
        .into_iter()
        .map(|name| VariableDecl {
            name: name.to_string(),
            ty: if rng.gen_bool(0.6) {
                "int".to_string()
            } else {
                TYPE_POOL.choose(rng).unwrap().to_string()
            },
            modifiers: modifiers(rng),
            position: position(rng),
        })
        .collect()
}

fn class(rng: &mut impl Rng, index: usize, shape: &BundleShape) -> ClassInfo {
    let package = PACKAGES.choose(rng).unwrap().to_string();
    let name = format!("C{index}");
    let module = MODULES.choose(rng).unwrap().to_string();
    let kind = *[
        ClassKind::Class,
        ClassKind::Class,
        ClassKind::Interface,
        ClassKind::Enum,
    ]
    .choose(rng)
    .unwrap();
    let mut methods: Vec<MethodInfo> = Vec::new();
    for _ in 0..rng.gen_range(0..=shape.max_methods) {
        let is_constructor = rng.gen_bool(0.15);
        let method_name = if is_constructor {
            name.clone()
        } else {
            METHOD_NAMES.choose(rng).unwrap().to_string()
        };
        let parameters = variables(rng, shape.max_params);
        let signature = MethodInfo::signature_of(&method_name, &parameters);
        if methods.iter().any(|m| m.signature == signature) {
            continue;
        }
        methods.push(MethodInfo {
            name: method_name,
            signature,
            return_type: if is_constructor {
                String::new()
            } else {
                "void".into()
            },
            modifiers: modifiers(rng),
            is_constructor,
            is_override: !is_constructor && rng.gen_bool(0.2),
            parameters,
            position: position(rng),
        });
    }
    let file_dir = if package.is_empty() {
        String::new()
    } else {
        format!("{}/", package.replace('.', "/"))
    };
    let module_dir = if module.is_empty() {
        String::new()
    } else {
        format!("{module}/")
    };
    ClassInfo {
        format_version: FORMAT_VERSION.to_string(),
        qualified_name: ClassInfo::expected_qualified_name(&package, &name),
        file_path: format!("{module_dir}src/{file_dir}{name}.java"),
        name,
        kind,
        module,
        is_aux: rng.gen_bool(0.15),
        package,
        extends: if rng.gen_bool(0.3) {
            vec!["Base".into()]
        } else {
            vec![]
        },
        implements: if rng.gen_bool(0.3) {
            vec!["java.io.Serializable".into(), "Comparable<p.C0>".into()]
        } else {
            vec![]
        },
        fields: variables(rng, shape.max_fields),
        methods,
        position: position(rng),
    }
    .canonicalized()
}

/// A valid bundle with clumps likely enough to be interesting.
pub fn random_bundle(seed: u64, shape: &BundleShape) -> AstBundle {
    let mut rng = rng(seed);
    let n = rng.gen_range(0..=shape.max_classes);
    let classes = (0..n).map(|i| class(&mut rng, i, shape)).collect();
    AstBundle::new(format!("gen{seed}"), "/gen", classes)
}

/// A single valid class document.
pub fn random_class(seed: u64) -> ClassInfo {
    let mut rng = rng(seed);
    let index = rng.gen_range(0..100);
    class(&mut rng, index, &BundleShape::default())
}

pub fn random_config(rng: &mut impl Rng) -> DetectorConfig {
    DetectorConfig {
        min_clump_size: rng.gen_range(2..=5),
        match_types: rng.gen_bool(0.7),
        scope: if rng.gen_bool(0.5) {
            Scope::Project
        } else {
            Scope::Module
        },
        include_aux_counterpart: rng.gen_bool(0.3),
        include_own_class_param_field: rng.gen_bool(0.3),
        include_overrides: rng.gen_bool(0.3),
    }
}

/// A report produced by running the detector over a random bundle with a
/// random configuration.
pub fn random_report(seed: u64) -> DataClumpsReport {
    let mut r = rng(seed ^ 0x5eed);
    let shape = BundleShape {
        max_classes: r.gen_range(0..=12),
        ..BundleShape::default()
    };
    let cfg = random_config(&mut r);
    let report = detect(&random_bundle(seed, &shape), &cfg).expect("generated bundles are valid");
    if r.gen_bool(0.3) {
        report.with_timestamp(format!(
            "2024-0{}-1{}T10:00:00Z",
            r.gen_range(1..10),
            r.gen_range(0..10)
        ))
    } else {
        report
    }
}

const KEYWORDS: [&str; 53] = [
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
];

const STUB_TYPES: [&str; 12] = [
    "int",
    "boolean",
    "double",
    "char",
    "String",
    "int[]",
    "String[][]",
    "java.util.List<String>",
    "java.util.Map<String,java.util.List<Integer>>",
    "java.util.List<?+Number>",
    "java.util.Comparator<?-Integer>",
    "java.util.Optional<?>",
];

fn identifier(rng: &mut impl Rng) -> String {
    const START: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$";
    const PART: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_$";
    loop {
        let len = rng.gen_range(1..=10);
        let mut s = String::new();
        s.push(*START.choose(rng).unwrap() as char);
        for _ in 1..len {
            s.push(*PART.choose(rng).unwrap() as char);
        }
        if s != "_" && !KEYWORDS.contains(&s.as_str()) {
            return s;
        }
    }
}

/// A non-empty variable set with unique names and canonical types.
pub fn random_variable_set(seed: u64) -> Vec<GroupVariable> {
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=8);
    let mut out: Vec<GroupVariable> = Vec::new();
    while out.len() < n {
        let name = identifier(&mut rng);
        if out.iter().any(|v| v.name == name) {
            continue;
        }
        out.push(GroupVariable {
            name,
            ty: STUB_TYPES.choose(&mut rng).unwrap().to_string(),
        });
    }
    out.sort();
    out
}
