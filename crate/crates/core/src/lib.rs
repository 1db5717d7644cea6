//! Data clump detection toolkit.
//!
//! The pipeline is split into independent stages that communicate through
//! documents only:
//!
//! 1. [`java`] reads a source tree and produces an [`ast::AstBundle`] of
//!    declaration-level class documents.
//! 2. [`detector`] compares every endpoint pair of a bundle and produces a
//!    [`report::DataClumpsReport`].
//! 3. [`graph`] turns a report into a navigable node/edge graph.
//! 4. [`planner`] groups selected occurrences into extract-class plans.
//!
//! Every document is written with the same canonical JSON conventions (see
//! [`json`]) so that equal inputs always produce byte-identical artifacts.

pub mod ast;
pub mod detector;
pub mod diagnostics;
pub mod graph;
pub mod java;
pub mod json;
pub mod planner;
pub mod report;

pub use ast::{AstBundle, ClassInfo, ClassKind, MethodInfo, Position, VariableDecl};
pub use detector::{detect, DataClumpOccurrence, DetectorConfig, Endpoint, OccurrenceKind, Scope};
pub use diagnostics::{Diagnostic, Level};
pub use graph::{build_graph, ClumpGraph};
pub use planner::{build_plan, RefactorPlan};
pub use report::{parse_report, write_report, DataClumpsReport};

/// Name recorded in the `detector` section of every report.
pub const DETECTOR_NAME: &str = "dct";

/// Version recorded in the `detector` section of every report.
pub const DETECTOR_VERSION: &str = env!("CARGO_PKG_VERSION");
