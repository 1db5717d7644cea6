use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "dct",
    version,
    about = "Find data clumps in Java projects and plan extract-class refactorings"
)]
pub struct Cli {
    /// Worker threads for parsing and detection (defaults to one per CPU)
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a project into one AST document per class plus bundle.json
    Extract {
        /// Project root
        #[arg(long)]
        input: PathBuf,
        /// Directory for the AST documents
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        extract: ExtractOpts,
    },
    /// Detect data clumps in an AST directory or a project directory
    Detect {
        /// AST directory (containing bundle.json) or project root
        #[arg(long)]
        input: PathBuf,
        /// Report file to write
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        extract: ExtractOpts,
        #[command(flatten)]
        detect: DetectOpts,
    },
    /// Build the clump graph for a report
    Graph {
        /// Report file
        #[arg(long)]
        input: PathBuf,
        /// Graph document to write
        #[arg(long)]
        output: PathBuf,
        /// Also write the graph as DOT text
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Build an extract-class plan for selected occurrences
    Plan {
        /// Report file
        #[arg(long)]
        input: PathBuf,
        /// Plan document to write
        #[arg(long)]
        output: PathBuf,
        /// Occurrence key to include (repeatable)
        #[arg(long = "select", value_name = "KEY")]
        select: Vec<String>,
        /// Include every occurrence in the report
        #[arg(long, conflicts_with = "select")]
        all: bool,
        /// Class name for a group, as GROUP_ID=NAME (repeatable)
        #[arg(long = "name", value_name = "GROUP_ID=NAME", value_parser = parse_name_override)]
        names: Vec<(String, String)>,
    },
    /// Run extract, detect and graph into one output directory
    Pipeline {
        /// Project root
        #[arg(long)]
        input: PathBuf,
        /// Directory receiving ast/, report.json and graph.json
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        extract: ExtractOpts,
        #[command(flatten)]
        detect: DetectOpts,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Project,
    Module,
}

#[derive(Debug, Clone, Args)]
pub struct ExtractOpts {
    /// Path prefix whose classes are auxiliary (repeatable)
    #[arg(long = "aux-root", value_name = "PATH")]
    pub aux_roots: Vec<String>,
    /// Assign modules from build descriptors
    #[arg(long, value_enum, default_value = "on")]
    pub module_detection: Toggle,
    /// Fail when any source file cannot be parsed
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DetectOpts {
    /// Minimum number of shared variables
    #[arg(long, default_value_t = 3)]
    pub min_size: usize,
    /// Match variables by name only
    #[arg(long)]
    pub no_type_match: bool,
    #[arg(long, value_enum, default_value = "project")]
    pub scope: ScopeArg,
    /// Allow auxiliary classes as the counterpart endpoint
    #[arg(long)]
    pub include_aux_counterpart: bool,
    /// Compare a method's parameters with its own class's fields
    #[arg(long)]
    pub include_own_class: bool,
    /// Include methods that override a supertype method
    #[arg(long)]
    pub include_overrides: bool,
    /// Exit with status 2 when more than N clumps are found
    #[arg(long, value_name = "N")]
    pub fail_threshold: Option<usize>,
    /// Record the current UTC time in the report
    #[arg(long)]
    pub timestamp: bool,
}

fn parse_name_override(s: &str) -> Result<(String, String), String> {
    match s.rsplit_once('=') {
        Some((group, name)) if !group.is_empty() => Ok((group.to_string(), name.to_string())),
        _ => Err(format!("expected GROUP_ID=NAME, got `{s}`")),
    }
}
