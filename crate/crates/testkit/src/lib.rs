//! Seeded generators and reference implementations shared by the test suites.

pub mod gen;
pub mod oracle;

pub use gen::{
    random_bundle, random_class, random_config, random_report, random_variable_set, BundleShape,
};
pub use oracle::oracle_keys;
