//! Operator tooling for a webcas deployment: identity generation, the
//! server, offline package exchange and permission changes, and a scripted
//! run of the enrollment workflow.

mod error;

pub mod client;
pub mod identity;
pub mod offline;
pub mod runtime;
pub mod workdir;
pub mod workflow;

pub use error::CliError;
pub use identity::{gen_identity, GeneratedIdentity, StoredIdentity};
pub use workflow::{run_workflow, Decision, WorkflowOptions, WorkflowReport};
