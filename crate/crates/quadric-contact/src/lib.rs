//! Scene files, reports, path sweeps, a sampling oracle and the command-line
//! front end around `quadric-contact-core`.

// negated float comparisons deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod oracle;
pub mod report;
pub mod scene;
pub mod sweep;

pub use oracle::{agreement_test, sample_extrema, AgreementReport, Estimate, OracleVerdict};
pub use report::Report;
pub use scene::{SceneError, SceneFile};
pub use sweep::{sweep, SweepConfig, SweepError, SweepEvent, SweepResult};
