//! Lower bounding for generalized semi-infinite programs (GSIP) by
//! discretization, on top of a small interval branch-and-bound.
//!
//! Layers, bottom up:
//!
//! * [`expr`] and [`interval`]: expression trees with point and interval
//!   evaluation.
//! * [`format`]: the `.gsip` text format.
//! * [`opt`]: certified box-constrained global minimization and a grid
//!   oracle.
//! * [`gsip`]: the problem model, subproblem builders and built-in instances.
//! * [`algorithms`]: the lower-bounding loops and the trace diagnostic.
//! * [`trace`] and [`verify`]: CSV/JSON export and oracle cross-checks.
//! * [`cli`]: the `gsip` command line.

pub mod algorithms;
pub mod cli;
pub mod domain;
pub mod error;
pub mod expr;
pub mod format;
pub mod gsip;
pub mod interval;
pub mod opt;
pub mod trace;
pub mod verify;

pub use algorithms::{
    diagnose_trace, lower_bound_history, run, AlgorithmConfig, IterateRecord, RunResult,
    RunStatus, TieBreak, Variant,
};
pub use domain::BoxDomain;
pub use error::{Error, Result};
pub use expr::Expr;
pub use gsip::{builtin, builtin_problems, GsipProblem, SlaterCertificate};
pub use interval::Interval;
pub use opt::{grid_minimize, minimize, ConstraintSpec, Instance, MinimizeOptions, MinimizeOutcome};
