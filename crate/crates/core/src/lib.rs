//! Global minimization of box-constrained DC functions `f = f1 - f2`.
//!
//! A DCA local search finds critical points; an escape procedure built on
//! sampled spherical subdifferentials of both components either certifies a
//! point as an approximate global minimizer or produces a start in a lower
//! basin. The crate also ships a registry of test problems, solution-quality
//! metrics and the CSV plumbing behind the `tesgo` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dc;
pub mod driver;
pub mod error;
pub mod escape;
pub mod linalg;
pub mod local_search;
pub mod metrics;
pub mod min_norm;
pub mod problems;
pub mod results;

pub use dc::{BoxBounds, Component, ConvexFunction, DcProblem, EvalCounters, Evaluator, FnConvex, DEFAULT_GAMMA};
pub use driver::{dca_local_solve, preset, tesgo_solve, Preset, SolveReport, Status, TesgoConfig};
pub use error::{Error, Result};
