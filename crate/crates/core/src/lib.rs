//! Cross-impact balance (CIB) analysis.
//!
//! A system is described by descriptors, each with a finite list of states.
//! A cross-impact matrix (CIM) holds integer judgements of how each state of
//! one descriptor promotes or restricts the states of another. From it this
//! crate derives:
//!
//! - the consistent scenarios, by exhaustive enumeration ([`consistency`]);
//! - basin-of-attraction weights under the global, incremental, local and
//!   adiabatic succession rules ([`succession`]);
//! - a chain of highest-weight scenarios across timespans that share one
//!   framework, optionally compounded with manual state values ([`timechain`]);
//! - multi-level aggregation of subsystem scenarios and an exhaustive check of
//!   the aggregate against the full system ([`multilevel`]).
//!
//! Models are read from a strict JSON format and results are written as CSV
//! or markdown-flavoured text ([`io`]). The `cib` binary wraps the workflow in
//! a small command-line interface ([`cli`]).
//!
//! ```
//! use cib::{fixtures, SolveOptions, SuccessionRule};
//!
//! let cim = fixtures::mutual2();
//! let table = cib::basin_weights(&cim, SuccessionRule::Local, &SolveOptions::default()).unwrap();
//! assert_eq!(table.entries.len(), 2);
//! ```

pub mod cli;
pub mod consistency;
pub mod error;
pub mod fixtures;
pub mod framework;
pub mod io;
pub mod multilevel;
pub mod options;
pub mod succession;
pub mod timechain;
pub mod validation;

pub use consistency::{
    enumerate_consistent, impact_balance, inconsistency_score, is_consistent, ImpactBalanceVector,
};
pub use error::{Error, Result};
pub use framework::{
    iterate_scenarios, scenario_rank, scenario_unrank, validate_cim, CrossImpactMatrix, Descriptor,
    Framework, JudgementCell, Scenario, DEFAULT_IMPACT_RANGE,
};
pub use options::{SolveOptions, DEFAULT_ENUMERATION_CAP};
pub use succession::{
    argmax_states, basin_weights, successor, trace, trajectory, Attractor, SuccessionRule, Weight,
    WeightTable,
};
pub use validation::{Issue, ValidationReport};
