//! Mechanisms for maximum vertex-weighted b-matching with strategic agents.
//!
//! Agents hold private edge sets (and, in one setting, capacities) and report
//! them to a mechanism that assigns tasks by augmenting paths. The crate
//! provides the matching engine, the three mechanisms, exhaustive strategic
//! analysis (best responses, equilibria, manipulation and collusion search),
//! a brute-force oracle and a catalogue of reference instances.
//!
//! ```
//! use mvbm_core::{fixture, run, FixtureId, FixtureParams, Mechanism, MechanismKind, Report};
//!
//! let inst = fixture(FixtureId::Thm1Impossibility, &FixtureParams::default()).unwrap();
//! let kind = MechanismKind::ems(Mechanism::Bfs);
//! let out = run(&inst, &Report::truthful(&inst, kind.mode), kind).unwrap();
//! assert_eq!(out.utilities.welfare.to_string(), "11/10");
//! ```

pub mod engine;
pub mod fixtures;
pub mod instance;
pub mod mechanism;
pub mod oracle;
pub mod par;
pub mod strategy;
pub mod value;

pub use engine::{
    apply_path, find_augmenting_path, solve, solve_traced, AugmentingPath, PathError, SearchKind,
};
pub use fixtures::{
    fixture, random_instance, tightness_family, FixtureError, FixtureId, FixtureParams, RandomSpec,
    ValueMode,
};
pub use instance::{
    utilities, validate_report, AgentId, Instance, InstanceError, Matching, MatchingError, Mode,
    Report, StrategyProfile, TaskId, TaskSet, UtilityVector, Violation,
};
pub use mechanism::{
    best_single_edge_hide, run, Mechanism, MechanismError, MechanismKind, Outcome,
};
pub use oracle::{
    brute_force_instance, brute_force_mvbm, exhaustive_instance_sweep, OracleError, SweepLimits,
};
pub use par::Execution;
pub use strategy::{AnalysisError, Strategy, DEFAULT_CAP};
pub use value::{Value, ValueParseError};
