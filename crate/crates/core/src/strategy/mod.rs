//! Strategic analysis of the mechanisms.
//!
//! Every search in this module is exhaustive over pure strategies and uses
//! exact arithmetic; a deviation only counts when it is strictly profitable.
//! Searches are bounded by an explicit enumeration cap and fail with
//! [`AnalysisError::CapExceeded`] rather than sampling.

mod classes;
mod equilibrium;
mod fcfs;
mod game;
mod manipulation;
mod record;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{TaskSet, Violation};

pub use classes::{classify_truthful_inputs, AgentClass, Classification, TruthfulClass};
pub use equilibrium::{
    approximation_ratio, best_response, empirical_poa_pos, enumerate_equilibria,
    tightness_family_ratio, verify_nash, BestResponse, Deviation, Equilibrium, EquilibriumSet,
    EquilibriumVerdict, PoaPos,
};
pub use fcfs::{fcfs_policies, FcfsPolicy};
pub use manipulation::{check_group_sp, check_truthfulness, CoalitionWitness, ManipulationWitness};
pub use record::{analyze, AnalysisOptions, AnalysisRecord, Check, Ratios};

/// Default bound on the number of strategies or profiles a single search
/// may enumerate.
pub const DEFAULT_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("{what} needs {required} evaluations, above the enumeration cap {cap}")]
    CapExceeded {
        what: String,
        required: u128,
        cap: u64,
    },
    #[error("invalid strategy profile: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidProfile(Vec<Violation>),
    #[error("no pure Nash equilibrium found")]
    NoEquilibrium,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("ratio is unbounded: welfare {0} against zero")]
    UnboundedRatio(String),
}

/// One agent's declaration: an edge subset and, in ECMS, a capacity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Strategy {
    pub edges: TaskSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<usize>,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tasks: Vec<String> = self.edges.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", tasks.join(", "))?;
        if let Some(c) = self.capacity {
            write!(f, " cap {c}")?;
        }
        Ok(())
    }
}
