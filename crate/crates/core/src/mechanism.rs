//! The three mechanisms, as functions from declared reports to matchings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, SearchKind};
use crate::instance::{
    utilities_unchecked, validate_report, AgentId, Instance, Matching, Mode, Report, TaskId,
    TaskSet, UtilityVector, Violation,
};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    /// Optimal, breadth-first augmenting paths.
    Bfs,
    /// Optimal, depth-first augmenting paths.
    Dfs,
    /// Length-one augmenting paths only; truthful, 2-approximate.
    Ap,
}

impl Mechanism {
    pub const ALL: [Mechanism; 3] = [Mechanism::Bfs, Mechanism::Dfs, Mechanism::Ap];

    pub fn search(self) -> SearchKind {
        match self {
            Mechanism::Bfs => SearchKind::Bfs,
            Mechanism::Dfs => SearchKind::Dfs,
            Mechanism::Ap => SearchKind::ApproxLen1,
        }
    }

    pub fn in_mode(self, mode: Mode) -> MechanismKind {
        MechanismKind {
            mechanism: self,
            mode,
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mechanism::Bfs => "bfs",
            Mechanism::Dfs => "dfs",
            Mechanism::Ap => "ap",
        })
    }
}

impl FromStr for Mechanism {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bfs" | "m_bfs" => Ok(Mechanism::Bfs),
            "dfs" | "m_dfs" => Ok(Mechanism::Dfs),
            "ap" | "m_ap" => Ok(Mechanism::Ap),
            other => Err(format!(
                "unknown mechanism `{other}` (expected bfs, dfs or ap)"
            )),
        }
    }
}

/// A mechanism together with the manipulation setting it is run in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MechanismKind {
    pub mechanism: Mechanism,
    pub mode: Mode,
}

impl MechanismKind {
    pub const fn new(mechanism: Mechanism, mode: Mode) -> Self {
        MechanismKind { mechanism, mode }
    }

    pub const fn ems(mechanism: Mechanism) -> Self {
        MechanismKind::new(mechanism, Mode::Ems)
    }

    pub const fn ecms(mechanism: Mechanism) -> Self {
        MechanismKind::new(mechanism, Mode::Ecms)
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.mechanism, self.mode)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MechanismError {
    #[error("invalid report: {}", join(.0))]
    InvalidReport(Vec<Violation>),
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub matching: Matching,
    pub utilities: UtilityVector,
}

/// Runs `kind` on a validated report; utilities use the instance's values.
pub fn run(
    instance: &Instance,
    report: &Report,
    kind: MechanismKind,
) -> Result<Outcome, MechanismError> {
    let violations = validate_report(instance, report, kind.mode);
    if !violations.is_empty() {
        return Err(MechanismError::InvalidReport(violations));
    }
    let caps = report.effective_capacities(instance, kind.mode);
    Ok(outcome(instance, &report.edges, caps, kind.mechanism))
}

pub(crate) fn outcome(
    instance: &Instance,
    edges: &[TaskSet],
    caps: &[usize],
    mechanism: Mechanism,
) -> Outcome {
    let matching = engine::solve(edges, caps, instance.values(), mechanism.search());
    let utilities = utilities_unchecked(instance.values(), instance.agent_count(), &matching);
    Outcome {
        matching,
        utilities,
    }
}

/// Evidence that one agent gains by withholding a single true edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingleEdgeWitness {
    pub agent: AgentId,
    pub hidden: TaskId,
    pub truthful_utility: Value,
    pub manipulated_utility: Value,
    pub gain: Value,
}

/// Scans agents in priority order and, for each, every single edge it could
/// hide (keeping at least one), returning the first strictly profitable one.
pub fn best_single_edge_hide(
    instance: &Instance,
    kind: MechanismKind,
) -> Option<SingleEdgeWitness> {
    let truthful = Report::truthful(instance, kind.mode);
    let caps = truthful.effective_capacities(instance, kind.mode);
    let base = outcome(instance, &truthful.edges, caps, kind.mechanism);
    for agent in instance.agents() {
        let tasks = instance.tasks_of(agent);
        if tasks.len() < 2 {
            continue;
        }
        let before = base.utilities.of(agent);
        for &hidden in tasks {
            let mut edges = truthful.edges.clone();
            edges[agent.0].remove(&hidden);
            let after = outcome(instance, &edges, caps, kind.mechanism);
            let after = after.utilities.of(agent);
            if after > before {
                return Some(SingleEdgeWitness {
                    agent,
                    hidden,
                    truthful_utility: before.clone(),
                    manipulated_utility: after.clone(),
                    gain: after - before,
                });
            }
        }
    }
    None
}
