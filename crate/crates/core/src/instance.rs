//! Problem instances, agent reports, matchings and their JSON forms.
//!
//! Agent index doubles as mechanism priority: agent 0 is explored first.
//! Indices are 0-based both in memory and in files.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub usize);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0 + 1)
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0 + 1)
    }
}

/// A set of tasks declared by (or connected to) one agent.
pub type TaskSet = BTreeSet<TaskId>;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("task value must be positive (task {task})")]
    NonPositiveValue { task: TaskId },
    #[error("agent capacity must be at least 1 (agent {agent})")]
    ZeroCapacity { agent: AgentId },
    #[error("edge ({agent}, task index {task}) is out of range: there are {tasks} tasks")]
    EdgeOutOfRange {
        agent: AgentId,
        task: usize,
        tasks: usize,
    },
    #[error("duplicate edge ({agent}, {task})")]
    DuplicateEdge { agent: AgentId, task: TaskId },
    #[error(
        "capacities and edge lists disagree on the number of agents ({capacities} vs {edges})"
    )]
    AgentCountMismatch { capacities: usize, edges: usize },
}

/// The public problem: capacities, task values and the true edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    capacities: Vec<usize>,
    values: Vec<Value>,
    edges: Vec<TaskSet>,
}

impl Instance {
    pub fn new(
        capacities: Vec<usize>,
        values: Vec<Value>,
        edges: Vec<TaskSet>,
    ) -> Result<Self, InstanceError> {
        if capacities.len() != edges.len() {
            return Err(InstanceError::AgentCountMismatch {
                capacities: capacities.len(),
                edges: edges.len(),
            });
        }
        if let Some(j) = values.iter().position(|q| !q.is_positive()) {
            return Err(InstanceError::NonPositiveValue { task: TaskId(j) });
        }
        if let Some(i) = capacities.iter().position(|&b| b == 0) {
            return Err(InstanceError::ZeroCapacity { agent: AgentId(i) });
        }
        for (i, set) in edges.iter().enumerate() {
            if let Some(t) = set.iter().find(|t| t.0 >= values.len()) {
                return Err(InstanceError::EdgeOutOfRange {
                    agent: AgentId(i),
                    task: t.0,
                    tasks: values.len(),
                });
            }
        }
        Ok(Instance {
            capacities,
            values,
            edges,
        })
    }

    /// Convenience constructor from plain index lists; duplicates are an error.
    pub fn from_lists(
        capacities: Vec<usize>,
        values: Vec<Value>,
        edges: &[&[usize]],
    ) -> Result<Self, InstanceError> {
        let mut sets = Vec::with_capacity(edges.len());
        for (i, list) in edges.iter().enumerate() {
            sets.push(collect_edges(AgentId(i), list.iter().copied())?);
        }
        Instance::new(capacities, values, sets)
    }

    pub fn agent_count(&self) -> usize {
        self.capacities.len()
    }

    pub fn task_count(&self) -> usize {
        self.values.len()
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn capacity(&self, agent: AgentId) -> usize {
        self.capacities[agent.0]
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn value(&self, task: TaskId) -> &Value {
        &self.values[task.0]
    }

    /// True edge sets `T_i`, one per agent.
    pub fn edges(&self) -> &[TaskSet] {
        &self.edges
    }

    pub fn tasks_of(&self, agent: AgentId) -> &TaskSet {
        &self.edges[agent.0]
    }

    pub fn has_edge(&self, agent: AgentId, task: TaskId) -> bool {
        self.edges[agent.0].contains(&task)
    }

    pub fn degree(&self, agent: AgentId) -> usize {
        self.edges[agent.0].len()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agent_count()).map(AgentId)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(BTreeSet::len).sum()
    }

    /// Reads instance JSON from any byte stream.
    pub fn load<R: Read>(mut source: R) -> Result<Self, InstanceError> {
        let mut buf = String::new();
        source.read_to_string(&mut buf)?;
        Instance::from_json(&buf)
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| InstanceError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        file.into_instance()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from(self)).expect("instance serialises")
    }
}

fn collect_edges(
    agent: AgentId,
    tasks: impl Iterator<Item = usize>,
) -> Result<TaskSet, InstanceError> {
    let mut set = TaskSet::new();
    for j in tasks {
        if !set.insert(TaskId(j)) {
            return Err(InstanceError::DuplicateEdge {
                agent,
                task: TaskId(j),
            });
        }
    }
    Ok(set)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskEntry {
    value: Value,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentEntry {
    capacity: usize,
    edges: Vec<usize>,
}

/// On-disk layout: `{"tasks":[{"value":"1/10"}], "agents":[{"capacity":1,"edges":[0]}]}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    tasks: Vec<TaskEntry>,
    agents: Vec<AgentEntry>,
}

impl InstanceFile {
    fn into_instance(self) -> Result<Instance, InstanceError> {
        let values = self.tasks.into_iter().map(|t| t.value).collect();
        let mut capacities = Vec::with_capacity(self.agents.len());
        let mut edges = Vec::with_capacity(self.agents.len());
        for (i, agent) in self.agents.into_iter().enumerate() {
            capacities.push(agent.capacity);
            edges.push(collect_edges(AgentId(i), agent.edges.into_iter())?);
        }
        Instance::new(capacities, values, edges)
    }
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        InstanceFile {
            tasks: inst
                .values
                .iter()
                .map(|v| TaskEntry { value: v.clone() })
                .collect(),
            agents: inst
                .capacities
                .iter()
                .zip(&inst.edges)
                .map(|(&capacity, set)| AgentEntry {
                    capacity,
                    edges: set.iter().map(|t| t.0).collect(),
                })
                .collect(),
        }
    }
}

/// Edge Manipulation Setting or Edge and Capacity Manipulation Setting.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Ems,
    Ecms,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ems => "ems",
            Mode::Ecms => "ecms",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ems" => Ok(Mode::Ems),
            "ecms" => Ok(Mode::Ecms),
            other => Err(format!("unknown mode `{other}` (expected ems or ecms)")),
        }
    }
}

/// What the agents declare. `capacities` is present exactly in ECMS.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Report {
    pub edges: Vec<TaskSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacities: Option<Vec<usize>>,
}

/// A joint strategy choice; structurally the same thing as a report.
pub type StrategyProfile = Report;

impl Report {
    /// Everyone reports everything (and, in ECMS, their real capacity).
    pub fn truthful(instance: &Instance, mode: Mode) -> Self {
        Report {
            edges: instance.edges.clone(),
            capacities: match mode {
                Mode::Ems => None,
                Mode::Ecms => Some(instance.capacities.clone()),
            },
        }
    }

    pub fn mode(&self) -> Mode {
        if self.capacities.is_some() {
            Mode::Ecms
        } else {
            Mode::Ems
        }
    }

    /// The capacities the mechanism will honour for this report.
    pub fn effective_capacities<'a>(&'a self, instance: &'a Instance, mode: Mode) -> &'a [usize] {
        match (mode, &self.capacities) {
            (Mode::Ecms, Some(c)) => c,
            _ => instance.capacities(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// A single reason a report is not a legal strategy profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    AgentCountMismatch {
        expected: usize,
        found: usize,
    },
    FabricatedEdge {
        agent: AgentId,
        task: TaskId,
    },
    EmptyReport {
        agent: AgentId,
    },
    MissingCapacities,
    UnexpectedCapacities,
    ZeroCapacity {
        agent: AgentId,
    },
    CapacityExceedsTrue {
        agent: AgentId,
        declared: usize,
        actual: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AgentCountMismatch { expected, found } => {
                write!(f, "report covers {found} agents, instance has {expected}")
            }
            Violation::FabricatedEdge { agent, task } => {
                write!(f, "fabricated edge ({agent}, {task})")
            }
            Violation::EmptyReport { agent } => {
                write!(f, "agent {agent} reported no edges although it has some")
            }
            Violation::MissingCapacities => write!(f, "ECMS report without declared capacities"),
            Violation::UnexpectedCapacities => write!(f, "EMS report carries declared capacities"),
            Violation::ZeroCapacity { agent } => {
                write!(f, "agent {agent} declared capacity 0")
            }
            Violation::CapacityExceedsTrue {
                agent,
                declared,
                actual,
            } => write!(
                f,
                "capacity exceeds true capacity for {agent} ({declared} > {actual})"
            ),
        }
    }
}

/// Checks the bounded-by-statement rules: declared edges are a non-empty
/// subset of the true ones (agents without edges may report nothing), and in
/// ECMS the declared capacity lies in `1..=b_i`.
pub fn validate_report(instance: &Instance, report: &Report, mode: Mode) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = instance.agent_count();
    if report.edges.len() != n {
        out.push(Violation::AgentCountMismatch {
            expected: n,
            found: report.edges.len(),
        });
        return out;
    }
    for (i, declared) in report.edges.iter().enumerate() {
        let agent = AgentId(i);
        for &task in declared {
            if !instance.has_edge(agent, task) {
                out.push(Violation::FabricatedEdge { agent, task });
            }
        }
        if declared.is_empty() && instance.degree(agent) > 0 {
            out.push(Violation::EmptyReport { agent });
        }
    }
    match (mode, &report.capacities) {
        (Mode::Ems, None) => {}
        (Mode::Ems, Some(_)) => out.push(Violation::UnexpectedCapacities),
        (Mode::Ecms, None) => out.push(Violation::MissingCapacities),
        (Mode::Ecms, Some(caps)) => {
            if caps.len() != n {
                out.push(Violation::AgentCountMismatch {
                    expected: n,
                    found: caps.len(),
                });
            } else {
                for (i, &c) in caps.iter().enumerate() {
                    let agent = AgentId(i);
                    if c == 0 {
                        out.push(Violation::ZeroCapacity { agent });
                    } else if c > instance.capacity(agent) {
                        out.push(Violation::CapacityExceedsTrue {
                            agent,
                            declared: c,
                            actual: instance.capacity(agent),
                        });
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("task {0} is matched more than once")]
    DuplicateTask(TaskId),
    #[error("agent {agent} holds {held} tasks but its capacity is {capacity}")]
    CapacityExceeded {
        agent: AgentId,
        held: usize,
        capacity: usize,
    },
    #[error("pair ({0}, {1}) is not an edge of the instance")]
    NotAnEdge(AgentId, TaskId),
    #[error("pair ({0}, {1}) is out of range")]
    OutOfRange(AgentId, TaskId),
}

/// A set of agent-task pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    pairs: BTreeSet<(AgentId, TaskId)>,
}

impl Matching {
    pub fn new() -> Self {
        Matching::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Matching {
            pairs: pairs
                .into_iter()
                .map(|(a, t)| (AgentId(a), TaskId(t)))
                .collect(),
        }
    }

    /// Builds a matching from a task -> owner table.
    pub fn from_owners(owners: &[Option<usize>]) -> Self {
        Matching {
            pairs: owners
                .iter()
                .enumerate()
                .filter_map(|(t, o)| o.map(|a| (AgentId(a), TaskId(t))))
                .collect(),
        }
    }

    pub fn pairs(&self) -> &BTreeSet<(AgentId, TaskId)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, agent: AgentId, task: TaskId) -> bool {
        self.pairs.contains(&(agent, task))
    }

    pub fn insert(&mut self, agent: AgentId, task: TaskId) -> bool {
        self.pairs.insert((agent, task))
    }

    pub fn remove(&mut self, agent: AgentId, task: TaskId) -> bool {
        self.pairs.remove(&(agent, task))
    }

    pub fn owner_of(&self, task: TaskId) -> Option<AgentId> {
        self.pairs.iter().find(|(_, t)| *t == task).map(|(a, _)| *a)
    }

    pub fn tasks_of(&self, agent: AgentId) -> impl Iterator<Item = TaskId> + '_ {
        self.pairs
            .range((agent, TaskId(0))..=(agent, TaskId(usize::MAX)))
            .map(|(_, t)| *t)
    }

    pub fn load_of(&self, agent: AgentId) -> usize {
        self.tasks_of(agent).count()
    }

    pub fn matched_tasks(&self) -> BTreeSet<TaskId> {
        self.pairs.iter().map(|(_, t)| *t).collect()
    }

    /// Checks the b-matching constraints against the given capacities and,
    /// when supplied, membership of every pair in `edges`.
    pub fn check(
        &self,
        capacities: &[usize],
        edges: Option<&[TaskSet]>,
    ) -> Result<(), MatchingError> {
        let mut seen = BTreeSet::new();
        let mut load = vec![0usize; capacities.len()];
        for &(a, t) in &self.pairs {
            if a.0 >= capacities.len() {
                return Err(MatchingError::OutOfRange(a, t));
            }
            if let Some(edges) = edges {
                if !edges[a.0].contains(&t) {
                    return Err(MatchingError::NotAnEdge(a, t));
                }
            }
            if !seen.insert(t) {
                return Err(MatchingError::DuplicateTask(t));
            }
            load[a.0] += 1;
        }
        for (i, (&held, &capacity)) in load.iter().zip(capacities).enumerate() {
            if held > capacity {
                return Err(MatchingError::CapacityExceeded {
                    agent: AgentId(i),
                    held,
                    capacity,
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatchingFile::from(self)).expect("matching serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let file: MatchingFile = serde_json::from_str(text)?;
        Ok(Matching::from_pairs(
            file.pairs.into_iter().map(|[a, t]| (a, t)),
        ))
    }
}

impl FromIterator<(AgentId, TaskId)> for Matching {
    fn from_iter<I: IntoIterator<Item = (AgentId, TaskId)>>(iter: I) -> Self {
        Matching {
            pairs: iter.into_iter().collect(),
        }
    }
}

impl Serialize for Matching {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatchingFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matching {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = MatchingFile::deserialize(d)?;
        Ok(Matching::from_pairs(
            file.pairs.into_iter().map(|[a, t]| (a, t)),
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct MatchingFile {
    pairs: Vec<[usize; 2]>,
}

impl From<&Matching> for MatchingFile {
    fn from(m: &Matching) -> Self {
        MatchingFile {
            pairs: m.pairs.iter().map(|(a, t)| [a.0, t.0]).collect(),
        }
    }
}

/// Per-agent utilities `w_i` and welfare `w = Σ w_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UtilityVector {
    pub per_agent: Vec<Value>,
    pub welfare: Value,
}

impl UtilityVector {
    pub fn of(&self, agent: AgentId) -> &Value {
        &self.per_agent[agent.0]
    }
}

/// Exact utilities of `matching` under the instance's task values.
///
/// The matching must be a b-matching over a subset of the true edges with
/// respect to the true capacities.
pub fn utilities(instance: &Instance, matching: &Matching) -> Result<UtilityVector, MatchingError> {
    for &(a, t) in matching.pairs() {
        if a.0 >= instance.agent_count() || t.0 >= instance.task_count() {
            return Err(MatchingError::OutOfRange(a, t));
        }
    }
    matching.check(instance.capacities(), Some(instance.edges()))?;
    Ok(utilities_unchecked(
        instance.values(),
        instance.agent_count(),
        matching,
    ))
}

pub(crate) fn utilities_unchecked(
    values: &[Value],
    agents: usize,
    matching: &Matching,
) -> UtilityVector {
    let mut per_agent = vec![Value::zero(); agents];
    for &(a, t) in matching.pairs() {
        per_agent[a.0] += &values[t.0];
    }
    let welfare = per_agent.iter().sum();
    UtilityVector { per_agent, welfare }
}

#[cfg(test)]
mod tests {
    use super::*;

    const THM1: &str = r#"{
        "tasks": [{"value": "1"}, {"value": "1/10"}, {"value": "0.1"}],
        "agents": [{"capacity": 1, "edges": [0, 1]}, {"capacity": 1, "edges": [0, 2]}]
    }"#;

    fn thm1() -> Instance {
        Instance::from_json(THM1).unwrap()
    }

    #[test]
    fn loads_impossibility_instance() {
        let inst = thm1();
        assert_eq!(inst.agent_count(), 2);
        assert_eq!(inst.task_count(), 3);
        assert_eq!(inst.value(TaskId(1)), &Value::ratio(1, 10));
        assert_eq!(inst.value(TaskId(2)), &Value::ratio(1, 10));
        assert!(inst.has_edge(AgentId(1), TaskId(2)));
        assert!(!inst.has_edge(AgentId(0), TaskId(2)));
    }

    #[test]
    fn isolated_agent_without_tasks_is_legal() {
        let inst =
            Instance::from_json(r#"{"tasks": [], "agents": [{"capacity": 1, "edges": []}]}"#)
                .unwrap();
        assert_eq!(inst.agent_count(), 1);
        assert_eq!(inst.task_count(), 0);
    }

    #[test]
    fn zero_value_is_rejected() {
        let err = Instance::from_json(
            r#"{"tasks": [{"value": "1"}, {"value": "0"}], "agents": [{"capacity": 1, "edges": [0]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            InstanceError::NonPositiveValue { task: TaskId(1) }
        ));
        assert!(err.to_string().contains("task value must be positive"));
    }

    #[test]
    fn structural_errors() {
        let out_of_range = Instance::from_json(
            r#"{"tasks": [{"value": "1"}], "agents": [{"capacity": 1, "edges": [3]}]}"#,
        );
        assert!(matches!(
            out_of_range,
            Err(InstanceError::EdgeOutOfRange { task: 3, .. })
        ));
        let dup = Instance::from_json(
            r#"{"tasks": [{"value": "1"}], "agents": [{"capacity": 1, "edges": [0, 0]}]}"#,
        );
        assert!(matches!(dup, Err(InstanceError::DuplicateEdge { .. })));
        let zero_cap = Instance::from_json(
            r#"{"tasks": [{"value": "1"}], "agents": [{"capacity": 0, "edges": [0]}]}"#,
        );
        assert!(matches!(zero_cap, Err(InstanceError::ZeroCapacity { .. })));
        let parse = Instance::from_json("{\"tasks\": [\n oops").unwrap_err();
        match parse {
            InstanceError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Instance::from_json(r#"{"tasks": [{"value": "-1"}], "agents": []}"#).is_err());
    }

    #[test]
    fn validate_report_cases() {
        let inst = thm1();
        let mut report = Report::truthful(&inst, Mode::Ems);
        assert!(validate_report(&inst, &report, Mode::Ems).is_empty());

        report.edges[1] = [TaskId(0)].into();
        assert!(validate_report(&inst, &report, Mode::Ems).is_empty());

        report.edges[1] = [TaskId(1)].into();
        let v = validate_report(&inst, &report, Mode::Ems);
        assert_eq!(
            v,
            vec![Violation::FabricatedEdge {
                agent: AgentId(1),
                task: TaskId(1)
            }]
        );
        assert!(v[0].to_string().contains("fabricated edge"));

        report.edges[1].clear();
        assert_eq!(
            validate_report(&inst, &report, Mode::Ems),
            vec![Violation::EmptyReport { agent: AgentId(1) }]
        );

        let mut ecms = Report::truthful(&inst, Mode::Ecms);
        assert!(validate_report(&inst, &ecms, Mode::Ecms).is_empty());
        ecms.capacities = Some(vec![2, 1]);
        let v = validate_report(&inst, &ecms, Mode::Ecms);
        assert!(v[0].to_string().contains("capacity exceeds true capacity"));
        ecms.capacities = Some(vec![0, 1]);
        assert_eq!(
            validate_report(&inst, &ecms, Mode::Ecms),
            vec![Violation::ZeroCapacity { agent: AgentId(0) }]
        );
        assert_eq!(
            validate_report(&inst, &Report::truthful(&inst, Mode::Ems), Mode::Ecms),
            vec![Violation::MissingCapacities]
        );
    }

    #[test]
    fn utilities_of_the_two_optimal_matchings() {
        let inst = thm1();
        let a = utilities(&inst, &Matching::from_pairs([(0, 0), (1, 2)])).unwrap();
        assert_eq!(a.per_agent, vec![Value::one(), Value::ratio(1, 10)]);
        assert_eq!(a.welfare, Value::ratio(11, 10));
        let b = utilities(&inst, &Matching::from_pairs([(0, 1), (1, 0)])).unwrap();
        assert_eq!(b.welfare, Value::ratio(11, 10));
        let empty = utilities(&inst, &Matching::new()).unwrap();
        assert_eq!(empty.welfare, Value::zero());
        assert!(empty.per_agent.iter().all(Value::is_zero));
    }

    #[test]
    fn utilities_rejects_invalid_matchings() {
        let inst = thm1();
        assert_eq!(
            utilities(&inst, &Matching::from_pairs([(0, 0), (1, 0)])),
            Err(MatchingError::DuplicateTask(TaskId(0)))
        );
        assert!(matches!(
            utilities(&inst, &Matching::from_pairs([(0, 0), (0, 1)])),
            Err(MatchingError::CapacityExceeded { .. })
        ));
        assert!(matches!(
            utilities(&inst, &Matching::from_pairs([(0, 2)])),
            Err(MatchingError::NotAnEdge(..))
        ));
        assert!(matches!(
            utilities(&inst, &Matching::from_pairs([(5, 0)])),
            Err(MatchingError::OutOfRange(..))
        ));
    }

    #[test]
    fn matching_json() {
        let m = Matching::from_pairs([(1, 0), (0, 1)]);
        assert_eq!(m.to_json(), r#"{"pairs":[[0,1],[1,0]]}"#);
        assert_eq!(Matching::from_json(&m.to_json()).unwrap(), m);
        assert_eq!(m.tasks_of(AgentId(0)).collect::<Vec<_>>(), vec![TaskId(1)]);
        assert_eq!(m.owner_of(TaskId(0)), Some(AgentId(1)));
    }

    #[test]
    fn instance_json_round_trip() {
        let inst = thm1();
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }
}
