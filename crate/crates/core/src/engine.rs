//! Augmenting-path vertex-weighted b-matching.
//!
//! Tasks are processed once each, in decreasing value with ties broken by
//! ascending task index. For every task the engine looks for an augmenting
//! path that starts at it; when one exists the current matching is replaced
//! by its symmetric difference with the path, otherwise the task stays
//! unmatched for good.
//!
//! Three path searches are supported:
//!
//! * [`SearchKind::Bfs`] returns a shortest augmenting path. Agents adjacent
//!   to a task are discovered in ascending index, and the tasks held by a
//!   saturated agent are expanded in ascending index.
//! * [`SearchKind::Dfs`] returns the first path found by a depth-first walk
//!   using the same neighbour orders.
//! * [`SearchKind::ApproxLen1`] only admits paths of length one, i.e. the
//!   task goes to its lowest-index unsaturated neighbour or to nobody.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{AgentId, Matching, TaskId, TaskSet};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchKind {
    Bfs,
    Dfs,
    ApproxLen1,
}

impl fmt::Display for SearchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchKind::Bfs => "bfs",
            SearchKind::Dfs => "dfs",
            SearchKind::ApproxLen1 => "approx_len1",
        })
    }
}

/// An alternating path `t0 - a0 - t1 - a1 - ... - tk - ak`.
///
/// `(tk, ak)` edges are outside the matching, `(ak, tk+1)` edges are inside
/// it; every agent but the last is saturated and the last one is not.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AugmentingPath {
    tasks: Vec<TaskId>,
    agents: Vec<AgentId>,
}

impl AugmentingPath {
    /// Builds a path from its task and agent sequences, which must have the
    /// same non-zero length.
    pub fn new(tasks: Vec<TaskId>, agents: Vec<AgentId>) -> Option<Self> {
        if tasks.is_empty() || tasks.len() != agents.len() {
            return None;
        }
        Some(AugmentingPath { tasks, agents })
    }

    pub fn start(&self) -> TaskId {
        self.tasks[0]
    }

    pub fn end(&self) -> AgentId {
        *self.agents.last().expect("paths are non-empty")
    }

    pub fn tasks(&self) -> &[TaskId] {
        &self.tasks
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    /// Number of edges; always odd.
    pub fn len(&self) -> usize {
        2 * self.tasks.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(agent, task, in_matching)` in path order.
    pub fn edges(&self) -> impl Iterator<Item = (AgentId, TaskId, bool)> + '_ {
        (0..self.len()).map(move |e| {
            let k = e / 2;
            if e % 2 == 0 {
                (self.agents[k], self.tasks[k], false)
            } else {
                (self.agents[k], self.tasks[k + 1], true)
            }
        })
    }
}

impl fmt::Display for AugmentingPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tasks[0])?;
        for k in 0..self.tasks.len() {
            write!(f, " - {}", self.agents[k])?;
            if k + 1 < self.tasks.len() {
                write!(f, " - {}", self.tasks[k + 1])?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("path starts at {0}, which is already matched")]
    StartMatched(TaskId),
    #[error("edge ({0}, {1}) is not in the graph")]
    MissingEdge(AgentId, TaskId),
    #[error("edge ({0}, {1}) should be outside the matching")]
    ExpectedFree(AgentId, TaskId),
    #[error("edge ({0}, {1}) should belong to the matching")]
    ExpectedMatched(AgentId, TaskId),
    #[error("interior agent {0} is not saturated")]
    InteriorUnsaturated(AgentId),
    #[error("terminal agent {0} is saturated")]
    TerminalSaturated(AgentId),
    #[error("agent {0} appears twice on the path")]
    RepeatedAgent(AgentId),
    #[error("index out of range")]
    OutOfRange,
}

/// Task indices sorted by decreasing value, ties by ascending index.
pub fn processing_order(values: &[Value]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    // stable: equal values keep ascending index order
    order.sort_by(|&a, &b| values[b].cmp(&values[a]));
    order
}

/// For each task, the agents declaring it in ascending order.
pub fn task_adjacency(edges: &[TaskSet], task_count: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); task_count];
    for (a, set) in edges.iter().enumerate() {
        for t in set {
            adj[t.0].push(a);
        }
    }
    adj
}

/// Mutable search state over a fixed declared graph.
pub(crate) struct Engine<'g> {
    task_agents: &'g [Vec<usize>],
    caps: &'g [usize],
    owner: Vec<Option<usize>>,
    held: Vec<Vec<usize>>,
    visited: Vec<bool>,
}

/// Internal path representation, raw indices.
#[derive(Debug, Default)]
pub(crate) struct RawPath {
    tasks: Vec<usize>,
    agents: Vec<usize>,
}

impl RawPath {
    fn clear(&mut self) {
        self.tasks.clear();
        self.agents.clear();
    }

    fn to_public(&self) -> AugmentingPath {
        AugmentingPath {
            tasks: self.tasks.iter().map(|&t| TaskId(t)).collect(),
            agents: self.agents.iter().map(|&a| AgentId(a)).collect(),
        }
    }
}

impl<'g> Engine<'g> {
    pub(crate) fn new(task_agents: &'g [Vec<usize>], caps: &'g [usize]) -> Self {
        Engine {
            task_agents,
            caps,
            owner: vec![None; task_agents.len()],
            held: vec![Vec::new(); caps.len()],
            visited: vec![false; caps.len()],
        }
    }

    fn load(&mut self, matching: &Matching) {
        for &(a, t) in matching.pairs() {
            self.owner[t.0] = Some(a.0);
            self.held[a.0].push(t.0);
        }
        // pairs iterate agent-major with ascending tasks, so `held` is sorted
    }

    #[inline]
    fn unsaturated(&self, a: usize) -> bool {
        self.held[a].len() < self.caps[a]
    }

    pub(crate) fn owners(&self) -> &[Option<usize>] {
        &self.owner
    }

    pub(crate) fn into_owners(self) -> Vec<Option<usize>> {
        self.owner
    }

    /// Fills `path` and returns true when an augmenting path from `task` exists.
    fn search(&mut self, task: usize, kind: SearchKind, path: &mut RawPath) -> bool {
        path.clear();
        if self.owner[task].is_some() {
            return false;
        }
        match kind {
            SearchKind::ApproxLen1 => {
                let found = self.task_agents[task]
                    .iter()
                    .copied()
                    .find(|&a| self.unsaturated(a));
                if let Some(a) = found {
                    path.tasks.push(task);
                    path.agents.push(a);
                }
                found.is_some()
            }
            SearchKind::Bfs => self.bfs(task, path),
            SearchKind::Dfs => {
                self.visited.iter_mut().for_each(|v| *v = false);
                self.dfs(task, path)
            }
        }
    }

    fn dfs(&mut self, task: usize, path: &mut RawPath) -> bool {
        for idx in 0..self.task_agents[task].len() {
            let a = self.task_agents[task][idx];
            if self.visited[a] || self.owner[task] == Some(a) {
                continue;
            }
            self.visited[a] = true;
            path.tasks.push(task);
            path.agents.push(a);
            if self.unsaturated(a) {
                return true;
            }
            for k in 0..self.held[a].len() {
                let next = self.held[a][k];
                if self.dfs(next, path) {
                    return true;
                }
            }
            path.tasks.pop();
            path.agents.pop();
        }
        false
    }

    fn bfs(&mut self, start: usize, path: &mut RawPath) -> bool {
        const ROOT: usize = usize::MAX;
        let n = self.caps.len();
        // parent[a] = (previous agent or ROOT, task through which `a` was reached)
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut queue = VecDeque::new();
        let mut end = None;

        'outer: {
            for &a in &self.task_agents[start] {
                parent[a] = Some((ROOT, start));
                if self.unsaturated(a) {
                    end = Some(a);
                    break 'outer;
                }
                queue.push_back(a);
            }
            while let Some(a) = queue.pop_front() {
                for &t in &self.held[a] {
                    for &next in &self.task_agents[t] {
                        if next == a || parent[next].is_some() {
                            continue;
                        }
                        parent[next] = Some((a, t));
                        if self.unsaturated(next) {
                            end = Some(next);
                            break 'outer;
                        }
                        queue.push_back(next);
                    }
                }
            }
        }

        let Some(mut a) = end else {
            return false;
        };
        loop {
            let (prev, t) = parent[a].expect("reached agents have parents");
            path.agents.push(a);
            path.tasks.push(t);
            if prev == ROOT {
                break;
            }
            a = prev;
        }
        path.agents.reverse();
        path.tasks.reverse();
        true
    }

    /// Symmetric difference with an augmenting path found by `search`.
    fn augment(&mut self, path: &RawPath) {
        for k in 0..path.tasks.len() {
            let a = path.agents[k];
            let gained = path.tasks[k];
            if let Some(&lost) = path.tasks.get(k + 1) {
                let pos = self.held[a]
                    .binary_search(&lost)
                    .expect("matched edge on path");
                self.held[a].remove(pos);
            }
            let pos = self.held[a].binary_search(&gained).unwrap_err();
            self.held[a].insert(pos, gained);
            self.owner[gained] = Some(a);
        }
    }

    /// Runs the whole routine over `order`, reporting each step to `observe`.
    pub(crate) fn run(
        &mut self,
        order: &[usize],
        kind: SearchKind,
        mut observe: impl FnMut(usize, Option<&RawPath>),
    ) {
        let mut path = RawPath::default();
        for &task in order {
            if self.search(task, kind, &mut path) {
                self.augment(&path);
                observe(task, Some(&path));
            } else {
                observe(task, None);
            }
        }
    }
}

/// Task -> owner table for the declared graph; the hot path used by the
/// mechanisms and the strategic enumerations.
pub(crate) fn allocate(
    task_agents: &[Vec<usize>],
    caps: &[usize],
    order: &[usize],
    kind: SearchKind,
) -> Vec<Option<usize>> {
    let mut engine = Engine::new(task_agents, caps);
    engine.run(order, kind, |_, _| {});
    engine.into_owners()
}

/// Runs the augmenting-path routine on the declared edges.
///
/// `edges[i]` are the tasks agent `i` declares and `capacities[i]` is the
/// capacity the mechanism honours for it. With [`SearchKind::Bfs`] or
/// [`SearchKind::Dfs`] the result is a maximum-value b-matching; with
/// [`SearchKind::ApproxLen1`] it is worth at least half of the maximum.
pub fn solve(
    edges: &[TaskSet],
    capacities: &[usize],
    values: &[Value],
    kind: SearchKind,
) -> Matching {
    assert_eq!(edges.len(), capacities.len(), "one capacity per agent");
    let adj = task_adjacency(edges, values.len());
    let order = processing_order(values);
    Matching::from_owners(&allocate(&adj, capacities, &order, kind))
}

/// One iteration of the routine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub task: TaskId,
    pub path: Option<AugmentingPath>,
    /// Matching after this step.
    pub matching: Matching,
}

/// Like [`solve`] but records every intermediate matching.
pub fn solve_traced(
    edges: &[TaskSet],
    capacities: &[usize],
    values: &[Value],
    kind: SearchKind,
) -> Vec<TraceStep> {
    let adj = task_adjacency(edges, values.len());
    let order = processing_order(values);
    let mut engine = Engine::new(&adj, capacities);
    let mut steps = Vec::with_capacity(order.len());
    let mut path = RawPath::default();
    for &task in &order {
        let found = engine.search(task, kind, &mut path);
        if found {
            engine.augment(&path);
        }
        steps.push(TraceStep {
            task: TaskId(task),
            path: found.then(|| path.to_public()),
            matching: Matching::from_owners(engine.owners()),
        });
    }
    steps
}

/// Searches for an augmenting path starting at the unmatched `task`.
///
/// Returns `None` when no such path exists or when `task` is already matched.
/// `current` must be a b-matching of the given graph.
pub fn find_augmenting_path(
    task: TaskId,
    current: &Matching,
    edges: &[TaskSet],
    capacities: &[usize],
    task_count: usize,
    kind: SearchKind,
) -> Option<AugmentingPath> {
    if task.0 >= task_count {
        return None;
    }
    let adj = task_adjacency(edges, task_count);
    let mut engine = Engine::new(&adj, capacities);
    engine.load(current);
    let mut path = RawPath::default();
    engine
        .search(task.0, kind, &mut path)
        .then(|| path.to_public())
}

/// `current ⊕ path`, after checking that `path` is augmenting for `current`.
pub fn apply_path(
    current: &Matching,
    path: &AugmentingPath,
    edges: &[TaskSet],
    capacities: &[usize],
) -> Result<Matching, PathError> {
    let load = |a: AgentId| current.load_of(a);
    for (&a, &t) in path.agents.iter().zip(&path.tasks) {
        if a.0 >= edges.len() || a.0 >= capacities.len() {
            return Err(PathError::OutOfRange);
        }
        if !edges[a.0].contains(&t) {
            return Err(PathError::MissingEdge(a, t));
        }
    }
    if current.owner_of(path.start()).is_some() {
        return Err(PathError::StartMatched(path.start()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &a in &path.agents {
        if !seen.insert(a) {
            return Err(PathError::RepeatedAgent(a));
        }
    }
    for (a, t, inside) in path.edges() {
        match (inside, current.contains(a, t)) {
            (false, true) => return Err(PathError::ExpectedFree(a, t)),
            (true, false) => return Err(PathError::ExpectedMatched(a, t)),
            _ => {}
        }
    }
    let (last, interior) = path.agents.split_last().expect("non-empty");
    if let Some(&a) = interior.iter().find(|&&a| load(a) < capacities[a.0]) {
        return Err(PathError::InteriorUnsaturated(a));
    }
    if load(*last) >= capacities[last.0] {
        return Err(PathError::TerminalSaturated(*last));
    }

    let mut next = current.clone();
    for (a, t, inside) in path.edges() {
        if inside {
            next.remove(a, t);
        } else {
            next.insert(a, t);
        }
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(lists: &[&[usize]]) -> Vec<TaskSet> {
        lists
            .iter()
            .map(|l| l.iter().map(|&t| TaskId(t)).collect())
            .collect()
    }

    fn vals(v: &[(u64, u64)]) -> Vec<Value> {
        v.iter().map(|&(n, d)| Value::ratio(n, d)).collect()
    }

    fn m(pairs: &[(usize, usize)]) -> Matching {
        Matching::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn bfs_and_dfs_differ_on_complete_three_by_two() {
        let edges = sets(&[&[0, 1], &[0, 1], &[0, 1]]);
        let caps = [1, 1, 1];
        let values = vals(&[(1, 1), (1, 2)]);
        assert_eq!(
            solve(&edges, &caps, &values, SearchKind::Bfs),
            m(&[(0, 0), (1, 1)])
        );
        assert_eq!(
            solve(&edges, &caps, &values, SearchKind::Dfs),
            m(&[(0, 1), (1, 0)])
        );
        assert_eq!(
            solve(&edges, &caps, &values, SearchKind::ApproxLen1),
            m(&[(0, 0), (1, 1)])
        );
    }

    #[test]
    fn dfs_reroutes_through_saturated_first_agent() {
        let edges = sets(&[&[0, 1], &[0, 1], &[0, 1]]);
        let caps = [1, 1, 1];
        let after_first = m(&[(0, 0)]);
        let p = find_augmenting_path(TaskId(1), &after_first, &edges, &caps, 2, SearchKind::Dfs)
            .unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.tasks(), &[TaskId(1), TaskId(0)]);
        assert_eq!(p.agents(), &[AgentId(0), AgentId(1)]);
        let bfs = find_augmenting_path(TaskId(1), &after_first, &edges, &caps, 2, SearchKind::Bfs)
            .unwrap();
        assert_eq!(bfs.len(), 1);
        assert_eq!(bfs.end(), AgentId(1));
    }

    #[test]
    fn approximation_tightness_instance() {
        // q = (1 + 1/10, 1); a1 -> {t1, t2}, a2 -> {t1}
        let edges = sets(&[&[0, 1], &[0]]);
        let caps = [1, 1];
        let values = vals(&[(11, 10), (1, 1)]);
        assert_eq!(
            solve(&edges, &caps, &values, SearchKind::ApproxLen1),
            m(&[(0, 0)])
        );
        assert_eq!(
            solve(&edges, &caps, &values, SearchKind::Bfs),
            m(&[(0, 1), (1, 0)])
        );
        assert_eq!(
            solve(&edges, &caps, &values, SearchKind::Dfs),
            m(&[(0, 1), (1, 0)])
        );
    }

    #[test]
    fn single_agent_takes_everything() {
        let edges = sets(&[&[0, 1, 2]]);
        let values = vals(&[(1, 3), (1, 1), (1, 2)]);
        for kind in [SearchKind::Bfs, SearchKind::Dfs, SearchKind::ApproxLen1] {
            assert_eq!(
                solve(&edges, &[3], &values, kind),
                m(&[(0, 0), (0, 1), (0, 2)])
            );
            assert_eq!(solve(&edges, &[5], &values, kind).len(), 3);
        }
    }

    #[test]
    fn base_case_and_isolated_task() {
        let edges = sets(&[&[0], &[]]);
        let p = find_augmenting_path(
            TaskId(0),
            &Matching::new(),
            &edges,
            &[1, 1],
            2,
            SearchKind::Bfs,
        )
        .unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!((p.start(), p.end()), (TaskId(0), AgentId(0)));
        for kind in [SearchKind::Bfs, SearchKind::Dfs, SearchKind::ApproxLen1] {
            assert!(
                find_augmenting_path(TaskId(1), &Matching::new(), &edges, &[1, 1], 2, kind)
                    .is_none()
            );
        }
    }

    #[test]
    fn matched_task_has_no_path() {
        let edges = sets(&[&[0], &[0]]);
        assert!(find_augmenting_path(
            TaskId(0),
            &m(&[(0, 0)]),
            &edges,
            &[1, 1],
            1,
            SearchKind::Bfs
        )
        .is_none());
    }

    #[test]
    fn apply_path_examples() {
        let edges = sets(&[&[0, 1], &[0]]);
        let caps = [1, 1];
        let single = AugmentingPath::new(vec![TaskId(0)], vec![AgentId(0)]).unwrap();
        assert_eq!(
            apply_path(&Matching::new(), &single, &edges, &caps).unwrap(),
            m(&[(0, 0)])
        );

        let long =
            AugmentingPath::new(vec![TaskId(1), TaskId(0)], vec![AgentId(0), AgentId(1)]).unwrap();
        let once = apply_path(&m(&[(0, 0)]), &long, &edges, &caps).unwrap();
        assert_eq!(once, m(&[(0, 1), (1, 0)]));
        assert!(apply_path(&once, &long, &edges, &caps).is_err());
        assert_eq!(
            apply_path(&m(&[(0, 0)]), &single, &edges, &caps),
            Err(PathError::StartMatched(TaskId(0)))
        );
    }

    #[test]
    fn apply_path_rejects_non_augmenting() {
        let edges = sets(&[&[0, 1], &[0, 1]]);
        let caps = [1, 1];
        // interior agent unsaturated
        let p =
            AugmentingPath::new(vec![TaskId(1), TaskId(0)], vec![AgentId(0), AgentId(1)]).unwrap();
        assert!(matches!(
            apply_path(&m(&[(1, 0)]), &p, &edges, &caps),
            Err(PathError::ExpectedMatched(..))
        ));
        // terminal saturated
        let q = AugmentingPath::new(vec![TaskId(1)], vec![AgentId(0)]).unwrap();
        assert_eq!(
            apply_path(&m(&[(0, 0)]), &q, &edges, &caps),
            Err(PathError::TerminalSaturated(AgentId(0)))
        );
        // not an edge
        let r = AugmentingPath::new(vec![TaskId(1)], vec![AgentId(0)]).unwrap();
        assert!(matches!(
            apply_path(&Matching::new(), &r, &sets(&[&[0], &[0]]), &caps),
            Err(PathError::MissingEdge(..))
        ));
    }

    #[test]
    fn ties_processed_by_index() {
        assert_eq!(
            processing_order(&vals(&[(1, 2), (1, 1), (1, 2), (1, 1)])),
            vec![1, 3, 0, 2]
        );
    }

    #[test]
    fn trace_is_monotone_in_matched_tasks() {
        let edges = sets(&[&[0, 1], &[0, 2]]);
        let values = vals(&[(1, 1), (1, 10), (1, 10)]);
        let steps = solve_traced(&edges, &[1, 1], &values, SearchKind::Bfs);
        assert_eq!(steps.len(), 3);
        assert_eq!(steps[1].path.as_ref().map(AugmentingPath::len), Some(3));
        assert!(steps[2].path.is_none());
        assert_eq!(steps[2].matching, m(&[(0, 1), (1, 0)]));
    }

    #[test]
    fn path_display() {
        let p =
            AugmentingPath::new(vec![TaskId(1), TaskId(0)], vec![AgentId(0), AgentId(1)]).unwrap();
        assert_eq!(p.to_string(), "t2 - a1 - t1 - a2");
    }
}
