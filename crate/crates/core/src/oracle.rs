//! Brute-force ground truth for small instances.
//!
//! Nothing here is clever: [`brute_force_mvbm`] tries every way of handing
//! each task to nobody or to one of its neighbours, and
//! [`optimum_agent_major`] independently tries every per-agent subset.

use serde::Serialize;
use thiserror::Error;

use crate::instance::{Instance, Matching, TaskId, TaskSet};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search space of {required} exceeds the enumeration cap {cap}")]
    CapExceeded { required: u128, cap: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub optimum: Value,
    /// Every optimal b-matching, in enumeration order.
    pub matchings: Vec<Matching>,
}

fn task_neighbours(edges: &[TaskSet], task_count: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); task_count];
    for (a, set) in edges.iter().enumerate() {
        for t in set {
            adj[t.0].push(a);
        }
    }
    adj
}

/// Size of the raw task-assignment space, `Π_j (deg(t_j) + 1)`.
pub fn assignment_space(edges: &[TaskSet], task_count: usize) -> u128 {
    task_neighbours(edges, task_count)
        .iter()
        .fold(1u128, |acc, n| acc.saturating_mul(n.len() as u128 + 1))
}

struct TaskMajor<'a> {
    adj: Vec<Vec<usize>>,
    caps: &'a [usize],
    values: &'a [Value],
    load: Vec<usize>,
    owner: Vec<Option<usize>>,
    best: Option<Value>,
    argmax: Vec<Vec<Option<usize>>>,
}

impl TaskMajor<'_> {
    fn go(&mut self, task: usize, acc: &Value) {
        if task == self.values.len() {
            match &self.best {
                Some(b) if acc < b => {}
                Some(b) if acc == b => self.argmax.push(self.owner.clone()),
                _ => {
                    self.best = Some(acc.clone());
                    self.argmax.clear();
                    self.argmax.push(self.owner.clone());
                }
            }
            return;
        }
        self.go(task + 1, acc);
        for k in 0..self.adj[task].len() {
            let a = self.adj[task][k];
            if self.load[a] < self.caps[a] {
                self.load[a] += 1;
                self.owner[task] = Some(a);
                let next = acc + &self.values[task];
                self.go(task + 1, &next);
                self.owner[task] = None;
                self.load[a] -= 1;
            }
        }
    }
}

/// Exact maximum and every maximising b-matching, by task-major enumeration.
pub fn brute_force_mvbm(
    edges: &[TaskSet],
    capacities: &[usize],
    values: &[Value],
    cap: u64,
) -> Result<OracleResult, OracleError> {
    let required = assignment_space(edges, values.len());
    if required > cap as u128 {
        return Err(OracleError::CapExceeded { required, cap });
    }
    let mut search = TaskMajor {
        adj: task_neighbours(edges, values.len()),
        caps: capacities,
        values,
        load: vec![0; capacities.len()],
        owner: vec![None; values.len()],
        best: None,
        argmax: Vec::new(),
    };
    search.go(0, &Value::zero());
    Ok(OracleResult {
        optimum: search.best.unwrap_or_default(),
        matchings: search
            .argmax
            .iter()
            .map(|o| Matching::from_owners(o))
            .collect(),
    })
}

pub fn brute_force_instance(instance: &Instance, cap: u64) -> Result<OracleResult, OracleError> {
    brute_force_mvbm(
        instance.edges(),
        instance.capacities(),
        instance.values(),
        cap,
    )
}

fn binomial_prefix(n: usize, k: usize) -> u128 {
    // Σ_{i=0..=k} C(n, i)
    let mut total = 0u128;
    let mut c = 1u128;
    for i in 0..=k.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    total
}

/// Optimum by choosing, agent after agent, a subset of at most `b_i` still
/// free tasks. Shares no code with [`brute_force_mvbm`].
pub fn optimum_agent_major(
    edges: &[TaskSet],
    capacities: &[usize],
    values: &[Value],
    cap: u64,
) -> Result<Value, OracleError> {
    let required = edges.iter().zip(capacities).fold(1u128, |acc, (set, &b)| {
        acc.saturating_mul(binomial_prefix(set.len(), b))
    });
    if required > cap as u128 {
        return Err(OracleError::CapExceeded { required, cap });
    }
    let lists: Vec<Vec<usize>> = edges
        .iter()
        .map(|s| s.iter().map(|t| t.0).collect())
        .collect();
    let mut taken = vec![false; values.len()];
    Ok(agent_step(0, &lists, capacities, values, &mut taken))
}

fn agent_step(
    agent: usize,
    lists: &[Vec<usize>],
    caps: &[usize],
    values: &[Value],
    taken: &mut [bool],
) -> Value {
    if agent == lists.len() {
        return taken
            .iter()
            .zip(values)
            .filter(|(t, _)| **t)
            .map(|(_, v)| v)
            .sum();
    }
    let mut best = Value::zero();
    choose(agent, 0, caps[agent], lists, caps, values, taken, &mut best);
    best
}

#[allow(clippy::too_many_arguments)]
fn choose(
    agent: usize,
    from: usize,
    room: usize,
    lists: &[Vec<usize>],
    caps: &[usize],
    values: &[Value],
    taken: &mut [bool],
    best: &mut Value,
) {
    let here = agent_step(agent + 1, lists, caps, values, taken);
    if here > *best {
        *best = here;
    }
    if room == 0 {
        return;
    }
    for k in from..lists[agent].len() {
        let t = lists[agent][k];
        if !taken[t] {
            taken[t] = true;
            choose(agent, k + 1, room - 1, lists, caps, values, taken, best);
            taken[t] = false;
        }
    }
}

/// Bounds of an exhaustive sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepLimits {
    pub max_agents: usize,
    pub max_tasks: usize,
    pub max_capacity: usize,
    pub values: Vec<Value>,
}

impl Default for SweepLimits {
    /// `n, m <= 3`, capacities in `{1, 2}`, values in `{1, 1/2, 1/4}`.
    fn default() -> Self {
        SweepLimits {
            max_agents: 3,
            max_tasks: 3,
            max_capacity: 2,
            values: vec![Value::one(), Value::ratio(1, 2), Value::ratio(1, 4)],
        }
    }
}

impl SweepLimits {
    pub fn new(max_agents: usize, max_tasks: usize, max_capacity: usize) -> Self {
        SweepLimits {
            max_agents,
            max_tasks,
            max_capacity,
            ..Default::default()
        }
    }

    pub fn unit_values(mut self) -> Self {
        self.values = vec![Value::one()];
        self
    }
}

#[derive(Debug, Clone)]
struct Block {
    agents: usize,
    tasks: usize,
    start: usize,
    len: usize,
}

/// Every instance with `1..=max_agents` agents, `1..=max_tasks` tasks, every
/// capacity vector over `1..=max_capacity`, every value assignment from the
/// value set and every edge subset. No symmetry reduction. Instances are
/// indexable so the sweep can be split across threads.
#[derive(Debug, Clone)]
pub struct ExhaustiveSweep {
    limits: SweepLimits,
    blocks: Vec<Block>,
    total: usize,
}

impl ExhaustiveSweep {
    pub fn new(limits: SweepLimits) -> Self {
        let mut blocks = Vec::new();
        let mut total = 0usize;
        let k = limits.values.len();
        if limits.max_capacity > 0 && k > 0 {
            for n in 1..=limits.max_agents {
                for m in 1..=limits.max_tasks {
                    let len =
                        (1usize << (n * m)) * limits.max_capacity.pow(n as u32) * k.pow(m as u32);
                    blocks.push(Block {
                        agents: n,
                        tasks: m,
                        start: total,
                        len,
                    });
                    total += len;
                }
            }
        }
        ExhaustiveSweep {
            limits,
            blocks,
            total,
        }
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn limits(&self) -> &SweepLimits {
        &self.limits
    }

    /// The `index`-th instance. Within a size block the edge mask varies
    /// fastest, then the value assignment, then the capacity vector.
    pub fn get(&self, index: usize) -> Option<Instance> {
        let block = self
            .blocks
            .iter()
            .find(|b| index >= b.start && index < b.start + b.len)?;
        let mut rest = index - block.start;
        let (n, m) = (block.agents, block.tasks);
        let edge_space = 1usize << (n * m);
        let mask = rest % edge_space;
        rest /= edge_space;
        let k = self.limits.values.len();
        let mut values = Vec::with_capacity(m);
        for _ in 0..m {
            values.push(self.limits.values[rest % k].clone());
            rest /= k;
        }
        let mut capacities = Vec::with_capacity(n);
        for _ in 0..n {
            capacities.push(rest % self.limits.max_capacity + 1);
            rest /= self.limits.max_capacity;
        }
        let edges = (0..n)
            .map(|a| {
                (0..m)
                    .filter(|t| mask >> (a * m + t) & 1 == 1)
                    .map(TaskId)
                    .collect()
            })
            .collect();
        Some(Instance::new(capacities, values, edges).expect("sweep instances are valid"))
    }

    pub fn iter(&self) -> impl Iterator<Item = Instance> + '_ {
        (0..self.total).map(move |i| self.get(i).expect("index in range"))
    }
}

/// Stream of every instance within `limits`.
pub fn exhaustive_instance_sweep(limits: SweepLimits) -> impl Iterator<Item = Instance> {
    let sweep = ExhaustiveSweep::new(limits);
    (0..sweep.len()).map(move |i| sweep.get(i).expect("index in range"))
}
