//! Named instances and seeded random instances.
//!
//! Random instances use `ChaCha8Rng::seed_from_u64(seed)` and draw, in this
//! order: one capacity per agent (`1..=max_capacity`), one value per task,
//! then one Bernoulli(`density`) edge per (agent, task) pair in agent-major
//! order. Distinct values are `k / (4m)` for `m` distinct `k` sampled from
//! `1..=4m`; tied values come from `{1, 1/2, 1/4}`.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::solve;
use crate::instance::{AgentId, Instance, TaskId, TaskSet};
use crate::mechanism::Mechanism;
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureId {
    Thm1Impossibility,
    Thm3Tightness,
    Ex1Collusion,
    Ex2OrderDependence,
    Thm8Poa,
    Thm9LowerBound,
    AppExBfsVsDfs,
    AppExClasses,
    DegreeLeqCapacityFamily,
    CompleteContestedFamily,
}

impl FixtureId {
    pub const ALL: [FixtureId; 10] = [
        FixtureId::Thm1Impossibility,
        FixtureId::Thm3Tightness,
        FixtureId::Ex1Collusion,
        FixtureId::Ex2OrderDependence,
        FixtureId::Thm8Poa,
        FixtureId::Thm9LowerBound,
        FixtureId::AppExBfsVsDfs,
        FixtureId::AppExClasses,
        FixtureId::DegreeLeqCapacityFamily,
        FixtureId::CompleteContestedFamily,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FixtureId::Thm1Impossibility => "thm1_impossibility",
            FixtureId::Thm3Tightness => "thm3_tightness",
            FixtureId::Ex1Collusion => "ex1_collusion",
            FixtureId::Ex2OrderDependence => "ex2_order_dependence",
            FixtureId::Thm8Poa => "thm8_poa",
            FixtureId::Thm9LowerBound => "thm9_lower_bound",
            FixtureId::AppExBfsVsDfs => "app_ex_bfs_vs_dfs",
            FixtureId::AppExClasses => "app_ex_classes",
            FixtureId::DegreeLeqCapacityFamily => "degree_leq_capacity_family",
            FixtureId::CompleteContestedFamily => "complete_contested_family",
        }
    }

    pub fn needs_eps(self) -> bool {
        matches!(
            self,
            FixtureId::Thm3Tightness | FixtureId::Thm8Poa | FixtureId::Thm9LowerBound
        )
    }

    pub fn is_family(self) -> bool {
        matches!(
            self,
            FixtureId::DegreeLeqCapacityFamily | FixtureId::CompleteContestedFamily
        )
    }

    pub fn description(self) -> &'static str {
        match self {
            FixtureId::Thm1Impossibility => {
                "2 agents, 3 tasks (1, 1/10, 1/10): no optimal mechanism is truthful"
            }
            FixtureId::Thm3Tightness => "2 agents, 2 tasks (1+eps, 1), complete graph",
            FixtureId::Ex1Collusion => "3 agents, 2 equal tasks: a1 and a3 collude against M_AP",
            FixtureId::Ex2OrderDependence => {
                "alpha (b=2) plus beta and gamma; values 2^-j; --order permutes priority"
            }
            FixtureId::Thm8Poa => "2 agents, tasks (1+eps, 1), a1 -> {t1, t2}, a2 -> {t1}",
            FixtureId::Thm9LowerBound => {
                "2 agents, tasks (1+eps, 1), both agents only connected to t1"
            }
            FixtureId::AppExBfsVsDfs => "3 agents b=1, tasks (1, 1/2), complete graph",
            FixtureId::AppExClasses => "5 agents in two classes, 3 tasks 3^-j",
            FixtureId::DegreeLeqCapacityFamily => {
                "seeded random instance with every degree <= capacity"
            }
            FixtureId::CompleteContestedFamily => "seeded complete graph with m <= sum(b) - max(b)",
        }
    }
}

impl fmt::Display for FixtureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FixtureId {
    type Err = FixtureError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FixtureId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| FixtureError::UnknownId(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    UnknownId(String),
    #[error("fixture `{0}` needs a positive rational eps")]
    MissingEps(FixtureId),
    #[error("eps must be strictly positive")]
    InvalidEps,
    #[error("order must be a permutation of `a`, `b`, `g` (alpha, beta, gamma), got `{0}`")]
    InvalidOrder(String),
}

/// Optional parameters; which ones matter depends on the fixture.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FixtureParams {
    pub eps: Option<Value>,
    /// Seed for the `*_family` fixtures (default 0).
    pub seed: Option<u64>,
    /// Priority order for `ex2_order_dependence`, e.g. `"gab"` puts gamma first.
    pub order: Option<String>,
}

impl FixtureParams {
    pub fn with_eps(eps: Value) -> Self {
        FixtureParams {
            eps: Some(eps),
            ..Default::default()
        }
    }

    pub fn with_seed(seed: u64) -> Self {
        FixtureParams {
            seed: Some(seed),
            ..Default::default()
        }
    }

    pub fn with_order(order: &str) -> Self {
        FixtureParams {
            order: Some(order.to_owned()),
            ..Default::default()
        }
    }
}

fn sets(lists: &[&[usize]]) -> Vec<TaskSet> {
    lists
        .iter()
        .map(|l| l.iter().map(|&t| TaskId(t)).collect())
        .collect()
}

fn build(capacities: Vec<usize>, values: Vec<Value>, edges: &[&[usize]]) -> Instance {
    Instance::new(capacities, values, sets(edges)).expect("fixture instances are valid")
}

fn eps_of(id: FixtureId, params: &FixtureParams) -> Result<Value, FixtureError> {
    match &params.eps {
        None => Err(FixtureError::MissingEps(id)),
        Some(e) if !e.is_positive() => Err(FixtureError::InvalidEps),
        Some(e) => Ok(e.clone()),
    }
}

/// Constructs the named instance.
pub fn fixture(id: FixtureId, params: &FixtureParams) -> Result<Instance, FixtureError> {
    let one = Value::one;
    Ok(match id {
        FixtureId::Thm1Impossibility => build(
            vec![1, 1],
            vec![one(), Value::ratio(1, 10), Value::ratio(1, 10)],
            &[&[0, 1], &[0, 2]],
        ),
        FixtureId::Thm3Tightness => {
            let eps = eps_of(id, params)?;
            build(vec![1, 1], vec![one() + eps, one()], &[&[0, 1], &[0, 1]])
        }
        FixtureId::Ex1Collusion => build(vec![1, 1, 1], vec![one(), one()], &[&[0, 1], &[1], &[0]]),
        FixtureId::Ex2OrderDependence => {
            let order = params.order.as_deref().unwrap_or("abg");
            ex2(order)?
        }
        FixtureId::Thm8Poa => {
            let eps = eps_of(id, params)?;
            build(vec![1, 1], vec![one() + eps, one()], &[&[0, 1], &[0]])
        }
        FixtureId::Thm9LowerBound => {
            let eps = eps_of(id, params)?;
            build(vec![1, 1], vec![one() + eps, one()], &[&[0], &[0]])
        }
        FixtureId::AppExBfsVsDfs => build(
            vec![1, 1, 1],
            vec![one(), Value::ratio(1, 2)],
            &[&[0, 1], &[0, 1], &[0, 1]],
        ),
        FixtureId::AppExClasses => build(
            vec![2; 5],
            (1..=3).map(|j| Value::inverse_power(3, j)).collect(),
            &[&[0, 1, 2], &[1, 2], &[0, 1, 2], &[0, 1, 2], &[1, 2]],
        ),
        FixtureId::DegreeLeqCapacityFamily => degree_leq_capacity(params.seed.unwrap_or(0)),
        FixtureId::CompleteContestedFamily => complete_contested(params.seed.unwrap_or(0)),
    })
}

/// Alpha (capacity 2, all four tasks), beta (t1) and gamma (t2); `q_j = 2^-j`.
/// `order` lists the agents by priority using `a`, `b` and `g`.
fn ex2(order: &str) -> Result<Instance, FixtureError> {
    let mut chars: Vec<char> = order.chars().collect();
    let bad = || FixtureError::InvalidOrder(order.to_owned());
    if chars.len() != 3 {
        return Err(bad());
    }
    let mut capacities = Vec::new();
    let mut edges: Vec<&[usize]> = Vec::new();
    for c in &chars {
        match c {
            'a' => {
                capacities.push(2);
                edges.push(&[0, 1, 2, 3]);
            }
            'b' => {
                capacities.push(1);
                edges.push(&[0]);
            }
            'g' => {
                capacities.push(1);
                edges.push(&[1]);
            }
            _ => return Err(bad()),
        }
    }
    chars.sort_unstable();
    chars.dedup();
    if chars.len() != 3 {
        return Err(bad());
    }
    let values = (1..=4).map(|j| Value::inverse_power(2, j)).collect();
    Ok(build(capacities, values, &edges))
}

/// The instance a truthful mechanism is pushed to after the complete
/// two-by-two tightness instance: whoever received `t2` no longer has that edge.
pub fn tightness_followup(eps: &Value, t2_holder: AgentId) -> Result<Instance, FixtureError> {
    if !eps.is_positive() {
        return Err(FixtureError::InvalidEps);
    }
    let values = vec![Value::one() + eps, Value::one()];
    let edges: [&[usize]; 2] = match t2_holder.0 {
        0 => [&[0], &[0, 1]],
        _ => [&[0, 1], &[0]],
    };
    Ok(build(vec![1, 1], values, &edges))
}

/// The complete two-by-two tightness instance followed by the instance that
/// removes the `t2` edge of whichever agent `mechanism` assigned `t2`.
pub fn tightness_family(eps: &Value, mechanism: Mechanism) -> Result<Vec<Instance>, FixtureError> {
    let first = fixture(
        FixtureId::Thm3Tightness,
        &FixtureParams::with_eps(eps.clone()),
    )?;
    let out = solve(
        first.edges(),
        first.capacities(),
        first.values(),
        mechanism.search(),
    );
    let mut family = vec![];
    let holder = out.owner_of(TaskId(1));
    family.push(first);
    if let Some(holder) = holder {
        family.push(tightness_followup(eps, holder)?);
    }
    Ok(family)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueMode {
    /// Pairwise distinct values.
    Distinct,
    /// Values drawn from `{1, 1/2, 1/4}`, so ties are common.
    #[default]
    WithTies,
}

impl FromStr for ValueMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "distinct" => Ok(ValueMode::Distinct),
            "ties" | "with_ties" => Ok(ValueMode::WithTies),
            other => Err(format!("unknown value mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub seed: u64,
    pub agents: usize,
    pub tasks: usize,
    pub max_capacity: usize,
    /// Probability of each edge, in `(0, 1]`.
    pub density: f64,
    pub values: ValueMode,
}

impl RandomSpec {
    pub fn new(seed: u64, agents: usize, tasks: usize) -> Self {
        RandomSpec {
            seed,
            agents,
            tasks,
            max_capacity: 2,
            density: 0.5,
            values: ValueMode::WithTies,
        }
    }

    pub fn max_capacity(mut self, b: usize) -> Self {
        self.max_capacity = b;
        self
    }

    pub fn density(mut self, d: f64) -> Self {
        self.density = d;
        self
    }

    pub fn values(mut self, mode: ValueMode) -> Self {
        self.values = mode;
        self
    }
}

const TIED_VALUES: [(u64, u64); 3] = [(1, 1), (1, 2), (1, 4)];

fn draw_values(rng: &mut ChaCha8Rng, m: usize, mode: ValueMode) -> Vec<Value> {
    match mode {
        ValueMode::WithTies => (0..m)
            .map(|_| {
                let (n, d) = TIED_VALUES[rng.gen_range(0..TIED_VALUES.len())];
                Value::ratio(n, d)
            })
            .collect(),
        ValueMode::Distinct => {
            let range = 4 * m.max(1);
            sample(rng, range, m)
                .into_iter()
                .map(|k| Value::ratio(k as u64 + 1, range as u64))
                .collect()
        }
    }
}

/// Seed-deterministic random instance. Agents left without edges are kept.
pub fn random_instance(spec: &RandomSpec) -> Instance {
    assert!(spec.max_capacity >= 1, "capacities are positive");
    assert!(
        spec.density > 0.0 && spec.density <= 1.0,
        "density in (0, 1]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let capacities = (0..spec.agents)
        .map(|_| rng.gen_range(1..=spec.max_capacity))
        .collect();
    let values = draw_values(&mut rng, spec.tasks, spec.values);
    let edges = (0..spec.agents)
        .map(|_| {
            (0..spec.tasks)
                .filter(|_| rng.gen_bool(spec.density))
                .map(TaskId)
                .collect()
        })
        .collect();
    Instance::new(capacities, values, edges).expect("generated instances are valid")
}

/// Random instance whose capacities are raised to at least the degree.
fn degree_leq_capacity(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD3C0_DE00);
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=5);
    let mode = if rng.gen_bool(0.5) {
        ValueMode::Distinct
    } else {
        ValueMode::WithTies
    };
    let base = random_instance(&RandomSpec::new(rng.gen(), n, m).values(mode));
    let capacities = base
        .agents()
        .map(|a| base.degree(a).max(1) + rng.gen_range(0..=1))
        .collect();
    Instance::new(capacities, base.values().to_vec(), base.edges().to_vec()).expect("valid")
}

/// Complete bipartite graph with `m <= Σ b_i - max b_i`.
fn complete_contested(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0_4E57);
    let n = rng.gen_range(2..=4);
    let capacities: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
    let bound = capacities.iter().sum::<usize>() - capacities.iter().max().copied().unwrap_or(0);
    let m = rng.gen_range(1..=bound);
    let mode = if rng.gen_bool(0.5) {
        ValueMode::Distinct
    } else {
        ValueMode::WithTies
    };
    let values = draw_values(&mut rng, m, mode);
    let edges = vec![(0..m).map(TaskId).collect(); n];
    Instance::new(capacities, values, edges).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collusion_fixture_shape() {
        let inst = fixture(FixtureId::Ex1Collusion, &FixtureParams::default()).unwrap();
        assert_eq!(inst.capacities(), &[1, 1, 1]);
        assert_eq!(inst.values(), &[Value::one(), Value::one()]);
        assert_eq!(inst.edge_count(), 4);
        assert!(inst.has_edge(AgentId(2), TaskId(0)));
        assert!(!inst.has_edge(AgentId(2), TaskId(1)));
    }

    #[test]
    fn classes_fixture_shape() {
        let inst = fixture(FixtureId::AppExClasses, &FixtureParams::default()).unwrap();
        assert_eq!(inst.agent_count(), 5);
        assert_eq!(inst.values()[0], Value::ratio(1, 3));
        assert_eq!(inst.values()[2], Value::ratio(1, 27));
        for a in [0, 2, 3] {
            assert_eq!(inst.degree(AgentId(a)), 3);
        }
        for a in [1, 4] {
            assert_eq!(inst.tasks_of(AgentId(a)), &[TaskId(1), TaskId(2)].into());
        }
    }

    #[test]
    fn eps_fixtures() {
        let inst = fixture(
            FixtureId::Thm3Tightness,
            &FixtureParams::with_eps(Value::ratio(1, 100)),
        )
        .unwrap();
        assert_eq!(inst.values(), &[Value::ratio(101, 100), Value::one()]);
        assert_eq!(inst.edge_count(), 4);
        assert_eq!(
            fixture(FixtureId::Thm8Poa, &FixtureParams::default()),
            Err(FixtureError::MissingEps(FixtureId::Thm8Poa))
        );
        assert_eq!(
            fixture(FixtureId::Thm8Poa, &FixtureParams::with_eps(Value::zero())),
            Err(FixtureError::InvalidEps)
        );
    }

    #[test]
    fn ex2_orders() {
        let inst = fixture(FixtureId::Ex2OrderDependence, &FixtureParams::default()).unwrap();
        assert_eq!(inst.capacities(), &[2, 1, 1]);
        let g_first = fixture(
            FixtureId::Ex2OrderDependence,
            &FixtureParams::with_order("gab"),
        )
        .unwrap();
        assert_eq!(g_first.capacities(), &[1, 2, 1]);
        assert_eq!(g_first.tasks_of(AgentId(0)), &[TaskId(1)].into());
        assert!(fixture(
            FixtureId::Ex2OrderDependence,
            &FixtureParams::with_order("aab")
        )
        .is_err());
        assert!(fixture(
            FixtureId::Ex2OrderDependence,
            &FixtureParams::with_order("ab")
        )
        .is_err());
    }

    #[test]
    fn names_round_trip() {
        for id in FixtureId::ALL {
            assert_eq!(id.name().parse::<FixtureId>().unwrap(), id);
        }
        assert!("thm99".parse::<FixtureId>().is_err());
    }

    #[test]
    fn random_is_seed_deterministic() {
        let spec = RandomSpec::new(42, 4, 5);
        assert_eq!(random_instance(&spec), random_instance(&spec));
        let other = random_instance(&RandomSpec::new(43, 4, 5));
        assert_ne!(random_instance(&spec), other);
    }

    #[test]
    fn distinct_mode_is_distinct() {
        for seed in 0..200 {
            let inst = random_instance(&RandomSpec::new(seed, 3, 6).values(ValueMode::Distinct));
            let mut v = inst.values().to_vec();
            v.sort();
            v.dedup();
            assert_eq!(v.len(), 6);
        }
    }

    #[test]
    fn generated_instances_are_valid() {
        for seed in 0..1000 {
            let inst = random_instance(&RandomSpec::new(seed, 4, 4));
            let rebuilt = Instance::new(
                inst.capacities().to_vec(),
                inst.values().to_vec(),
                inst.edges().to_vec(),
            )
            .expect("generated instance passes validation");
            assert_eq!(rebuilt, inst);
            assert!(inst.capacities().iter().all(|&b| (1..=2).contains(&b)));
            assert!(inst.values().iter().all(Value::is_positive));
        }
    }

    #[test]
    fn tightness_family_drops_the_holders_edge() {
        let fam = tightness_family(&Value::ratio(1, 10), Mechanism::Ap).unwrap();
        assert_eq!(fam.len(), 2);
        assert_eq!(fam[1].tasks_of(AgentId(1)), &[TaskId(0)].into());
        assert_eq!(fam[1].degree(AgentId(0)), 2);
    }

    #[test]
    fn families_satisfy_their_conditions() {
        for seed in 0..100 {
            let d = fixture(
                FixtureId::DegreeLeqCapacityFamily,
                &FixtureParams::with_seed(seed),
            )
            .unwrap();
            assert!(d.agents().all(|a| d.degree(a) <= d.capacity(a)));
            let c = fixture(
                FixtureId::CompleteContestedFamily,
                &FixtureParams::with_seed(seed),
            )
            .unwrap();
            let sum: usize = c.capacities().iter().sum();
            let max = *c.capacities().iter().max().unwrap();
            assert!(c.task_count() <= sum - max);
            assert_eq!(c.edge_count(), c.agent_count() * c.task_count());
        }
    }

    #[test]
    fn followup_removes_holder_edge() {
        let f = tightness_followup(&Value::ratio(1, 10), AgentId(1)).unwrap();
        assert_eq!(f.edges()[0], [TaskId(0), TaskId(1)].into());
        assert_eq!(f.edges()[1], [TaskId(0)].into());
    }
}
