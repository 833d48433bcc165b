use std::collections::BTreeSet;

use serde::Serialize;

use crate::instance::{AgentId, Instance, Matching, Mode, StrategyProfile, TaskId, TaskSet};

/// First-come-first-served policies: in priority order, each agent claims its
/// `b_i` most valuable connected tasks among those nobody before it claimed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FcfsPolicy {
    sets: Vec<TaskSet>,
}

impl FcfsPolicy {
    pub fn of(&self, agent: AgentId) -> &TaskSet {
        &self.sets[agent.0]
    }

    pub fn sets(&self) -> &[TaskSet] {
        &self.sets
    }

    /// `∪_i FCFSP_i` as a set of agent-task pairs.
    pub fn union(&self) -> Matching {
        self.sets
            .iter()
            .enumerate()
            .flat_map(|(a, set)| set.iter().map(move |&t| (AgentId(a), t)))
            .collect()
    }

    /// Every agent reports its policy, and its true capacity in ECMS.
    /// Agents whose policy is empty report nothing.
    pub fn profile(&self, instance: &Instance, mode: Mode) -> StrategyProfile {
        StrategyProfile {
            edges: self.sets.clone(),
            capacities: (mode == Mode::Ecms).then(|| instance.capacities().to_vec()),
        }
    }
}

pub fn fcfs_policies(instance: &Instance) -> FcfsPolicy {
    let values = instance.values();
    let mut remaining: BTreeSet<TaskId> = (0..instance.task_count()).map(TaskId).collect();
    let mut sets = Vec::with_capacity(instance.agent_count());
    for agent in instance.agents() {
        let mut open: Vec<TaskId> = instance
            .tasks_of(agent)
            .iter()
            .copied()
            .filter(|t| remaining.contains(t))
            .collect();
        // same order the engine processes tasks in
        open.sort_by(|a, b| values[b.0].cmp(&values[a.0]).then(a.cmp(b)));
        open.truncate(instance.capacity(agent));
        for t in &open {
            remaining.remove(t);
        }
        sets.push(open.into_iter().collect());
    }
    FcfsPolicy { sets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture, FixtureId, FixtureParams};
    use crate::value::Value;

    fn set(ts: &[usize]) -> TaskSet {
        ts.iter().map(|&t| TaskId(t)).collect()
    }

    #[test]
    fn order_dependence_alpha_first() {
        let inst = fixture(FixtureId::Ex2OrderDependence, &FixtureParams::default()).unwrap();
        let p = fcfs_policies(&inst);
        assert_eq!(p.of(AgentId(0)), &set(&[0, 1]));
        assert!(p.of(AgentId(1)).is_empty());
        assert!(p.of(AgentId(2)).is_empty());
        assert_eq!(p.union(), Matching::from_pairs([(0, 0), (0, 1)]));
    }

    #[test]
    fn disjoint_agents_take_their_own_top() {
        let values = vec![
            Value::ratio(1, 4),
            Value::one(),
            Value::ratio(1, 2),
            Value::ratio(1, 3),
            Value::one(),
        ];
        let inst = Instance::from_lists(vec![2, 1], values, &[&[0, 1, 2], &[3, 4]]).unwrap();
        let p = fcfs_policies(&inst);
        assert_eq!(p.of(AgentId(0)), &set(&[1, 2]));
        assert_eq!(p.of(AgentId(1)), &set(&[4]));
    }

    #[test]
    fn equal_values_go_by_index() {
        let inst = Instance::from_lists(
            vec![1, 1],
            vec![Value::one(), Value::one()],
            &[&[0, 1], &[0, 1]],
        )
        .unwrap();
        let p = fcfs_policies(&inst);
        assert_eq!(p.of(AgentId(0)), &set(&[0]));
        assert_eq!(p.of(AgentId(1)), &set(&[1]));
    }

    #[test]
    fn profile_carries_true_capacities_in_ecms() {
        let inst = fixture(FixtureId::Ex2OrderDependence, &FixtureParams::default()).unwrap();
        let p = fcfs_policies(&inst);
        assert_eq!(p.profile(&inst, Mode::Ecms).capacities, Some(vec![2, 1, 1]));
        assert_eq!(p.profile(&inst, Mode::Ems).capacities, None);
    }
}
