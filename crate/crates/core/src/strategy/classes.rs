use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::engine::{solve, SearchKind};
use crate::instance::{AgentId, Instance, TaskSet};

/// Input conditions under which the optimal mechanisms resist manipulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthfulClass {
    /// Every agent's degree is at most its capacity.
    DegreeLeqCapacity,
    /// Every task has an edge outside the BFS matching to an unsaturated agent.
    EveryTaskContested,
    /// Every class of identical agents has more than `ceil(|T|/b) + 1` members.
    ClassCondition,
}

/// Agents sharing the same edge set and capacity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgentClass {
    pub members: Vec<AgentId>,
    pub tasks: TaskSet,
    pub capacity: usize,
    /// `ceil(|tasks| / capacity) + 1`; the class needs strictly more members.
    pub threshold: usize,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub conditions: BTreeSet<TruthfulClass>,
    /// Ordered by lowest member index.
    pub classes: Vec<AgentClass>,
}

impl Classification {
    pub fn holds(&self, class: TruthfulClass) -> bool {
        self.conditions.contains(&class)
    }
}

pub fn classify_truthful_inputs(instance: &Instance) -> Classification {
    let mut conditions = BTreeSet::new();
    if instance
        .agents()
        .all(|a| instance.degree(a) <= instance.capacity(a))
    {
        conditions.insert(TruthfulClass::DegreeLeqCapacity);
    }
    if every_task_contested(instance) {
        conditions.insert(TruthfulClass::EveryTaskContested);
    }
    let classes = agent_classes(instance);
    if !classes.is_empty() && classes.iter().all(|c| c.satisfied) {
        conditions.insert(TruthfulClass::ClassCondition);
    }
    Classification {
        conditions,
        classes,
    }
}

fn every_task_contested(instance: &Instance) -> bool {
    let mu = solve(
        instance.edges(),
        instance.capacities(),
        instance.values(),
        SearchKind::Bfs,
    );
    let unsaturated: Vec<bool> = instance
        .agents()
        .map(|a| mu.load_of(a) < instance.capacity(a))
        .collect();
    let mut contested = vec![false; instance.task_count()];
    for a in instance.agents() {
        if !unsaturated[a.0] {
            continue;
        }
        for &t in instance.tasks_of(a) {
            if !mu.contains(a, t) {
                contested[t.0] = true;
            }
        }
    }
    contested.into_iter().all(|c| c)
}

fn agent_classes(instance: &Instance) -> Vec<AgentClass> {
    let mut groups: BTreeMap<(&TaskSet, usize), Vec<AgentId>> = BTreeMap::new();
    for a in instance.agents() {
        groups
            .entry((instance.tasks_of(a), instance.capacity(a)))
            .or_default()
            .push(a);
    }
    let mut classes: Vec<AgentClass> = groups
        .into_iter()
        .map(|((tasks, capacity), members)| {
            let threshold = tasks.len().div_ceil(capacity) + 1;
            AgentClass {
                satisfied: members.len() > threshold,
                members,
                tasks: tasks.clone(),
                capacity,
                threshold,
            }
        })
        .collect();
    classes.sort_by_key(|c| c.members[0]);
    classes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture, FixtureId, FixtureParams};
    use crate::instance::TaskId;
    use crate::value::Value;

    #[test]
    fn class_fixture_fails_the_strict_inequality() {
        let inst = fixture(FixtureId::AppExClasses, &FixtureParams::default()).unwrap();
        let c = classify_truthful_inputs(&inst);
        assert_eq!(c.classes.len(), 2);
        let first = &c.classes[0];
        assert_eq!(first.members, vec![AgentId(0), AgentId(2), AgentId(3)]);
        assert_eq!(first.threshold, 3);
        assert!(!first.satisfied);
        let second = &c.classes[1];
        assert_eq!(second.members, vec![AgentId(1), AgentId(4)]);
        assert_eq!(second.tasks, [TaskId(1), TaskId(2)].into());
        assert_eq!(second.threshold, 2);
        assert!(!second.satisfied);
        assert!(!c.holds(TruthfulClass::ClassCondition));
        assert!(c.holds(TruthfulClass::EveryTaskContested));
    }

    #[test]
    fn large_classes_satisfy_the_condition() {
        let inst =
            Instance::from_lists(vec![1; 3], vec![Value::one()], &[&[0], &[0], &[0]]).unwrap();
        let c = classify_truthful_inputs(&inst);
        assert!(c.holds(TruthfulClass::ClassCondition));
        assert!(c.holds(TruthfulClass::DegreeLeqCapacity));
    }

    #[test]
    fn complete_with_spare_capacity_is_contested() {
        let values = vec![Value::one(), Value::ratio(1, 2), Value::ratio(1, 3)];
        let inst = Instance::from_lists(vec![2, 2], values, &[&[0, 1, 2], &[0, 1, 2]]).unwrap();
        // m = 3 > 4 - 2, so the last task has no spare agent
        assert!(!classify_truthful_inputs(&inst).holds(TruthfulClass::EveryTaskContested));
        let inst = Instance::from_lists(
            vec![2, 2, 1],
            inst.values().to_vec(),
            &[&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]],
        )
        .unwrap();
        assert!(classify_truthful_inputs(&inst).holds(TruthfulClass::EveryTaskContested));
    }

    #[test]
    fn impossibility_instance_is_in_no_class() {
        let inst = fixture(FixtureId::Thm1Impossibility, &FixtureParams::default()).unwrap();
        assert!(classify_truthful_inputs(&inst).conditions.is_empty());
    }
}
