use crate::engine::{allocate, processing_order};
use crate::instance::{
    validate_report, AgentId, Instance, Mode, StrategyProfile, TaskId, Violation,
};
use crate::mechanism::MechanismKind;
use crate::value::Value;

use super::{AnalysisError, Strategy};

/// A strategy in raw-index form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Choice {
    pub tasks: Vec<usize>,
    pub cap: usize,
}

impl Choice {
    pub fn truthful(inst: &Instance, agent: AgentId) -> Self {
        Choice {
            tasks: inst.tasks_of(agent).iter().map(|t| t.0).collect(),
            cap: inst.capacity(agent),
        }
    }

    pub fn to_strategy(&self, mode: Mode) -> Strategy {
        Strategy {
            edges: self.tasks.iter().map(|&t| TaskId(t)).collect(),
            capacity: (mode == Mode::Ecms).then_some(self.cap),
        }
    }

    /// Tie-break key among equally good non-truthful strategies: fewer
    /// edges, then lexicographically smaller task list, then larger capacity.
    pub fn tie_key(&self) -> (usize, &[usize], std::cmp::Reverse<usize>) {
        (self.tasks.len(), &self.tasks, std::cmp::Reverse(self.cap))
    }
}

/// The mechanism as a normal-form game over an instance.
pub(crate) struct Game<'a> {
    pub inst: &'a Instance,
    pub kind: MechanismKind,
    order: Vec<usize>,
}

impl<'a> Game<'a> {
    pub fn new(inst: &'a Instance, kind: MechanismKind) -> Self {
        Game {
            inst,
            kind,
            order: processing_order(inst.values()),
        }
    }

    pub fn mode(&self) -> Mode {
        self.kind.mode
    }

    /// Task -> owner table when agent `i` plays `choices[i]`.
    pub fn owners<C: std::borrow::Borrow<Choice>>(&self, choices: &[C]) -> Vec<Option<usize>> {
        let mut adj = vec![Vec::new(); self.inst.task_count()];
        let mut caps = Vec::with_capacity(choices.len());
        for (a, c) in choices.iter().enumerate() {
            let c = c.borrow();
            for &t in &c.tasks {
                adj[t].push(a);
            }
            caps.push(match self.kind.mode {
                Mode::Ems => self.inst.capacity(AgentId(a)),
                Mode::Ecms => c.cap,
            });
        }
        allocate(&adj, &caps, &self.order, self.kind.mechanism.search())
    }

    pub fn utilities<C: std::borrow::Borrow<Choice>>(&self, choices: &[C]) -> Vec<Value> {
        let owners = self.owners(choices);
        let mut u = vec![Value::zero(); choices.len()];
        for (t, o) in owners.iter().enumerate() {
            if let Some(a) = o {
                u[*a] += &self.inst.values()[t];
            }
        }
        u
    }

    pub fn truthful(&self) -> Vec<Choice> {
        self.inst
            .agents()
            .map(|a| Choice::truthful(self.inst, a))
            .collect()
    }

    /// All strategies of `agent`, or the single empty one when it has no edges.
    ///
    /// Non-empty edge subsets in increasing bitmask order (bit `k` is the
    /// agent's `k`-th task), each with capacities from `b_i` down to 1 in ECMS.
    pub fn strategies(&self, agent: AgentId, cap: u64) -> Result<Vec<Choice>, AnalysisError> {
        let tasks: Vec<usize> = self.inst.tasks_of(agent).iter().map(|t| t.0).collect();
        let b = self.inst.capacity(agent);
        if tasks.is_empty() {
            return Ok(vec![Choice { tasks, cap: b }]);
        }
        let per_subset = match self.kind.mode {
            Mode::Ems => 1u128,
            Mode::Ecms => b as u128,
        };
        let d = tasks.len();
        let required = if d >= 127 {
            u128::MAX
        } else {
            ((1u128 << d) - 1).saturating_mul(per_subset)
        };
        if required > cap as u128 {
            return Err(AnalysisError::CapExceeded {
                what: format!("strategy set of {agent}"),
                required,
                cap,
            });
        }
        let caps: Vec<usize> = match self.kind.mode {
            Mode::Ems => vec![b],
            Mode::Ecms => (1..=b).rev().collect(),
        };
        let mut out = Vec::with_capacity(required as usize);
        for mask in 1u64..(1u64 << d) {
            let subset: Vec<usize> = (0..d)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| tasks[k])
                .collect();
            for &c in &caps {
                out.push(Choice {
                    tasks: subset.clone(),
                    cap: c,
                });
            }
        }
        Ok(out)
    }

    /// Raw choices of a profile after checking it against the instance.
    ///
    /// Unlike [`validate_report`] an empty edge set is accepted: the FCFS
    /// profile gives agents whose tasks are all taken exactly that.
    pub fn profile_choices(&self, profile: &StrategyProfile) -> Result<Vec<Choice>, AnalysisError> {
        let violations: Vec<Violation> = validate_report(self.inst, profile, self.kind.mode)
            .into_iter()
            .filter(|v| !matches!(v, Violation::EmptyReport { .. }))
            .collect();
        if !violations.is_empty() {
            return Err(AnalysisError::InvalidProfile(violations));
        }
        let caps = profile.effective_capacities(self.inst, self.kind.mode);
        Ok(profile
            .edges
            .iter()
            .zip(caps)
            .map(|(set, &cap)| Choice {
                tasks: set.iter().map(|t| t.0).collect(),
                cap,
            })
            .collect())
    }

    pub fn to_profile(&self, choices: &[Choice]) -> StrategyProfile {
        StrategyProfile {
            edges: choices
                .iter()
                .map(|c| c.tasks.iter().map(|&t| TaskId(t)).collect())
                .collect(),
            capacities: (self.kind.mode == Mode::Ecms)
                .then(|| choices.iter().map(|c| c.cap).collect()),
        }
    }
}

pub(crate) fn welfare(u: &[Value]) -> Value {
    u.iter().sum()
}
