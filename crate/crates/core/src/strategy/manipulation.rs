use serde::Serialize;

use crate::instance::{AgentId, Instance};
use crate::mechanism::MechanismKind;
use crate::value::Value;

use super::equilibrium::best_choice;
use super::game::{Choice, Game};
use super::{AnalysisError, Strategy};

/// A strictly profitable misreport by one agent while all others are truthful.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManipulationWitness {
    pub agent: AgentId,
    pub strategy: Strategy,
    pub truthful_utility: Value,
    pub manipulated_utility: Value,
    pub gain: Value,
}

/// A joint misreport leaving every member at least as well off and one better.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoalitionWitness {
    pub coalition: Vec<AgentId>,
    pub strategies: Vec<Strategy>,
    pub truthful_utilities: Vec<Value>,
    pub deviated_utilities: Vec<Value>,
}

/// Searches every agent's full strategy set against truthful others. The
/// witness is the best response of the lowest-index agent that gains.
pub fn check_truthfulness(
    instance: &Instance,
    kind: MechanismKind,
    cap: u64,
) -> Result<Option<ManipulationWitness>, AnalysisError> {
    let game = Game::new(instance, kind);
    let truthful = game.truthful();
    let base = game.utilities(&truthful);
    for agent in instance.agents() {
        let (choice, u) = best_choice(&game, agent, &truthful, cap)?;
        if u > base[agent.0] {
            return Ok(Some(ManipulationWitness {
                agent,
                strategy: choice.to_strategy(kind.mode),
                gain: &u - &base[agent.0],
                truthful_utility: base[agent.0].clone(),
                manipulated_utility: u,
            }));
        }
    }
    Ok(None)
}

/// Tries coalitions by size, then lexicographically, and each coalition's
/// joint strategies in mixed-radix order (last member fastest). Truthful
/// reports of members are allowed, so a size-`k` search also covers the
/// deviations of its sub-coalitions.
pub fn check_group_sp(
    instance: &Instance,
    kind: MechanismKind,
    max_coalition: usize,
    cap: u64,
) -> Result<Option<CoalitionWitness>, AnalysisError> {
    let game = Game::new(instance, kind);
    let truthful = game.truthful();
    let base = game.utilities(&truthful);
    let sets = instance
        .agents()
        .map(|a| game.strategies(a, cap))
        .collect::<Result<Vec<_>, _>>()?;
    let n = instance.agent_count();
    for size in 1..=max_coalition.min(n) {
        for coalition in Combinations::new(n, size) {
            let joint = coalition
                .iter()
                .try_fold(1u128, |acc, &a| acc.checked_mul(sets[a].len() as u128))
                .unwrap_or(u128::MAX);
            if joint > cap as u128 {
                return Err(AnalysisError::CapExceeded {
                    what: format!("joint strategies of coalition {coalition:?}"),
                    required: joint,
                    cap,
                });
            }
            if let Some(w) = search_coalition(&game, &sets, &truthful, &base, &coalition) {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn search_coalition(
    game: &Game<'_>,
    sets: &[Vec<Choice>],
    truthful: &[Choice],
    base: &[Value],
    coalition: &[usize],
) -> Option<CoalitionWitness> {
    let mut digits = vec![0usize; coalition.len()];
    let mut profile = truthful.to_vec();
    loop {
        for (k, &a) in coalition.iter().enumerate() {
            profile[a] = sets[a][digits[k]].clone();
        }
        let u = game.utilities(&profile);
        let weakly = coalition.iter().all(|&a| u[a] >= base[a]);
        let strictly = coalition.iter().any(|&a| u[a] > base[a]);
        if weakly && strictly {
            return Some(CoalitionWitness {
                coalition: coalition.iter().map(|&a| AgentId(a)).collect(),
                strategies: coalition
                    .iter()
                    .map(|&a| profile[a].to_strategy(game.mode()))
                    .collect(),
                truthful_utilities: coalition.iter().map(|&a| base[a].clone()).collect(),
                deviated_utilities: coalition.iter().map(|&a| u[a].clone()).collect(),
            });
        }
        // advance the mixed-radix counter
        let mut k = coalition.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < sets[coalition[k]].len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
