use serde::Serialize;

use crate::fixtures::tightness_family;
use crate::instance::{AgentId, Instance, StrategyProfile};
use crate::mechanism::{Mechanism, MechanismKind};
use crate::par::{map_range, Execution};
use crate::value::Value;

use super::game::{welfare, Choice, Game};
use super::{AnalysisError, Strategy};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BestResponse {
    pub strategy: Strategy,
    pub utility: Value,
}

/// A strictly profitable unilateral deviation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Deviation {
    pub agent: AgentId,
    pub strategy: Strategy,
    pub current_utility: Value,
    pub deviation_utility: Value,
    pub gain: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquilibriumVerdict {
    pub is_ne: bool,
    /// The first agent, by index, with a profitable deviation.
    pub deviation: Option<Deviation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equilibrium {
    pub profile: StrategyProfile,
    pub welfare: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquilibriumSet {
    /// In mixed-radix profile order, agent 0's strategy varying slowest.
    pub equilibria: Vec<Equilibrium>,
    pub min_welfare: Option<Value>,
    pub max_welfare: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoaPos {
    pub optimum: Value,
    pub worst_ne_welfare: Value,
    pub best_ne_welfare: Value,
    pub poa_ratio: Value,
    pub pos_ratio: Value,
    pub equilibria: usize,
}

/// Best choice of `agent` against fixed `others`, with the tie-break applied:
/// the truthful report if it is optimal, otherwise the smallest `tie_key`.
pub(crate) fn best_choice(
    game: &Game<'_>,
    agent: AgentId,
    others: &[Choice],
    cap: u64,
) -> Result<(Choice, Value), AnalysisError> {
    let mut profile: Vec<Choice> = others.to_vec();
    let truthful = Choice::truthful(game.inst, agent);
    profile[agent.0] = truthful.clone();
    let mut best_u = game.utilities(&profile)[agent.0].clone();
    let mut best: Option<Choice> = None;
    for choice in game.strategies(agent, cap)? {
        if choice == truthful {
            continue;
        }
        profile[agent.0] = choice;
        let u = game.utilities(&profile)[agent.0].clone();
        let better = match &best {
            _ if u > best_u => true,
            Some(b) if u == best_u => profile[agent.0].tie_key() < b.tie_key(),
            _ => false,
        };
        if better {
            best_u = u;
            best = Some(profile[agent.0].clone());
        }
    }
    Ok((best.unwrap_or(truthful), best_u))
}

/// Exact best response of `agent` when everyone else plays as in `others`
/// (the agent's own entry in `others` is ignored).
pub fn best_response(
    instance: &Instance,
    agent: AgentId,
    others: &StrategyProfile,
    kind: MechanismKind,
    cap: u64,
) -> Result<BestResponse, AnalysisError> {
    let game = Game::new(instance, kind);
    let others = game.profile_choices(others)?;
    let (choice, utility) = best_choice(&game, agent, &others, cap)?;
    Ok(BestResponse {
        strategy: choice.to_strategy(kind.mode),
        utility,
    })
}

pub fn verify_nash(
    instance: &Instance,
    profile: &StrategyProfile,
    kind: MechanismKind,
    cap: u64,
) -> Result<EquilibriumVerdict, AnalysisError> {
    let game = Game::new(instance, kind);
    let choices = game.profile_choices(profile)?;
    let current = game.utilities(&choices);
    for agent in instance.agents() {
        let (choice, u) = best_choice(&game, agent, &choices, cap)?;
        if u > current[agent.0] {
            return Ok(EquilibriumVerdict {
                is_ne: false,
                deviation: Some(Deviation {
                    agent,
                    strategy: choice.to_strategy(kind.mode),
                    gain: &u - &current[agent.0],
                    current_utility: current[agent.0].clone(),
                    deviation_utility: u,
                }),
            });
        }
    }
    Ok(EquilibriumVerdict {
        is_ne: true,
        deviation: None,
    })
}

/// All pure Nash equilibria, found by tabulating every joint profile.
pub fn enumerate_equilibria(
    instance: &Instance,
    kind: MechanismKind,
    cap: u64,
    exec: Execution,
) -> Result<EquilibriumSet, AnalysisError> {
    let game = Game::new(instance, kind);
    let sets = instance
        .agents()
        .map(|a| game.strategies(a, cap))
        .collect::<Result<Vec<_>, _>>()?;
    let n = sets.len();
    let total = sets
        .iter()
        .try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128))
        .unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(AnalysisError::CapExceeded {
            what: "joint strategy space".to_owned(),
            required: total,
            cap,
        });
    }
    let total = total as usize;
    // stride[i]: how far one step in agent i's strategy moves the profile index
    let mut stride = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        stride[i] = stride[i + 1] * sets[i + 1].len();
    }
    let digits = |p: usize, i: usize| (p / stride[i]) % sets[i].len();
    let table: Vec<Vec<Value>> = map_range(total, exec, |p| {
        let profile: Vec<&Choice> = (0..n).map(|i| &sets[i][digits(p, i)]).collect();
        game.utilities(&profile)
    });

    // best[i][k]: agent i's best utility when the others are fixed as in
    // compressed index k (profile index with agent i's digit removed)
    let compress = |p: usize, i: usize| {
        let lo = p % stride[i];
        let hi = p / (stride[i] * sets[i].len());
        hi * stride[i] + lo
    };
    let mut best: Vec<Vec<Value>> = (0..n)
        .map(|i| vec![Value::zero(); total / sets[i].len()])
        .collect();
    for (p, u) in table.iter().enumerate() {
        for i in 0..n {
            let slot = &mut best[i][compress(p, i)];
            if u[i] > *slot {
                *slot = u[i].clone();
            }
        }
    }

    let mut equilibria = Vec::new();
    for (p, u) in table.iter().enumerate() {
        if (0..n).all(|i| u[i] >= best[i][compress(p, i)]) {
            let choices: Vec<Choice> = (0..n).map(|i| sets[i][digits(p, i)].clone()).collect();
            equilibria.push(Equilibrium {
                profile: game.to_profile(&choices),
                welfare: welfare(u),
            });
        }
    }
    let min_welfare = equilibria.iter().map(|e| &e.welfare).min().cloned();
    let max_welfare = equilibria.iter().map(|e| &e.welfare).max().cloned();
    Ok(EquilibriumSet {
        equilibria,
        min_welfare,
        max_welfare,
    })
}

fn optimum(instance: &Instance) -> Value {
    let game = Game::new(instance, MechanismKind::ems(Mechanism::Bfs));
    welfare(&game.utilities(&game.truthful()))
}

fn ratio(num: &Value, den: &Value) -> Result<Value, AnalysisError> {
    if den.is_zero() {
        if num.is_zero() {
            Ok(Value::one())
        } else {
            Err(AnalysisError::UnboundedRatio(num.to_string()))
        }
    } else {
        Ok(num / den)
    }
}

/// Optimum over worst and best equilibrium welfare on this one instance.
pub fn empirical_poa_pos(
    instance: &Instance,
    kind: MechanismKind,
    cap: u64,
    exec: Execution,
) -> Result<PoaPos, AnalysisError> {
    let set = enumerate_equilibria(instance, kind, cap, exec)?;
    let (Some(worst), Some(best)) = (set.min_welfare, set.max_welfare) else {
        return Err(AnalysisError::NoEquilibrium);
    };
    let optimum = optimum(instance);
    Ok(PoaPos {
        poa_ratio: ratio(&optimum, &worst)?,
        pos_ratio: ratio(&optimum, &best)?,
        optimum,
        worst_ne_welfare: worst,
        best_ne_welfare: best,
        equilibria: set.equilibria.len(),
    })
}

/// Optimum over the welfare `mechanism` reaches on truthful reports.
/// An instance where both are zero has ratio 1.
pub fn approximation_ratio(
    instance: &Instance,
    mechanism: Mechanism,
) -> Result<Value, AnalysisError> {
    let game = Game::new(instance, MechanismKind::ems(mechanism));
    let achieved = welfare(&game.utilities(&game.truthful()));
    ratio(&optimum(instance), &achieved)
}

/// Worst approximation ratio over the two-instance tightness family: the
/// complete two-by-two instance with values `(1+eps, 1)`, and the instance
/// obtained from it by removing the edge of whichever agent `mechanism`
/// gave `t2`.
pub fn tightness_family_ratio(mechanism: Mechanism, eps: &Value) -> Result<Value, AnalysisError> {
    let family =
        tightness_family(eps, mechanism).map_err(|e| AnalysisError::InvalidInput(e.to_string()))?;
    let mut worst = Value::one();
    for inst in &family {
        worst = worst.max(approximation_ratio(inst, mechanism)?);
    }
    Ok(worst)
}
