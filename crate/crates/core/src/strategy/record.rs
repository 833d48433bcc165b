use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::instance::{Instance, Mode, StrategyProfile};
use crate::mechanism::{Mechanism, MechanismKind};
use crate::par::Execution;
use crate::value::Value;

use super::{
    check_group_sp, check_truthfulness, classify_truthful_inputs, empirical_poa_pos, verify_nash,
    AnalysisError, DEFAULT_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Truthful,
    GroupSp,
    Ne,
    Poa,
    Pos,
    Classes,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Truthful,
        Check::GroupSp,
        Check::Ne,
        Check::Poa,
        Check::Pos,
        Check::Classes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Truthful => "truthful",
            Check::GroupSp => "group-sp",
            Check::Ne => "ne",
            Check::Poa => "poa",
            Check::Pos => "pos",
            Check::Classes => "classes",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s || c.name().replace('-', "_") == s)
            .ok_or_else(|| format!("unknown check `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ratios {
    pub optimum: Value,
    pub worst_ne_welfare: Value,
    pub best_ne_welfare: Value,
    pub poa_ratio: Value,
    pub pos_ratio: Value,
    pub equilibria: usize,
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub cap: u64,
    pub max_coalition: usize,
    pub exec: Execution,
    /// Profile to test with [`Check::Ne`]; truthful reports when absent.
    pub profile: Option<StrategyProfile>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            cap: DEFAULT_CAP,
            max_coalition: 2,
            exec: Execution::default(),
            profile: None,
        }
    }
}

/// Result of one check, in the shape written to JSON output.
///
/// Verdicts: `truthful` gives `none` or `manipulable`, `group-sp` gives
/// `none` or `collusion`, `ne` gives `ne` or `not-ne`, `poa`/`pos` give
/// `computed`, and `classes` gives the satisfied conditions joined by `,`
/// (or `none`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisRecord {
    pub check: Check,
    pub instance_id: String,
    pub mechanism: Mechanism,
    pub mode: Mode,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Ratios>,
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("analysis types serialize")
}

pub fn analyze(
    instance: &Instance,
    instance_id: &str,
    kind: MechanismKind,
    check: Check,
    options: &AnalysisOptions,
) -> Result<AnalysisRecord, AnalysisError> {
    let mut record = AnalysisRecord {
        check,
        instance_id: instance_id.to_owned(),
        mechanism: kind.mechanism,
        mode: kind.mode,
        verdict: String::new(),
        witness: None,
        ratios: None,
    };
    match check {
        Check::Truthful => {
            let w = check_truthfulness(instance, kind, options.cap)?;
            record.verdict = if w.is_some() { "manipulable" } else { "none" }.into();
            record.witness = w.as_ref().map(to_json);
        }
        Check::GroupSp => {
            let w = check_group_sp(instance, kind, options.max_coalition, options.cap)?;
            record.verdict = if w.is_some() { "collusion" } else { "none" }.into();
            record.witness = w.as_ref().map(to_json);
        }
        Check::Ne => {
            let profile = options
                .profile
                .clone()
                .unwrap_or_else(|| StrategyProfile::truthful(instance, kind.mode));
            let v = verify_nash(instance, &profile, kind, options.cap)?;
            record.verdict = if v.is_ne { "ne" } else { "not-ne" }.into();
            record.witness = v.deviation.as_ref().map(to_json);
        }
        Check::Poa | Check::Pos => {
            let r = empirical_poa_pos(instance, kind, options.cap, options.exec)?;
            record.verdict = "computed".into();
            record.ratios = Some(Ratios {
                optimum: r.optimum,
                worst_ne_welfare: r.worst_ne_welfare,
                best_ne_welfare: r.best_ne_welfare,
                poa_ratio: r.poa_ratio,
                pos_ratio: r.pos_ratio,
                equilibria: r.equilibria,
            });
        }
        Check::Classes => {
            let c = classify_truthful_inputs(instance);
            let names: Vec<String> = c
                .conditions
                .iter()
                .map(|k| to_json(k).as_str().unwrap_or_default().to_owned())
                .collect();
            record.verdict = if names.is_empty() {
                "none".into()
            } else {
                names.join(",")
            };
            record.witness = Some(to_json(&c));
        }
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture, FixtureId, FixtureParams};

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
            assert_eq!(to_json(&c).as_str().unwrap(), c.name());
        }
        assert_eq!("group_sp".parse::<Check>().unwrap(), Check::GroupSp);
        assert!("bogus".parse::<Check>().is_err());
    }

    #[test]
    fn poa_record_json() {
        let inst = fixture(
            FixtureId::Thm8Poa,
            &FixtureParams::with_eps(Value::ratio(1, 1000)),
        )
        .unwrap();
        let r = analyze(
            &inst,
            "thm8_poa",
            MechanismKind::ems(Mechanism::Bfs),
            Check::Poa,
            &AnalysisOptions::default(),
        )
        .unwrap();
        let json = to_json(&r);
        assert_eq!(json["ratios"]["poa_ratio"], "2001/1001");
        assert_eq!(json["check"], "poa");
        assert_eq!(json["mechanism"], "bfs");
        assert_eq!(json["mode"], "ems");
        assert!(json.get("witness").is_none());
    }

    #[test]
    fn group_sp_record_names_coalition() {
        let inst = fixture(FixtureId::Ex1Collusion, &FixtureParams::default()).unwrap();
        let r = analyze(
            &inst,
            "ex1",
            MechanismKind::ems(Mechanism::Ap),
            Check::GroupSp,
            &AnalysisOptions::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, "collusion");
        assert_eq!(r.witness.unwrap()["coalition"], serde_json::json!([0, 2]));
    }

    #[test]
    fn classes_verdict_lists_conditions() {
        let inst = fixture(FixtureId::AppExClasses, &FixtureParams::default()).unwrap();
        let r = analyze(
            &inst,
            "x",
            MechanismKind::ems(Mechanism::Bfs),
            Check::Classes,
            &AnalysisOptions::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, "every_task_contested");
    }
}
