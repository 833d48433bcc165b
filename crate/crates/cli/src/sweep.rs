//! Batch rows for `mvbm sweep`.

use anyhow::Result;
use mvbm_core::oracle::ExhaustiveSweep;
use mvbm_core::par::{try_map_range, Execution};
use mvbm_core::strategy::{
    approximation_ratio, check_truthfulness, empirical_poa_pos, AnalysisError,
};
use mvbm_core::{
    brute_force_instance, random_instance, solve, tightness_family, utilities, Instance, Mechanism,
    MechanismKind, OracleError, RandomSpec, SweepLimits, Value,
};
use serde::Serialize;

pub const COLUMNS: [&str; 11] = [
    "instance",
    "n",
    "m",
    "welfare_bfs",
    "welfare_dfs",
    "welfare_ap",
    "optimum",
    "ap_ratio",
    "poa",
    "pos",
    "truthful_ap",
];

/// One CSV row. Strategic columns are empty when they were skipped.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub welfare_bfs: Value,
    pub welfare_dfs: Value,
    pub welfare_ap: Value,
    pub optimum: Value,
    pub ap_ratio: Value,
    pub poa: Option<Value>,
    pub pos: Option<Value>,
    pub truthful_ap: Option<bool>,
}

impl Row {
    pub fn record(&self) -> Vec<String> {
        let opt = |v: &Option<Value>| v.as_ref().map(ToString::to_string).unwrap_or_default();
        vec![
            self.instance.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.welfare_bfs.to_string(),
            self.welfare_dfs.to_string(),
            self.welfare_ap.to_string(),
            self.optimum.to_string(),
            self.ap_ratio.to_string(),
            opt(&self.poa),
            opt(&self.pos),
            self.truthful_ap.map(|t| t.to_string()).unwrap_or_default(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct RowOptions {
    /// Mechanism and mode used for the poa/pos and truthfulness columns.
    pub kind: MechanismKind,
    pub strategic: bool,
    pub cap: u64,
}

#[derive(Debug)]
pub enum RowError {
    Oracle(OracleError),
    Analysis(AnalysisError),
}

impl From<RowError> for anyhow::Error {
    fn from(e: RowError) -> Self {
        match e {
            RowError::Oracle(e) => e.into(),
            RowError::Analysis(e) => e.into(),
        }
    }
}

fn welfare(inst: &Instance, mech: Mechanism) -> Value {
    let m = solve(
        inst.edges(),
        inst.capacities(),
        inst.values(),
        mech.search(),
    );
    utilities(inst, &m)
        .expect("mechanism output is feasible")
        .welfare
}

pub fn row(id: String, inst: &Instance, opts: &RowOptions) -> Result<Row, RowError> {
    let optimum = brute_force_instance(inst, opts.cap)
        .map_err(RowError::Oracle)?
        .optimum;
    let (poa, pos, truthful_ap) = if opts.strategic {
        let r = empirical_poa_pos(inst, opts.kind, opts.cap, Execution::Sequential)
            .map_err(RowError::Analysis)?;
        let ap = MechanismKind::new(Mechanism::Ap, opts.kind.mode);
        let manip = check_truthfulness(inst, ap, opts.cap).map_err(RowError::Analysis)?;
        (Some(r.poa_ratio), Some(r.pos_ratio), Some(manip.is_none()))
    } else {
        (None, None, None)
    };
    Ok(Row {
        instance: id,
        n: inst.agent_count(),
        m: inst.task_count(),
        welfare_bfs: welfare(inst, Mechanism::Bfs),
        welfare_dfs: welfare(inst, Mechanism::Dfs),
        welfare_ap: welfare(inst, Mechanism::Ap),
        ap_ratio: approximation_ratio(inst, Mechanism::Ap).map_err(RowError::Analysis)?,
        optimum,
        poa,
        pos,
        truthful_ap,
    })
}

pub fn exhaustive(limits: SweepLimits, opts: &RowOptions, exec: Execution) -> Result<Vec<Row>> {
    let sweep = ExhaustiveSweep::new(limits);
    Ok(try_map_range(sweep.len(), exec, |i| {
        let inst = sweep.get(i).expect("index in range");
        row(format!("sweep:{i}"), &inst, opts)
    })?)
}

pub fn random(
    count: usize,
    base: &RandomSpec,
    opts: &RowOptions,
    exec: Execution,
) -> Result<Vec<Row>> {
    Ok(try_map_range(count, exec, |i| {
        let spec = RandomSpec {
            seed: base.seed.wrapping_add(i as u64),
            ..base.clone()
        };
        row(
            format!("random:seed={}", spec.seed),
            &random_instance(&spec),
            opts,
        )
    })?)
}

/// One row per epsilon, for the member of the tightness family on which
/// the approximation mechanism does worst.
pub fn thm3(eps_list: &[Value], opts: &RowOptions) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for eps in eps_list {
        let family = tightness_family(eps, Mechanism::Ap)?;
        let mut worst: Option<Row> = None;
        for (k, inst) in family.iter().enumerate() {
            let member = if k == 0 { "complete" } else { "followup" };
            let r = row(format!("thm3_tightness[eps={eps}]/{member}"), inst, opts)?;
            if worst.as_ref().is_none_or(|w| r.ap_ratio > w.ap_ratio) {
                worst = Some(r);
            }
        }
        rows.extend(worst);
    }
    Ok(rows)
}
