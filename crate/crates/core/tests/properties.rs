use proptest::prelude::*;

use mvbm_core::oracle::optimum_agent_major;
use mvbm_core::par::Execution;
use mvbm_core::strategy::{
    check_truthfulness, classify_truthful_inputs, enumerate_equilibria, fcfs_policies,
    TruthfulClass,
};
use mvbm_core::{
    best_single_edge_hide, brute_force_instance, random_instance, run, solve, utilities, AgentId,
    Instance, Matching, Mechanism, MechanismKind, Mode, RandomSpec, Report, Value, ValueMode,
    DEFAULT_CAP,
};

fn welfare(inst: &Instance, mech: Mechanism) -> Value {
    let m = solve(
        inst.edges(),
        inst.capacities(),
        inst.values(),
        mech.search(),
    );
    utilities(inst, &m).unwrap().welfare
}

fn instances(max_n: usize, max_m: usize) -> impl Strategy<Value = Instance> {
    (
        any::<u64>(),
        1..=max_n,
        1..=max_m,
        1usize..=3,
        prop::bool::ANY,
    )
        .prop_map(|(seed, n, m, b, distinct)| {
            let mode = if distinct {
                ValueMode::Distinct
            } else {
                ValueMode::WithTies
            };
            random_instance(&RandomSpec::new(seed, n, m).max_capacity(b).values(mode))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn optimal_mechanisms_match_both_oracles(inst in instances(5, 5)) {
        let opt = brute_force_instance(&inst, DEFAULT_CAP).unwrap();
        let other = optimum_agent_major(inst.edges(), inst.capacities(), inst.values(), DEFAULT_CAP).unwrap();
        prop_assert_eq!(&opt.optimum, &other);
        prop_assert_eq!(welfare(&inst, Mechanism::Bfs), opt.optimum.clone());
        prop_assert_eq!(welfare(&inst, Mechanism::Dfs), opt.optimum.clone());
        let bfs = solve(inst.edges(), inst.capacities(), inst.values(), Mechanism::Bfs.search());
        prop_assert!(opt.matchings.contains(&bfs));
    }

    #[test]
    fn ap_is_within_half(inst in instances(6, 6)) {
        let opt = welfare(&inst, Mechanism::Bfs);
        prop_assert!(&welfare(&inst, Mechanism::Ap) * &Value::integer(2) >= opt);
    }

    #[test]
    fn outputs_are_feasible_and_deterministic(inst in instances(6, 6)) {
        for mech in Mechanism::ALL {
            let a = solve(inst.edges(), inst.capacities(), inst.values(), mech.search());
            let b = solve(inst.edges(), inst.capacities(), inst.values(), mech.search());
            prop_assert_eq!(&a, &b);
            prop_assert!(a.check(inst.capacities(), Some(inst.edges())).is_ok());
        }
    }

    #[test]
    fn ap_equals_bfs_when_degree_fits_capacity(inst in instances(5, 5)) {
        let caps: Vec<usize> = inst.agents().map(|a| inst.degree(a).max(inst.capacity(a))).collect();
        let inst = Instance::new(caps, inst.values().to_vec(), inst.edges().to_vec()).unwrap();
        let ap = solve(inst.edges(), inst.capacities(), inst.values(), Mechanism::Ap.search());
        let bfs = solve(inst.edges(), inst.capacities(), inst.values(), Mechanism::Bfs.search());
        prop_assert_eq!(ap, bfs);
    }

    /// An agent with nothing under truthful reports gains nothing by hiding.
    #[test]
    fn unmatched_agents_cannot_gain(inst in instances(4, 5)) {
        let kind = MechanismKind::ems(Mechanism::Bfs);
        let truthful = run(&inst, &Report::truthful(&inst, Mode::Ems), kind).unwrap();
        if let Some(w) = check_truthfulness(&inst, kind, DEFAULT_CAP).unwrap() {
            prop_assert!(truthful.utilities.of(w.agent).is_positive());
        }
        for a in inst.agents() {
            if truthful.utilities.of(a).is_zero() {
                let others = Report::truthful(&inst, Mode::Ems);
                let br = mvbm_core::strategy::best_response(&inst, a, &others, kind, DEFAULT_CAP).unwrap();
                prop_assert!(br.utility.is_zero());
            }
        }
    }

    /// Lowering a declared capacity never helps under the approximation mechanism.
    #[test]
    fn lowering_capacity_never_helps_ap(inst in instances(4, 5)) {
        let kind = MechanismKind::ecms(Mechanism::Ap);
        let truthful = Report::truthful(&inst, Mode::Ecms);
        let base = run(&inst, &truthful, kind).unwrap().utilities;
        for a in inst.agents() {
            if inst.degree(a) == 0 {
                continue;
            }
            for c in 1..inst.capacity(a) {
                let mut r = truthful.clone();
                r.capacities.as_mut().unwrap()[a.0] = c;
                let u = run(&inst, &r, kind).unwrap().utilities;
                prop_assert!(u.of(a) <= base.of(a));
            }
        }
    }

    #[test]
    fn fcfs_union_is_fixed_point_and_ap_output(inst in instances(5, 6)) {
        let policy = fcfs_policies(&inst);
        let union = policy.union();
        let reported = policy.profile(&inst, Mode::Ems);
        for mech in [Mechanism::Bfs, Mechanism::Dfs] {
            prop_assert_eq!(&solve(&reported.edges, inst.capacities(), inst.values(), mech.search()), &union);
        }
        prop_assert_eq!(&solve(inst.edges(), inst.capacities(), inst.values(), Mechanism::Ap.search()), &union);
    }

    #[test]
    fn contested_tasks_block_single_edge_hides(inst in instances(5, 4)) {
        if classify_truthful_inputs(&inst).holds(TruthfulClass::EveryTaskContested) {
            prop_assert!(best_single_edge_hide(&inst, MechanismKind::ems(Mechanism::Bfs)).is_none());
        }
    }

    #[test]
    fn degree_within_capacity_is_truthful(inst in instances(4, 4)) {
        if classify_truthful_inputs(&inst).holds(TruthfulClass::DegreeLeqCapacity) {
            for mech in Mechanism::ALL {
                prop_assert!(check_truthfulness(&inst, MechanismKind::ems(mech), DEFAULT_CAP).unwrap().is_none());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// The FCFS union has the lowest welfare among equilibria.
    #[test]
    fn fcfs_is_the_worst_equilibrium(inst in instances(3, 3)) {
        let fcfs_welfare = utilities(&inst, &fcfs_policies(&inst).union()).unwrap().welfare;
        for mech in [Mechanism::Bfs, Mechanism::Dfs] {
            let set = enumerate_equilibria(&inst, MechanismKind::ems(mech), DEFAULT_CAP, Execution::Sequential).unwrap();
            prop_assert_eq!(set.min_welfare.as_ref(), Some(&fcfs_welfare));
        }
    }

    /// Members of a large enough class of identical agents cannot gain under BFS.
    #[test]
    fn large_classes_are_truthful(seed in any::<u64>(), size in 1usize..=3, b in 1usize..=2, tasks in 1usize..=3) {
        let base = random_instance(&RandomSpec::new(seed, 1, tasks));
        let all: Vec<usize> = (0..tasks).collect();
        let threshold = tasks.div_ceil(b) + 1;
        let n = threshold + size;
        let edges: Vec<&[usize]> = vec![&all; n];
        let inst = Instance::from_lists(vec![b; n], base.values().to_vec(), &edges).unwrap();
        let c = classify_truthful_inputs(&inst);
        prop_assert!(c.holds(TruthfulClass::ClassCondition));
        prop_assert!(check_truthfulness(&inst, MechanismKind::ems(Mechanism::Bfs), DEFAULT_CAP).unwrap().is_none());
    }
}

#[test]
fn matching_json_round_trip_on_random_outputs() {
    for seed in 0..50 {
        let inst = random_instance(&RandomSpec::new(seed, 4, 5));
        let m = solve(
            inst.edges(),
            inst.capacities(),
            inst.values(),
            Mechanism::Dfs.search(),
        );
        assert_eq!(Matching::from_json(&m.to_json()).unwrap(), m);
        assert!(m.load_of(AgentId(0)) <= inst.capacity(AgentId(0)));
    }
}
