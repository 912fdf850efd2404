use proptest::prelude::*;

use msca::exact::{exact_optimum, lovasz_eval_reference};
use msca::instances::{
    allocation_from_json, allocation_to_json, instance_from_json, instance_hash, instance_to_json,
    random_feasible_allocation, random_graph_mc, random_hypergraph, random_monotone_msca, random_sublabel,
    random_sym_sublabel, WeightRange,
};
use msca::lovasz::{lovasz_eval, objective};
use msca::oracle::{make_graph_cut, Oracle};
use msca::relax::{build_extension_lp, project_simplex, solve_lp, LinearProgram};
use msca::rounding::{uncross, Rng, Rounder};
use msca::{ElementSet, ProblemInstance, SetFunction};

fn any_instance(kind: u8, n: usize, k: usize, seed: u64) -> ProblemInstance {
    let w = WeightRange::default();
    match kind % 6 {
        0 => random_graph_mc(n, k, 0.5, w, seed),
        1 => random_hypergraph(n, k, n + 2, 3, w, false, seed),
        2 => random_hypergraph(n, k, n + 2, 4, w, true, seed),
        3 => random_sublabel(n, k, n, 3, w, seed),
        4 => random_sym_sublabel(n, k, 0.5, w, seed),
        _ => random_monotone_msca(n, k, seed),
    }
    .unwrap()
}

fn table_oracle() -> impl Strategy<Value = (Oracle, Vec<f64>)> {
    (1usize..=6).prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0f64..5.0, 1 << n),
            prop::collection::vec(0.0f64..=1.0, n),
        )
            .prop_map(move |(t, x)| (Oracle::table(n, t).unwrap(), x))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn extension_matches_reference((f, x) in table_oracle()) {
        let a = lovasz_eval(&f, &x);
        let b = lovasz_eval_reference(&f, &x);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
    }

    #[test]
    fn extension_agrees_on_indicators((f, x) in table_oracle()) {
        let n = x.len();
        let set = ElementSet::from_ids(n, (0..n).filter(|&v| x[v] > 0.5));
        let ind: Vec<f64> = (0..n).map(|v| if set.contains(v) { 1.0 } else { 0.0 }).collect();
        prop_assert!((lovasz_eval(&f, &ind) - f.eval(&set)).abs() < 1e-9);
    }

    #[test]
    fn projection_lands_on_simplex(v in prop::collection::vec(-3.0f64..3.0, 1..8)) {
        let p = project_simplex(&v, None);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(p.iter().all(|&t| t >= 0.0));
        let q = project_simplex(&p, None);
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn instance_json_round_trips(kind in 0u8..6, n in 4usize..9, seed in any::<u64>()) {
        let inst = any_instance(kind, n, 3, seed);
        let text = instance_to_json(&inst).unwrap();
        let back = instance_from_json(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(instance_hash(&back), instance_hash(&inst));
    }

    #[test]
    fn allocation_json_round_trips(kind in 0u8..6, n in 4usize..9, seed in any::<u64>()) {
        let inst = any_instance(kind, n, 3, seed);
        let x = random_feasible_allocation(&inst, seed ^ 1).unwrap();
        let (back, prov) = allocation_from_json(&allocation_to_json(&x, None).unwrap()).unwrap();
        prop_assert_eq!(back, x);
        prop_assert!(prov.is_none());
    }

    #[test]
    fn roundings_respect_pins_and_cost_at_least_opt(kind in 0u8..6, n in 4usize..7, seed in any::<u64>()) {
        let inst = any_instance(kind, n, 3, seed);
        let x = random_feasible_allocation(&inst, seed.wrapping_add(7)).unwrap();
        let (_, opt) = exact_optimum(&inst).unwrap();
        for r in Rounder::applicable_to(&inst) {
            let out = r.round(&inst, &x, &mut Rng::new(seed)).unwrap();
            inst.check_partition(&out.partition).unwrap();
            prop_assert!(out.cost >= opt - 1e-7, "{r}: {} < {opt}", out.cost);
            for (v, pin) in inst.pinned().into_iter().enumerate() {
                if let Some(i) = pin {
                    prop_assert_eq!(out.partition.label(v), i);
                }
            }
        }
    }

    #[test]
    fn roundings_are_seed_deterministic(kind in 0u8..6, seed in any::<u64>(), stream in 0u64..1000) {
        let inst = any_instance(kind, 6, 3, seed);
        let x = random_feasible_allocation(&inst, seed ^ 3).unwrap();
        for r in Rounder::applicable_to(&inst) {
            let a = r.round(&inst, &x, &mut Rng::for_trial(seed, stream)).unwrap();
            let b = r.round(&inst, &x, &mut Rng::for_trial(seed, stream)).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn uncross_disjoint_shrinking_and_cheaper(
        n in 2usize..8,
        edges in prop::collection::vec((0usize..8, 0usize..8, 1u32..5), 1..12),
        masks in prop::collection::vec(any::<u64>(), 2..5),
    ) {
        let edges: Vec<(usize, usize, f64)> = edges
            .into_iter()
            .filter(|&(a, b, _)| a < n && b < n && a != b)
            .map(|(a, b, w)| (a, b, w as f64))
            .collect();
        let f = make_graph_cut(n, &edges, 1.0).unwrap();
        let full = (1u64 << n) - 1;
        let sets: Vec<ElementSet> = masks.iter().map(|&m| ElementSet::from_mask(n, m & full)).collect();
        let out = uncross(&f, &sets);
        let before: f64 = sets.iter().map(|s| f.eval(s)).sum();
        let after: f64 = out.iter().map(|s| f.eval(s)).sum();
        prop_assert!(after <= before + 1e-9);
        for (i, a) in out.iter().enumerate() {
            prop_assert!(a.is_subset(&sets[i]));
            for b in &out[i + 1..] {
                prop_assert!(!a.intersects(b));
            }
        }
    }

    #[test]
    fn lp_is_a_lower_bound(kind in 0u8..3, n in 4usize..8, seed in any::<u64>()) {
        let inst = any_instance(kind, n, 3, seed);
        let rep = solve_lp(&inst).unwrap();
        let (_, opt) = exact_optimum(&inst).unwrap();
        prop_assert!(rep.objective <= opt + 1e-7);
        let x = random_feasible_allocation(&inst, seed ^ 5).unwrap();
        prop_assert!(rep.objective <= objective(&inst, &x).unwrap() + 1e-7);
        prop_assert!((objective(&inst, &rep.x).unwrap() - rep.objective).abs() < 1e-7);
    }

    #[test]
    fn tableau_round_trips(kind in 0u8..3, n in 4usize..8, seed in any::<u64>()) {
        let inst = any_instance(kind, n, 3, seed);
        let lp = build_extension_lp(&inst).unwrap().lp;
        let back = LinearProgram::parse_tableau(&lp.to_tableau_string()).unwrap();
        prop_assert_eq!(back, lp);
    }
}
