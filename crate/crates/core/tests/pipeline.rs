use msca::exact::exact_optimum;
use msca::instances::{
    allocation_from_json, allocation_to_json, instance_from_json, instance_to_json, random_hypergraph, Provenance,
    WeightRange,
};
use msca::lovasz::objective;
use msca::oracle::WeightedHypergraph;
use msca::relax::{build_hmc_lp, build_hmp_lp, simplex_solve, solve_auto, solve_lp};
use msca::rounding::{Rng, Rounder};
use msca::ProblemInstance;

#[test]
fn graph_cut_embeds_in_both_hypergraph_lps() {
    for seed in 0..10u64 {
        let ProblemInstance::HypergraphMc(h) =
            random_hypergraph(7, 3, 10, 2, WeightRange::default(), true, seed).unwrap()
        else {
            unreachable!()
        };
        let mp = simplex_solve(&build_hmp_lp(&h.graph, &h.terminals).unwrap().lp).unwrap();
        let mc = simplex_solve(&build_hmc_lp(&h.graph, &h.terminals).unwrap().lp).unwrap();
        assert!((mp.objective - 2.0 * mc.objective).abs() < 1e-7, "seed {seed}: {} vs {}", mp.objective, mc.objective);
    }
}

#[test]
fn edge_inside_one_pinned_set_costs_nothing() {
    let g = WeightedHypergraph::from_graph(3, &[(0, 2, 5.0)]).unwrap();
    let inst = ProblemInstance::hypergraph_mc(g, vec![0, 1]).unwrap();
    let rep = solve_lp(&inst).unwrap();
    assert!(rep.objective.abs() < 1e-9);
}

#[test]
fn solve_serialize_round_sandwich() {
    for cut in [false, true] {
        for seed in 0..6u64 {
            let inst = random_hypergraph(7, 3, 9, 3, WeightRange::default(), cut, seed).unwrap();
            let inst = instance_from_json(&instance_to_json(&inst).unwrap()).unwrap();
            let rep = solve_auto(&inst, seed).unwrap();
            let prov = Provenance {
                seed: Some(seed),
                tool_version: msca::VERSION.into(),
                ..Provenance::default()
            };
            let (x, _) = allocation_from_json(&allocation_to_json(&rep.x, Some(prov)).unwrap()).unwrap();
            let frac = objective(&inst, &x).unwrap();
            let (_, opt) = exact_optimum(&inst).unwrap();
            assert!(frac <= opt + 1e-7);
            for r in Rounder::applicable_to(&inst) {
                for t in 0..20 {
                    let out = r.round(&inst, &x, &mut Rng::for_trial(seed, t)).unwrap();
                    assert!(out.cost >= opt - 1e-7, "{r} below the optimum");
                }
            }
        }
    }
}
