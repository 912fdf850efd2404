//! Named verification checks grouped into suites. Each check builds its own
//! instances from a seed, so a run is reproducible bit for bit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{estimate, estimate_many, estimate_rounding, exact_optimum, lovasz_eval_reference, Estimate};
use crate::instances::{
    check_distance_feasible, distance_cost, gen_ckr_tight_edge, gen_gap_example, hmc_to_nwmc, map_x_to_distance,
    node_multiway_cut_brute, nwmc_to_hmc, random_feasible_allocation, random_graph_mc, random_hypergraph,
    random_monotone_msca, random_sublabel, random_sym_sublabel, WeightRange,
};
use crate::lovasz::{
    cut_distance, cut_edge_distance, interval_length, lovasz_eval, objective, partition_distance,
    partition_edge_distance, threshold_set,
};
use crate::model::{FractionalAllocation, MscaInstance, ProblemInstance};
use crate::oracle::{
    check_submodular, check_symmetric, make_graph_cut, make_hypergraph_cut, make_hypergraph_separation, CoverageGroup,
    Hyperedge, Oracle, SetFunction, WeightedHypergraph,
};
use crate::relax::{build_extension_lp, solve_lp, solve_subgradient, SubgradientOptions};
use crate::rounding::{monotone_greedy, uncross_counted, Rng, Rounder};
use crate::set::ElementSet;

pub const SUITES: [&str; 3] = ["lemmas", "bounds", "gap"];

/// Number of standard errors of slack in statistical checks.
pub const Z: f64 = 3.0;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub trials: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { trials: 20_000, seed: 0 }
    }
}

pub fn run_suite(name: &str, budget: &Budget) -> Result<Vec<Check>> {
    let groups: Vec<fn(&Budget) -> Result<Vec<Check>>> = match name {
        "lemmas" => vec![
            extension_identity,
            lp_matches_extension,
            half_distance,
            interval_sizes,
            uncross_postconditions,
        ],
        "bounds" => vec![
            theta_expectation,
            kt_marginals,
            hmc_edge_bounds,
            sym_submp_bound,
            sandwich,
            reductions,
            greedy_bound,
            kt_split_bound,
            log_factor_ceilings,
        ],
        "gap" => vec![gap_example, ckr_tightness],
        _ => {
            return Err(Error::Unsupported(format!(
                "unknown suite {name:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    let mut out = Vec::new();
    for g in groups {
        out.extend(g(budget)?);
    }
    Ok(out)
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

fn sub_seed(budget: &Budget, salt: u64) -> u64 {
    budget.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt)
}

fn between(rng: &mut Rng, lo: usize, hi: usize) -> usize {
    lo + rng.below(hi - lo + 1)
}

/// A point of `[0, 1]^n` with deliberate ties and endpoint values.
fn random_point(n: usize, rng: &mut Rng) -> Vec<f64> {
    const GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
    (0..n)
        .map(|_| if rng.uniform() < 0.3 { GRID[rng.below(5)] } else { rng.uniform() })
        .collect()
}

fn random_edges(n: usize, count: usize, rng: &mut Rng) -> Vec<(usize, usize, f64)> {
    (0..count)
        .filter_map(|_| {
            let (u, v) = (rng.below(n), rng.below(n));
            (u != v).then(|| (u, v, 1.0 + rng.below(5) as f64))
        })
        .collect()
}

fn random_hyperedges(n: usize, count: usize, rng: &mut Rng) -> WeightedHypergraph {
    let edges = (0..count)
        .map(|_| {
            let size = between(rng, 1, n.min(4));
            let mut verts = rng.permutation(n);
            verts.truncate(size);
            verts.sort_unstable();
            let rep = verts[rng.below(size)];
            Hyperedge::with_rep(verts, 1.0 + rng.below(5) as f64, rep)
        })
        .collect();
    WeightedHypergraph::new(n, edges).expect("generated hyperedges are valid")
}

/// One oracle of family `family % 9` over `n` elements.
fn random_oracle(family: usize, n: usize, rng: &mut Rng) -> Result<Oracle> {
    Ok(match family % 9 {
        0 => Oracle::modular((0..n).map(|_| rng.uniform() * 4.0 - 2.0).collect())?,
        1 => make_graph_cut(n, &random_edges(n, 2 * n, rng), 0.5 + rng.uniform())?,
        2 => make_hypergraph_cut(&random_hyperedges(n, n, rng), 1.0)?,
        3 => make_hypergraph_separation(&random_hyperedges(n, n, rng))?,
        4 => {
            let groups = (0..4)
                .map(|_| {
                    let mut elements = rng.permutation(n);
                    elements.truncate(between(rng, 1, n.min(3)));
                    CoverageGroup {
                        elements,
                        w: rng.uniform() * 3.0,
                    }
                })
                .collect();
            Oracle::coverage(n, groups)?
        }
        5 => Oracle::concave_of_modular((0..n).map(|_| rng.uniform() * 3.0).collect(), 0.25 + 0.75 * rng.uniform())?,
        6 => {
            let mut values: Vec<f64> = (0..1usize << n).map(|_| rng.uniform() * 5.0 - 1.0).collect();
            values[0] = 0.0;
            Oracle::table(n, values)?
        }
        7 => {
            let inner = make_graph_cut(n + 1, &random_edges(n + 1, 2 * n, rng), 1.0)?;
            crate::oracle::contract_terminal(&inner, rng.below(n + 1))?
        }
        _ => Oracle::sum(
            n,
            vec![random_oracle(0, n, rng)?, random_oracle(1, n, rng)?, random_oracle(4, n, rng)?],
        )?,
    })
}

/// Sorted-prefix evaluation against breakpoint integration over random
/// oracles of every family, `n <= 10`.
pub fn extension_identity(budget: &Budget) -> Result<Vec<Check>> {
    let mut rng = Rng::new(sub_seed(budget, 1));
    let mut worst = 0.0f64;
    let cases = 500;
    for c in 0..cases {
        let n = between(&mut rng, 1, 10);
        let f = random_oracle(c, n, &mut rng)?;
        let x = random_point(n, &mut rng);
        worst = worst.max((lovasz_eval(&f, &x) - lovasz_eval_reference(&f, &x)).abs());
    }
    Ok(vec![Check::new(
        "extension-identity",
        worst <= 1e-9,
        format!("{cases} (oracle, x) pairs over 9 families, max |sorted - integrated| = {worst:.3e} (tol 1e-9)"),
    )])
}

fn hypergraph_cases(budget: &Budget, salt: u64, count: usize, cut: bool) -> Result<Vec<ProblemInstance>> {
    let mut rng = Rng::new(sub_seed(budget, salt));
    (0..count)
        .map(|c| {
            let n = between(&mut rng, 5, 10);
            let k = between(&mut rng, 2, 4.min(n));
            let m = between(&mut rng, 3, 12);
            random_hypergraph(n, k, m, 4, WeightRange::default(), cut, sub_seed(budget, salt * 1000 + c as u64))
        })
        .collect()
}

/// LP objective at the lifted point equals the extension objective, and
/// both equal the per-edge distance sums.
pub fn lp_matches_extension(budget: &Budget) -> Result<Vec<Check>> {
    let mut worst_lp = 0.0f64;
    let mut worst_viol = 0.0f64;
    let mut worst_mp = 0.0f64;
    let mut worst_mc = 0.0f64;
    let mut count = 0;
    for cut in [false, true] {
        let insts = hypergraph_cases(budget, 2 + cut as u64, 10, cut)?;
        for (c, inst) in insts.iter().enumerate() {
            let ext = build_extension_lp(inst)?;
            let h = inst.hypergraph().expect("hypergraph instance");
            for t in 0..5 {
                let x = random_feasible_allocation(inst, sub_seed(budget, 100 * c as u64 + t))?;
                let obj = objective(inst, &x)?;
                worst_lp = worst_lp.max((ext.value_at(&x) - obj).abs());
                worst_viol = worst_viol.max(ext.lp.max_violation(&ext.lift(&x)));
                let dist: f64 = h
                    .edges
                    .iter()
                    .map(|e| e.w * if cut { cut_edge_distance(&x, e) } else { partition_edge_distance(&x, e) })
                    .sum();
                if cut {
                    worst_mc = worst_mc.max((dist - obj).abs());
                } else {
                    worst_mp = worst_mp.max((dist - obj).abs());
                }
                count += 1;
            }
        }
    }
    Ok(vec![
        Check::new(
            "lp-equals-extension",
            worst_lp <= 1e-9 && worst_viol <= 1e-9,
            format!("{count} allocations, max |LP - extension| = {worst_lp:.3e}, max row violation = {worst_viol:.3e} (tol 1e-9)"),
        ),
        Check::new(
            "partition-distance-identity",
            worst_mp <= 1e-9,
            format!("max |sum w d(e) - objective| = {worst_mp:.3e} on partition instances (tol 1e-9)"),
        ),
        Check::new(
            "cut-distance-identity",
            worst_mc <= 1e-9,
            format!("max |sum w d(e) - objective| = {worst_mc:.3e} on cut instances (tol 1e-9)"),
        ),
    ])
}

/// `d(e, i) <= d(e) / 2` on solver outputs for partition instances.
pub fn half_distance(budget: &Budget) -> Result<Vec<Check>> {
    let mut allocations = Vec::new();
    for (c, inst) in hypergraph_cases(budget, 4, 20, false)?.into_iter().enumerate() {
        allocations.push((inst.clone(), solve_lp(&inst)?.x));
        if c < 5 {
            let mut opts = SubgradientOptions::new(sub_seed(budget, 40 + c as u64));
            opts.max_iter = 2000;
            allocations.push((inst.clone(), solve_subgradient(&inst, &opts)?.x));
        }
    }
    let mut violations = 0;
    let mut checked = 0;
    for (inst, x) in &allocations {
        for e in &inst.hypergraph().expect("hypergraph instance").edges {
            let d = partition_edge_distance(x, e);
            for i in 0..x.k() {
                checked += 1;
                if partition_distance(x, e, i) > d / 2.0 + 1e-12 {
                    violations += 1;
                }
            }
        }
    }
    Ok(vec![Check::new(
        "half-distance",
        violations == 0,
        format!("{} solver allocations, {checked} (edge, label) pairs, {violations} violations", allocations.len()),
    )])
}

/// For cut distances: `sum_{i in R(z)} |I(e, i)| <= d(e)` for every edge
/// member `z`, and hence `|I(e, i)| <= d(e)`.
pub fn interval_sizes(budget: &Budget) -> Result<Vec<Check>> {
    let mut bad_sum = 0;
    let mut bad_single = 0;
    let mut checked = 0;
    for (c, inst) in hypergraph_cases(budget, 5, 20, true)?.into_iter().enumerate() {
        let h = inst.hypergraph().expect("hypergraph instance").clone();
        for t in 0..10 {
            let x = random_feasible_allocation(&inst, sub_seed(budget, 500 + 10 * c as u64 + t))?;
            for e in &h.edges {
                let d = cut_edge_distance(&x, e);
                let top: Vec<f64> = (0..x.k())
                    .map(|i| e.verts.iter().map(|&v| x.get(v, i)).fold(f64::NEG_INFINITY, f64::max))
                    .collect();
                for &z in &e.verts {
                    checked += 1;
                    let s: f64 = (0..x.k()).filter(|&i| x.get(z, i) == top[i]).map(|i| interval_length(&x, e, i)).sum();
                    if s > d + 1e-12 {
                        bad_sum += 1;
                    }
                }
                bad_single += (0..x.k()).filter(|&i| interval_length(&x, e, i) > d + 1e-12).count();
                debug_assert!((0..x.k()).all(|i| cut_distance(&x, e, i) >= -1e-12));
            }
        }
    }
    Ok(vec![
        Check::new("interval-sizes", bad_sum == 0, format!("{checked} (edge, member) pairs, {bad_sum} violations")),
        Check::new("interval-at-most-distance", bad_single == 0, format!("{bad_single} violations")),
    ])
}

/// Uncrossing keeps subsets, disjointness, the union and (for symmetric
/// submodular `f`) does not increase the total cost.
pub fn uncross_postconditions(budget: &Budget) -> Result<Vec<Check>> {
    let mut rng = Rng::new(sub_seed(budget, 6));
    let cases = 1000;
    let mut failures = Vec::new();
    let mut not_symmetric = 0;
    for c in 0..cases {
        let n = between(&mut rng, 2, 8);
        let f = match c % 3 {
            0 => make_graph_cut(n, &random_edges(n, 2 * n, &mut rng), 1.0)?,
            1 => make_hypergraph_cut(&random_hyperedges(n, n, &mut rng), 1.0)?,
            _ => Oracle::sum(
                n,
                vec![
                    make_graph_cut(n, &random_edges(n, n, &mut rng), 1.0)?,
                    make_hypergraph_cut(&random_hyperedges(n, n, &mut rng), 0.5)?,
                ],
            )?,
        };
        if !(check_symmetric(&f)? && check_submodular(&f)?) {
            not_symmetric += 1;
            continue;
        }
        let k = between(&mut rng, 2, 5);
        let sets: Vec<ElementSet> = (0..k)
            .map(|_| ElementSet::from_mask(n, rng.next_u64() & ((1u64 << n) - 1)))
            .collect();
        let (out, steps) = uncross_counted(&f, &sets);
        let subset = out.iter().zip(&sets).all(|(a, b)| a.is_subset(b));
        let disjoint = (0..k).all(|i| (i + 1..k).all(|j| !out[i].intersects(&out[j])));
        let union = |s: &[ElementSet]| s.iter().fold(ElementSet::empty(n), |acc, a| acc.union(a));
        let same_union = union(&out) == union(&sets);
        let before: f64 = sets.iter().map(|a| f.eval(a)).sum();
        let after: f64 = out.iter().map(|a| f.eval(a)).sum();
        let total: usize = sets.iter().map(ElementSet::len).sum();
        if !(subset && disjoint && same_union && after <= before + 1e-9 && steps <= total * total) {
            failures.push(c);
        }
    }
    Ok(vec![Check::new(
        "uncross-postconditions",
        failures.is_empty() && not_symmetric == 0,
        format!(
            "{cases} inputs (n <= 8, oracles verified symmetric submodular: {} failed that check), {} postcondition failures{}",
            not_symmetric,
            failures.len(),
            failures.first().map(|c| format!(", first at case {c}")).unwrap_or_default()
        ),
    )])
}

/// `E[f(A(i, theta))] = f^(x_i)` for `theta` uniform.
pub fn theta_expectation(budget: &Budget) -> Result<Vec<Check>> {
    let mut rng = Rng::new(sub_seed(budget, 7));
    let mut worst = 0.0f64;
    let mut failed = 0;
    let families = 9;
    for fam in 0..families {
        let n = between(&mut rng, 3, 8);
        let f = random_oracle(fam, n, &mut rng)?;
        let x = random_point(n, &mut rng);
        let target = lovasz_eval(&f, &x);
        let est = estimate(budget.trials, sub_seed(budget, 70 + fam as u64), |r| {
            Ok(f.eval(&threshold_set(&x, r.uniform())))
        })?;
        let dev = (est.mean - target).abs();
        let ok = dev <= Z * est.stderr || dev <= 1e-12;
        worst = worst.max(if est.stderr > 0.0 { dev / est.stderr } else { 0.0 });
        failed += !ok as usize;
    }
    Ok(vec![Check::new(
        "theta-rounding-expectation",
        failed == 0,
        format!("{families} oracle families at {} draws, worst |mean - f^| = {worst:.2} stderr, {failed} beyond {Z} stderr", budget.trials),
    )])
}

/// Per-element label frequencies of KT rounding match `x`.
pub fn kt_marginals(budget: &Budget) -> Result<Vec<Check>> {
    let rows = [
        [0.7, 0.3, 0.0],
        [0.2, 0.5, 0.3],
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        [0.0, 0.0, 1.0],
        [0.1, 0.1, 0.8],
    ];
    let (n, k) = (rows.len(), 3);
    let costs: Vec<Vec<f64>> = (0..n).map(|v| (0..k).map(|i| (v + 2 * i) as f64).collect()).collect();
    let inst = ProblemInstance::Msca(MscaInstance::modular(&costs)?);
    let x = FractionalAllocation::new(n, k, rows.iter().flatten().copied().collect())?;
    let est = estimate_many(budget.trials, sub_seed(budget, 8), n * k, |rng, out| {
        let o = Rounder::Kt.round(&inst, &x, rng)?;
        for v in 0..n {
            out[v * k + o.partition.label(v)] = 1.0;
        }
        Ok(())
    })?;
    let mut worst = 0.0f64;
    let mut failed = 0;
    for v in 0..n {
        for i in 0..k {
            let p = x.get(v, i);
            let sigma = (p * (1.0 - p) / budget.trials as f64).sqrt();
            let dev = (est[v * k + i].mean - p).abs();
            if sigma > 0.0 {
                worst = worst.max(dev / sigma);
            }
            if dev > Z * sigma + 1e-12 {
                failed += 1;
            }
        }
    }
    Ok(vec![Check::new(
        "kt-marginals",
        failed == 0,
        format!("{n} elements x {k} labels at {} trials, worst deviation {worst:.2} binomial sigma, {failed} beyond {Z}", budget.trials),
    )])
}

struct EdgeTally {
    edges: usize,
    failed: usize,
    worst: f64,
}

impl EdgeTally {
    fn new() -> Self {
        EdgeTally {
            edges: 0,
            failed: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    /// Records `est <= bound + Z stderr`; `worst` tracks `mean - bound`.
    fn add(&mut self, est: &Estimate, bound: f64) {
        self.edges += 1;
        self.worst = self.worst.max(est.mean - bound);
        if !est.at_most(bound + 1e-12, Z) {
            self.failed += 1;
        }
    }
}

fn split_estimates(
    rounder: Rounder,
    inst: &ProblemInstance,
    x: &FractionalAllocation,
    edges: &[Hyperedge],
    trials: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    crate::exact::estimate_split_probabilities(rounder, inst, x, edges, trials, seed)
}

/// Half rounding splits each edge with probability at most `2 d(e)` and
/// CKR at most `H_|e| d(e)`.
pub fn hmc_edge_bounds(budget: &Budget) -> Result<Vec<Check>> {
    let mut half = EdgeTally::new();
    let mut ckr = EdgeTally::new();
    for (c, inst) in hypergraph_cases(budget, 9, 20, true)?.into_iter().enumerate() {
        let x = if c % 2 == 0 {
            solve_lp(&inst)?.x
        } else {
            random_feasible_allocation(&inst, sub_seed(budget, 900 + c as u64))?
        };
        let edges = inst.hypergraph().expect("hypergraph instance").edges.clone();
        let h = split_estimates(Rounder::Half, &inst, &x, &edges, budget.trials, sub_seed(budget, 910 + c as u64))?;
        let p = split_estimates(Rounder::Ckr, &inst, &x, &edges, budget.trials, sub_seed(budget, 930 + c as u64))?;
        for (j, e) in edges.iter().enumerate() {
            let d = cut_edge_distance(&x, e);
            half.add(&h[j], 2.0 * d);
            ckr.add(&p[j], harmonic(e.verts.len()) * d);
        }
    }
    Ok(vec![
        Check::new(
            "half-rounding-edge-bound",
            half.failed == 0,
            format!("{} edges on 20 instances, max Pr - 2d(e) = {:.4}, {} beyond {Z} stderr", half.edges, half.worst, half.failed),
        ),
        Check::new(
            "ckr-edge-bound",
            ckr.failed == 0,
            format!("{} edges, max Pr - H_|e| d(e) = {:.4}, {} beyond {Z} stderr", ckr.edges, ckr.worst, ckr.failed),
        ),
    ])
}

/// Relabelled shared-threshold rounding stays within `(1.5 - 1/k)` of the
/// relaxation on partition instances; the plain variant within `1.5`.
pub fn sym_submp_bound(budget: &Budget) -> Result<Vec<Check>> {
    let trials = budget.trials.min(10_000);
    let mut results = Vec::new();
    for (rounder, label) in [(Rounder::SymSubMpRelabel, "sym-submp-relabel-bound"), (Rounder::SymSubMp, "sym-submp-bound")] {
        let mut failed = 0;
        let mut worst = f64::NEG_INFINITY;
        for (c, inst) in hypergraph_cases(budget, 10, 20, false)?.into_iter().enumerate() {
            let rep = solve_lp(&inst)?;
            let k = inst.k() as f64;
            let factor = if rounder == Rounder::SymSubMpRelabel { 1.5 - 1.0 / k } else { 1.5 };
            let est = estimate_rounding(rounder, &inst, &rep.x, trials, sub_seed(budget, 1000 + c as u64), |o| o.cost)?;
            let bound = factor * rep.objective;
            worst = worst.max(est.mean - bound);
            if !est.at_most(bound + 1e-9, Z) {
                failed += 1;
            }
        }
        results.push(Check::new(
            label,
            failed == 0,
            format!("20 instances at {trials} trials, max mean - bound = {worst:.4}, {failed} beyond {Z} stderr"),
        ));
    }
    Ok(results)
}

fn sandwich_instances(budget: &Budget) -> Result<Vec<ProblemInstance>> {
    let mut rng = Rng::new(sub_seed(budget, 11));
    let mut out = Vec::new();
    for c in 0..30u64 {
        let n = between(&mut rng, 5, 7);
        let k = between(&mut rng, 2, 3);
        let s = sub_seed(budget, 1100 + c);
        let w = WeightRange::default();
        out.push(match c % 6 {
            0 => random_monotone_msca(n, k, s)?,
            1 => random_graph_mc(n, k, 0.5, w, s)?,
            2 => random_hypergraph(n, k, 6, 4, w, false, s)?,
            3 => random_hypergraph(n, k, 6, 4, w, true, s)?,
            4 => random_sublabel(n, k, 5, 3, w, s)?,
            _ => random_sym_sublabel(n, k, 0.5, w, s)?,
        });
    }
    Ok(out)
}

/// `OPT_frac <= OPT <= rounded` on enumerable instances of every type.
pub fn sandwich(budget: &Budget) -> Result<Vec<Check>> {
    let tol = 1e-7;
    let insts = sandwich_instances(budget)?;
    let mut violations = Vec::new();
    let mut outcomes = 0;
    for (c, inst) in insts.iter().enumerate() {
        let rep = solve_lp(inst)?;
        let (_, opt) = exact_optimum(inst)?;
        if rep.objective > opt + tol {
            violations.push(format!("instance {c}: OPT_frac {} > OPT {opt}", rep.objective));
        }
        for r in Rounder::applicable_to(inst) {
            let runs = if r.is_randomized() { 200 } else { 1 };
            for t in 0..runs {
                let mut rng = Rng::for_trial(sub_seed(budget, 1200 + c as u64), t);
                let o = r.round(inst, &rep.x, &mut rng)?;
                outcomes += 1;
                if o.cost < opt - tol {
                    violations.push(format!("instance {c}: {} cost {} < OPT {opt}", r.name(), o.cost));
                }
            }
        }
    }
    Ok(vec![Check::new(
        "sandwich",
        violations.is_empty(),
        format!(
            "{} instances, {outcomes} rounding outcomes, {} violations{}",
            insts.len(),
            violations.len(),
            violations.first().map(|v| format!(" ({v})")).unwrap_or_default()
        ),
    )])
}

/// Node-weighted reductions preserve optima and mapped distances are
/// feasible and no costlier.
pub fn reductions(budget: &Budget) -> Result<Vec<Check>> {
    let mut rng = Rng::new(sub_seed(budget, 12));
    let mut mismatches = 0;
    let cases = 30;
    for c in 0..cases {
        let n = between(&mut rng, 3, 6);
        let k = between(&mut rng, 2, 3.min(n));
        let m = between(&mut rng, 0, 7);
        let inst = random_hypergraph(n, k, m, 4, WeightRange::default(), true, sub_seed(budget, 1300 + c))?;
        let (h, t) = (inst.hypergraph().expect("hypergraph"), inst.terminals().expect("terminals"));
        let (_, opt) = exact_optimum(&inst)?;
        let g = hmc_to_nwmc(h, t)?;
        let (_, node_opt) = node_multiway_cut_brute(&g)?;
        let (h2, t2) = nwmc_to_hmc(&g)?;
        let (_, back) = exact_optimum(&ProblemInstance::hypergraph_mc(h2, t2)?)?;
        if (opt - node_opt).abs() > 1e-9 || (opt - back).abs() > 1e-9 {
            mismatches += 1;
        }
    }
    let mut infeasible = 0;
    let mut costlier = 0;
    let samples = 200;
    let insts = hypergraph_cases(budget, 13, 20, true)?;
    for s in 0..samples {
        let inst = &insts[s % insts.len()];
        let (h, t) = (inst.hypergraph().expect("hypergraph"), inst.terminals().expect("terminals"));
        let x = if s < insts.len() {
            solve_lp(inst)?.x
        } else {
            random_feasible_allocation(inst, sub_seed(budget, 1400 + s as u64))?
        };
        let g = hmc_to_nwmc(h, t)?;
        let d = map_x_to_distance(h, t, &x)?;
        infeasible += !check_distance_feasible(&g, &d) as usize;
        costlier += (distance_cost(&g, &d) > objective(inst, &x)? + 1e-9) as usize;
    }
    Ok(vec![
        Check::new(
            "reduction-optima",
            mismatches == 0,
            format!("{cases} instances (n <= 6): {mismatches} disagreements among hypergraph, node-weighted and round-trip optima"),
        ),
        Check::new(
            "distance-feasibility",
            infeasible == 0 && costlier == 0,
            format!("{samples} allocations: {infeasible} infeasible distance maps, {costlier} costlier than the extension"),
        ),
    ])
}

/// Greedy rounding of the relaxation costs at most `H_n` times it.
pub fn greedy_bound(budget: &Budget) -> Result<Vec<Check>> {
    let mut rng = Rng::new(sub_seed(budget, 14));
    let mut failed = 0;
    let mut worst = 0.0f64;
    for c in 0..20 {
        let n = between(&mut rng, 4, 9);
        let k = between(&mut rng, 2, 4);
        let inst = random_monotone_msca(n, k, sub_seed(budget, 1500 + c))?;
        let rep = solve_lp(&inst)?;
        let out = monotone_greedy(&inst, &rep.x)?;
        let bound = harmonic(n) * rep.objective;
        if out.cost > bound + 1e-9 {
            failed += 1;
        }
        if rep.objective > 0.0 {
            worst = worst.max(out.cost / rep.objective / harmonic(n));
        }
    }
    Ok(vec![Check::new(
        "greedy-harmonic-bound",
        failed == 0,
        format!("20 monotone instances, worst cost / (H_n OPT_frac) = {worst:.4}, {failed} violations"),
    )])
}

fn sublabel_cases(budget: &Budget, salt: u64, count: usize) -> Result<Vec<ProblemInstance>> {
    let mut rng = Rng::new(sub_seed(budget, salt));
    (0..count)
        .map(|c| {
            let n = between(&mut rng, 5, 9);
            let k = between(&mut rng, 2, 4);
            let m = between(&mut rng, 3, 10);
            random_sublabel(n, k, m, 4, WeightRange::default(), sub_seed(budget, salt * 1000 + c as u64))
        })
        .collect()
}

/// KT rounding splits a hyperedge across iterations with probability at
/// most `Delta d(e)`.
pub fn kt_split_bound(budget: &Budget) -> Result<Vec<Check>> {
    let mut tally = EdgeTally::new();
    for (c, inst) in sublabel_cases(budget, 15, 10)?.into_iter().enumerate() {
        let ProblemInstance::SubLabel(l) = &inst else { unreachable!("labeling instance") };
        let Oracle::HypergraphSeparation { graph } = &l.h else { unreachable!("separation oracle") };
        let delta = graph.max_edge_size() as f64;
        let x = if c % 2 == 0 {
            solve_lp(&inst)?.x
        } else {
            random_feasible_allocation(&inst, sub_seed(budget, 1600 + c as u64))?
        };
        let edges = graph.edges.clone();
        let est = estimate_many(budget.trials, sub_seed(budget, 1610 + c as u64), edges.len(), |rng, out| {
            let o = Rounder::Kt.round(&inst, &x, rng)?;
            let steps = o.assignment_steps();
            for (slot, e) in out.iter_mut().zip(&edges) {
                let first = steps[e.verts[0]];
                *slot = if e.verts.iter().any(|&v| steps[v] != first) { 1.0 } else { 0.0 };
            }
            Ok(())
        })?;
        for (j, e) in edges.iter().enumerate() {
            tally.add(&est[j], delta * cut_edge_distance(&x, e));
        }
    }
    Ok(vec![Check::new(
        "kt-split-bound",
        tally.failed == 0,
        format!(
            "{} edges on 10 labeling instances at {} trials, max Pr - Delta d(e) = {:.4}, {} beyond {Z} stderr",
            tally.edges, budget.trials, tally.worst, tally.failed
        ),
    )])
}

/// The logarithmic guarantees carry no explicit constant; this checks mean
/// cost against `10 ln(n + 1)` times the relaxation value.
pub fn log_factor_ceilings(budget: &Budget) -> Result<Vec<Check>> {
    let trials = budget.trials.min(5_000);
    let mut failed = 0;
    let mut worst = 0.0f64;
    for c in 0..10u64 {
        let n = 6 + (c as usize % 4);
        let inst = if c % 2 == 0 {
            random_monotone_msca(n, 3, sub_seed(budget, 1700 + c))?
        } else {
            random_sym_sublabel(n, 3, 0.4, WeightRange::default(), sub_seed(budget, 1700 + c))?
        };
        let rounder = if c % 2 == 0 { Rounder::Kt } else { Rounder::SymSubLabel };
        let rep = solve_lp(&inst)?;
        let est = estimate_rounding(rounder, &inst, &rep.x, trials, sub_seed(budget, 1750 + c), |o| o.cost)?;
        let ceiling = 10.0 * (n as f64 + 1.0).ln() * rep.objective;
        if !est.at_most(ceiling + 1e-9, Z) {
            failed += 1;
        }
        if rep.objective > 0.0 {
            worst = worst.max(est.mean / rep.objective);
        }
    }
    Ok(vec![Check::new(
        "log-factor-ceiling",
        failed == 0,
        format!("10 instances (kt on monotone, sym-sublabel on graph labeling), worst mean / OPT_frac = {worst:.3}, {failed} above 10 ln(n+1)"),
    )])
}

/// The integrality gap construction at `k = 5`, `Delta = 3`.
pub fn gap_example(budget: &Budget) -> Result<Vec<Check>> {
    let (k, delta) = (5, 3);
    let ex = gen_gap_example(k, delta)?;
    let (_, opt) = exact_optimum(&ex.instance)?;
    let candidate = objective(&ex.instance, &ex.x)?;
    let claimed = ex.claimed_fractional;
    let lp = solve_lp(&ex.instance)?.objective;
    let mut opts = SubgradientOptions::new(sub_seed(budget, 18));
    opts.max_iter = 5000;
    let sub = solve_subgradient(&ex.instance, &opts)?.objective;
    let ratio = opt / sub;
    let target_ratio = delta as f64 * (1.0 - 1.0 / k as f64) * 0.99;
    Ok(vec![
        Check::new(
            "gap-integral-optimum",
            (opt - ex.integral_optimum).abs() <= 1e-9,
            format!("enumerated optimum {opt}, closed form C(k-1, Delta-1) = {}", ex.integral_optimum),
        ),
        Check::new(
            "gap-fractional-candidate",
            (candidate - claimed).abs() <= 1e-9,
            format!("extension value of x(i, j) = 1/(k-1) is {candidate}, stated C(k, Delta)/(k-1) = {claimed}"),
        ),
        Check::new(
            "gap-solver-objective",
            sub <= claimed * 1.01,
            format!("subgradient objective {sub:.6} (exact LP optimum {lp:.6}), required <= {:.4}", claimed * 1.01),
        ),
        Check::new(
            "gap-ratio",
            ratio >= target_ratio,
            format!("OPT / solver = {ratio:.4}, required >= {target_ratio:.4}"),
        ),
    ])
}

/// The tight single-edge allocation for CKR at `|e| = 3`, `eps = 0.1`,
/// with `k = 100` labels; its exact split probability is
/// `eps (H_3 - 1/k)`, which approaches `H_3 eps` as `k` grows.
pub fn ckr_tightness(budget: &Budget) -> Result<Vec<Check>> {
    let (m, k, eps) = (3, 100, 0.1);
    let t = gen_ckr_tight_edge(m, k, eps)?;
    let edge = t.instance.hypergraph().expect("hypergraph").edges.clone();
    let d = cut_edge_distance(&t.x, &edge[0]);
    let est = split_estimates(Rounder::Ckr, &t.instance, &t.x, &edge, budget.trials, sub_seed(budget, 19))?[0];
    let target = harmonic(m) * d;
    Ok(vec![
        Check::new("ckr-tight-distance", (d - eps).abs() <= 1e-12, format!("d(e) = {d}, eps = {eps}")),
        Check::new(
            "ckr-tightness",
            est.at_least(target, Z),
            format!(
                "Pr[e split] = {:.5} +- {:.5} over {} trials (k = {k}), required >= H_3 d(e) - {Z} stderr = {:.5}",
                est.mean,
                est.stderr,
                est.trials,
                target - Z * est.stderr
            ),
        ),
    ])
}
