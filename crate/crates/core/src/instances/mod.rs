//! Instance constructors: random generators, the gap and tight-edge
//! constructions, the node-weighted multiway cut reductions and JSON I/O.

mod constructions;
mod json;
mod reductions;

use crate::error::{Error, Result};
use crate::model::{FractionalAllocation, LabelingInstance, MscaInstance, ProblemInstance, SubMpInstance};
use crate::oracle::{make_graph_cut, make_hypergraph_separation, CoverageGroup, Hyperedge, Oracle, WeightedHypergraph};
use crate::rounding::Rng;

pub use constructions::{gen_ckr_tight_edge, gen_gap_example, GapExample, TightEdge};
pub use json::{
    allocation_from_json, allocation_to_json, content_hash, instance_from_json, instance_hash, instance_to_json, AllocationDoc,
    EdgeDoc, InstanceDoc, Provenance, SCHEMA_VERSION,
};
pub use reductions::{
    check_distance_feasible, distance_cost, hmc_to_nwmc, map_x_to_distance, node_multiway_cut_brute, nwmc_to_hmc,
    DistanceAssignment, NodeWeightedGraph,
};

/// Inclusive integer weight range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightRange {
    pub lo: u32,
    pub hi: u32,
}

impl WeightRange {
    pub fn new(lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInstance(format!("empty weight range [{lo}, {hi}]")));
        }
        Ok(WeightRange { lo, hi })
    }

    fn draw(&self, rng: &mut Rng) -> f64 {
        (self.lo + rng.below((self.hi - self.lo + 1) as usize) as u32) as f64
    }
}

impl Default for WeightRange {
    fn default() -> Self {
        WeightRange { lo: 1, hi: 5 }
    }
}

fn draw_terminals(n: usize, k: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(Error::InvalidInstance(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let mut perm = rng.permutation(n);
    perm.truncate(k);
    Ok(perm)
}

fn random_edges(n: usize, m: usize, delta: usize, weights: WeightRange, rng: &mut Rng) -> Result<Vec<Hyperedge>> {
    if delta < 2 || n < 2 {
        return Err(Error::InvalidInstance(format!("need n >= 2 and edge size bound >= 2, got n={n}, {delta}")));
    }
    let top = delta.min(n);
    Ok((0..m)
        .map(|_| {
            let size = 2 + rng.below(top - 1);
            let mut verts = rng.permutation(n);
            verts.truncate(size);
            verts.sort_unstable();
            let rep = verts[rng.below(size)];
            Hyperedge::with_rep(verts, weights.draw(rng), rep)
        })
        .collect())
}

/// Graph multiway cut as a submodular multiway partition instance: each pair
/// is an edge with probability `density`, and the oracle is half the cut
/// weight so that a partition pays each cut edge once.
pub fn random_graph_mc(n: usize, k: usize, density: f64, weights: WeightRange, seed: u64) -> Result<ProblemInstance> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidInstance(format!("density must lie in [0, 1], got {density}")));
    }
    let mut rng = Rng::new(seed);
    let terminals = draw_terminals(n, k, &mut rng)?;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.uniform() < density {
                edges.push((u, v, weights.draw(&mut rng)));
            }
        }
    }
    let oracle = make_graph_cut(n, &edges, 0.5)?;
    Ok(ProblemInstance::SubMp(SubMpInstance::new(oracle, terminals)?))
}

/// `m` hyperedges of size `2..=delta`, random representatives. `cut` selects
/// the multiway cut objective, otherwise multiway partition.
pub fn random_hypergraph(
    n: usize,
    k: usize,
    m: usize,
    delta: usize,
    weights: WeightRange,
    cut: bool,
    seed: u64,
) -> Result<ProblemInstance> {
    let mut rng = Rng::new(seed);
    let terminals = draw_terminals(n, k, &mut rng)?;
    let graph = WeightedHypergraph::new(n, random_edges(n, m, delta, weights, &mut rng)?)?;
    if cut {
        ProblemInstance::hypergraph_mc(graph, terminals)
    } else {
        ProblemInstance::hypergraph_mp(graph, terminals)
    }
}

/// Labeling instance with integer assignment costs in `[0, 3]` and a
/// hypergraph separation oracle.
pub fn random_sublabel(n: usize, k: usize, m: usize, delta: usize, weights: WeightRange, seed: u64) -> Result<ProblemInstance> {
    let mut rng = Rng::new(seed);
    let g = random_modular_costs(n, k, &mut rng)?;
    let graph = WeightedHypergraph::new(n, random_edges(n, m, delta, weights, &mut rng)?)?;
    let h = make_hypergraph_separation(&graph)?;
    Ok(ProblemInstance::SubLabel(LabelingInstance::new(g, h, None)?))
}

/// Labeling instance whose `h` is a (symmetric) graph cut.
pub fn random_sym_sublabel(n: usize, k: usize, density: f64, weights: WeightRange, seed: u64) -> Result<ProblemInstance> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidInstance(format!("density must lie in [0, 1], got {density}")));
    }
    let mut rng = Rng::new(seed);
    let g = random_modular_costs(n, k, &mut rng)?;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.uniform() < density {
                edges.push((u, v, weights.draw(&mut rng)));
            }
        }
    }
    let h = make_graph_cut(n, &edges, 1.0)?;
    Ok(ProblemInstance::SubLabel(LabelingInstance::new(g, h, None)?))
}

fn random_modular_costs(n: usize, k: usize, rng: &mut Rng) -> Result<Vec<Oracle>> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInstance("need n, k >= 1".into()));
    }
    (0..k)
        .map(|_| Oracle::modular((0..n).map(|_| rng.below(4) as f64).collect()))
        .collect()
}

/// Monotone MSCA: each label costs a non-negative modular term plus a
/// weighted coverage of three random groups.
pub fn random_monotone_msca(n: usize, k: usize, seed: u64) -> Result<ProblemInstance> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInstance("need n, k >= 1".into()));
    }
    let mut rng = Rng::new(seed);
    let mut oracles = Vec::with_capacity(k);
    for _ in 0..k {
        let modular = Oracle::modular((0..n).map(|_| rng.below(4) as f64).collect())?;
        let groups = (0..3)
            .map(|_| {
                let size = 1 + rng.below(n.min(3));
                let mut elements = rng.permutation(n);
                elements.truncate(size);
                elements.sort_unstable();
                CoverageGroup {
                    elements,
                    w: 1.0 + rng.below(4) as f64,
                }
            })
            .collect();
        let coverage = Oracle::coverage(n, groups)?;
        oracles.push(Oracle::sum(n, vec![modular, coverage])?);
    }
    Ok(ProblemInstance::Msca(MscaInstance::new(oracles, None)?))
}

/// A random allocation that is feasible for `instance`: rows are
/// exponential draws over the allowed labels, normalized; pinned rows are
/// unit vectors. Roughly a quarter of the entries are zeroed first to get
/// sparse rows and ties.
pub fn random_feasible_allocation(instance: &ProblemInstance, seed: u64) -> Result<FractionalAllocation> {
    let (n, k) = (instance.n(), instance.k());
    let mut rng = Rng::new(seed);
    let pinned = instance.pinned();
    let mut x = vec![0.0; n * k];
    for v in 0..n {
        let row = &mut x[v * k..(v + 1) * k];
        if let Some(i) = pinned[v] {
            row[i] = 1.0;
            continue;
        }
        let allowed: Vec<usize> = (0..k).filter(|&i| instance.allowed(v, i)).collect();
        loop {
            for &i in &allowed {
                row[i] = if rng.uniform() < 0.25 { 0.0 } else { -(rng.theta()).ln() };
            }
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter_mut().for_each(|a| *a /= s);
                break;
            }
        }
    }
    let x = FractionalAllocation::new(n, k, x)?;
    match instance.terminals() {
        Some(t) => x.with_terminals(t.to_vec()),
        None => Ok(x),
    }
}
