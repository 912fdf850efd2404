use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::MAX_SUBSET_N;
use crate::lovasz::cut_edge_distance;
use crate::model::{FractionalAllocation, ProblemInstance};
use crate::oracle::{Hyperedge, WeightedHypergraph};

/// Node multiway cut instance. Vertices flagged `infinite` cannot be
/// removed; every terminal must be flagged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeWeightedGraph {
    pub weight: Vec<f64>,
    pub infinite: Vec<bool>,
    pub edges: Vec<(usize, usize)>,
    pub terminals: Vec<usize>,
}

impl NodeWeightedGraph {
    pub fn new(weight: Vec<f64>, infinite: Vec<bool>, edges: Vec<(usize, usize)>, terminals: Vec<usize>) -> Result<Self> {
        let g = NodeWeightedGraph {
            weight,
            infinite,
            edges,
            terminals,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.weight.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.infinite.len() != n {
            return Err(Error::InvalidInstance("weight and flag vectors differ in length".into()));
        }
        for (v, &w) in self.weight.iter().enumerate() {
            if !self.infinite[v] && !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidInstance(format!("vertex {v} has weight {w}")));
            }
        }
        if let Some(&(a, b)) = self.edges.iter().find(|&&(a, b)| a >= n || b >= n) {
            return Err(Error::ElementOutOfRange { element: a.max(b), n });
        }
        for (i, &s) in self.terminals.iter().enumerate() {
            if s >= n {
                return Err(Error::ElementOutOfRange { element: s, n });
            }
            if self.terminals[..i].contains(&s) {
                return Err(Error::InvalidInstance(format!("duplicate terminal {s}")));
            }
            if !self.infinite[s] {
                return Err(Error::InvalidInstance(format!("terminal {s} is not flagged infinite")));
            }
        }
        Ok(())
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n()];
        for &(a, b) in &self.edges {
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        adj
    }

    fn is_terminal(&self) -> Vec<bool> {
        let mut t = vec![false; self.n()];
        for &s in &self.terminals {
            t[s] = true;
        }
        t
    }
}

/// One vertex per hyperedge, weighted by the hyperedge and joined to its
/// members. Original vertices keep their ids `0..n` and are flagged
/// infinite; hyperedge `j` becomes vertex `n + j`.
pub fn hmc_to_nwmc(h: &WeightedHypergraph, terminals: &[usize]) -> Result<NodeWeightedGraph> {
    h.validate()?;
    let n = h.n;
    let mut weight = vec![0.0; n];
    let mut infinite = vec![true; n];
    let mut edges = Vec::new();
    for (j, e) in h.edges.iter().enumerate() {
        weight.push(e.w);
        infinite.push(false);
        edges.extend(e.verts.iter().map(|&v| (v, n + j)));
    }
    NodeWeightedGraph::new(weight, infinite, edges, terminals.to_vec())
}

/// Subdivides every edge between two non-terminals; the hypergraph's
/// vertices are the terminals (ids `0..k` in terminal order) followed by the
/// subdivision vertices, and each non-terminal `v` becomes the hyperedge of
/// its neighbours in the subdivided graph with weight `w(v)`. Non-terminals
/// flagged infinite get weight `1 +` the total finite weight, which no
/// optimal cut pays when a finite cut exists. Returns the hypergraph and its
/// terminals.
pub fn nwmc_to_hmc(g: &NodeWeightedGraph) -> Result<(WeightedHypergraph, Vec<usize>)> {
    g.validate()?;
    let is_t = g.is_terminal();
    if let Some(&(a, b)) = g.edges.iter().find(|&&(a, b)| a != b && is_t[a] && is_t[b]) {
        return Err(Error::InvalidInstance(format!(
            "terminals {a} and {b} are adjacent; subdivide that edge with a removable vertex first"
        )));
    }
    let k = g.terminals.len();
    let mut left_id = vec![usize::MAX; g.n()];
    for (i, &s) in g.terminals.iter().enumerate() {
        left_id[s] = i;
    }
    let big = 1.0
        + (0..g.n())
            .filter(|&v| !g.infinite[v])
            .map(|v| g.weight[v])
            .sum::<f64>();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    let mut next = k;
    for &(a, b) in &g.edges {
        if a == b {
            continue;
        }
        match (is_t[a], is_t[b]) {
            (true, false) => members[b].push(left_id[a]),
            (false, true) => members[a].push(left_id[b]),
            _ => {
                members[a].push(next);
                members[b].push(next);
                next += 1;
            }
        }
    }
    let mut hyperedges = Vec::new();
    for v in 0..g.n() {
        if is_t[v] {
            continue;
        }
        let mut verts = std::mem::take(&mut members[v]);
        verts.sort_unstable();
        verts.dedup();
        if verts.is_empty() {
            continue;
        }
        let w = if g.infinite[v] { big } else { g.weight[v] };
        hyperedges.push(Hyperedge::new(verts, w));
    }
    let h = WeightedHypergraph::new(next.max(1), hyperedges)?;
    Ok((h, (0..k).collect()))
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Minimum node multiway cut by enumerating subsets of the removable
/// vertices. `f64::INFINITY` when no removable set separates the terminals.
pub fn node_multiway_cut_brute(g: &NodeWeightedGraph) -> Result<(Vec<usize>, f64)> {
    g.validate()?;
    let removable: Vec<usize> = (0..g.n()).filter(|&v| !g.infinite[v]).collect();
    if removable.len() > MAX_SUBSET_N {
        return Err(Error::TooLarge(format!(
            "{} removable vertices (limit {MAX_SUBSET_N})",
            removable.len()
        )));
    }
    let mut best = (Vec::new(), f64::INFINITY);
    let mut parent = vec![0; g.n()];
    let mut gone = vec![false; g.n()];
    for mask in 0u64..1 << removable.len() {
        let mut w = 0.0;
        for (b, &v) in removable.iter().enumerate() {
            gone[v] = mask >> b & 1 == 1;
            if gone[v] {
                w += g.weight[v];
            }
        }
        if w >= best.1 {
            continue;
        }
        parent.iter_mut().enumerate().for_each(|(i, p)| *p = i);
        for &(a, b) in &g.edges {
            if !gone[a] && !gone[b] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let mut roots: Vec<usize> = g.terminals.iter().map(|&s| find(&mut parent, s)).collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.len() == g.terminals.len() {
            best = (removable.iter().enumerate().filter(|&(b, _)| mask >> b & 1 == 1).map(|(_, &v)| v).collect(), w);
        }
    }
    Ok(best)
}

/// Vertex distances for the node-weighted reduction of a hypergraph
/// multiway cut instance, indexed like [`hmc_to_nwmc`]'s output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceAssignment {
    pub d: Vec<f64>,
}

/// `d = 0` on original vertices and, for the vertex of hyperedge `e` with
/// representative `u`, `d = sum_i (x(u, i) - min_{v in e} x(v, i))`.
pub fn map_x_to_distance(h: &WeightedHypergraph, terminals: &[usize], x: &FractionalAllocation) -> Result<DistanceAssignment> {
    let inst = ProblemInstance::hypergraph_mc(h.clone(), terminals.to_vec())?;
    inst.check_allocation(x, crate::lovasz::FEAS_TOL)?;
    let mut d = vec![0.0; h.n];
    d.extend(h.edges.iter().map(|e| cut_edge_distance(x, e)));
    Ok(DistanceAssignment { d })
}

/// `sum_v d_v w_v` over the removable vertices.
pub fn distance_cost(g: &NodeWeightedGraph, d: &DistanceAssignment) -> f64 {
    (0..g.n())
        .filter(|&v| !g.infinite[v])
        .map(|v| d.d.get(v).copied().unwrap_or(0.0) * g.weight[v])
        .sum()
}

#[derive(PartialEq, PartialOrd)]
struct Key(f64);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Whether every path between two distinct terminals has interior
/// distance at least `1 - 1e-9`. Terminal distances are ignored; negative,
/// non-finite or wrongly sized `d` is infeasible.
pub fn check_distance_feasible(g: &NodeWeightedGraph, d: &DistanceAssignment) -> bool {
    if g.validate().is_err() || d.d.len() != g.n() || d.d.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
        return false;
    }
    let is_t = g.is_terminal();
    let adj = g.adjacency();
    let cost = |v: usize| if is_t[v] { 0.0 } else { d.d[v] };
    for (a, &s) in g.terminals.iter().enumerate() {
        let mut dist = vec![f64::INFINITY; g.n()];
        dist[s] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((Key(0.0), s)));
        while let Some(Reverse((Key(du), u))) = heap.pop() {
            if du > dist[u] {
                continue;
            }
            // Paths end at the first terminal they reach.
            if u != s && is_t[u] {
                continue;
            }
            for &v in &adj[u] {
                let nd = du + cost(v);
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((Key(nd), v)));
                }
            }
        }
        if g.terminals[a + 1..].iter().any(|&t| dist[t] < 1.0 - 1e-9) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_optimum;
    use crate::instances::{gen_ckr_tight_edge, random_feasible_allocation, random_hypergraph, WeightRange};
    use crate::lovasz::objective;
    use crate::model::Partition;

    #[test]
    fn single_edge_becomes_one_vertex() {
        let h = WeightedHypergraph::new(3, vec![Hyperedge::new(vec![0, 1, 2], 4.0)]).unwrap();
        let g = hmc_to_nwmc(&h, &[0, 1]).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.weight[3], 4.0);
        assert!(!g.infinite[3] && g.infinite[..3].iter().all(|&f| f));
        assert_eq!(g.edges, vec![(0, 3), (1, 3), (2, 3)]);
        assert_eq!(node_multiway_cut_brute(&g).unwrap().1, 4.0);
    }

    #[test]
    fn empty_hypergraph() {
        let h = WeightedHypergraph::new(3, vec![]).unwrap();
        let g = hmc_to_nwmc(&h, &[0, 2]).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(node_multiway_cut_brute(&g).unwrap().1, 0.0);
    }

    #[test]
    fn adjacent_terminals_rejected() {
        let g = NodeWeightedGraph::new(vec![0.0, 0.0], vec![true, true], vec![(0, 1)], vec![0, 1]).unwrap();
        assert!(nwmc_to_hmc(&g).is_err());
    }

    #[test]
    fn star_with_weighted_center() {
        // Terminals 0, 1, 2 around center 3 of weight 5.
        let g = NodeWeightedGraph::new(
            vec![0.0, 0.0, 0.0, 5.0],
            vec![true, true, true, false],
            vec![(0, 3), (1, 3), (2, 3)],
            vec![0, 1, 2],
        )
        .unwrap();
        let (h, t) = nwmc_to_hmc(&g).unwrap();
        assert_eq!(h.edges.len(), 1);
        assert_eq!(h.edges[0].verts, vec![0, 1, 2]);
        let inst = ProblemInstance::hypergraph_mc(h, t).unwrap();
        assert_eq!(exact_optimum(&inst).unwrap().1, 5.0);
        assert_eq!(node_multiway_cut_brute(&g).unwrap().1, 5.0);
    }

    #[test]
    fn isolated_terminal() {
        let g = NodeWeightedGraph::new(
            vec![0.0, 0.0, 0.0, 2.0, 3.0],
            vec![true, true, true, false, false],
            vec![(0, 3), (3, 4), (4, 1)],
            vec![0, 1, 2],
        )
        .unwrap();
        let (h, t) = nwmc_to_hmc(&g).unwrap();
        // Subdivision vertex 3 sits between 3 and 4.
        assert_eq!(h.edges.len(), 2);
        assert_eq!(h.edges[0].verts, vec![0, 3]);
        assert_eq!(h.edges[1].verts, vec![1, 3]);
        let inst = ProblemInstance::hypergraph_mc(h, t).unwrap();
        assert_eq!(exact_optimum(&inst).unwrap().1, 2.0);
        assert_eq!(node_multiway_cut_brute(&g).unwrap().1, 2.0);
    }

    #[test]
    fn optima_agree_on_random_instances() {
        for seed in 0..25 {
            let inst = random_hypergraph(6, 3, 5, 3, WeightRange::default(), true, seed).unwrap();
            let h = inst.hypergraph().unwrap();
            let t = inst.terminals().unwrap();
            let opt = exact_optimum(&inst).unwrap().1;
            let g = hmc_to_nwmc(h, t).unwrap();
            assert_eq!(node_multiway_cut_brute(&g).unwrap().1, opt, "seed {seed}");
            let (h2, t2) = nwmc_to_hmc(&g).unwrap();
            let back = ProblemInstance::hypergraph_mc(h2, t2).unwrap();
            assert_eq!(exact_optimum(&back).unwrap().1, opt, "seed {seed}");
        }
    }

    #[test]
    fn tight_edge_distance_is_eps() {
        let t = gen_ckr_tight_edge(3, 3, 0.1).unwrap();
        let h = t.instance.hypergraph().unwrap();
        let d = map_x_to_distance(h, t.instance.terminals().unwrap(), &t.x).unwrap();
        assert_eq!(d.d.len(), h.n + 1);
        assert!((d.d[h.n] - 0.1).abs() < 1e-12);
        assert!(d.d[..h.n].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mapped_distances_feasible_and_no_costlier() {
        for seed in 0..40 {
            let inst = random_hypergraph(7, 3, 6, 4, WeightRange::default(), true, seed).unwrap();
            let (h, t) = (inst.hypergraph().unwrap(), inst.terminals().unwrap());
            let x = random_feasible_allocation(&inst, seed + 100).unwrap();
            let g = hmc_to_nwmc(h, t).unwrap();
            let d = map_x_to_distance(h, t, &x).unwrap();
            assert!(check_distance_feasible(&g, &d), "seed {seed}");
            assert!(distance_cost(&g, &d) <= objective(&inst, &x).unwrap() + 1e-9);
        }
    }

    #[test]
    fn integral_allocation_gives_feasible_distances() {
        let h = WeightedHypergraph::new(4, vec![Hyperedge::new(vec![0, 2], 1.0), Hyperedge::new(vec![2, 3, 1], 1.0)]).unwrap();
        let x = FractionalAllocation::from_partition(&Partition::new(vec![0, 1, 0, 1], 2).unwrap());
        let g = hmc_to_nwmc(&h, &[0, 1]).unwrap();
        let d = map_x_to_distance(&h, &[0, 1], &x).unwrap();
        assert!(check_distance_feasible(&g, &d));
    }

    #[test]
    fn zero_distances_infeasible_when_connected() {
        let h = WeightedHypergraph::new(3, vec![Hyperedge::new(vec![0, 2], 1.0), Hyperedge::new(vec![1, 2], 1.0)]).unwrap();
        let g = hmc_to_nwmc(&h, &[0, 1]).unwrap();
        assert!(!check_distance_feasible(&g, &DistanceAssignment { d: vec![0.0; 5] }));
        // A unit distance on the cut vertex 3 separates the terminals.
        assert!(check_distance_feasible(&g, &DistanceAssignment { d: vec![0.0, 0.0, 0.0, 1.0, 0.0] }));
        assert!(!check_distance_feasible(&g, &DistanceAssignment { d: vec![0.0; 4] }));
    }

    #[test]
    fn uniform_rows_off_terminals_give_zero() {
        let h = WeightedHypergraph::new(5, vec![Hyperedge::new(vec![2, 3, 4], 1.0), Hyperedge::new(vec![0, 2], 1.0)]).unwrap();
        let mut rows = vec![1.0, 0.0, 0.0, 1.0];
        rows.extend([0.5; 6]);
        let x = FractionalAllocation::new(5, 2, rows).unwrap();
        let d = map_x_to_distance(&h, &[0, 1], &x).unwrap();
        assert_eq!(d.d[5], 0.0);
    }
}
