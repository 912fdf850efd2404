//! Submodular value oracles over a dense ground set and the concrete
//! function families used throughout the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::ElementSet;

/// Largest ground set the exhaustive property checks accept.
pub const MAX_CHECK_N: usize = 14;

const CHECK_TOL: f64 = 1e-9;

/// A set function given by value-oracle access.
///
/// Implementations must be pure; the same set always evaluates to the same
/// value and evaluation may happen from several threads at once.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    /// `set` must live in a universe of size [`SetFunction::ground_size`].
    fn eval(&self, set: &ElementSet) -> f64;
}

/// Checked evaluation from an id list.
pub fn eval_ids<F: SetFunction + ?Sized>(f: &F, ids: &[usize]) -> Result<f64> {
    let n = f.ground_size();
    match ids.iter().find(|&&v| v >= n) {
        Some(&v) => Err(Error::ElementOutOfRange { element: v, n }),
        None => Ok(f.eval(&ElementSet::from_ids(n, ids.iter().copied()))),
    }
}

/// Checked evaluation of a set that may come from another universe.
pub fn eval_checked<F: SetFunction + ?Sized>(f: &F, set: &ElementSet) -> Result<f64> {
    let n = f.ground_size();
    if set.universe() != n {
        if let Some(v) = set.iter().find(|&v| v >= n) {
            return Err(Error::ElementOutOfRange { element: v, n });
        }
        return Ok(f.eval(&ElementSet::from_ids(n, set.iter())));
    }
    Ok(f.eval(set))
}

/// Index set with optional display names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundSet {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("ground set must be non-empty".into()));
        }
        Ok(GroundSet { n, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut g = Self::new(labels.len())?;
        g.labels = Some(labels);
        Ok(g)
    }

    pub fn name(&self, v: usize) -> String {
        match &self.labels {
            Some(l) if v < l.len() => l[v].clone(),
            _ => v.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperedge {
    pub verts: Vec<usize>,
    pub w: f64,
    /// Representative vertex; defaults to the first listed vertex.
    pub rep: usize,
}

impl Hyperedge {
    pub fn new(verts: Vec<usize>, w: f64) -> Self {
        let rep = verts.first().copied().unwrap_or(0);
        Hyperedge { verts, w, rep }
    }

    pub fn with_rep(verts: Vec<usize>, w: f64, rep: usize) -> Self {
        Hyperedge { verts, w, rep }
    }

    /// Some but not all vertices in `set`.
    #[inline]
    pub fn crosses(&self, set: &ElementSet) -> bool {
        let mut inside = false;
        let mut outside = false;
        for &v in &self.verts {
            if set.contains(v) {
                inside = true;
            } else {
                outside = true;
            }
            if inside && outside {
                return true;
            }
        }
        false
    }
}

/// Vertex count plus weighted hyperedges, each with a representative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedHypergraph {
    pub n: usize,
    pub edges: Vec<Hyperedge>,
}

impl WeightedHypergraph {
    pub fn new(n: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        let h = WeightedHypergraph { n, edges };
        h.validate()?;
        Ok(h)
    }

    /// Two-uniform hypergraph from a weighted edge list.
    pub fn from_graph(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(
            n,
            edges
                .iter()
                .map(|&(u, v, w)| Hyperedge::new(vec![u, v], w))
                .collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInstance("hypergraph has no vertices".into()));
        }
        for (idx, e) in self.edges.iter().enumerate() {
            if e.verts.is_empty() {
                return Err(Error::InvalidInstance(format!("hyperedge {idx} is empty")));
            }
            if let Some(&v) = e.verts.iter().find(|&&v| v >= self.n) {
                return Err(Error::ElementOutOfRange { element: v, n: self.n });
            }
            let mut sorted = e.verts.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != e.verts.len() {
                return Err(Error::InvalidInstance(format!(
                    "hyperedge {idx} repeats a vertex"
                )));
            }
            if !e.verts.contains(&e.rep) {
                return Err(Error::InvalidInstance(format!(
                    "representative {} of hyperedge {idx} is not a member",
                    e.rep
                )));
            }
            check_weight(e.w, "hyperedge weight")?;
        }
        Ok(())
    }

    /// Largest hyperedge size (`0` with no edges).
    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(|e| e.verts.len()).max().unwrap_or(0)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }
}

fn check_weight(w: f64, what: &str) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        return Err(Error::InvalidInstance(format!(
            "{what} must be finite and non-negative, got {w}"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Weighted "does `set` touch this group" term of a coverage function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageGroup {
    pub elements: Vec<usize>,
    pub w: f64,
}

/// Advisory structural claims. Tests verify them; algorithms never rely on
/// them for correctness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OracleFlags {
    pub is_monotone: bool,
    pub is_symmetric: bool,
}

/// The built-in function families. Every family evaluates to `0` on the
/// empty set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Oracle {
    /// `f(S) = sum_{v in S} weights[v]`.
    Modular { weights: Vec<f64> },
    /// `scale` times the weight of edges with exactly one end in `S`.
    GraphCut {
        n: usize,
        edges: Vec<GraphEdge>,
        scale: f64,
    },
    /// `scale` times the weight of hyperedges crossing `S`.
    HypergraphCut {
        graph: WeightedHypergraph,
        scale: f64,
    },
    /// Weight of hyperedges whose representative is in `S` and that cross `S`.
    HypergraphSeparation { graph: WeightedHypergraph },
    /// Weight of groups that `S` touches.
    Coverage { n: usize, groups: Vec<CoverageGroup> },
    /// `(sum_{v in S} weights[v])^exponent`, exponent in `(0, 1]`.
    ConcaveOfModular { weights: Vec<f64>, exponent: f64 },
    /// Explicit value table indexed by bitmask, `n <= 20`.
    Table { n: usize, values: Vec<f64> },
    /// `g(S) = inner(S + element)` over the ground set with `element` removed;
    /// ids above `element` shift down by one.
    Contracted { inner: Box<Oracle>, element: usize },
    Sum { n: usize, parts: Vec<Oracle> },
}

impl Oracle {
    pub fn modular(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInstance("modular oracle needs n >= 1".into()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInstance("modular weights must be finite".into()));
        }
        Ok(Oracle::Modular { weights })
    }

    pub fn zero(n: usize) -> Self {
        Oracle::Modular {
            weights: vec![0.0; n],
        }
    }

    pub fn coverage(n: usize, groups: Vec<CoverageGroup>) -> Result<Self> {
        for g in &groups {
            check_weight(g.w, "coverage weight")?;
            if let Some(&v) = g.elements.iter().find(|&&v| v >= n) {
                return Err(Error::ElementOutOfRange { element: v, n });
            }
        }
        Ok(Oracle::Coverage { n, groups })
    }

    pub fn concave_of_modular(weights: Vec<f64>, exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent <= 1.0) {
            return Err(Error::InvalidInstance(format!(
                "exponent must lie in (0, 1], got {exponent}"
            )));
        }
        for &w in &weights {
            check_weight(w, "concave-of-modular weight")?;
        }
        Ok(Oracle::ConcaveOfModular { weights, exponent })
    }

    pub fn table(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > 20 || values.len() != 1usize << n {
            return Err(Error::InvalidInstance(format!(
                "value table for n={n} needs 2^n entries (n <= 20)"
            )));
        }
        Ok(Oracle::Table { n, values })
    }

    pub fn sum(n: usize, parts: Vec<Oracle>) -> Result<Self> {
        if let Some(p) = parts.iter().find(|p| p.ground_size() != n) {
            return Err(Error::InvalidInstance(format!(
                "summand over {} elements in a sum over {n}",
                p.ground_size()
            )));
        }
        Ok(Oracle::Sum { n, parts })
    }

    /// Checks invariants that deserialization cannot enforce: ids in range,
    /// finite weights, table sizes, matching summand ground sets.
    pub fn validate(&self) -> Result<()> {
        match self {
            Oracle::Modular { weights } => {
                if weights.is_empty() {
                    return Err(Error::InvalidInstance("modular oracle needs n >= 1".into()));
                }
                if weights.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidInstance("modular weights must be finite".into()));
                }
            }
            Oracle::GraphCut { n, edges, scale } => {
                let triples: Vec<_> = edges.iter().map(|e| (e.u, e.v, e.w)).collect();
                make_graph_cut(*n, &triples, *scale)?;
            }
            Oracle::HypergraphCut { graph, scale } => {
                make_hypergraph_cut(graph, *scale)?;
            }
            Oracle::HypergraphSeparation { graph } => graph.validate()?,
            Oracle::Coverage { n, groups } => {
                if *n == 0 {
                    return Err(Error::InvalidInstance("coverage oracle needs n >= 1".into()));
                }
                Oracle::coverage(*n, groups.clone())?;
            }
            Oracle::ConcaveOfModular { weights, exponent } => {
                if weights.is_empty() {
                    return Err(Error::InvalidInstance("concave oracle needs n >= 1".into()));
                }
                Oracle::concave_of_modular(weights.clone(), *exponent)?;
            }
            Oracle::Table { n, values } => {
                if *n == 0 || *n > 20 || values.len() != 1usize << *n {
                    return Err(Error::InvalidInstance(format!(
                        "value table for n={n} needs 2^n entries (1 <= n <= 20)"
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInstance("table values must be finite".into()));
                }
            }
            Oracle::Contracted { inner, element } => {
                inner.validate()?;
                contract_terminal(inner, *element)?;
            }
            Oracle::Sum { n, parts } => {
                if *n == 0 {
                    return Err(Error::InvalidInstance("sum oracle needs n >= 1".into()));
                }
                for p in parts {
                    p.validate()?;
                }
                Oracle::sum(*n, parts.clone())?;
            }
        }
        Ok(())
    }

    pub fn flags(&self) -> OracleFlags {
        match self {
            Oracle::Modular { weights } => OracleFlags {
                is_monotone: weights.iter().all(|&w| w >= 0.0),
                is_symmetric: weights.iter().all(|&w| w == 0.0),
            },
            Oracle::GraphCut { .. } | Oracle::HypergraphCut { .. } => OracleFlags {
                is_monotone: false,
                is_symmetric: true,
            },
            Oracle::HypergraphSeparation { .. } => OracleFlags::default(),
            Oracle::Coverage { .. } | Oracle::ConcaveOfModular { .. } => OracleFlags {
                is_monotone: true,
                is_symmetric: false,
            },
            Oracle::Table { .. } => OracleFlags::default(),
            Oracle::Contracted { inner, .. } => OracleFlags {
                is_monotone: inner.flags().is_monotone,
                is_symmetric: false,
            },
            Oracle::Sum { parts, .. } => OracleFlags {
                is_monotone: parts.iter().all(|p| p.flags().is_monotone),
                is_symmetric: parts.iter().all(|p| p.flags().is_symmetric),
            },
        }
    }

    /// Decomposes the Lovász extension into linear, max and min pieces when
    /// the family admits it; `None` for families without a compact form.
    pub fn extension_terms(&self) -> Option<Vec<ExtensionTerm>> {
        let mut out = Vec::new();
        self.push_terms(1.0, &mut out).then_some(out)
    }

    fn push_terms(&self, mult: f64, out: &mut Vec<ExtensionTerm>) -> bool {
        match self {
            Oracle::Modular { weights } => {
                out.extend(
                    weights
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0.0)
                        .map(|(element, &c)| ExtensionTerm::Linear {
                            element,
                            coef: mult * c,
                        }),
                );
                true
            }
            Oracle::GraphCut { edges, scale, .. } => {
                for e in edges.iter().filter(|e| e.w != 0.0 && e.u != e.v) {
                    let elements = vec![e.u, e.v];
                    let weight = mult * scale * e.w;
                    out.push(ExtensionTerm::Max {
                        elements: elements.clone(),
                        weight,
                    });
                    out.push(ExtensionTerm::NegMin { elements, weight });
                }
                true
            }
            Oracle::HypergraphCut { graph, scale } => {
                for e in graph.edges.iter().filter(|e| e.w != 0.0 && e.verts.len() > 1) {
                    let weight = mult * scale * e.w;
                    out.push(ExtensionTerm::Max {
                        elements: e.verts.clone(),
                        weight,
                    });
                    out.push(ExtensionTerm::NegMin {
                        elements: e.verts.clone(),
                        weight,
                    });
                }
                true
            }
            Oracle::HypergraphSeparation { graph } => {
                for e in graph.edges.iter().filter(|e| e.w != 0.0 && e.verts.len() > 1) {
                    out.push(ExtensionTerm::Linear {
                        element: e.rep,
                        coef: mult * e.w,
                    });
                    out.push(ExtensionTerm::NegMin {
                        elements: e.verts.clone(),
                        weight: mult * e.w,
                    });
                }
                true
            }
            Oracle::Coverage { groups, .. } => {
                for g in groups.iter().filter(|g| g.w != 0.0 && !g.elements.is_empty()) {
                    out.push(ExtensionTerm::Max {
                        elements: g.elements.clone(),
                        weight: mult * g.w,
                    });
                }
                true
            }
            Oracle::Sum { parts, .. } => parts.iter().all(|p| p.push_terms(mult, out)),
            Oracle::ConcaveOfModular { .. } | Oracle::Table { .. } | Oracle::Contracted { .. } => {
                false
            }
        }
    }
}

/// One piece of a piecewise-linear Lovász extension. Weights of `Max` and
/// `NegMin` are non-negative, so the extension is convex and the pieces
/// linearise under minimisation.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtensionTerm {
    Linear { element: usize, coef: f64 },
    /// `weight * max_{v in elements} x_v`
    Max { elements: Vec<usize>, weight: f64 },
    /// `-weight * min_{v in elements} x_v`
    NegMin { elements: Vec<usize>, weight: f64 },
}

impl ExtensionTerm {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            ExtensionTerm::Linear { element, coef } => coef * x[*element],
            ExtensionTerm::Max { elements, weight } => {
                weight * elements.iter().map(|&v| x[v]).fold(f64::NEG_INFINITY, f64::max)
            }
            ExtensionTerm::NegMin { elements, weight } => {
                -weight * elements.iter().map(|&v| x[v]).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

impl SetFunction for Oracle {
    fn ground_size(&self) -> usize {
        match self {
            Oracle::Modular { weights } => weights.len(),
            Oracle::GraphCut { n, .. } => *n,
            Oracle::HypergraphCut { graph, .. } => graph.n,
            Oracle::HypergraphSeparation { graph } => graph.n,
            Oracle::Coverage { n, .. } => *n,
            Oracle::ConcaveOfModular { weights, .. } => weights.len(),
            Oracle::Table { n, .. } => *n,
            Oracle::Contracted { inner, .. } => inner.ground_size() - 1,
            Oracle::Sum { n, .. } => *n,
        }
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        match self {
            Oracle::Modular { weights } => set.iter().map(|v| weights[v]).sum(),
            Oracle::GraphCut { edges, scale, .. } => {
                let cut: f64 = edges
                    .iter()
                    .filter(|e| set.contains(e.u) != set.contains(e.v))
                    .map(|e| e.w)
                    .sum();
                scale * cut
            }
            Oracle::HypergraphCut { graph, scale } => {
                let cut: f64 = graph
                    .edges
                    .iter()
                    .filter(|e| e.crosses(set))
                    .map(|e| e.w)
                    .sum();
                scale * cut
            }
            Oracle::HypergraphSeparation { graph } => graph
                .edges
                .iter()
                .filter(|e| set.contains(e.rep) && e.crosses(set))
                .map(|e| e.w)
                .sum(),
            Oracle::Coverage { groups, .. } => groups
                .iter()
                .filter(|g| g.elements.iter().any(|&v| set.contains(v)))
                .map(|g| g.w)
                .sum(),
            Oracle::ConcaveOfModular { weights, exponent } => {
                let s: f64 = set.iter().map(|v| weights[v]).sum();
                if s <= 0.0 {
                    0.0
                } else {
                    s.powf(*exponent)
                }
            }
            Oracle::Table { values, .. } => values[set.mask() as usize],
            Oracle::Contracted { inner, element } => {
                let big = inner.ground_size();
                let mut lifted = ElementSet::empty(big);
                lifted.insert(*element);
                for v in set.iter() {
                    lifted.insert(if v < *element { v } else { v + 1 });
                }
                inner.eval(&lifted)
            }
            Oracle::Sum { parts, .. } => parts.iter().map(|p| p.eval(set)).sum(),
        }
    }
}

/// Graph cut oracle. `scale = 0.5` gives the multiway-cut embedding where each
/// cut edge is paid once across the two sides.
pub fn make_graph_cut(n: usize, edges: &[(usize, usize, f64)], scale: f64) -> Result<Oracle> {
    if n == 0 {
        return Err(Error::InvalidInstance("graph has no vertices".into()));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidInstance(format!("scale must be positive, got {scale}")));
    }
    let mut out = Vec::with_capacity(edges.len());
    for &(u, v, w) in edges {
        if u >= n || v >= n {
            return Err(Error::ElementOutOfRange { element: u.max(v), n });
        }
        check_weight(w, "edge weight")?;
        out.push(GraphEdge { u, v, w });
    }
    Ok(Oracle::GraphCut {
        n,
        edges: out,
        scale,
    })
}

pub fn make_hypergraph_cut(graph: &WeightedHypergraph, scale: f64) -> Result<Oracle> {
    graph.validate()?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidInstance(format!("scale must be positive, got {scale}")));
    }
    Ok(Oracle::HypergraphCut {
        graph: graph.clone(),
        scale,
    })
}

pub fn make_hypergraph_separation(graph: &WeightedHypergraph) -> Result<Oracle> {
    graph.validate()?;
    Ok(Oracle::HypergraphSeparation {
        graph: graph.clone(),
    })
}

/// `g(S) = f(S + s)` over `V - s`.
pub fn contract_terminal(f: &Oracle, s: usize) -> Result<Oracle> {
    let n = f.ground_size();
    if s >= n {
        return Err(Error::ElementOutOfRange { element: s, n });
    }
    if n < 2 {
        return Err(Error::InvalidInstance(
            "contracting the only element leaves an empty ground set".into(),
        ));
    }
    Ok(Oracle::Contracted {
        inner: Box::new(f.clone()),
        element: s,
    })
}

/// All `2^n` values indexed by bitmask.
pub fn value_table<F: SetFunction + ?Sized>(f: &F) -> Result<Vec<f64>> {
    let n = f.ground_size();
    if n > MAX_CHECK_N {
        return Err(Error::TooLarge(format!(
            "exhaustive check needs n <= {MAX_CHECK_N}, got {n}"
        )));
    }
    Ok((0..1u64 << n)
        .map(|m| f.eval(&ElementSet::from_mask(n, m)))
        .collect())
}

fn tol_for(values: &[f64]) -> f64 {
    let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    CHECK_TOL * scale
}

/// Exhaustive submodularity check through the equivalent local condition
/// `f(S+a) + f(S+b) >= f(S+a+b) + f(S)` for all `S` and `a, b` outside `S`.
pub fn check_submodular<F: SetFunction + ?Sized>(f: &F) -> Result<bool> {
    let vals = value_table(f)?;
    let n = f.ground_size();
    let tol = tol_for(&vals);
    for s in 0..vals.len() {
        for a in (0..n).filter(|a| s >> a & 1 == 0) {
            for b in (a + 1..n).filter(|b| s >> b & 1 == 0) {
                let sa = s | 1 << a;
                let sb = s | 1 << b;
                if vals[sa] + vals[sb] < vals[sa | 1 << b] + vals[s] - tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub fn check_monotone<F: SetFunction + ?Sized>(f: &F) -> Result<bool> {
    let vals = value_table(f)?;
    let n = f.ground_size();
    let tol = tol_for(&vals);
    Ok((0..vals.len()).all(|s| {
        (0..n)
            .filter(|a| s >> a & 1 == 0)
            .all(|a| vals[s] <= vals[s | 1 << a] + tol)
    }))
}

pub fn check_symmetric<F: SetFunction + ?Sized>(f: &F) -> Result<bool> {
    let vals = value_table(f)?;
    let full = vals.len() - 1;
    let tol = tol_for(&vals);
    Ok((0..vals.len()).all(|s| (vals[s] - vals[full ^ s]).abs() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(scale: f64) -> Oracle {
        make_graph_cut(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], scale).unwrap()
    }

    fn set(n: usize, ids: &[usize]) -> ElementSet {
        ElementSet::from_ids(n, ids.iter().copied())
    }

    #[test]
    fn graph_cut_values() {
        let half = triangle(0.5);
        assert_eq!(half.eval(&set(3, &[0])), 1.0);
        assert_eq!(half.eval(&set(3, &[0, 1])), 1.0);
        assert_eq!(half.eval(&ElementSet::full(3)), 0.0);
        assert_eq!(half.eval(&ElementSet::empty(3)), 0.0);

        let path = make_graph_cut(3, &[(0, 1, 1.0), (1, 2, 1.0)], 1.0).unwrap();
        assert_eq!(path.eval(&set(3, &[1])), 2.0);
    }

    #[test]
    fn hypergraph_cut_values() {
        let h = WeightedHypergraph::new(3, vec![Hyperedge::new(vec![0, 1, 2], 1.0)]).unwrap();
        let f = make_hypergraph_cut(&h, 1.0).unwrap();
        assert_eq!(f.eval(&set(3, &[0])), 1.0);
        assert_eq!(f.eval(&set(3, &[0, 1, 2])), 0.0);
    }

    #[test]
    fn separation_values() {
        let h = WeightedHypergraph::new(2, vec![Hyperedge::with_rep(vec![0, 1], 1.0, 0)]).unwrap();
        let f = make_hypergraph_separation(&h).unwrap();
        assert_eq!(f.eval(&set(2, &[0])), 1.0);
        assert_eq!(f.eval(&set(2, &[1])), 0.0);

        let h = WeightedHypergraph::new(3, vec![Hyperedge::with_rep(vec![0, 1, 2], 3.0, 0)]).unwrap();
        let f = make_hypergraph_separation(&h).unwrap();
        assert_eq!(f.eval(&set(3, &[0, 2])), 3.0);
        let h = WeightedHypergraph::new(3, vec![Hyperedge::with_rep(vec![0, 1, 2], 2.0, 0)]).unwrap();
        let f = make_hypergraph_separation(&h).unwrap();
        assert_eq!(f.eval(&set(3, &[0, 1])), 2.0);
        assert_eq!(f.eval(&ElementSet::full(3)), 0.0);
        assert!(!check_symmetric(&f).unwrap());
        assert!(check_submodular(&f).unwrap());
    }

    #[test]
    fn eval_rejects_out_of_range() {
        let f = triangle(1.0);
        assert!(matches!(
            eval_ids(&f, &[0, 3]),
            Err(Error::ElementOutOfRange { element: 3, n: 3 })
        ));
        assert_eq!(eval_ids(&f, &[0]).unwrap(), 2.0);
        assert!(eval_checked(&f, &ElementSet::from_ids(5, [4])).is_err());
        assert_eq!(eval_checked(&f, &ElementSet::from_ids(5, [2])).unwrap(), 2.0);
    }

    #[test]
    fn contraction() {
        let f = make_graph_cut(2, &[(0, 1, 3.0)], 0.5).unwrap();
        let g = contract_terminal(&f, 0).unwrap();
        assert_eq!(g.ground_size(), 1);
        assert_eq!(g.eval(&ElementSet::empty(1)), 1.5);
        assert_eq!(g.eval(&ElementSet::full(1)), f.eval(&ElementSet::full(2)));
        assert!(contract_terminal(&f, 2).is_err());
    }

    #[test]
    fn flag_checks() {
        let cut = triangle(1.0);
        assert!(check_submodular(&cut).unwrap());
        assert!(check_symmetric(&cut).unwrap());
        assert!(!check_monotone(&cut).unwrap());

        let pos = Oracle::modular(vec![1.0, 2.0, 0.0]).unwrap();
        assert!(check_monotone(&pos).unwrap());
        assert!(check_submodular(&pos).unwrap());
        assert!(!check_symmetric(&pos).unwrap());
        let neg = Oracle::modular(vec![1.0, -2.0]).unwrap();
        assert!(!check_monotone(&neg).unwrap());
        assert!(check_submodular(&neg).unwrap());

        let big = Oracle::zero(MAX_CHECK_N + 1);
        assert!(matches!(check_submodular(&big), Err(Error::TooLarge(_))));
    }

    #[test]
    fn non_submodular_table_is_detected() {
        // f(S) = |S|^2 is supermodular.
        let vals = (0..8u32).map(|m| (m.count_ones() as f64).powi(2)).collect();
        let f = Oracle::table(3, vals).unwrap();
        assert!(!check_submodular(&f).unwrap());
    }

    #[test]
    fn hypergraph_validation() {
        assert!(WeightedHypergraph::new(2, vec![Hyperedge::new(vec![], 1.0)]).is_err());
        assert!(WeightedHypergraph::new(2, vec![Hyperedge::with_rep(vec![0], 1.0, 1)]).is_err());
        assert!(WeightedHypergraph::new(2, vec![Hyperedge::new(vec![0, 0], 1.0)]).is_err());
        assert!(WeightedHypergraph::new(2, vec![Hyperedge::new(vec![0, 1], -1.0)]).is_err());
        assert!(WeightedHypergraph::new(2, vec![Hyperedge::new(vec![0, 2], 1.0)]).is_err());
    }
}
