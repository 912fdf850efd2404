//! Allocations, partitions and the problem instances that tie oracles to
//! labels.
//!
//! Labels are `0..k`. For terminal problems terminal `i` is pinned to label
//! `i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{
    make_hypergraph_cut, make_hypergraph_separation, Oracle, SetFunction, WeightedHypergraph,
};
use crate::set::ElementSet;

/// Row-sum tolerance every constructor and solver output satisfies.
pub const ROW_TOL: f64 = 1e-9;

/// An `n x k` row-stochastic matrix, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalAllocation {
    n: usize,
    k: usize,
    x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terminals: Option<Vec<usize>>,
}

impl FractionalAllocation {
    pub fn new(n: usize, k: usize, x: Vec<f64>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InfeasibleAllocation("empty allocation".into()));
        }
        if x.len() != n * k {
            return Err(Error::InfeasibleAllocation(format!(
                "expected {} entries for {n}x{k}, got {}",
                n * k,
                x.len()
            )));
        }
        let a = FractionalAllocation {
            n,
            k,
            x,
            terminals: None,
        };
        a.check_rows(ROW_TOL)?;
        Ok(a)
    }

    /// Clamps negatives and rescales each row; for solver output that is
    /// feasible up to round-off.
    pub fn from_rows_normalized(n: usize, k: usize, mut x: Vec<f64>) -> Result<Self> {
        if x.len() != n * k {
            return Err(Error::InfeasibleAllocation("dimension mismatch".into()));
        }
        for row in x.chunks_mut(k) {
            for e in row.iter_mut() {
                if !e.is_finite() {
                    return Err(Error::InfeasibleAllocation("non-finite entry".into()));
                }
                if *e < 0.0 {
                    *e = 0.0;
                }
            }
            let s: f64 = row.iter().sum();
            if s <= 0.0 {
                return Err(Error::InfeasibleAllocation("row with zero mass".into()));
            }
            for e in row.iter_mut() {
                *e = (*e / s).min(1.0);
            }
        }
        Self::new(n, k, x)
    }

    pub fn uniform(n: usize, k: usize) -> Self {
        FractionalAllocation {
            n,
            k,
            x: vec![1.0 / k as f64; n * k],
            terminals: None,
        }
    }

    pub fn from_partition(p: &Partition) -> Self {
        let mut x = vec![0.0; p.n() * p.k()];
        for (v, &l) in p.labels().iter().enumerate() {
            x[v * p.k() + l] = 1.0;
        }
        FractionalAllocation {
            n: p.n(),
            k: p.k(),
            x,
            terminals: None,
        }
    }

    /// Attaches terminal `i -> vertex` pins, checking `x(s_i, i) = 1`.
    pub fn with_terminals(mut self, terminals: Vec<usize>) -> Result<Self> {
        if terminals.len() != self.k {
            return Err(Error::InfeasibleAllocation(format!(
                "{} terminals for k = {}",
                terminals.len(),
                self.k
            )));
        }
        for (i, &s) in terminals.iter().enumerate() {
            if s >= self.n {
                return Err(Error::ElementOutOfRange {
                    element: s,
                    n: self.n,
                });
            }
            for j in 0..self.k {
                let want = if i == j { 1.0 } else { 0.0 };
                if (self.get(s, j) - want).abs() > ROW_TOL {
                    return Err(Error::InfeasibleAllocation(format!(
                        "terminal {s} of label {i} has x[{s},{j}] = {}",
                        self.get(s, j)
                    )));
                }
            }
        }
        self.terminals = Some(terminals);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terminals(&self) -> Option<&[usize]> {
        self.terminals.as_deref()
    }

    #[inline]
    pub fn get(&self, v: usize, i: usize) -> f64 {
        self.x[v * self.k + i]
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.x[v * self.k..(v + 1) * self.k]
    }

    /// The vector `x_i = (x(v, i))_v`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|v| self.get(v, i)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.x
    }

    pub fn is_integral(&self) -> bool {
        self.x.iter().all(|&e| e == 0.0 || e == 1.0)
    }

    /// The partition encoded by an integral allocation.
    pub fn to_partition(&self) -> Option<Partition> {
        if !self.is_integral() {
            return None;
        }
        let labels = (0..self.n)
            .map(|v| self.row(v).iter().position(|&e| e == 1.0))
            .collect::<Option<Vec<_>>>()?;
        Partition::new(labels, self.k).ok()
    }

    fn check_rows(&self, tol: f64) -> Result<()> {
        for v in 0..self.n {
            let row = self.row(v);
            if let Some(e) = row.iter().find(|e| !e.is_finite() || **e < -tol || **e > 1.0 + tol) {
                return Err(Error::InfeasibleAllocation(format!(
                    "x[{v},.] has entry {e} outside [0, 1]"
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::InfeasibleAllocation(format!(
                    "row {v} sums to {s}"
                )));
            }
        }
        Ok(())
    }
}

/// A total assignment of elements to labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&l) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::LabelOutOfRange { label: l, k });
        }
        Ok(Partition { labels, k })
    }

    /// Builds a partition from blocks that must cover `0..n` disjointly.
    pub fn from_blocks(blocks: &[ElementSet]) -> Result<Self> {
        let n = blocks
            .first()
            .map(|b| b.universe())
            .ok_or_else(|| Error::InvalidInstance("no blocks".into()))?;
        let mut labels = vec![usize::MAX; n];
        for (i, b) in blocks.iter().enumerate() {
            for v in b.iter() {
                if labels[v] != usize::MAX {
                    return Err(Error::InvalidInstance(format!(
                        "element {v} in blocks {} and {i}",
                        labels[v]
                    )));
                }
                labels[v] = i;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidInstance(format!("element {v} unassigned")));
        }
        Ok(Partition {
            labels,
            k: blocks.len(),
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn blocks(&self) -> Vec<ElementSet> {
        let n = self.n();
        let mut out = vec![ElementSet::empty(n); self.k];
        for (v, &l) in self.labels.iter().enumerate() {
            out[l].insert(v);
        }
        out
    }

    /// True when the vertices of `edge` do not all share a label.
    pub fn splits(&self, edge: &[usize]) -> bool {
        edge.windows(2).any(|w| self.labels[w[0]] != self.labels[w[1]])
    }
}

/// Forbidden `(element, label)` pairs, standing in for infinite costs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenMask {
    n: usize,
    k: usize,
    mask: Vec<bool>,
}

impl ForbiddenMask {
    pub fn none(n: usize, k: usize) -> Self {
        ForbiddenMask {
            n,
            k,
            mask: vec![false; n * k],
        }
    }

    pub fn from_pairs(n: usize, k: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut m = Self::none(n, k);
        for &(v, i) in pairs {
            if v >= n {
                return Err(Error::ElementOutOfRange { element: v, n });
            }
            if i >= k {
                return Err(Error::LabelOutOfRange { label: i, k });
            }
            m.mask[v * k + i] = true;
        }
        Ok(m)
    }

    #[inline]
    pub fn is_forbidden(&self, v: usize, i: usize) -> bool {
        self.mask[v * self.k + i]
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|v| (0..self.k).map(move |i| (v, i)))
            .filter(|&(v, i)| self.is_forbidden(v, i))
            .collect()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.k)
    }
}

/// MSCA: one oracle per label.
#[derive(Clone, Debug, PartialEq)]
pub struct MscaInstance {
    pub oracles: Vec<Oracle>,
    pub forbidden: Option<ForbiddenMask>,
}

/// Submodular multiway partition: one oracle, `k` terminals.
#[derive(Clone, Debug, PartialEq)]
pub struct SubMpInstance {
    pub oracle: Oracle,
    pub terminals: Vec<usize>,
}

/// Hypergraph multiway partition or cut. The per-label oracle is the
/// hypergraph cut function (partition) or the separation function (cut).
#[derive(Clone, Debug, PartialEq)]
pub struct HypergraphInstance {
    pub graph: WeightedHypergraph,
    pub terminals: Vec<usize>,
    oracle: Oracle,
}

/// Submodular cost labeling: assignment costs `g_i` plus a separation
/// oracle `h` charged on every block.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelingInstance {
    pub g: Vec<Oracle>,
    pub h: Oracle,
    pub forbidden: Option<ForbiddenMask>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Msca,
    SubMp,
    HypergraphMp,
    HypergraphMc,
    SubLabel,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemInstance {
    Msca(MscaInstance),
    SubMp(SubMpInstance),
    HypergraphMp(HypergraphInstance),
    HypergraphMc(HypergraphInstance),
    SubLabel(LabelingInstance),
}

fn check_terminals(n: usize, terminals: &[usize]) -> Result<()> {
    if terminals.is_empty() {
        return Err(Error::InvalidInstance("at least one terminal required".into()));
    }
    for (i, &s) in terminals.iter().enumerate() {
        if s >= n {
            return Err(Error::ElementOutOfRange { element: s, n });
        }
        if terminals[..i].contains(&s) {
            return Err(Error::InvalidInstance(format!("duplicate terminal {s}")));
        }
    }
    Ok(())
}

fn check_mask(mask: &Option<ForbiddenMask>, n: usize, k: usize) -> Result<()> {
    if let Some(m) = mask {
        if m.dims() != (n, k) {
            return Err(Error::InvalidInstance("forbidden mask has wrong shape".into()));
        }
        if let Some(v) = (0..n).find(|&v| (0..k).all(|i| m.is_forbidden(v, i))) {
            return Err(Error::InvalidInstance(format!(
                "element {v} has every label forbidden"
            )));
        }
    }
    Ok(())
}

impl MscaInstance {
    pub fn new(oracles: Vec<Oracle>, forbidden: Option<ForbiddenMask>) -> Result<Self> {
        for o in &oracles {
            o.validate()?;
        }
        let n = oracles
            .first()
            .map(|o| o.ground_size())
            .ok_or_else(|| Error::InvalidInstance("MSCA needs k >= 1 oracles".into()))?;
        if oracles.iter().any(|o| o.ground_size() != n) {
            return Err(Error::InvalidInstance("oracles disagree on ground set".into()));
        }
        check_mask(&forbidden, n, oracles.len())?;
        Ok(MscaInstance { oracles, forbidden })
    }

    /// Per-element costs `costs[v][i]`.
    pub fn modular(costs: &[Vec<f64>]) -> Result<Self> {
        let k = costs.first().map(|r| r.len()).unwrap_or(0);
        if k == 0 || costs.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidInstance("cost matrix must be n x k, k >= 1".into()));
        }
        let oracles = (0..k)
            .map(|i| Oracle::modular(costs.iter().map(|r| r[i]).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(oracles, None)
    }
}

impl SubMpInstance {
    pub fn new(oracle: Oracle, terminals: Vec<usize>) -> Result<Self> {
        oracle.validate()?;
        check_terminals(oracle.ground_size(), &terminals)?;
        Ok(SubMpInstance { oracle, terminals })
    }
}

impl HypergraphInstance {
    fn build(graph: WeightedHypergraph, terminals: Vec<usize>, oracle: Oracle) -> Result<Self> {
        check_terminals(graph.n, &terminals)?;
        Ok(HypergraphInstance {
            graph,
            terminals,
            oracle,
        })
    }

    pub fn oracle(&self) -> &Oracle {
        &self.oracle
    }
}

impl LabelingInstance {
    pub fn new(g: Vec<Oracle>, h: Oracle, forbidden: Option<ForbiddenMask>) -> Result<Self> {
        h.validate()?;
        for o in &g {
            o.validate()?;
        }
        let n = h.ground_size();
        if g.is_empty() {
            return Err(Error::InvalidInstance("labeling needs k >= 1".into()));
        }
        if g.iter().any(|o| o.ground_size() != n) {
            return Err(Error::InvalidInstance("oracles disagree on ground set".into()));
        }
        check_mask(&forbidden, n, g.len())?;
        Ok(LabelingInstance { g, h, forbidden })
    }
}

/// The per-label cost function of an instance, borrowed.
#[derive(Clone, Copy, Debug)]
pub enum LabelOracle<'a> {
    Single(&'a Oracle),
    Pair(&'a Oracle, &'a Oracle),
}

impl SetFunction for LabelOracle<'_> {
    fn ground_size(&self) -> usize {
        match self {
            LabelOracle::Single(f) | LabelOracle::Pair(f, _) => f.ground_size(),
        }
    }

    fn eval(&self, set: &ElementSet) -> f64 {
        match self {
            LabelOracle::Single(f) => f.eval(set),
            LabelOracle::Pair(g, h) => g.eval(set) + h.eval(set),
        }
    }
}

impl ProblemInstance {
    pub fn hypergraph_mp(graph: WeightedHypergraph, terminals: Vec<usize>) -> Result<Self> {
        let oracle = make_hypergraph_cut(&graph, 1.0)?;
        Ok(ProblemInstance::HypergraphMp(HypergraphInstance::build(
            graph, terminals, oracle,
        )?))
    }

    pub fn hypergraph_mc(graph: WeightedHypergraph, terminals: Vec<usize>) -> Result<Self> {
        let oracle = make_hypergraph_separation(&graph)?;
        Ok(ProblemInstance::HypergraphMc(HypergraphInstance::build(
            graph, terminals, oracle,
        )?))
    }

    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemInstance::Msca(_) => ProblemKind::Msca,
            ProblemInstance::SubMp(_) => ProblemKind::SubMp,
            ProblemInstance::HypergraphMp(_) => ProblemKind::HypergraphMp,
            ProblemInstance::HypergraphMc(_) => ProblemKind::HypergraphMc,
            ProblemInstance::SubLabel(_) => ProblemKind::SubLabel,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ProblemInstance::Msca(m) => m.oracles[0].ground_size(),
            ProblemInstance::SubMp(s) => s.oracle.ground_size(),
            ProblemInstance::HypergraphMp(h) | ProblemInstance::HypergraphMc(h) => h.graph.n,
            ProblemInstance::SubLabel(l) => l.h.ground_size(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            ProblemInstance::Msca(m) => m.oracles.len(),
            ProblemInstance::SubMp(s) => s.terminals.len(),
            ProblemInstance::HypergraphMp(h) | ProblemInstance::HypergraphMc(h) => {
                h.terminals.len()
            }
            ProblemInstance::SubLabel(l) => l.g.len(),
        }
    }

    pub fn terminals(&self) -> Option<&[usize]> {
        match self {
            ProblemInstance::SubMp(s) => Some(&s.terminals),
            ProblemInstance::HypergraphMp(h) | ProblemInstance::HypergraphMc(h) => {
                Some(&h.terminals)
            }
            _ => None,
        }
    }

    pub fn forbidden(&self) -> Option<&ForbiddenMask> {
        match self {
            ProblemInstance::Msca(m) => m.forbidden.as_ref(),
            ProblemInstance::SubLabel(l) => l.forbidden.as_ref(),
            _ => None,
        }
    }

    /// `pinned[v] = Some(i)` when `v` is the terminal of label `i`.
    pub fn pinned(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n()];
        if let Some(t) = self.terminals() {
            for (i, &s) in t.iter().enumerate() {
                out[s] = Some(i);
            }
        }
        out
    }

    /// Whether `v` may take label `i` at all.
    pub fn allowed(&self, v: usize, i: usize) -> bool {
        if let Some(t) = self.terminals() {
            if let Some(pin) = t.iter().position(|&s| s == v) {
                return pin == i;
            }
        }
        !self.forbidden().is_some_and(|m| m.is_forbidden(v, i))
    }

    pub fn label_oracle(&self, i: usize) -> LabelOracle<'_> {
        match self {
            ProblemInstance::Msca(m) => LabelOracle::Single(&m.oracles[i]),
            ProblemInstance::SubMp(s) => LabelOracle::Single(&s.oracle),
            ProblemInstance::HypergraphMp(h) | ProblemInstance::HypergraphMc(h) => {
                LabelOracle::Single(&h.oracle)
            }
            ProblemInstance::SubLabel(l) => LabelOracle::Pair(&l.g[i], &l.h),
        }
    }

    /// The single oracle shared by all labels, when there is one.
    pub fn shared_oracle(&self) -> Option<&Oracle> {
        match self {
            ProblemInstance::SubMp(s) => Some(&s.oracle),
            ProblemInstance::HypergraphMp(h) | ProblemInstance::HypergraphMc(h) => Some(&h.oracle),
            _ => None,
        }
    }

    pub fn hypergraph(&self) -> Option<&WeightedHypergraph> {
        match self {
            ProblemInstance::HypergraphMp(h) | ProblemInstance::HypergraphMc(h) => Some(&h.graph),
            ProblemInstance::SubLabel(l) => match &l.h {
                Oracle::HypergraphSeparation { graph } | Oracle::HypergraphCut { graph, .. } => {
                    Some(graph)
                }
                _ => None,
            },
            _ => None,
        }
    }

    /// Checks shape, row sums, pins and forbidden pairs within `tol`.
    pub fn check_allocation(&self, x: &FractionalAllocation, tol: f64) -> Result<()> {
        if x.n() != self.n() || x.k() != self.k() {
            return Err(Error::InfeasibleAllocation(format!(
                "allocation is {}x{}, instance is {}x{}",
                x.n(),
                x.k(),
                self.n(),
                self.k()
            )));
        }
        for v in 0..self.n() {
            let row = x.row(v);
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::InfeasibleAllocation(format!("row {v} sums to {s}")));
            }
            for (i, &e) in row.iter().enumerate() {
                if e < -tol {
                    return Err(Error::InfeasibleAllocation(format!("x[{v},{i}] = {e}")));
                }
                if !self.allowed(v, i) && e > tol {
                    return Err(Error::InfeasibleAllocation(format!(
                        "x[{v},{i}] = {e} on a pinned or forbidden pair"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn check_partition(&self, p: &Partition) -> Result<()> {
        if p.n() != self.n() || p.k() != self.k() {
            return Err(Error::InvalidInstance("partition has wrong shape".into()));
        }
        for (v, &l) in p.labels().iter().enumerate() {
            if !self.allowed(v, l) {
                return Err(Error::InvalidInstance(format!(
                    "element {v} assigned to disallowed label {l}"
                )));
            }
        }
        Ok(())
    }

    /// `sum_i f_i(A_i)`.
    pub fn cost(&self, p: &Partition) -> f64 {
        p.blocks()
            .iter()
            .enumerate()
            .map(|(i, b)| self.label_oracle(i).eval(b))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Hyperedge;

    #[test]
    fn allocation_rejects_bad_rows() {
        assert!(FractionalAllocation::new(2, 2, vec![0.5, 0.5, 0.7, 0.2]).is_err());
        assert!(FractionalAllocation::new(1, 2, vec![1.5, -0.5]).is_err());
        assert!(FractionalAllocation::new(1, 2, vec![0.5, 0.5]).is_ok());
        let a = FractionalAllocation::from_rows_normalized(1, 3, vec![2.0, -0.1, 2.0]).unwrap();
        assert_eq!(a.row(0), &[0.5, 0.0, 0.5]);
    }

    #[test]
    fn terminal_pins_checked() {
        let x = FractionalAllocation::new(2, 2, vec![1.0, 0.0, 0.5, 0.5]).unwrap();
        assert!(x.clone().with_terminals(vec![0, 1]).is_err());
        assert!(x.with_terminals(vec![0, 1]).is_err());
        let x = FractionalAllocation::new(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(x.with_terminals(vec![0, 1]).is_ok());
    }

    #[test]
    fn partition_round_trip() {
        let p = Partition::new(vec![0, 2, 1, 2], 3).unwrap();
        let x = FractionalAllocation::from_partition(&p);
        assert_eq!(x.to_partition().unwrap(), p);
        assert_eq!(Partition::from_blocks(&p.blocks()).unwrap(), p);
        assert!(Partition::new(vec![3], 3).is_err());
        assert!(p.splits(&[0, 1]));
        assert!(!p.splits(&[1, 3]));
    }

    #[test]
    fn duplicate_terminals_rejected() {
        let h = WeightedHypergraph::new(3, vec![Hyperedge::new(vec![0, 1], 1.0)]).unwrap();
        assert!(ProblemInstance::hypergraph_mp(h.clone(), vec![0, 0]).is_err());
        assert!(ProblemInstance::hypergraph_mp(h, vec![0, 5]).is_err());
    }

    #[test]
    fn modular_cost() {
        let inst = ProblemInstance::Msca(
            MscaInstance::modular(&[vec![1.0, 2.0], vec![3.0, 1.0]]).unwrap(),
        );
        let p = Partition::new(vec![0, 1], 2).unwrap();
        assert_eq!(inst.cost(&p), 2.0);
    }

    #[test]
    fn forbidden_pairs() {
        let m = ForbiddenMask::from_pairs(2, 2, &[(0, 0)]).unwrap();
        assert!(m.is_forbidden(0, 0));
        assert_eq!(m.pairs(), vec![(0, 0)]);
        let everything = ForbiddenMask::from_pairs(1, 2, &[(0, 0), (0, 1)]).unwrap();
        assert!(MscaInstance::new(vec![Oracle::zero(1), Oracle::zero(1)], Some(everything)).is_err());
    }
}
