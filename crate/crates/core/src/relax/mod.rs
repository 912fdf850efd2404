//! Fractional solvers for the Lovász-extension relaxation.
//!
//! Oracles whose extension is a sum of linear, max and min pieces (modular,
//! cuts, hypergraph separation, coverage) get an exact LP; everything else
//! goes through projected subgradient descent.

pub mod lp;
mod project;
pub mod simplex;
mod subgradient;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FractionalAllocation, LabelOracle, ProblemInstance};
use crate::oracle::{ExtensionTerm, WeightedHypergraph};

pub use lp::{Constraint, LinearProgram, Sense, VarBound, MAX_DENSE_ENTRIES};
pub use project::{project_simplex, project_simplex_masked};
pub use simplex::{simplex_solve, LpSolution, SolveStatus};
pub use subgradient::{solve_subgradient, StepSchedule, SubgradientOptions};

#[derive(Clone, Debug, Serialize)]
pub struct SolverReport {
    pub x: FractionalAllocation,
    pub objective: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AuxKind {
    Max,
    Min,
}

#[derive(Clone, Debug)]
struct AuxColumn {
    col: usize,
    label: usize,
    elements: Vec<usize>,
    kind: AuxKind,
}

/// The extension LP of an instance together with the map between LP columns
/// and allocation entries. Entries fixed by pins or forbidden labels are
/// substituted as constants instead of becoming columns.
#[derive(Clone, Debug)]
pub struct ExtensionLp {
    pub lp: LinearProgram,
    n: usize,
    k: usize,
    x_col: Vec<Option<usize>>,
    fixed: Vec<f64>,
    aux: Vec<AuxColumn>,
}

impl ExtensionLp {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// LP column of `x(v, i)`, or `None` when the entry is a constant.
    pub fn x_column(&self, v: usize, i: usize) -> Option<usize> {
        self.x_col[v * self.k + i]
    }

    /// Full LP point for `x` with every auxiliary column at the max or min it
    /// bounds.
    pub fn lift(&self, x: &FractionalAllocation) -> Vec<f64> {
        let mut y = vec![0.0; self.lp.num_vars()];
        for (idx, col) in self.x_col.iter().enumerate() {
            if let Some(c) = col {
                y[*c] = x.as_slice()[idx];
            }
        }
        for a in &self.aux {
            let vals = a.elements.iter().map(|&v| x.get(v, a.label));
            y[a.col] = match a.kind {
                AuxKind::Max => vals.fold(f64::NEG_INFINITY, f64::max),
                AuxKind::Min => vals.fold(f64::INFINITY, f64::min),
            };
        }
        y
    }

    /// LP objective at `lift(x)`.
    pub fn value_at(&self, x: &FractionalAllocation) -> f64 {
        self.lp.evaluate(&self.lift(x))
    }

    /// Reads the allocation block of an LP point back into a matrix.
    pub fn allocation(&self, y: &[f64]) -> Result<FractionalAllocation> {
        let x: Vec<f64> = self
            .x_col
            .iter()
            .zip(&self.fixed)
            .map(|(c, &f)| c.map_or(f, |c| y[c]))
            .collect();
        FractionalAllocation::from_rows_normalized(self.n, self.k, x)
    }
}

fn label_terms(f: LabelOracle<'_>) -> Option<Vec<ExtensionTerm>> {
    match f {
        LabelOracle::Single(o) => o.extension_terms(),
        LabelOracle::Pair(g, h) => {
            let mut t = g.extension_terms()?;
            t.extend(h.extension_terms()?);
            Some(t)
        }
    }
}

/// Builds `min sum_i f_i^(x_i)` over the product of simplices as an LP.
///
/// Variables are `x(v, i)` for free entries, one `hi` column per max piece
/// and one `lo` column per min piece. With non-negative piece weights the
/// auxiliary columns settle on the max and min they bound at any optimum.
pub fn build_extension_lp(instance: &ProblemInstance) -> Result<ExtensionLp> {
    let (n, k) = (instance.n(), instance.k());
    // The simplex rows alone are n x (n k); refuse before allocating them.
    if n.saturating_mul(n).saturating_mul(k) > MAX_DENSE_ENTRIES {
        return Err(Error::TooLarge(format!("extension LP for n={n}, k={k}")));
    }
    let mut lp = LinearProgram::new();
    let mut x_col = vec![None; n * k];
    let mut fixed = vec![0.0; n * k];

    for v in 0..n {
        let allowed: Vec<usize> = (0..k).filter(|&i| instance.allowed(v, i)).collect();
        match allowed[..] {
            [] => {
                return Err(Error::InvalidInstance(format!("element {v} has no allowed label")))
            }
            [only] => fixed[v * k + only] = 1.0,
            _ => {
                for &i in &allowed {
                    x_col[v * k + i] = Some(lp.add_var(format!("x[{v},{i}]"), 0.0, VarBound::NonNeg));
                }
            }
        }
    }
    for v in 0..n {
        let cols: Vec<(usize, f64)> = (0..k).filter_map(|i| x_col[v * k + i]).map(|c| (c, 1.0)).collect();
        if !cols.is_empty() {
            lp.add_row(&cols, Sense::Eq, 1.0);
        }
    }

    let mut aux = Vec::new();
    for i in 0..k {
        let terms = label_terms(instance.label_oracle(i)).ok_or_else(|| {
            Error::Unsupported(format!("label {i} oracle has no piecewise-linear extension"))
        })?;
        for (t, term) in terms.iter().enumerate() {
            match term {
                ExtensionTerm::Linear { element, coef } => match x_col[element * k + i] {
                    Some(c) => lp.objective[c] += coef,
                    None => lp.offset += coef * fixed[element * k + i],
                },
                ExtensionTerm::Max { elements, weight } => {
                    let consts = elements.iter().filter(|&&v| x_col[v * k + i].is_none());
                    let cmax = consts.map(|&v| fixed[v * k + i]).fold(0.0, f64::max);
                    let vars: Vec<usize> = elements.iter().filter_map(|&v| x_col[v * k + i]).collect();
                    if vars.is_empty() || cmax >= 1.0 {
                        lp.offset += weight * cmax;
                        continue;
                    }
                    lp.check_size()?;
                    let hi = lp.add_var(format!("hi[{t},{i}]"), *weight, VarBound::NonNeg);
                    for c in vars {
                        lp.add_row(&[(hi, 1.0), (c, -1.0)], Sense::Ge, 0.0);
                    }
                    aux.push(AuxColumn {
                        col: hi,
                        label: i,
                        elements: elements.clone(),
                        kind: AuxKind::Max,
                    });
                }
                ExtensionTerm::NegMin { elements, weight } => {
                    let consts = elements.iter().filter(|&&v| x_col[v * k + i].is_none());
                    let cmin = consts.map(|&v| fixed[v * k + i]).fold(1.0, f64::min);
                    let vars: Vec<usize> = elements.iter().filter_map(|&v| x_col[v * k + i]).collect();
                    if vars.is_empty() || cmin <= 0.0 {
                        lp.offset -= weight * cmin;
                        continue;
                    }
                    // Constants here equal 1 and never bind.
                    lp.check_size()?;
                    let lo = lp.add_var(format!("lo[{t},{i}]"), -weight, VarBound::NonNeg);
                    for c in vars {
                        lp.add_row(&[(lo, 1.0), (c, -1.0)], Sense::Le, 0.0);
                    }
                    aux.push(AuxColumn {
                        col: lo,
                        label: i,
                        elements: elements.clone(),
                        kind: AuxKind::Min,
                    });
                }
            }
        }
    }
    Ok(ExtensionLp {
        lp,
        n,
        k,
        x_col,
        fixed,
        aux,
    })
}

/// Hypergraph multiway partition LP: `sum_e w(e) sum_i (hi(e,i) - lo(e,i))`.
pub fn build_hmp_lp(h: &WeightedHypergraph, terminals: &[usize]) -> Result<ExtensionLp> {
    build_extension_lp(&ProblemInstance::hypergraph_mp(h.clone(), terminals.to_vec())?)
}

/// Hypergraph multiway cut LP: `sum_e w(e) sum_i (x(r(e),i) - lo(e,i))`.
pub fn build_hmc_lp(h: &WeightedHypergraph, terminals: &[usize]) -> Result<ExtensionLp> {
    build_extension_lp(&ProblemInstance::hypergraph_mc(h.clone(), terminals.to_vec())?)
}

/// Whether every label oracle of `instance` has an exact LP form.
pub fn lp_applicable(instance: &ProblemInstance) -> bool {
    (0..instance.k()).all(|i| label_terms(instance.label_oracle(i)).is_some())
}

/// Solves the relaxation exactly through its LP.
pub fn solve_lp(instance: &ProblemInstance) -> Result<SolverReport> {
    let ext = build_extension_lp(instance)?;
    let sol = simplex_solve(&ext.lp)?;
    if sol.status != SolveStatus::Optimal {
        return Err(Error::Infeasible(format!("extension LP ended with status {:?}", sol.status)));
    }
    let mut x = ext.allocation(&sol.values)?;
    if let Some(t) = instance.terminals() {
        x = x.with_terminals(t.to_vec())?;
    }
    Ok(SolverReport {
        x,
        objective: sol.objective,
        iterations: sol.iterations,
        status: SolveStatus::Optimal,
    })
}

/// LP when available, otherwise projected subgradient with default options.
pub fn solve_auto(instance: &ProblemInstance, seed: u64) -> Result<SolverReport> {
    if lp_applicable(instance) {
        solve_lp(instance)
    } else {
        solve_subgradient(instance, &SubgradientOptions::new(seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lovasz::objective;
    use crate::model::MscaInstance;
    use crate::oracle::Hyperedge;

    fn star() -> (WeightedHypergraph, Vec<usize>) {
        let h = WeightedHypergraph::from_graph(4, &[(3, 0, 1.0), (3, 1, 1.0), (3, 2, 1.0)]).unwrap();
        (h, vec![0, 1, 2])
    }

    #[test]
    fn star_lp_optimum() {
        let (h, t) = star();
        // Partition pays each split edge once per block it meets: the centre
        // leaves two edges split, each paid twice.
        let ext = build_hmp_lp(&h, &t).unwrap();
        let sol = simplex_solve(&ext.lp).unwrap();
        assert!((sol.objective - 4.0).abs() < 1e-9);
        let inst = ProblemInstance::hypergraph_mp(h.clone(), t.clone()).unwrap();
        let rep = solve_lp(&inst).unwrap();
        assert!((objective(&inst, &rep.x).unwrap() - 4.0).abs() < 1e-9);
        let inst = ProblemInstance::hypergraph_mc(h, t).unwrap();
        let rep = solve_lp(&inst).unwrap();
        assert!((rep.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn huge_instance_refused_before_allocating() {
        let h = WeightedHypergraph::from_graph(100_000, &[(0, 1, 1.0)]).unwrap();
        let terminals: Vec<usize> = (0..50).collect();
        let inst = ProblemInstance::hypergraph_mc(h, terminals).unwrap();
        assert!(matches!(build_extension_lp(&inst), Err(Error::TooLarge(_))));
    }

    #[test]
    fn pinned_single_edge() {
        let h = WeightedHypergraph::new(2, vec![Hyperedge::new(vec![0, 1], 1.0)]).unwrap();
        let rep = solve_lp(&ProblemInstance::hypergraph_mp(h.clone(), vec![0, 1]).unwrap()).unwrap();
        // The split edge is paid once by each of the two blocks it touches.
        assert!((rep.objective - 2.0).abs() < 1e-12);
        let rep = solve_lp(&ProblemInstance::hypergraph_mc(h, vec![0, 1]).unwrap()).unwrap();
        assert!((rep.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isolated_vertex_is_irrelevant() {
        let (h, t) = star();
        let mut edges = h.edges.clone();
        edges.push(Hyperedge::new(vec![4], 0.0));
        let h5 = WeightedHypergraph::new(5, edges).unwrap();
        let a = solve_lp(&ProblemInstance::hypergraph_mp(h, t.clone()).unwrap()).unwrap();
        let b = solve_lp(&ProblemInstance::hypergraph_mp(h5, t).unwrap()).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-9);
    }

    #[test]
    fn lift_matches_extension() {
        let h = WeightedHypergraph::new(
            5,
            vec![
                Hyperedge::with_rep(vec![0, 2, 3], 2.0, 2),
                Hyperedge::new(vec![1, 3, 4], 1.5),
                Hyperedge::new(vec![2, 4], 0.5),
            ],
        )
        .unwrap();
        let t = vec![0, 1];
        let x = FractionalAllocation::new(5, 2, vec![1.0, 0.0, 0.0, 1.0, 0.3, 0.7, 0.6, 0.4, 0.1, 0.9])
            .unwrap();
        for inst in [
            ProblemInstance::hypergraph_mp(h.clone(), t.clone()).unwrap(),
            ProblemInstance::hypergraph_mc(h.clone(), t.clone()).unwrap(),
        ] {
            let ext = build_extension_lp(&inst).unwrap();
            let y = ext.lift(&x);
            assert!(ext.lp.max_violation(&y) < 1e-12);
            assert!((ext.lp.evaluate(&y) - objective(&inst, &x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn modular_lp_is_per_element_minimum() {
        let inst = ProblemInstance::Msca(
            MscaInstance::modular(&[vec![1.0, 3.0], vec![2.0, 1.0], vec![0.5, 0.5]]).unwrap(),
        );
        let rep = solve_lp(&inst).unwrap();
        assert!((rep.objective - 2.5).abs() < 1e-12);
    }
}
