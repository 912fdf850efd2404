use crate::error::{Error, Result};
use crate::model::{FractionalAllocation, ForbiddenMask, LabelingInstance, ProblemInstance};
use crate::oracle::{make_hypergraph_separation, Hyperedge, Oracle, WeightedHypergraph};

/// The integrality gap construction together with its fractional candidate
/// and the closed-form values stated for it.
#[derive(Clone, Debug)]
pub struct GapExample {
    pub instance: ProblemInstance,
    /// `x(i, j) = 1/(k-1)` for `j != i`, `0` on the diagonal.
    pub x: FractionalAllocation,
    /// `C(k-1, Delta-1)`.
    pub integral_optimum: f64,
    /// `C(k, Delta) / (k-1)`, the value claimed for `x`.
    pub claimed_fractional: f64,
}

pub fn binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Labeling instance on `k` vertices and `k` labels: `h` is the separation
/// function of the complete `Delta`-uniform hypergraph with unit weights
/// (representative = smallest member), assignment costs are zero, and
/// vertex `i` may not take label `i`.
pub fn gen_gap_example(k: usize, delta: usize) -> Result<GapExample> {
    if k < 2 || delta < 1 || delta > k {
        return Err(Error::InvalidInstance(format!(
            "gap example needs 1 <= Delta <= k and k >= 2, got k={k}, Delta={delta}"
        )));
    }
    if binomial(k, delta) > 1e6 {
        return Err(Error::TooLarge(format!("C({k}, {delta}) hyperedges")));
    }
    let mut edges = Vec::new();
    let mut comb: Vec<usize> = (0..delta).collect();
    loop {
        edges.push(Hyperedge::with_rep(comb.clone(), 1.0, comb[0]));
        let Some(p) = (0..delta).rev().find(|&p| comb[p] < k - delta + p) else {
            break;
        };
        comb[p] += 1;
        for q in p + 1..delta {
            comb[q] = comb[q - 1] + 1;
        }
    }
    let graph = WeightedHypergraph::new(k, edges)?;
    let h = make_hypergraph_separation(&graph)?;
    let g = vec![Oracle::zero(k); k];
    let diag: Vec<(usize, usize)> = (0..k).map(|i| (i, i)).collect();
    let forbidden = ForbiddenMask::from_pairs(k, k, &diag)?;
    let instance = ProblemInstance::SubLabel(LabelingInstance::new(g, h, Some(forbidden))?);
    let off = 1.0 / (k - 1) as f64;
    let x = (0..k * k).map(|p| if p / k == p % k { 0.0 } else { off }).collect();
    Ok(GapExample {
        instance,
        x: FractionalAllocation::new(k, k, x)?,
        integral_optimum: binomial(k - 1, delta - 1),
        claimed_fractional: binomial(k, delta) / (k - 1) as f64,
    })
}

/// A single hyperedge whose distance is `eps` under an explicit allocation
/// on which CKR rounding cuts it with probability close to `H_m * eps`.
#[derive(Clone, Debug)]
pub struct TightEdge {
    pub instance: ProblemInstance,
    pub x: FractionalAllocation,
    /// Vertex ids of the edge; the first is the representative `u`.
    pub edge: Vec<usize>,
}

/// Vertices `0..k` are the terminals, `u = k` and `v_j = k + j - 1` for
/// `j = 2..=m`; the only hyperedge is `{u, v_2, .., v_m}` with weight 1 and
/// representative `u`.
///
/// Row of `u`: `x(u, j-1) = (m - j) eps` for `j = 2..=m`, the rest of the
/// mass on label 0. Row of `v_j` equals the row of `u` with `eps` moved from
/// label 0 to label `j-1`. Only label 0 has a gap between `u` and the edge
/// minimum, so `d(e) = eps`.
pub fn gen_ckr_tight_edge(m: usize, k: usize, eps: f64) -> Result<TightEdge> {
    if m < 2 || k < m {
        return Err(Error::InvalidInstance(format!("need 2 <= m <= k, got m={m}, k={k}")));
    }
    let shifted: f64 = (2..=m).map(|j| (m - j) as f64).sum::<f64>() * eps;
    if !(eps > 0.0 && eps.is_finite()) || 1.0 - shifted - eps < 0.0 {
        return Err(Error::InvalidInstance(format!(
            "epsilon {eps} out of range for m={m}: rows would go negative"
        )));
    }
    let n = k + m;
    let u = k;
    let mut row_u = vec![0.0; k];
    for j in 2..=m {
        row_u[j - 1] = (m - j) as f64 * eps;
    }
    row_u[0] = 1.0 - shifted;
    let mut x = vec![0.0; n * k];
    for s in 0..k {
        x[s * k + s] = 1.0;
    }
    x[u * k..(u + 1) * k].copy_from_slice(&row_u);
    for j in 2..=m {
        let v = k + j - 1;
        let row = &mut x[v * k..(v + 1) * k];
        row.copy_from_slice(&row_u);
        row[0] -= eps;
        row[j - 1] += eps;
    }
    let edge: Vec<usize> = (u..n).collect();
    let graph = WeightedHypergraph::new(n, vec![Hyperedge::with_rep(edge.clone(), 1.0, u)])?;
    let terminals: Vec<usize> = (0..k).collect();
    let instance = ProblemInstance::hypergraph_mc(graph, terminals.clone())?;
    let x = FractionalAllocation::from_rows_normalized(n, k, x)?.with_terminals(terminals)?;
    Ok(TightEdge { instance, x, edge })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{ckr_split_probability_exact, exact_optimum};
    use crate::lovasz::{cut_edge_distance, objective};

    #[test]
    fn gap_counts() {
        let ex = gen_gap_example(5, 3).unwrap();
        let ProblemInstance::SubLabel(l) = &ex.instance else { panic!("labeling instance expected") };
        let Oracle::HypergraphSeparation { graph } = &l.h else { panic!("separation oracle expected") };
        assert_eq!(graph.edges.len(), 10);
        assert!(graph.edges.iter().all(|e| e.verts.len() == 3 && e.rep == e.verts[0]));
        assert_eq!(ex.integral_optimum, 6.0);
        assert_eq!(ex.claimed_fractional, 2.5);
        ex.instance.check_allocation(&ex.x, 1e-12).unwrap();
    }

    #[test]
    fn gap_integral_optimum_matches_enumeration() {
        for (k, d) in [(3, 2), (4, 2), (4, 3), (5, 3), (5, 5)] {
            let ex = gen_gap_example(k, d).unwrap();
            let (_, cost) = exact_optimum(&ex.instance).unwrap();
            assert_eq!(cost, ex.integral_optimum, "k={k} Delta={d}");
        }
    }

    #[test]
    fn gap_candidate_cost() {
        // Each edge pays (Delta-1)/(k-1): every member other than the
        // representative contributes its own label, at 1/(k-1).
        for (k, d) in [(3, 2), (4, 3), (5, 3), (5, 5), (6, 4)] {
            let ex = gen_gap_example(k, d).unwrap();
            let want = binomial(k, d) * (d - 1) as f64 / (k - 1) as f64;
            let got = objective(&ex.instance, &ex.x).unwrap();
            assert!((got - want).abs() < 1e-12, "k={k} Delta={d}: {got} vs {want}");
        }
        let tri = gen_gap_example(3, 2).unwrap();
        assert!((objective(&tri.instance, &tri.x).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn gap_rejects_large_delta() {
        assert!(gen_gap_example(3, 4).is_err());
    }

    #[test]
    fn tight_edge_distance() {
        let t = gen_ckr_tight_edge(3, 3, 0.1).unwrap();
        let h = t.instance.hypergraph().unwrap();
        assert!((cut_edge_distance(&t.x, &h.edges[0]) - 0.1).abs() < 1e-12);
        for v in 0..t.x.n() {
            assert!((t.x.row(v).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        t.instance.check_allocation(&t.x, 1e-12).unwrap();
    }

    #[test]
    fn tight_edge_split_probability_closed_form() {
        // Exact probability over all orders and thresholds is eps (H_m - 1/k).
        for (m, k) in [(2, 2), (3, 3), (3, 5), (4, 6)] {
            let eps = 0.05;
            let t = gen_ckr_tight_edge(m, k, eps).unwrap();
            let p = ckr_split_probability_exact(&t.x, &t.edge).unwrap();
            let hm: f64 = (1..=m).map(|i| 1.0 / i as f64).sum();
            let want = eps * (hm - 1.0 / k as f64);
            assert!((p - want).abs() < 1e-9, "m={m} k={k}: {p} vs {want}");
        }
    }

    #[test]
    fn tight_edge_rejects_bad_eps() {
        assert!(gen_ckr_tight_edge(3, 3, 0.0).is_err());
        assert!(gen_ckr_tight_edge(3, 3, 0.6).is_err());
        assert!(gen_ckr_tight_edge(4, 3, 0.1).is_err());
    }
}
