//! The Lovász extension `f^(x) = E_theta[f({v : x_v >= theta})]`, its greedy
//! subgradient and the relaxation objective built from it.

use crate::error::Result;
use crate::model::{FractionalAllocation, ProblemInstance};
use crate::oracle::{Hyperedge, SetFunction};
use crate::set::ElementSet;

/// Feasibility tolerance used by [`objective`].
pub const FEAS_TOL: f64 = 1e-7;

/// `{v : x_v >= theta}`. The comparison is inclusive, so `theta = 0` gives the
/// whole ground set.
pub fn threshold_set(x: &[f64], theta: f64) -> ElementSet {
    let mut s = ElementSet::empty(x.len());
    for (v, &xv) in x.iter().enumerate() {
        if xv >= theta {
            s.insert(v);
        }
    }
    s
}

/// Element ids sorted by decreasing coordinate, ties broken by id.
fn descending_order(x: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    order
}

/// Evaluates the extension by sorting `x` and summing
/// `(x_(p) - x_(p+1)) f(S_p)` over prefixes, with `x_(0) = 1` and
/// `x_(n+1) = 0`.
pub fn lovasz_eval<F: SetFunction + ?Sized>(f: &F, x: &[f64]) -> f64 {
    let n = x.len();
    debug_assert_eq!(n, f.ground_size());
    let order = descending_order(x);
    let mut prefix = ElementSet::empty(n);
    let mut prev = 1.0;
    let mut total = 0.0;
    let mut value = f.eval(&prefix);
    for (p, &v) in order.iter().enumerate() {
        let xv = x[v];
        total += (prev - xv) * value;
        prefix.insert(v);
        // Equal coordinates contribute zero-width slabs; skip their oracle call.
        let next = order.get(p + 1).map(|&u| x[u]);
        if next != Some(xv) {
            value = f.eval(&prefix);
        }
        prev = xv;
    }
    total + prev * value
}

/// Greedy subgradient: `g(v_p) = f(S_p) - f(S_(p-1))` along the descending
/// order of `x`. Ties are ordered by element id, which picks one of several
/// valid subgradients.
pub fn lovasz_subgradient<F: SetFunction + ?Sized>(f: &F, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let order = descending_order(x);
    let mut g = vec![0.0; n];
    let mut prefix = ElementSet::empty(n);
    let mut prev = f.eval(&prefix);
    for &v in &order {
        prefix.insert(v);
        let cur = f.eval(&prefix);
        g[v] = cur - prev;
        prev = cur;
    }
    g
}

/// Relaxation objective `sum_i f_i^(x_i)` for any instance kind.
pub fn objective(instance: &ProblemInstance, x: &FractionalAllocation) -> Result<f64> {
    instance.check_allocation(x, FEAS_TOL)?;
    Ok(objective_unchecked(instance, x))
}

/// [`objective`] without the feasibility check, for inner solver loops.
pub fn objective_unchecked(instance: &ProblemInstance, x: &FractionalAllocation) -> f64 {
    (0..instance.k())
        .map(|i| lovasz_eval(&instance.label_oracle(i), &x.column(i)))
        .sum()
}

fn edge_bounds(x: &FractionalAllocation, e: &Hyperedge, i: usize) -> (f64, f64) {
    e.verts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        let xv = x.get(v, i);
        (lo.min(xv), hi.max(xv))
    })
}

/// Length of `I(e, i) = [min_{v in e} x(v,i), max_{v in e} x(v,i)]`.
pub fn interval_length(x: &FractionalAllocation, e: &Hyperedge, i: usize) -> f64 {
    let (lo, hi) = edge_bounds(x, e, i);
    hi - lo
}

/// Per-label spread `max - min` of an edge; the partition distance `d(e, i)`.
pub fn partition_distance(x: &FractionalAllocation, e: &Hyperedge, i: usize) -> f64 {
    interval_length(x, e, i)
}

/// `d(e) = sum_i (max - min)`.
pub fn partition_edge_distance(x: &FractionalAllocation, e: &Hyperedge) -> f64 {
    (0..x.k()).map(|i| partition_distance(x, e, i)).sum()
}

/// Per-label cut distance `x(r(e), i) - min_{v in e} x(v, i)`.
pub fn cut_distance(x: &FractionalAllocation, e: &Hyperedge, i: usize) -> f64 {
    x.get(e.rep, i) - edge_bounds(x, e, i).0
}

/// `d(e) = sum_i (x(r(e), i) - min)`.
pub fn cut_edge_distance(x: &FractionalAllocation, e: &Hyperedge) -> f64 {
    (0..x.k()).map(|i| cut_distance(x, e, i)).sum()
}

/// Largest right endpoint `max_i max_{v in e} x(v,i)` and a label attaining it
/// (lowest index among ties).
pub fn rightmost_label(x: &FractionalAllocation, e: &Hyperedge, labels: impl Iterator<Item = usize>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in labels {
        let hi = edge_bounds(x, e, i).1;
        if best.is_none_or(|(_, b)| hi > b) {
            best = Some((i, hi));
        }
    }
    best.map(|(i, _)| i)
}
