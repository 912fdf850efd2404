//! Brute-force ground truth at desk scale: exhaustive optima, a reference
//! Lovász evaluation by breakpoint integration, exhaustive set-function
//! minimisation and seeded Monte-Carlo estimators.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FractionalAllocation, Partition, ProblemInstance};
use crate::oracle::{Hyperedge, SetFunction};
use crate::rounding::{Rng, Rounder, RoundingOutcome};
use crate::set::ElementSet;

/// Enumeration budget for [`exact_optimum`], counted in label vectors.
pub const MAX_ASSIGNMENTS: u64 = 20_000_000;

/// Ground-set limit for [`brute_min_subset`].
pub const MAX_SUBSET_N: usize = 22;

/// Minimum of `sum_i f_i(A_i)` over every feasible partition.
///
/// Label vectors are enumerated with a mixed-radix counter over each
/// element's allowed labels, first element most significant, so the first
/// minimiser found is the lexicographically smallest. The space is sharded
/// on the first free element and reduced deterministically.
pub fn exact_optimum(instance: &ProblemInstance) -> Result<(Partition, f64)> {
    let (n, k) = (instance.n(), instance.k());
    let mut choices: Vec<Vec<usize>> = Vec::new();
    let mut total: u64 = 1;
    for v in 0..n {
        let c: Vec<usize> = (0..k).filter(|&i| instance.allowed(v, i)).collect();
        if c.is_empty() {
            return Err(Error::InvalidInstance("element without an allowed label".into()));
        }
        total = total.saturating_mul(c.len() as u64);
        if total > MAX_ASSIGNMENTS {
            return Err(Error::TooLarge(format!(
                "more than {MAX_ASSIGNMENTS} feasible label vectors"
            )));
        }
        choices.push(c);
    }

    let split = choices.iter().position(|c| c.len() > 1);
    let shards: Vec<Option<usize>> = match split {
        Some(p) => choices[p].iter().map(|&l| Some(l)).collect(),
        None => vec![None],
    };
    let results: Vec<(f64, Vec<usize>)> = shards
        .into_par_iter()
        .map(|first| {
            let mut ch = choices.clone();
            if let (Some(p), Some(l)) = (split, first) {
                ch[p] = vec![l];
            }
            enumerate_min(instance, &ch)
        })
        .collect();
    // Shards come back in label order, so a strict comparison keeps the
    // lexicographically first minimiser.
    let (cost, labels) = results
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one shard");
    Ok((Partition::new(labels, k)?, cost))
}

fn enumerate_min(instance: &ProblemInstance, choices: &[Vec<usize>]) -> (f64, Vec<usize>) {
    let n = choices.len();
    let k = instance.k();
    let mut digit = vec![0usize; n];
    let mut labels: Vec<usize> = choices.iter().map(|c| c[0]).collect();
    let mut best = (f64::INFINITY, labels.clone());
    let mut blocks = vec![ElementSet::empty(n); k];
    loop {
        for b in blocks.iter_mut() {
            *b = ElementSet::empty(n);
        }
        for (v, &l) in labels.iter().enumerate() {
            blocks[l].insert(v);
        }
        let cost: f64 = (0..k)
            .map(|i| instance.label_oracle(i).eval(&blocks[i]))
            .sum();
        if cost < best.0 {
            best = (cost, labels.clone());
        }
        // Increment from the least significant (last) element.
        let mut p = n;
        loop {
            if p == 0 {
                return best;
            }
            p -= 1;
            digit[p] += 1;
            if digit[p] < choices[p].len() {
                labels[p] = choices[p][digit[p]];
                break;
            }
            digit[p] = 0;
            labels[p] = choices[p][0];
        }
    }
}

/// `int_0^1 f({v : x_v >= theta}) dtheta` summed exactly over the intervals
/// between consecutive distinct values of `x` (plus 0 and 1). On `(a, b]`
/// the threshold set is constant and equal to `{v : x_v >= b}`.
pub fn lovasz_eval_reference<F: SetFunction + ?Sized>(f: &F, x: &[f64]) -> f64 {
    let n = x.len();
    let mut points: Vec<f64> = x.iter().map(|&v| v.clamp(0.0, 1.0)).collect();
    points.push(0.0);
    points.push(1.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut total = 0.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let set = ElementSet::from_ids(n, (0..n).filter(|&v| x[v] >= b));
        total += (b - a) * f.eval(&set);
    }
    total
}

/// Exhaustive minimiser of `f` over sets containing `must_contain` and
/// avoiding `must_avoid`. Among equal values the set with the smallest
/// bitmask wins, so `f = 0` yields the empty set.
pub fn brute_min_subset<F: SetFunction + ?Sized>(
    f: &F,
    must_contain: Option<&ElementSet>,
    must_avoid: Option<&ElementSet>,
) -> Result<(ElementSet, f64)> {
    let n = f.ground_size();
    if n > MAX_SUBSET_N {
        return Err(Error::TooLarge(format!("n = {n} exceeds {MAX_SUBSET_N}")));
    }
    let need = must_contain.map_or(0, |s| s.mask());
    let avoid = must_avoid.map_or(0, |s| s.mask());
    if need & avoid != 0 {
        return Err(Error::Infeasible("an element must be both in and out".into()));
    }
    let mut best: Option<(u64, f64)> = None;
    for mask in 0..1u64 << n {
        if mask & need != need || mask & avoid != 0 {
            continue;
        }
        let v = f.eval(&ElementSet::from_mask(n, mask));
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((mask, v));
        }
    }
    let (mask, v) = best.expect("need and avoid are disjoint, so some set qualifies");
    Ok((ElementSet::from_mask(n, mask), v))
}

/// Sample mean and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl Estimate {
    pub fn from_samples(xs: impl IntoIterator<Item = f64>) -> Self {
        let (mut n, mut sum, mut sq) = (0usize, 0.0, 0.0);
        for x in xs {
            n += 1;
            sum += x;
            sq += x * x;
        }
        let mean = sum / n as f64;
        let var = if n > 1 {
            ((sq - n as f64 * mean * mean) / (n - 1) as f64).max(0.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr: (var / n as f64).sqrt(),
            trials: n,
        }
    }

    /// `mean <= bound + z * stderr`.
    pub fn at_most(&self, bound: f64, z: f64) -> bool {
        self.mean <= bound + z * self.stderr
    }

    /// `mean >= bound - z * stderr`.
    pub fn at_least(&self, bound: f64, z: f64) -> bool {
        self.mean >= bound - z * self.stderr
    }
}

/// Runs `stat` on `trials` independent streams of `seed` in parallel and
/// returns one estimate per output coordinate. Samples are reduced in
/// trial order, so results are bit-identical across thread counts.
pub fn estimate_many<S>(trials: usize, seed: u64, dim: usize, stat: S) -> Result<Vec<Estimate>>
where
    S: Fn(&mut Rng, &mut [f64]) -> Result<()> + Sync,
{
    if trials < 100 {
        return Err(Error::InvalidInstance(format!("need at least 100 trials, got {trials}")));
    }
    let samples: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = Rng::for_trial(seed, t);
            let mut out = vec![0.0; dim];
            stat(&mut rng, &mut out).map(|_| out)
        })
        .collect::<Result<_>>()?;
    Ok((0..dim)
        .map(|d| Estimate::from_samples(samples.iter().map(|s| s[d])))
        .collect())
}

/// Scalar version of [`estimate_many`].
pub fn estimate<S>(trials: usize, seed: u64, stat: S) -> Result<Estimate>
where
    S: Fn(&mut Rng) -> Result<f64> + Sync,
{
    Ok(estimate_many(trials, seed, 1, |rng, out| {
        out[0] = stat(rng)?;
        Ok(())
    })?[0])
}

/// Estimates a statistic of a rounding algorithm's outcome.
pub fn estimate_rounding<S>(
    rounder: Rounder,
    instance: &ProblemInstance,
    x: &FractionalAllocation,
    trials: usize,
    seed: u64,
    stat: S,
) -> Result<Estimate>
where
    S: Fn(&RoundingOutcome) -> f64 + Sync,
{
    estimate(trials, seed, |rng| Ok(stat(&rounder.round(instance, x, rng)?)))
}

/// Per-edge probability that a rounding splits each edge of `edges`.
pub fn estimate_split_probabilities(
    rounder: Rounder,
    instance: &ProblemInstance,
    x: &FractionalAllocation,
    edges: &[Hyperedge],
    trials: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    estimate_many(trials, seed, edges.len(), |rng, out| {
        let o = rounder.round(instance, x, rng)?;
        for (slot, e) in out.iter_mut().zip(edges) {
            *slot = if o.partition.splits(&e.verts) { 1.0 } else { 0.0 };
        }
        Ok(())
    })
}

fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    heap_permute(k, &mut p, &mut out);
    out
}

fn heap_permute(m: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if m <= 1 {
        out.push(p.clone());
        return;
    }
    heap_permute(m - 1, p, out);
    for i in 0..m - 1 {
        let j = if m % 2 == 0 { i } else { 0 };
        p.swap(j, m - 1);
        heap_permute(m - 1, p, out);
    }
}

/// Exact `Pr[e split]` under the CKR rounding, by integrating over the
/// breakpoint intervals of `theta` and enumerating all `k!` label orders.
/// Only the rows of the edge's vertices matter. Limited to `k <= 8`.
pub fn ckr_split_probability_exact(x: &FractionalAllocation, edge: &[usize]) -> Result<f64> {
    let k = x.k();
    if k > 8 {
        return Err(Error::TooLarge(format!("k = {k}: permutation enumeration needs k <= 8")));
    }
    let perms = all_permutations(k);
    let mut total = 0.0;
    for (a, b) in theta_intervals(x, edge, 0.0) {
        let theta = b;
        let split = perms
            .iter()
            .filter(|pi| {
                let label_of = |v: usize| {
                    pi[..k - 1]
                        .iter()
                        .copied()
                        .find(|&i| x.get(v, i) >= theta)
                        .unwrap_or(pi[k - 1])
                };
                let first = label_of(edge[0]);
                edge.iter().any(|&v| label_of(v) != first)
            })
            .count();
        total += (b - a) * split as f64 / perms.len() as f64;
    }
    Ok(total)
}

/// Exact `Pr[e split]` under half rounding (`theta` uniform on `(1/2, 1]`).
pub fn half_split_probability_exact(x: &FractionalAllocation, edge: &[usize]) -> f64 {
    let k = x.k();
    let mut total = 0.0;
    for (a, b) in theta_intervals(x, edge, 0.5) {
        let label_of = |v: usize| (0..k - 1).find(|&i| x.get(v, i) >= b).unwrap_or(k - 1);
        let first = label_of(edge[0]);
        if edge.iter().any(|&v| label_of(v) != first) {
            total += 2.0 * (b - a);
        }
    }
    total
}

/// Intervals `(a, b]` of `[lo, 1]` on which every threshold set restricted
/// to `edge` is constant; on each, thresholding at `b` is representative.
fn theta_intervals(x: &FractionalAllocation, edge: &[usize], lo: f64) -> Vec<(f64, f64)> {
    let mut pts: Vec<f64> = edge
        .iter()
        .flat_map(|&v| x.row(v).iter().copied())
        .filter(|&t| t > lo && t < 1.0)
        .collect();
    pts.push(lo);
    pts.push(1.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lovasz::lovasz_eval;
    use crate::model::MscaInstance;
    use crate::oracle::{make_graph_cut, Oracle, WeightedHypergraph};

    #[test]
    fn modular_optimum_is_per_element_min() {
        let inst = ProblemInstance::Msca(
            MscaInstance::modular(&[vec![1.0, 2.0], vec![3.0, 1.0]]).unwrap(),
        );
        let (p, c) = exact_optimum(&inst).unwrap();
        assert_eq!(p.labels(), &[0, 1]);
        assert_eq!(c, 2.0);
    }

    #[test]
    fn star_graph_mc_optimum() {
        let h = WeightedHypergraph::from_graph(4, &[(3, 0, 1.0), (3, 1, 1.0), (3, 2, 1.0)]).unwrap();
        let (_, c) = exact_optimum(&ProblemInstance::hypergraph_mc(h, vec![0, 1, 2]).unwrap()).unwrap();
        assert_eq!(c, 2.0);
    }

    #[test]
    fn reference_matches_simple_cases() {
        let f = make_graph_cut(3, &[(0, 1, 1.0), (1, 2, 2.0)], 1.0).unwrap();
        assert!((lovasz_eval_reference(&f, &[0.8, 0.3, 0.3]) - lovasz_eval(&f, &[0.8, 0.3, 0.3])).abs() < 1e-15);
        assert_eq!(lovasz_eval_reference(&f, &[1.0, 0.0, 1.0]), 3.0);
        let g = Oracle::modular(vec![1.0, 2.0, 4.0]).unwrap();
        assert!((lovasz_eval_reference(&g, &[0.25, 0.25, 0.25]) - 0.25 * 7.0).abs() < 1e-15);
    }

    #[test]
    fn brute_min_cases() {
        let f = make_graph_cut(3, &[(0, 1, 1.0), (1, 2, 3.0)], 1.0).unwrap();
        let s = ElementSet::from_ids(3, [0]);
        let t = ElementSet::from_ids(3, [2]);
        let (set, v) = brute_min_subset(&f, Some(&s), Some(&t)).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(set.to_ids(), vec![0]);
        let (set, v) = brute_min_subset(&Oracle::zero(4), None, None).unwrap();
        assert!(set.is_empty() && v == 0.0);
        let m = Oracle::modular(vec![1.0, 1.0, 2.0]).unwrap();
        let (set, _) = brute_min_subset(&m, Some(&ElementSet::from_ids(3, [1, 2])), None).unwrap();
        assert_eq!(set.to_ids(), vec![1, 2]);
    }

    #[test]
    fn permutations_are_complete() {
        let mut p = all_permutations(4);
        assert_eq!(p.len(), 24);
        p.sort();
        p.dedup();
        assert_eq!(p.len(), 24);
    }

    #[test]
    fn estimate_rejects_tiny_budgets() {
        assert!(estimate(10, 0, |_| Ok(1.0)).is_err());
        let e = estimate(1000, 0, |r| Ok(r.uniform())).unwrap();
        assert!((e.mean - 0.5).abs() < 4.0 * e.stderr);
    }
}
