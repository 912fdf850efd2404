use super::{RoundingOutcome, TraceStep};
use crate::error::Result;
use crate::model::{FractionalAllocation, ProblemInstance};
use crate::oracle::SetFunction;
use crate::set::ElementSet;

/// Greedy set cover over threshold sets of the unassigned elements.
///
/// Each round considers `A(i, theta) = {v in U : x(v, i) >= theta}` for every
/// label and every distinct positive value `theta` of `x_i` on `U`, takes the
/// set with the smallest `f_i(A) / |A|` and assigns it. Ties keep the first
/// candidate in (label, decreasing theta) order. Deterministic.
pub fn monotone_greedy(instance: &ProblemInstance, x: &FractionalAllocation) -> Result<RoundingOutcome> {
    let (n, k) = (instance.n(), instance.k());
    let mut labels = vec![usize::MAX; n];
    let mut unassigned: Vec<usize> = (0..n).collect();
    let mut trace = Vec::new();

    while !unassigned.is_empty() {
        let mut best: Option<(f64, usize, f64, ElementSet)> = None;
        for i in 0..k {
            let f = instance.label_oracle(i);
            let mut order: Vec<usize> = unassigned.iter().copied().filter(|&v| x.get(v, i) > 0.0).collect();
            order.sort_by(|&a, &b| x.get(b, i).total_cmp(&x.get(a, i)).then(a.cmp(&b)));
            let mut set = ElementSet::empty(n);
            for (p, &v) in order.iter().enumerate() {
                set.insert(v);
                let theta = x.get(v, i);
                if order.get(p + 1).is_some_and(|&u| x.get(u, i) == theta) {
                    continue;
                }
                let ratio = f.eval(&set) / set.len() as f64;
                if best.as_ref().is_none_or(|b| ratio < b.0) {
                    best = Some((ratio, i, theta, set.clone()));
                }
            }
        }
        // Rows sum to one, so some label has a positive entry on U.
        let (_, i, theta, set) = best.expect("feasible allocation has a positive entry per row");
        let mut step = TraceStep::new(Some(i), Some(theta));
        for v in set.iter() {
            labels[v] = i;
            step.assigned.push(v);
        }
        unassigned.retain(|&v| !set.contains(v));
        trace.push(step);
    }
    RoundingOutcome::finish(instance, labels, trace, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MscaInstance;

    #[test]
    fn single_element_takes_cheap_label() {
        let inst = ProblemInstance::Msca(MscaInstance::modular(&[vec![1.0, 5.0]]).unwrap());
        let x = FractionalAllocation::new(1, 2, vec![1.0, 0.0]).unwrap();
        let out = monotone_greedy(&inst, &x).unwrap();
        assert_eq!(out.partition.labels(), &[0]);
        assert_eq!(out.cost, 1.0);
    }

    #[test]
    fn integral_input_is_fixed_point() {
        let inst = ProblemInstance::Msca(
            MscaInstance::modular(&[vec![1.0, 2.0], vec![3.0, 1.0], vec![2.0, 2.0]]).unwrap(),
        );
        let x = FractionalAllocation::new(3, 2, vec![0.0, 1.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let out = monotone_greedy(&inst, &x).unwrap();
        assert_eq!(out.partition.labels(), &[1, 0, 1]);
    }
}
