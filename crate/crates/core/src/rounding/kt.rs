use super::uncross::uncross;
use super::{argmax_label, labels_from_blocks, Rng, RoundingOutcome, TraceStep};
use crate::error::{Error, Result};
use crate::model::{FractionalAllocation, ProblemInstance};
use crate::set::ElementSet;

/// `64 k ceil(ln(n + 1))` draws. The loop needs `O(k log n)` draws with high
/// probability, so hitting the cap is a measurable anomaly, not a code path
/// that matters for the bounds.
pub fn kt_iteration_cap(n: usize, k: usize) -> usize {
    64 * k * ((n as f64 + 1.0).ln().ceil() as usize).max(1)
}

/// Repeatedly draws a label `i` and `theta` uniformly and gives label `i` to
/// every still-unassigned element with `x(v, i) >= theta`.
pub fn kt_round(instance: &ProblemInstance, x: &FractionalAllocation, rng: &mut Rng) -> Result<RoundingOutcome> {
    let (n, k) = (instance.n(), instance.k());
    let mut labels = vec![usize::MAX; n];
    let mut left = n;
    let mut trace = Vec::new();
    let cap = kt_iteration_cap(n, k);
    while left > 0 && trace.len() < cap {
        let i = rng.below(k);
        let theta = rng.theta();
        let mut step = TraceStep::new(Some(i), Some(theta));
        for v in 0..n {
            if labels[v] == usize::MAX && x.get(v, i) >= theta {
                labels[v] = i;
                step.assigned.push(v);
            }
        }
        left -= step.assigned.len();
        trace.push(step);
    }
    let mut fallback = 0;
    if left > 0 {
        let mut step = TraceStep::new(None, None);
        step.note = Some("iteration cap reached; remaining elements take their largest label".into());
        let rest: Vec<usize> = (0..n).filter(|&v| labels[v] == usize::MAX).collect();
        for v in rest {
            labels[v] = argmax_label(x, v);
            step.assigned.push(v);
        }
        fallback = step.assigned.len();
        trace.push(step);
    }
    RoundingOutcome::finish(instance, labels, trace, fallback)
}

/// Accumulates possibly overlapping balls `A_i` with the same draws as
/// [`kt_round`] but without removing covered elements, then uncrosses them
/// with respect to the separation oracle `h`.
pub fn sym_sublabel_round(instance: &ProblemInstance, x: &FractionalAllocation, rng: &mut Rng) -> Result<RoundingOutcome> {
    let ProblemInstance::SubLabel(l) = instance else {
        return Err(Error::Unsupported("sym-sublabel needs a labeling instance".into()));
    };
    let (n, k) = (instance.n(), instance.k());
    let mut balls = vec![ElementSet::empty(n); k];
    let mut covered = ElementSet::empty(n);
    let mut trace = Vec::new();
    let cap = kt_iteration_cap(n, k);
    while covered.len() < n && trace.len() < cap {
        let i = rng.below(k);
        let theta = rng.theta();
        let mut step = TraceStep::new(Some(i), Some(theta));
        for v in 0..n {
            if x.get(v, i) >= theta {
                balls[i].insert(v);
                if !covered.contains(v) {
                    covered.insert(v);
                    step.assigned.push(v);
                }
            }
        }
        trace.push(step);
    }
    let mut fallback = 0;
    if covered.len() < n {
        let mut step = TraceStep::new(None, None);
        step.note = Some("iteration cap reached; remaining elements join their largest label".into());
        for v in (0..n).filter(|&v| !covered.contains(v)) {
            balls[argmax_label(x, v)].insert(v);
            step.assigned.push(v);
        }
        fallback = step.assigned.len();
        trace.push(step);
    }
    let parts = uncross(&l.h, &balls);
    let mut step = TraceStep::new(None, None);
    step.note = Some("uncrossed".into());
    trace.push(step);
    // The balls cover V, so no element falls through to the remainder.
    let labels = labels_from_blocks(n, &parts, 0);
    RoundingOutcome::finish(instance, labels, trace, fallback)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LabelingInstance, MscaInstance, Partition};
    use crate::oracle::{make_graph_cut, Oracle};

    #[test]
    fn integral_input_is_fixed_point() {
        let inst = ProblemInstance::Msca(
            MscaInstance::modular(&[vec![1.0, 2.0, 0.0], vec![3.0, 1.0, 1.0]]).unwrap(),
        );
        let p = Partition::new(vec![2, 0], 3).unwrap();
        let x = FractionalAllocation::from_partition(&p);
        for seed in 0..50 {
            let out = kt_round(&inst, &x, &mut Rng::new(seed)).unwrap();
            assert_eq!(out.partition, p);
            assert_eq!(out.fallback, 0);
        }
    }

    #[test]
    fn sublabel_outputs_cover_everything() {
        let h = make_graph_cut(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], 1.0).unwrap();
        let g = vec![Oracle::modular(vec![1.0, 0.0, 2.0, 1.0]).unwrap(), Oracle::modular(vec![0.0, 1.0, 1.0, 0.0]).unwrap()];
        let inst = ProblemInstance::SubLabel(LabelingInstance::new(g, h, None).unwrap());
        let x = FractionalAllocation::new(4, 2, vec![0.5, 0.5, 0.2, 0.8, 0.9, 0.1, 0.4, 0.6]).unwrap();
        for seed in 0..50 {
            let out = sym_sublabel_round(&inst, &x, &mut Rng::new(seed)).unwrap();
            assert_eq!(out.partition.n(), 4);
            assert!((out.cost - inst.cost(&out.partition)).abs() < 1e-12);
        }
    }
}
