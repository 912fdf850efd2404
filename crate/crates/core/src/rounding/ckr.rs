use super::{Rng, RoundingOutcome, TraceStep};
use crate::error::{Error, Result};
use crate::model::{FractionalAllocation, ProblemInstance};

fn require_terminals(instance: &ProblemInstance, name: &str) -> Result<()> {
    match instance.terminals() {
        Some(_) => Ok(()),
        None => Err(Error::Unsupported(format!("{name} needs a terminal instance"))),
    }
}

/// One shared `theta` and a random label order `pi`; labels `pi(1..k-1)` take
/// their unassigned threshold sets in turn and `pi(k)` takes the rest.
pub fn ckr_round(instance: &ProblemInstance, x: &FractionalAllocation, rng: &mut Rng) -> Result<RoundingOutcome> {
    require_terminals(instance, "ckr")?;
    let (n, k) = (instance.n(), instance.k());
    let pi = rng.permutation(k);
    let theta = rng.theta();
    let mut labels = vec![usize::MAX; n];
    let mut trace = Vec::with_capacity(k);
    for &i in &pi[..k - 1] {
        let mut step = TraceStep::new(Some(i), Some(theta));
        for v in 0..n {
            if labels[v] == usize::MAX && x.get(v, i) >= theta {
                labels[v] = i;
                step.assigned.push(v);
            }
        }
        trace.push(step);
    }
    let last = pi[k - 1];
    let mut step = TraceStep::new(Some(last), None);
    for (v, l) in labels.iter_mut().enumerate() {
        if *l == usize::MAX {
            *l = last;
            step.assigned.push(v);
        }
    }
    step.note = Some("remainder".into());
    trace.push(step);
    trace[0].permutation = Some(pi);
    RoundingOutcome::finish(instance, labels, trace, 0)
}

/// `theta` uniform in `(1/2, 1]`; labels `1..k-1` take their threshold sets,
/// which are disjoint because no row has two entries above one half, and the
/// last label takes the rest.
pub fn half_round(instance: &ProblemInstance, x: &FractionalAllocation, rng: &mut Rng) -> Result<RoundingOutcome> {
    require_terminals(instance, "half")?;
    let (n, k) = (instance.n(), instance.k());
    let theta = 0.5 + 0.5 * rng.theta();
    let mut labels = vec![k - 1; n];
    let mut step = TraceStep::new(None, Some(theta));
    for (v, l) in labels.iter_mut().enumerate() {
        if let Some(i) = (0..k - 1).find(|&i| x.get(v, i) >= theta) {
            *l = i;
        }
        step.assigned.push(v);
    }
    RoundingOutcome::finish(instance, labels, vec![step], 0)
}
