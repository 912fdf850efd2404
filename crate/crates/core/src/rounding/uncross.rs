use serde::{Deserialize, Serialize};

use super::{labels_from_blocks, theta_round, Rng, RoundingOutcome, TraceStep};
use crate::error::{Error, Result};
use crate::lovasz::lovasz_eval;
use crate::model::{FractionalAllocation, ProblemInstance};
use crate::oracle::SetFunction;
use crate::set::ElementSet;

/// Makes `sets` pairwise disjoint without changing their union.
///
/// Repeatedly takes the lowest overlapping pair `i < j` and removes the
/// overlap from `A_j` when `f(A_j - A_i) <= f(A_j)`, otherwise from `A_i`.
/// For symmetric submodular `f` posimodularity makes one of the two moves
/// non-increasing, so the total cost never goes up; for other oracles the
/// sets still come out disjoint but the cost guarantee is void.
pub fn uncross<F: SetFunction + ?Sized>(f: &F, sets: &[ElementSet]) -> Vec<ElementSet> {
    uncross_counted(f, sets).0
}

/// [`uncross`] plus the number of pair resolutions performed.
pub fn uncross_counted<F: SetFunction + ?Sized>(f: &F, sets: &[ElementSet]) -> (Vec<ElementSet>, usize) {
    let mut a = sets.to_vec();
    let mut steps = 0;
    // Sets only shrink, so a resolved pair stays disjoint and one pass over
    // the pairs in order suffices.
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if !a[i].intersects(&a[j]) {
                continue;
            }
            let j_minus_i = a[j].difference(&a[i]);
            if f.eval(&j_minus_i) <= f.eval(&a[j]) {
                a[j] = j_minus_i;
            } else {
                let i_minus_j = a[i].difference(&a[j]);
                a[i] = i_minus_j;
            }
            steps += 1;
        }
    }
    (a, steps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymVariant {
    /// Threshold all `k` labels, uncross, give the remainder to the last label.
    Plain,
    /// Give the remainder to the label with the largest extension value and
    /// threshold only the others.
    RelabelK,
}

/// Shared-threshold rounding for symmetric submodular multiway partition.
pub fn sym_submp_round(
    instance: &ProblemInstance,
    x: &FractionalAllocation,
    rng: &mut Rng,
    variant: SymVariant,
) -> Result<RoundingOutcome> {
    let Some(f) = instance.shared_oracle() else {
        return Err(Error::Unsupported("sym-submp needs a single shared oracle".into()));
    };
    let (n, k) = (instance.n(), instance.k());
    let theta = rng.theta();
    let remainder = match variant {
        SymVariant::Plain => k - 1,
        SymVariant::RelabelK => {
            // Largest value wins; ties go to the highest label so that equal
            // values reduce to the plain ordering.
            let vals: Vec<f64> = (0..k).map(|i| lovasz_eval(f, &x.column(i))).collect();
            (0..k).fold(0, |b, i| if vals[i] >= vals[b] { i } else { b })
        }
    };
    let thresholded: Vec<usize> = match variant {
        SymVariant::Plain => (0..k).collect(),
        SymVariant::RelabelK => (0..k).filter(|&i| i != remainder).collect(),
    };
    let sets: Vec<ElementSet> = thresholded.iter().map(|&i| theta_round(x, i, theta)).collect();
    let parts = uncross(f, &sets);
    let mut blocks = vec![ElementSet::empty(n); k];
    for (&i, p) in thresholded.iter().zip(parts) {
        if i != remainder {
            blocks[i] = p;
        }
    }
    let labels = labels_from_blocks(n, &blocks, remainder);
    let mut step = TraceStep::new(Some(remainder), Some(theta));
    step.assigned = (0..n).collect();
    step.note = Some("remainder label".into());
    RoundingOutcome::finish(instance, labels, vec![step], 0)
}
