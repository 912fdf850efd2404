//! Rounding algorithms: each consumes a feasible fractional allocation and
//! returns a total partition that respects pins and forbidden labels.

mod ckr;
mod greedy;
mod kt;
mod uncross;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lovasz::{threshold_set, FEAS_TOL};
use crate::model::{FractionalAllocation, Partition, ProblemInstance, ProblemKind};
use crate::oracle::{check_monotone, check_symmetric, SetFunction};
use crate::set::ElementSet;

pub use ckr::{ckr_round, half_round};
pub use greedy::monotone_greedy;
pub use kt::{kt_iteration_cap, kt_round, sym_sublabel_round};
pub use uncross::{sym_submp_round, uncross, uncross_counted, SymVariant};

/// Largest ground set on which applicability checks run the exhaustive
/// structural tests.
const ADVISORY_CHECK_N: usize = 12;

/// Seeded ChaCha8 stream. `(seed, stream)` fully determines the draws, so
/// trial `t` of an experiment uses stream `t` and trials can run in any
/// order.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self::for_trial(seed, 0)
    }

    pub fn for_trial(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Rng {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// 53-bit uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`. Thresholds are drawn here so that `theta = 0`,
    /// which would select every element including forbidden ones, cannot
    /// occur.
    pub fn theta(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    pub fn permutation(&mut self, k: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..k).collect();
        p.shuffle(&mut self.inner);
        p
    }
}

/// One iteration of a rounding algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    /// Elements that received their final label in this step.
    pub assigned: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TraceStep {
    fn new(label: Option<usize>, theta: Option<f64>) -> Self {
        TraceStep {
            label,
            theta,
            permutation: None,
            assigned: Vec::new(),
            note: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundingOutcome {
    pub partition: Partition,
    pub cost: f64,
    pub trace: Vec<TraceStep>,
    /// Elements labeled by the iteration-cap fallback rather than by a draw.
    pub fallback: usize,
}

impl RoundingOutcome {
    fn finish(instance: &ProblemInstance, labels: Vec<usize>, trace: Vec<TraceStep>, fallback: usize) -> Result<Self> {
        let partition = Partition::new(labels, instance.k())?;
        instance.check_partition(&partition)?;
        Ok(RoundingOutcome {
            cost: instance.cost(&partition),
            partition,
            trace,
            fallback,
        })
    }

    /// Index of the trace step that assigned each element.
    pub fn assignment_steps(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.partition.n()];
        for (s, step) in self.trace.iter().enumerate() {
            for &v in &step.assigned {
                out[v] = Some(s);
            }
        }
        out
    }
}

/// `A(i, theta) = {v : x(v, i) >= theta}`.
pub fn theta_round(x: &FractionalAllocation, i: usize, theta: f64) -> ElementSet {
    threshold_set(&x.column(i), theta)
}

/// Label with the largest `x(v, i)`, lowest index among ties.
fn argmax_label(x: &FractionalAllocation, v: usize) -> usize {
    let row = x.row(v);
    (0..row.len()).fold(0, |b, i| if row[i] > row[b] { i } else { b })
}

fn labels_from_blocks(n: usize, blocks: &[ElementSet], remainder: usize) -> Vec<usize> {
    let mut labels = vec![remainder; n];
    for (i, b) in blocks.iter().enumerate() {
        for v in b.iter() {
            labels[v] = i;
        }
    }
    labels
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounder {
    MonotoneGreedy,
    Kt,
    Ckr,
    Half,
    SymSubMp,
    SymSubMpRelabel,
    SymSubLabel,
}

impl Rounder {
    pub const ALL: [Rounder; 7] = [
        Rounder::MonotoneGreedy,
        Rounder::Kt,
        Rounder::Ckr,
        Rounder::Half,
        Rounder::SymSubMp,
        Rounder::SymSubMpRelabel,
        Rounder::SymSubLabel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rounder::MonotoneGreedy => "greedy",
            Rounder::Kt => "kt",
            Rounder::Ckr => "ckr",
            Rounder::Half => "half",
            Rounder::SymSubMp => "sym-submp",
            Rounder::SymSubMpRelabel => "sym-submp-relabel",
            Rounder::SymSubLabel => "sym-sublabel",
        }
    }

    pub fn is_randomized(self) -> bool {
        self != Rounder::MonotoneGreedy
    }

    /// Structural preconditions. Monotonicity and symmetry are checked
    /// exhaustively on small ground sets and assumed above that.
    pub fn check_applicable(self, instance: &ProblemInstance) -> Result<()> {
        let n = instance.n();
        let small = n <= ADVISORY_CHECK_N;
        let unsupported = |why: &str| Err(Error::Unsupported(format!("{}: {why}", self.name())));
        match self {
            Rounder::MonotoneGreedy => {
                if small {
                    for i in 0..instance.k() {
                        let f = instance.label_oracle(i);
                        if !check_monotone(&f)? || f.eval(&ElementSet::empty(n)) != 0.0 {
                            return unsupported("every label oracle must be monotone with f(empty) = 0");
                        }
                    }
                }
            }
            Rounder::Kt => {}
            Rounder::Ckr | Rounder::Half => {
                if instance.terminals().is_none() {
                    return unsupported("needs a terminal instance");
                }
            }
            Rounder::SymSubMp | Rounder::SymSubMpRelabel => {
                let Some(f) = instance.shared_oracle() else {
                    return unsupported("needs a single shared oracle with terminals");
                };
                if small && !check_symmetric(f)? {
                    return unsupported("oracle is not symmetric");
                }
            }
            Rounder::SymSubLabel => {
                let ProblemInstance::SubLabel(l) = instance else {
                    return unsupported("needs a labeling instance");
                };
                if small && !check_symmetric(&l.h)? {
                    return unsupported("separation oracle h is not symmetric");
                }
            }
        }
        Ok(())
    }

    pub fn round(self, instance: &ProblemInstance, x: &FractionalAllocation, rng: &mut Rng) -> Result<RoundingOutcome> {
        instance.check_allocation(x, FEAS_TOL)?;
        match self {
            Rounder::MonotoneGreedy => monotone_greedy(instance, x),
            Rounder::Kt => kt_round(instance, x, rng),
            Rounder::Ckr => ckr_round(instance, x, rng),
            Rounder::Half => half_round(instance, x, rng),
            Rounder::SymSubMp => sym_submp_round(instance, x, rng, SymVariant::Plain),
            Rounder::SymSubMpRelabel => sym_submp_round(instance, x, rng, SymVariant::RelabelK),
            Rounder::SymSubLabel => sym_sublabel_round(instance, x, rng),
        }
    }

    /// Rounders whose preconditions `instance` meets.
    pub fn applicable_to(instance: &ProblemInstance) -> Vec<Rounder> {
        Self::ALL
            .into_iter()
            .filter(|r| r.check_applicable(instance).is_ok())
            .collect()
    }

    /// The natural default for a problem kind.
    pub fn default_for(kind: ProblemKind) -> Rounder {
        match kind {
            ProblemKind::Msca => Rounder::Kt,
            ProblemKind::SubMp | ProblemKind::HypergraphMp => Rounder::SymSubMpRelabel,
            ProblemKind::HypergraphMc => Rounder::Ckr,
            ProblemKind::SubLabel => Rounder::Kt,
        }
    }
}

impl fmt::Display for Rounder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rounder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown rounding algorithm '{s}'")))
    }
}
