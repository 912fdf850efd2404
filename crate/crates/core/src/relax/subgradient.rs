use serde::{Deserialize, Serialize};

use super::project::project_simplex_masked;
use super::{SolveStatus, SolverReport};
use crate::error::{Error, Result};
use crate::model::{FractionalAllocation, ProblemInstance};
use crate::oracle::SetFunction;
use crate::rounding::Rng;
use crate::set::ElementSet;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StepSchedule {
    /// `c / sqrt(t + 1)`; `c` defaults to `f(x0) / |g0|`.
    InvSqrt { c: Option<f64> },
    /// Polyak steps `(f(x) - target) / |g|^2` toward a known lower bound.
    Polyak { target: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgradientOptions {
    pub schedule: StepSchedule,
    pub max_iter: usize,
    /// Stop once `best - lower_bound <= tol_rel * max(1, |lower_bound|)`.
    pub tol_rel: f64,
    /// Known lower bound on the optimum, enabling the tolerance stop.
    pub lower_bound: Option<f64>,
    pub seed: u64,
}

impl SubgradientOptions {
    pub fn new(seed: u64) -> Self {
        SubgradientOptions {
            schedule: StepSchedule::InvSqrt { c: None },
            max_iter: 5000,
            tol_rel: 1e-4,
            lower_bound: None,
            seed,
        }
    }

    /// Polyak steps toward `bound`, which also serves as the stopping target.
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.schedule = StepSchedule::Polyak { target: bound };
        self.lower_bound = Some(bound);
        self
    }
}

/// Extension value and greedy subgradient from a single sorted sweep;
/// `f^(x) = f(empty) + g.x`.
fn value_and_subgradient<F: SetFunction + ?Sized>(f: &F, x: &[f64], g: &mut [f64]) -> f64 {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    let mut prefix = ElementSet::empty(n);
    let base = f.eval(&prefix);
    let mut prev = base;
    let mut value = base;
    for &v in &order {
        prefix.insert(v);
        let cur = f.eval(&prefix);
        g[v] = cur - prev;
        value += g[v] * x[v];
        prev = cur;
    }
    value
}

struct State<'a> {
    instance: &'a ProblemInstance,
    n: usize,
    k: usize,
    allowed: Vec<bool>,
    free_row: Vec<bool>,
}

impl State<'_> {
    /// Objective and subgradient, both row-major `n x k`.
    fn evaluate(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let mut col = vec![0.0; self.n];
        let mut g = vec![0.0; self.n];
        let mut total = 0.0;
        for i in 0..self.k {
            for v in 0..self.n {
                col[v] = x[v * self.k + i];
            }
            total += value_and_subgradient(&self.instance.label_oracle(i), &col, &mut g);
            for v in 0..self.n {
                grad[v * self.k + i] = g[v];
            }
        }
        total
    }

    /// Squared norm of the subgradient restricted to movable coordinates.
    fn free_norm2(&self, grad: &[f64]) -> f64 {
        (0..self.n)
            .filter(|&v| self.free_row[v])
            .flat_map(|v| (0..self.k).map(move |i| v * self.k + i))
            .filter(|&idx| self.allowed[idx])
            .map(|idx| grad[idx] * grad[idx])
            .sum()
    }

    fn step(&self, x: &mut [f64], grad: &[f64], alpha: f64) {
        let k = self.k;
        for v in (0..self.n).filter(|&v| self.free_row[v]) {
            let row: Vec<f64> = (0..k).map(|i| x[v * k + i] - alpha * grad[v * k + i]).collect();
            let p = project_simplex_masked(&row, &self.allowed[v * k..(v + 1) * k]);
            x[v * k..(v + 1) * k].copy_from_slice(&p);
        }
    }
}

/// Projected subgradient descent over the product of (masked) simplices.
///
/// Returns the best iterate seen, including periodic checks of the
/// step-weighted average iterate, which tends to be much closer to optimal
/// on piecewise-linear objectives.
pub fn solve_subgradient(instance: &ProblemInstance, opts: &SubgradientOptions) -> Result<SolverReport> {
    let (n, k) = (instance.n(), instance.k());
    let mut allowed = vec![false; n * k];
    let mut free_row = vec![false; n];
    for v in 0..n {
        let mut count = 0;
        for i in 0..k {
            allowed[v * k + i] = instance.allowed(v, i);
            count += allowed[v * k + i] as usize;
        }
        if count == 0 {
            return Err(Error::InvalidInstance(format!("element {v} has no allowed label")));
        }
        free_row[v] = count > 1;
    }
    let state = State {
        instance,
        n,
        k,
        allowed,
        free_row,
    };

    // Start halfway between the uniform point and a random one.
    let mut rng = Rng::new(opts.seed);
    let mut x = vec![0.0; n * k];
    for v in 0..n {
        let row = &mut x[v * k..(v + 1) * k];
        let allowed = &state.allowed[v * k..(v + 1) * k];
        let m = allowed.iter().filter(|&&a| a).count() as f64;
        let mut draws: Vec<f64> = allowed
            .iter()
            .map(|&a| if a { -(1.0 - rng.uniform()).ln() } else { 0.0 })
            .collect();
        let s: f64 = draws.iter().sum();
        draws.iter_mut().for_each(|d| *d /= s);
        for i in 0..k {
            row[i] = if allowed[i] { 0.5 / m + 0.5 * draws[i] } else { 0.0 };
        }
    }

    let mut grad = vec![0.0; n * k];
    let mut scratch = vec![0.0; n * k];
    let mut best_x = x.clone();
    let mut best = f64::INFINITY;
    let mut avg = vec![0.0; n * k];
    let mut avg_weight = 0.0;
    let mut c0 = None;
    let mut status = SolveStatus::IterationLimit;
    let mut iterations = 0;
    let done = |best: f64| {
        opts.lower_bound
            .is_some_and(|lb| best - lb <= opts.tol_rel * lb.abs().max(1.0))
    };

    for t in 0..opts.max_iter {
        iterations = t + 1;
        let f = state.evaluate(&x, &mut grad);
        if f < best {
            best = f;
            best_x.copy_from_slice(&x);
        }
        if done(best) {
            status = SolveStatus::ToleranceReached;
            break;
        }
        let g2 = state.free_norm2(&grad);
        if g2 < 1e-24 {
            // A zero subgradient certifies a global minimum of the convex objective.
            status = SolveStatus::Optimal;
            break;
        }
        let alpha = match opts.schedule {
            StepSchedule::Polyak { target } => (f - target).max(1e-3 * opts.tol_rel) / g2,
            StepSchedule::InvSqrt { c } => {
                let c = *c0.get_or_insert_with(|| c.unwrap_or_else(|| f.abs().max(1.0) / g2.sqrt()));
                c / ((t + 1) as f64).sqrt()
            }
        };
        state.step(&mut x, &grad, alpha);

        avg_weight += alpha;
        let share = alpha / avg_weight;
        for (a, &xi) in avg.iter_mut().zip(&x) {
            *a += share * (xi - *a);
        }
        if (t + 1) % 25 == 0 {
            let fa = state.evaluate(&avg, &mut scratch);
            if fa < best {
                best = fa;
                best_x.copy_from_slice(&avg);
            }
        }
    }

    let mut out = FractionalAllocation::from_rows_normalized(n, k, best_x)?;
    if let Some(t) = instance.terminals() {
        out = out.with_terminals(t.to_vec())?;
    }
    Ok(SolverReport {
        x: out,
        objective: best,
        iterations,
        status,
    })
}
