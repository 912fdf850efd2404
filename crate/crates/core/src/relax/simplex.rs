//! Dense two-phase tableau simplex.
//!
//! Pricing is Dantzig's most-negative reduced cost. After a run of degenerate
//! pivots the solver switches to Bland's smallest-index rule, which cannot
//! cycle, and returns to Dantzig after the next pivot that makes progress.

use serde::{Deserialize, Serialize};

use super::lp::{LinearProgram, Sense, VarBound};
use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-10;
const DEGENERATE_RUN: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    ToleranceReached,
    IterationLimit,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: SolveStatus,
    /// One value per LP column; zeros unless `status` is optimal.
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows x (cols + 1)`, last column is the right-hand side.
    t: Vec<f64>,
    /// Reduced costs of the current phase plus `-z` in the last slot.
    obj: Vec<f64>,
    basis: Vec<usize>,
    iterations: usize,
    limit: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.t[pr * w + pc];
        let (before, rest) = self.t.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for v in prow.iter_mut() {
            *v /= p;
        }
        prow[pc] = 1.0;
        let eliminate = |row: &mut [f64]| {
            let factor = row[pc];
            if factor != 0.0 {
                for (a, b) in row.iter_mut().zip(prow.iter()) {
                    *a -= factor * b;
                }
                row[pc] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        eliminate(&mut self.obj);
        self.basis[pr] = pc;
        self.iterations += 1;
    }

    fn load_costs(&mut self, cost: &[f64]) {
        let w = self.cols + 1;
        self.obj = cost.to_vec();
        self.obj.push(0.0);
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..w {
                    self.obj[c] -= cb * self.t[r * w + c];
                }
            }
        }
    }

    fn run(&mut self, allowed: &[bool]) -> SolveStatus {
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= self.limit {
                return SolveStatus::IterationLimit;
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter = None;
            let mut best = -COST_EPS;
            for c in (0..self.cols).filter(|&c| allowed[c]) {
                let d = self.obj[c];
                if d < best {
                    enter = Some(c);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(pc) = enter else {
                return SolveStatus::Optimal;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r).max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - 1e-12
                                || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((pr, ratio)) = leave else {
                return SolveStatus::Unbounded;
            };
            if ratio <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(pr, pc);
        }
    }
}

/// Solves `lp` to optimality. Infeasible and unbounded programs are reported
/// through [`LpSolution::status`]; only malformed input is an `Err`.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    // Slacks and artificials roughly double the width of the tableau.
    let width = 2 * lp.num_vars() + 2 * lp.rows.len();
    if lp.rows.len().saturating_mul(width) > 2 * super::MAX_DENSE_ENTRIES {
        return Err(Error::TooLarge(format!("simplex tableau {} x {width}", lp.rows.len())));
    }
    let nv = lp.num_vars();

    // Column layout: structural (free variables split in two), then one
    // slack/surplus per inequality, then artificials.
    let mut col_of = Vec::with_capacity(nv);
    let mut ncols = 0usize;
    for b in &lp.bounds {
        match b {
            VarBound::NonNeg => {
                col_of.push((ncols, None));
                ncols += 1;
            }
            VarBound::Free => {
                col_of.push((ncols, Some(ncols + 1)));
                ncols += 2;
            }
        }
    }
    let structural = ncols;

    let mut norm_rows = Vec::with_capacity(lp.rows.len());
    for row in &lp.rows {
        let mut coefs = vec![0.0; structural];
        for (j, &a) in row.coefs.iter().enumerate() {
            let (p, neg) = col_of[j];
            coefs[p] = a;
            if let Some(q) = neg {
                coefs[q] = -a;
            }
        }
        let (mut sense, mut rhs) = (row.sense, row.rhs);
        if rhs < 0.0 {
            coefs.iter_mut().for_each(|a| *a = -*a);
            rhs = -rhs;
            sense = match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
        norm_rows.push((coefs, sense, rhs));
    }

    let slack_count = norm_rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let art_count = norm_rows.iter().filter(|r| r.1 != Sense::Le).count();
    let art_start = structural + slack_count;
    let cols = art_start + art_count;
    let m = norm_rows.len();
    let w = cols + 1;
    let mut t = vec![0.0; m * w];
    let mut basis = vec![0; m];
    let (mut next_slack, mut next_art) = (structural, art_start);
    for (r, (coefs, sense, rhs)) in norm_rows.iter().enumerate() {
        t[r * w..r * w + structural].copy_from_slice(coefs);
        t[r * w + cols] = *rhs;
        match sense {
            Sense::Le => {
                t[r * w + next_slack] = 1.0;
                basis[r] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                t[r * w + next_slack] = -1.0;
                next_slack += 1;
                t[r * w + next_art] = 1.0;
                basis[r] = next_art;
                next_art += 1;
            }
            Sense::Eq => {
                t[r * w + next_art] = 1.0;
                basis[r] = next_art;
                next_art += 1;
            }
        }
    }

    let mut tab = Tableau {
        rows: m,
        cols,
        t,
        obj: Vec::new(),
        basis,
        iterations: 0,
        limit: 50_000 + 50 * (m + cols),
    };

    let finish = |status: SolveStatus, iterations: usize| LpSolution {
        status,
        values: vec![0.0; nv],
        objective: f64::NAN,
        iterations,
    };

    if art_count > 0 {
        let mut phase1 = vec![0.0; cols];
        phase1[art_start..].iter_mut().for_each(|c| *c = 1.0);
        tab.load_costs(&phase1);
        let status = tab.run(&vec![true; cols]);
        if status == SolveStatus::IterationLimit {
            return Ok(finish(status, tab.iterations));
        }
        let scale = norm_rows.iter().fold(1.0f64, |a, r| a.max(r.2));
        if -tab.obj[cols] > 1e-7 * scale {
            return Ok(finish(SolveStatus::Infeasible, tab.iterations));
        }
        // Pivot remaining zero-level artificials out; drop redundant rows.
        let mut r = 0;
        while r < tab.rows {
            if tab.basis[r] >= art_start {
                match (0..art_start).find(|&c| tab.at(r, c).abs() > PIVOT_EPS) {
                    Some(c) => tab.pivot(r, c),
                    None => {
                        tab.t.drain(r * w..(r + 1) * w);
                        tab.basis.remove(r);
                        tab.rows -= 1;
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut cost = vec![0.0; cols];
    for (j, &(p, neg)) in col_of.iter().enumerate() {
        cost[p] = lp.objective[j];
        if let Some(q) = neg {
            cost[q] = -lp.objective[j];
        }
    }
    tab.load_costs(&cost);
    let allowed: Vec<bool> = (0..cols).map(|c| c < art_start).collect();
    let status = tab.run(&allowed);
    if status != SolveStatus::Optimal {
        return Ok(finish(status, tab.iterations));
    }

    let mut colval = vec![0.0; cols];
    for r in 0..tab.rows {
        colval[tab.basis[r]] = tab.rhs(r).max(0.0);
    }
    let values: Vec<f64> = col_of
        .iter()
        .map(|&(p, neg)| colval[p] - neg.map_or(0.0, |q| colval[q]))
        .collect();
    Ok(LpSolution {
        status: SolveStatus::Optimal,
        objective: lp.evaluate(&values),
        values,
        iterations: tab.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lower_bound() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 1.0, VarBound::NonNeg);
        lp.add_row(&[(x, 1.0)], Sense::Ge, 3.0);
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-12);
    }

    /// Two supplies (3, 2), two demands (4, 1), costs [[1, 4], [2, 1]].
    /// Ship 3 from s1 to d1, 1 from s2 to d1, 1 from s2 to d2: 3 + 2 + 1 = 6.
    #[test]
    fn transportation() {
        let mut lp = LinearProgram::new();
        let cost = [[1.0, 4.0], [2.0, 1.0]];
        let mut v = [[0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                v[i][j] = lp.add_var(format!("s{i}d{j}"), cost[i][j], VarBound::NonNeg);
            }
        }
        lp.add_row(&[(v[0][0], 1.0), (v[0][1], 1.0)], Sense::Le, 3.0);
        lp.add_row(&[(v[1][0], 1.0), (v[1][1], 1.0)], Sense::Le, 2.0);
        lp.add_row(&[(v[0][0], 1.0), (v[1][0], 1.0)], Sense::Eq, 4.0);
        lp.add_row(&[(v[0][1], 1.0), (v[1][1], 1.0)], Sense::Eq, 1.0);
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - 6.0).abs() < 1e-9);
        assert!(lp.max_violation(&s.values) < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 1.0, VarBound::NonNeg);
        lp.add_row(&[(x, 1.0)], Sense::Le, 1.0);
        lp.add_row(&[(x, 1.0)], Sense::Ge, 2.0);
        assert_eq!(simplex_solve(&lp).unwrap().status, SolveStatus::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", -1.0, VarBound::NonNeg);
        lp.add_row(&[(x, 1.0)], Sense::Ge, 1.0);
        assert_eq!(simplex_solve(&lp).unwrap().status, SolveStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_negative_rhs() {
        // min y s.t. y >= -2, y free -> -2.
        let mut lp = LinearProgram::new();
        let y = lp.add_var("y", 1.0, VarBound::Free);
        lp.add_row(&[(y, 1.0)], Sense::Ge, -2.0);
        let s = simplex_solve(&lp).unwrap();
        assert!((s.objective + 2.0).abs() < 1e-12);
        assert!((s.values[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let a = lp.add_var("a", 1.0, VarBound::NonNeg);
        let b = lp.add_var("b", 2.0, VarBound::NonNeg);
        lp.add_row(&[(a, 1.0), (b, 1.0)], Sense::Eq, 1.0);
        lp.add_row(&[(a, 2.0), (b, 2.0)], Sense::Eq, 2.0);
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    /// Beale's classic cycling example; Dantzig with the usual tie-break
    /// cycles forever without an anti-cycling rule.
    #[test]
    fn beale_does_not_cycle() {
        let mut lp = LinearProgram::new();
        let c = [-0.75, 150.0, -0.02, 6.0];
        let x: Vec<usize> = (0..4).map(|j| lp.add_var(format!("x{j}"), c[j], VarBound::NonNeg)).collect();
        lp.add_row(&[(x[0], 0.25), (x[1], -60.0), (x[2], -0.04), (x[3], 9.0)], Sense::Le, 0.0);
        lp.add_row(&[(x[0], 0.5), (x[1], -90.0), (x[2], -0.02), (x[3], 3.0)], Sense::Le, 0.0);
        lp.add_row(&[(x[2], 1.0)], Sense::Le, 1.0);
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective + 0.05).abs() < 1e-9);
    }
}
