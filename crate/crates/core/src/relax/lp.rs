//! Dense linear programs and their plain-text tableau format.
//!
//! ```text
//! msca-lp v1
//! dims <rows> <cols>
//! names <name_0> ... <name_{cols-1}>
//! bounds <nonneg|free> ...
//! offset <c0>
//! min <c_0> ... <c_{cols-1}>
//! row <a_0> ... <a_{cols-1}> <le|eq|ge> <b>
//! ...
//! end
//! ```
//!
//! One `row` line per constraint. Numbers use Rust's shortest round-trip
//! formatting, so a dump parses back to a bit-identical program. Blank lines
//! and lines starting with `#` are ignored.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarBound {
    NonNeg,
    Free,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coefs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Largest `rows * columns` a dense program may reach.
pub const MAX_DENSE_ENTRIES: usize = 1 << 25;

/// `minimize c.y + offset` subject to dense rows and per-variable bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub offset: f64,
    pub rows: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
    pub names: Vec<String>,
}

impl LinearProgram {
    pub fn new() -> Self {
        LinearProgram {
            objective: Vec::new(),
            offset: 0.0,
            rows: Vec::new(),
            bounds: Vec::new(),
            names: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds a column and returns its index. Existing rows get a zero entry.
    pub fn add_var(&mut self, name: impl Into<String>, cost: f64, bound: VarBound) -> usize {
        self.objective.push(cost);
        self.bounds.push(bound);
        self.names.push(name.into());
        for r in &mut self.rows {
            r.coefs.push(0.0);
        }
        self.objective.len() - 1
    }

    /// Adds `sum coef * y_j (sense) rhs` from sparse `(column, coef)` pairs.
    pub fn add_row(&mut self, terms: &[(usize, f64)], sense: Sense, rhs: f64) {
        let mut coefs = vec![0.0; self.num_vars()];
        for &(j, c) in terms {
            coefs[j] += c;
        }
        self.rows.push(Constraint { coefs, sense, rhs });
    }

    /// Fails with `TooLarge` once the dense matrix exceeds [`MAX_DENSE_ENTRIES`].
    pub fn check_size(&self) -> Result<()> {
        let entries = self.rows.len().saturating_mul(self.num_vars());
        if entries > MAX_DENSE_ENTRIES {
            return Err(Error::TooLarge(format!(
                "dense LP with {} rows and {} columns",
                self.rows.len(),
                self.num_vars()
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n || self.names.len() != n {
            return Err(Error::Parse("column metadata length mismatch".into()));
        }
        let finite = |v: &f64| v.is_finite();
        if !self.objective.iter().all(finite) || !self.offset.is_finite() {
            return Err(Error::Parse("non-finite objective entry".into()));
        }
        for (r, row) in self.rows.iter().enumerate() {
            if row.coefs.len() != n {
                return Err(Error::Parse(format!("row {r} has {} entries, expected {n}", row.coefs.len())));
            }
            if !row.coefs.iter().all(finite) || !row.rhs.is_finite() {
                return Err(Error::Parse(format!("row {r} has a non-finite entry")));
            }
        }
        Ok(())
    }

    /// `c.y + offset`.
    pub fn evaluate(&self, y: &[f64]) -> f64 {
        self.offset + self.objective.iter().zip(y).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Largest constraint or bound violation at `y`.
    pub fn max_violation(&self, y: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (b, &v) in self.bounds.iter().zip(y) {
            if *b == VarBound::NonNeg {
                worst = worst.max(-v);
            }
        }
        for row in &self.rows {
            let lhs: f64 = row.coefs.iter().zip(y).map(|(a, v)| a * v).sum();
            let viol = match row.sense {
                Sense::Le => lhs - row.rhs,
                Sense::Ge => row.rhs - lhs,
                Sense::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    pub fn to_tableau_string(&self) -> String {
        let mut s = String::new();
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "msca-lp v1");
        let _ = writeln!(s, "dims {} {}", self.rows.len(), self.num_vars());
        let _ = writeln!(s, "names {}", self.names.join(" "));
        let bounds: Vec<&str> = self
            .bounds
            .iter()
            .map(|b| match b {
                VarBound::NonNeg => "nonneg",
                VarBound::Free => "free",
            })
            .collect();
        let _ = writeln!(s, "bounds {}", bounds.join(" "));
        let _ = writeln!(s, "offset {:?}", self.offset);
        let _ = writeln!(s, "min {}", join(&self.objective));
        for row in &self.rows {
            let sense = match row.sense {
                Sense::Le => "le",
                Sense::Eq => "eq",
                Sense::Ge => "ge",
            };
            let _ = writeln!(s, "row {} {} {:?}", join(&row.coefs), sense, row.rhs);
        }
        s.push_str("end\n");
        s
    }

    pub fn parse_tableau(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let err = |m: &str| Error::Parse(m.to_string());
        if lines.next() != Some("msca-lp v1") {
            return Err(err("missing 'msca-lp v1' header"));
        }
        let dims: Vec<usize> = field(lines.next(), "dims")?
            .iter()
            .map(|t| t.parse::<usize>().map_err(|_| err("bad dims")))
            .collect::<Result<_>>()?;
        let [m, n] = dims[..] else {
            return Err(err("dims needs two integers"));
        };
        // Guard against absurd allocations from hostile headers.
        if m.saturating_mul(n.max(1)) > 50_000_000 {
            return Err(err("dims too large"));
        }
        let names: Vec<String> = field(lines.next(), "names")?
            .iter()
            .map(|t| t.to_string())
            .collect();
        let bounds = field(lines.next(), "bounds")?
            .iter()
            .map(|t| match *t {
                "nonneg" => Ok(VarBound::NonNeg),
                "free" => Ok(VarBound::Free),
                _ => Err(err("bound must be nonneg or free")),
            })
            .collect::<Result<Vec<_>>>()?;
        let offset = match field(lines.next(), "offset")?[..] {
            [t] => parse_f64(t)?,
            _ => return Err(err("offset needs one number")),
        };
        let objective = field(lines.next(), "min")?
            .iter()
            .map(|t| parse_f64(t))
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::with_capacity(m.min(1 << 16));
        for _ in 0..m {
            let toks = field(lines.next(), "row")?;
            if toks.len() != n + 2 {
                return Err(err("row has wrong number of entries"));
            }
            let coefs = toks[..n].iter().map(|t| parse_f64(t)).collect::<Result<Vec<_>>>()?;
            let sense = match toks[n] {
                "le" => Sense::Le,
                "eq" => Sense::Eq,
                "ge" => Sense::Ge,
                _ => return Err(err("sense must be le, eq or ge")),
            };
            rows.push(Constraint {
                coefs,
                sense,
                rhs: parse_f64(toks[n + 1])?,
            });
        }
        if lines.next() != Some("end") {
            return Err(err("missing 'end'"));
        }
        let lp = LinearProgram {
            objective,
            offset,
            rows,
            bounds,
            names,
        };
        if lp.num_vars() != n {
            return Err(err("objective length disagrees with dims"));
        }
        lp.validate()?;
        Ok(lp)
    }
}

impl Default for LinearProgram {
    fn default() -> Self {
        Self::new()
    }
}

fn field<'a>(line: Option<&'a str>, key: &str) -> Result<Vec<&'a str>> {
    let line = line.ok_or_else(|| Error::Parse(format!("expected '{key}' line, got end of input")))?;
    let mut toks = line.split_whitespace();
    if toks.next() != Some(key) {
        return Err(Error::Parse(format!("expected '{key}' line")));
    }
    Ok(toks.collect())
}

fn parse_f64(t: &str) -> Result<f64> {
    let v: f64 = t.parse().map_err(|_| Error::Parse(format!("bad number '{t}'")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite number '{t}'")));
    }
    Ok(v)
}
