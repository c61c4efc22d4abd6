//! CNF formulas: DIMACS input and brute-force satisfiability.

use std::fmt;

use crate::error::{Error, Result};

/// Largest variable count accepted by [`CnfFormula::solve`].
pub const MAX_BRUTE_FORCE_VARS: usize = 20;

/// A formula in conjunctive normal form. Literals are nonzero integers:
/// `k` stands for `x_k` and `-k` for `¬x_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > num_vars {
                    return Err(Error::InvalidFormula(format!(
                        "literal {l} outside variables 1..={num_vars}"
                    )));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Value under `assignment`, where `assignment[k - 1]` is the value of `x_k`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| clause_holds(c, assignment))
    }

    /// Some satisfying assignment, found by trying all of them in order.
    pub fn solve(&self) -> Result<Option<Vec<bool>>> {
        if self.num_vars > MAX_BRUTE_FORCE_VARS {
            return Err(Error::CapExceeded {
                needed: 1u128 << self.num_vars.min(127),
                cap: 1u128 << MAX_BRUTE_FORCE_VARS,
            });
        }
        Ok(assignments(self.num_vars).find(|a| self.eval(a)))
    }

    pub fn is_satisfiable(&self) -> Result<bool> {
        Ok(self.solve()?.is_some())
    }

    /// Every clause widened to exactly three literals by repeating its last
    /// literal. Fails on empty clauses and clauses wider than three.
    pub fn to_3sat(&self) -> Result<CnfFormula> {
        let clauses = self
            .clauses
            .iter()
            .map(|c| match c.len() {
                0 => Err(Error::InvalidFormula("empty clause".into())),
                1..=3 => {
                    let mut c = c.clone();
                    while c.len() < 3 {
                        c.push(*c.last().unwrap());
                    }
                    Ok(c)
                }
                k => Err(Error::InvalidFormula(format!("clause of width {k}; at most 3 allowed"))),
            })
            .collect::<Result<_>>()?;
        Ok(CnfFormula {
            num_vars: self.num_vars,
            clauses,
        })
    }

    pub fn with_clause(&self, clause: Vec<i32>) -> Result<CnfFormula> {
        let mut clauses = self.clauses.clone();
        clauses.push(clause);
        CnfFormula::new(self.num_vars, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&format!("{l} "));
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parses DIMACS text. Comment lines are skipped, the header is
    /// optional, and the final clause may omit its terminating `0`.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut declared: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                match parts.as_slice() {
                    ["cnf", v, c] => {
                        let parse = |s: &str| {
                            s.parse::<usize>()
                                .map_err(|_| Error::Parse(format!("line {}: bad header value {s:?}", lineno + 1)))
                        };
                        declared = Some((parse(v)?, parse(c)?));
                    }
                    _ => return Err(Error::Parse(format!("line {}: malformed header", lineno + 1))),
                }
                continue;
            }
            for tok in line.split_whitespace() {
                let lit: i32 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad literal {tok:?}", lineno + 1)))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let used = clauses
            .iter()
            .flatten()
            .map(|l: &i32| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let num_vars = match declared {
            Some((v, _)) if used > v => {
                return Err(Error::Parse(format!("variable {used} exceeds the declared {v}")))
            }
            Some((v, _)) => v,
            None => used,
        };
        CnfFormula::new(num_vars, clauses).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "⊤");
        }
        let clause = |c: &Vec<i32>| -> String {
            let lits: Vec<String> = c
                .iter()
                .map(|&l| if l > 0 { format!("x{l}") } else { format!("¬x{}", -l) })
                .collect();
            format!("({})", lits.join(" ∨ "))
        };
        let parts: Vec<String> = self.clauses.iter().map(clause).collect();
        write!(f, "{}", parts.join(" ∧ "))
    }
}

pub fn clause_holds(clause: &[i32], assignment: &[bool]) -> bool {
    clause
        .iter()
        .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
}

/// All assignments of `n` variables, starting from all-false and counting
/// up with `x_1` as the least significant bit.
pub fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1u64 << n).map(move |bits| (0..n).map(|k| bits >> k & 1 == 1).collect())
}
