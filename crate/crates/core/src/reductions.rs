//! Instance builders for the satisfiability reductions, and brute-force
//! verification of their guarantees on small formulas.
//!
//! * Upper-bound Fréchet: the largest (discrete) Fréchet distance over
//!   realisations is `3/2` if the formula is satisfiable and `1` otherwise.
//! * Discrete weak Fréchet: the smallest distance over realisations is `1`
//!   if the formula is satisfiable and larger otherwise.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cnf::{assignments, clause_holds, CnfFormula};
use crate::error::{Error, Result};
use crate::model::{PolyCurve, UncertainCurve, UncertainPoint};
use crate::oracle::{bound_oracle, EnumerationSpec, Side};
use crate::precise::{Adjacency, Metric};
use crate::scalar::Scalar;

/// Uncertainty model of the generated curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Indecisive,
    Imprecise,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Indecisive => "indecisive",
            Model::Imprecise => "imprecise",
        })
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indecisive" => Ok(Model::Indecisive),
            "imprecise" => Ok(Model::Imprecise),
            _ => Err(Error::InvalidArgument(format!("unknown model {s:?}"))),
        }
    }
}

/// Which construction produced an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "construction", content = "model")]
pub enum ReductionKind {
    UbSat(Model),
    WeakDiscrete(Model),
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionKind::UbSat(m) => write!(f, "ub-sat ({m})"),
            ReductionKind::WeakDiscrete(m) => write!(f, "weak-discrete ({m})"),
        }
    }
}

/// A generated pair of curves with its decision threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionInstance {
    pub u: UncertainCurve,
    pub v: UncertainCurve,
    pub delta: Scalar,
    /// Distance reached in the case opposite to the threshold case: the
    /// satisfiable case for upper bounds, and a lower bound for the
    /// unsatisfiable case of the weak constructions.
    pub gap_value: Scalar,
    pub kind: ReductionKind,
    /// The formula actually encoded, after any padding.
    pub formula: CnfFormula,
    pub notes: Vec<String>,
}

impl ReductionInstance {
    /// Curve lengths predicted by the construction.
    pub fn expected_lengths(&self) -> (usize, usize) {
        let (c, v) = (self.formula.num_clauses(), self.formula.num_vars());
        match self.kind {
            ReductionKind::UbSat(_) => (2 * c + 4 * v * c - 2 * v + 1, 5 * c + 2 * v * c - 4),
            ReductionKind::WeakDiscrete(Model::Indecisive) => (v + 2, v * c + v + c + 2),
            ReductionKind::WeakDiscrete(Model::Imprecise) => (5 * v + 12, c * (3 * v + 9)),
        }
    }
}

fn s(num: i64, den: i64) -> Scalar {
    Scalar::new(num, den)
}

fn pts(xs: &[Scalar]) -> Vec<UncertainPoint> {
    xs.iter().cloned().map(UncertainPoint::Precise).collect()
}

/// Gadgets of the upper-bound construction, as vertex lists.
pub mod gadgets {
    use super::*;

    /// First vertex value of the literal gadget for variable `j` in `clause`.
    pub fn literal_head(clause: &[i32], j: usize) -> Scalar {
        let j = j as i32;
        if clause.contains(&j) {
            Scalar::zero()
        } else if clause.contains(&-j) {
            s(-3, 2)
        } else {
            s(-3, 4)
        }
    }

    /// Clause gadget: `3.5` then one literal gadget per variable.
    pub fn clause(clause: &[i32], num_vars: usize) -> Vec<UncertainPoint> {
        let mut out = pts(&[s(7, 2)]);
        for j in 1..=num_vars {
            out.extend(pts(&[literal_head(clause, j), s(3, 2)]));
        }
        out
    }

    /// The two positions of a variable: `-1.5` is true, `0` is false.
    pub fn variable(model: Model) -> UncertainPoint {
        match model {
            Model::Indecisive => UncertainPoint::set([s(-3, 2), Scalar::zero()]).unwrap(),
            Model::Imprecise => UncertainPoint::interval(s(-3, 2), Scalar::zero()).unwrap(),
        }
    }

    /// Variable section: `4.5` then one variable gadget per variable.
    pub fn variable_section(num_vars: usize, model: Model) -> Vec<UncertainPoint> {
        let mut out = pts(&[s(9, 2)]);
        for _ in 0..num_vars {
            out.push(variable(model));
            out.push(UncertainPoint::Precise(s(5, 2)));
        }
        out
    }

    /// The variable section realised by a truth assignment.
    pub fn assigned_section(assignment: &[bool]) -> PolyCurve {
        let mut out = vec![s(9, 2)];
        for &a in assignment {
            out.push(if a { s(-3, 2) } else { Scalar::zero() });
            out.push(s(5, 2));
        }
        PolyCurve::new(out).unwrap()
    }

    /// Catch gadget absorbing a misaligned clause gadget.
    pub fn abs(num_vars: usize) -> Vec<UncertainPoint> {
        let mut out = pts(&[s(5, 2)]);
        for _ in 0..num_vars {
            out.extend(pts(&[s(-1, 2), s(1, 2)]));
        }
        out
    }

    /// Catch gadget absorbing a spare `abs`.
    pub fn abs2() -> Vec<UncertainPoint> {
        pts(&[s(3, 2), s(1, 2)])
    }

    pub fn precise(points: &[UncertainPoint]) -> PolyCurve {
        PolyCurve::new(points.iter().map(|p| p.lo().clone()).collect()).unwrap()
    }
}

fn curve(points: Vec<UncertainPoint>, name: &str) -> UncertainCurve {
    UncertainCurve::new(points).unwrap().with_name(name)
}

/// Upper-bound Fréchet instance: threshold `1`, and `3/2` exactly when the
/// formula is satisfiable.
///
/// A single clause is duplicated so that both curves start and end close
/// together; this does not change satisfiability.
pub fn build_ub_sat(f: &CnfFormula, model: Model) -> Result<ReductionInstance> {
    if f.num_clauses() == 0 {
        return Err(Error::InvalidFormula("formula has no clauses".into()));
    }
    for c in f.clauses() {
        if c.is_empty() {
            return Err(Error::InvalidFormula("empty clause".into()));
        }
        if c.iter().any(|l| c.contains(&-l)) {
            return Err(Error::InvalidFormula(format!(
                "clause {c:?} contains a variable and its negation"
            )));
        }
    }
    let mut notes = Vec::new();
    let f = if f.num_clauses() == 1 {
        notes.push("single clause duplicated".to_string());
        f.with_clause(f.clauses()[0].clone())?
    } else {
        f.clone()
    };
    let (c, v) = (f.num_clauses(), f.num_vars());
    let mut u = pts(&[Scalar::one()]);
    for _ in 1..c {
        u.extend(gadgets::abs(v));
    }
    u.extend(gadgets::variable_section(v, model));
    for _ in 1..c {
        u.extend(gadgets::abs(v));
    }
    u.extend(pts(&[Scalar::one()]));
    let mut w = Vec::new();
    for _ in 1..c {
        w.extend(gadgets::abs2());
    }
    for clause in f.clauses() {
        w.extend(gadgets::clause(clause, v));
    }
    for _ in 1..c {
        w.extend(gadgets::abs2());
    }
    Ok(ReductionInstance {
        u: curve(u, "U"),
        v: curve(w, "V"),
        delta: Scalar::one(),
        gap_value: s(3, 2),
        kind: ReductionKind::UbSat(model),
        formula: f,
        notes,
    })
}

fn height(i: usize, offset: i64) -> Scalar {
    Scalar::from_integer(10 * i as i64 + offset)
}

/// Smallest distance between endpoint values of the two curves exceeding
/// `delta`.
fn next_level(u: &UncertainCurve, v: &UncertainCurve, delta: &Scalar) -> Scalar {
    let (a, b) = (u.endpoints(), v.endpoints());
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x.dist(y)))
        .filter(|d| d > delta)
        .min()
        .expect("curves contain distant values")
}

/// Discrete weak Fréchet instance with finite-set vertices on both curves.
pub fn build_weak_discrete_indecisive(f: &CnfFormula) -> Result<ReductionInstance> {
    let f = f.to_3sat()?;
    let n = f.num_vars();
    if n == 0 || f.num_clauses() == 0 {
        return Err(Error::InvalidFormula("need at least one variable and one clause".into()));
    }
    let mut u = pts(&[Scalar::zero()]);
    for i in 1..=n {
        u.push(UncertainPoint::set([height(i, 4), height(i, 6)])?);
    }
    u.push(UncertainPoint::Precise(Scalar::zero()));
    let neutral = UncertainPoint::set((1..=n).map(|i| height(i, 5)))?;
    let spacer = || std::iter::repeat_n(neutral.clone(), n);
    let mut w = pts(&[Scalar::zero()]);
    w.extend(spacer());
    for clause in f.clauses() {
        let lits = clause
            .iter()
            .map(|&l| height(l.unsigned_abs() as usize, if l > 0 { 3 } else { 7 }));
        w.push(UncertainPoint::set(lits)?);
        w.extend(spacer());
    }
    w.push(UncertainPoint::Precise(Scalar::zero()));
    let (u, v) = (curve(u, "U"), curve(w, "V"));
    let gap_value = next_level(&u, &v, &Scalar::one());
    Ok(ReductionInstance {
        u,
        v,
        delta: Scalar::one(),
        gap_value,
        kind: ReductionKind::WeakDiscrete(Model::Indecisive),
        formula: f,
        notes: Vec::new(),
    })
}

/// Neutral heights with literal `lit` marked: `+7` after the variable's
/// height for a positive literal, `+3` before it for a negative one.
pub fn literal_sequence(lit: i32, n: usize) -> Vec<Scalar> {
    let var = lit.unsigned_abs() as usize;
    let mut out = Vec::with_capacity(n + 1);
    for i in 1..=n {
        if i == var && lit < 0 {
            out.push(height(i, 3));
        }
        out.push(height(i, 5));
        if i == var && lit > 0 {
            out.push(height(i, 7));
        }
    }
    out
}

/// Discrete weak Fréchet instance with interval vertices on the first curve
/// only. An even clause count is padded with the tautology `x1 ∨ ¬x1 ∨ x1`
/// so that the clause blocks end at the frame's top corner.
pub fn build_weak_discrete_imprecise(f: &CnfFormula) -> Result<ReductionInstance> {
    let mut f = f.to_3sat()?;
    let n = f.num_vars();
    if n == 0 || f.num_clauses() == 0 {
        return Err(Error::InvalidFormula("need at least one variable and one clause".into()));
    }
    let mut notes = Vec::new();
    if f.num_clauses() % 2 == 0 {
        f = f.with_clause(vec![1, -1, 1])?;
        notes.push("padded with the clause (x1 ∨ ¬x1 ∨ x1)".to_string());
    }
    let t = Scalar::from_integer(10 * (n as i64 + 2));
    let ten = Scalar::from_integer(10);
    let top = &t - &ten;
    let mut u1 = vec![Scalar::zero(), ten.clone()];
    for i in 1..=n {
        u1.push(height(i, 4));
        u1.push(height(i, 6));
    }
    u1.push(top.clone());
    u1.push(t.clone());
    let mut u2 = pts(&[Scalar::zero(), ten.clone()]);
    for i in 1..=n {
        u2.push(UncertainPoint::interval(height(i, 4), height(i, 6))?);
    }
    u2.extend(pts(&[top.clone(), t.clone()]));
    let mut u = pts(&u1);
    u.extend(u2.into_iter().rev());
    u.extend(pts(&u1));

    let mut w: Vec<Scalar> = Vec::new();
    for (j, clause) in f.clauses().iter().enumerate() {
        let mut c = vec![Scalar::zero(), ten.clone()];
        c.extend(literal_sequence(clause[0], n));
        c.push(top.clone());
        c.extend(literal_sequence(clause[1], n).into_iter().rev());
        c.push(ten.clone());
        c.extend(literal_sequence(clause[2], n));
        c.push(top.clone());
        c.push(t.clone());
        if j % 2 == 1 {
            c.reverse();
        }
        w.extend(c);
    }
    let (u, v) = (curve(u, "U"), curve(pts(&w), "V"));
    let gap_value = next_level(&u, &v, &Scalar::one());
    Ok(ReductionInstance {
        u,
        v,
        delta: Scalar::one(),
        gap_value,
        kind: ReductionKind::WeakDiscrete(Model::Imprecise),
        formula: f,
        notes,
    })
}

pub fn build_weak_discrete(f: &CnfFormula, model: Model) -> Result<ReductionInstance> {
    match model {
        Model::Indecisive => build_weak_discrete_indecisive(f),
        Model::Imprecise => build_weak_discrete_imprecise(f),
    }
}

/// A vertex of a planar uncertain curve whose uncertainty lies along `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Point2d {
    Precise { x: Scalar, y: Scalar },
    Interval { lo: Scalar, hi: Scalar, y: Scalar },
    Set { xs: Vec<Scalar>, y: Scalar },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve2d {
    pub dimension: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub points: Vec<Point2d>,
}

impl Curve2d {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Curve2d = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if c.dimension != 2 {
            return Err(Error::Parse(format!("expected dimension 2, got {}", c.dimension)));
        }
        Ok(c)
    }
}

fn embed(p: &UncertainPoint) -> Point2d {
    let y = Scalar::zero();
    match p {
        UncertainPoint::Precise(x) => Point2d::Precise { x: x.clone(), y },
        UncertainPoint::Interval(lo, hi) => Point2d::Interval {
            lo: lo.clone(),
            hi: hi.clone(),
            y,
        },
        UncertainPoint::Set(xs) => Point2d::Set { xs: xs.clone(), y },
    }
}

/// Places both curves on the `x`-axis and inserts the far point `(0, M)`
/// between every two consecutive vertices.
pub fn lift_curves(u: &UncertainCurve, v: &UncertainCurve, sentinel: &Scalar) -> Result<(Curve2d, Curve2d)> {
    let reach = u
        .endpoints()
        .iter()
        .chain(v.endpoints().iter())
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Scalar::zero);
    let bound = &reach * &Scalar::from_integer(10);
    if *sentinel <= bound {
        return Err(Error::SentinelTooSmall {
            sentinel: sentinel.clone(),
            bound,
        });
    }
    let lift = |c: &UncertainCurve| {
        let mut points = Vec::with_capacity(2 * c.len() - 1);
        for (k, p) in c.points().iter().enumerate() {
            if k > 0 {
                points.push(Point2d::Precise {
                    x: Scalar::zero(),
                    y: sentinel.clone(),
                });
            }
            points.push(embed(p));
        }
        Curve2d {
            dimension: 2,
            name: c.name().map(str::to_string),
            points,
        }
    };
    Ok((lift(u), lift(v)))
}

pub fn lift_to_2d(inst: &ReductionInstance, sentinel: &Scalar) -> Result<(Curve2d, Curve2d)> {
    lift_curves(&inst.u, &inst.v, sentinel)
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Bounds of one metric over all enumerated realisation pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetricBounds {
    pub metric: String,
    pub lower: Scalar,
    pub upper: Option<Scalar>,
}

/// Result of [`verify_reduction`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub kind: ReductionKind,
    pub formula: String,
    pub satisfiable: bool,
    pub lengths: (usize, usize),
    pub expected_lengths: (usize, usize),
    pub bounds: Vec<MetricBounds>,
    /// Move set under which the satisfiability equivalence holds, for the
    /// weak constructions.
    pub adjacency: Option<u32>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "construction: {}", self.kind)?;
        writeln!(f, "formula: {}", self.formula)?;
        writeln!(f, "satisfiable: {}", self.satisfiable)?;
        writeln!(
            f,
            "lengths: {} x {} (expected {} x {})",
            self.lengths.0, self.lengths.1, self.expected_lengths.0, self.expected_lengths.1
        )?;
        for b in &self.bounds {
            match &b.upper {
                Some(up) => writeln!(f, "{}: lower {} upper {}", b.metric, b.lower, up)?,
                None => writeln!(f, "{}: lower {}", b.metric, b.lower)?,
            }
        }
        if let Some(a) = self.adjacency {
            writeln!(f, "adjacency: {a}")?;
        }
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail)?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        write!(f, "verdict: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Checks an instance against brute force: satisfiability by trying all
/// assignments, distances by enumerating realisations with `spec`.
pub fn verify_reduction(inst: &ReductionInstance, spec: &EnumerationSpec) -> Result<VerifyReport> {
    let sat = inst.formula.is_satisfiable()?;
    let lengths = (inst.u.len(), inst.v.len());
    let expected = inst.expected_lengths();
    let mut report = VerifyReport {
        kind: inst.kind,
        formula: inst.formula.to_string(),
        satisfiable: sat,
        lengths,
        expected_lengths: expected,
        bounds: Vec::new(),
        adjacency: None,
        checks: vec![Check::new(
            "lengths",
            lengths == expected,
            format!("{} x {}", lengths.0, lengths.1),
        )],
        notes: inst.notes.clone(),
    };
    match inst.kind {
        ReductionKind::UbSat(_) => verify_ub(inst, spec, sat, &mut report)?,
        ReductionKind::WeakDiscrete(_) => verify_weak(inst, spec, sat, &mut report)?,
    }
    Ok(report)
}

fn verify_ub(inst: &ReductionInstance, spec: &EnumerationSpec, sat: bool, report: &mut VerifyReport) -> Result<()> {
    let (one, gap) = (&inst.delta, &inst.gap_value);
    for metric in [Metric::Frechet, Metric::DiscreteFrechet] {
        let upper = bound_oracle(&inst.u, &inst.v, metric, Side::Upper, spec)?;
        let lower = bound_oracle(&inst.u, &inst.v, metric, Side::Lower, spec)?;
        let want = if sat { gap } else { one };
        report.checks.push(Check::new(
            format!("{metric} upper bound"),
            upper == *want,
            format!("{upper} (expected {want})"),
        ));
        report.checks.push(Check::new(
            format!("{metric} per-realisation range"),
            lower >= *one && upper <= *gap,
            format!("every realisation within [{lower}, {upper}]"),
        ));
        report.bounds.push(MetricBounds {
            metric: metric.to_string(),
            lower,
            upper: Some(upper),
        });
    }
    report.checks.extend(gadget_checks(&inst.formula));
    Ok(())
}

/// The three gadget distance identities: catch gadget against every clause gadget,
/// second catch gadget against the first, and every clause gadget against
/// every assigned variable section.
pub fn gadget_checks(f: &CnfFormula) -> Vec<Check> {
    let v = f.num_vars();
    let one = Scalar::one();
    let gap = s(3, 2);
    let metrics = [Metric::Frechet, Metric::DiscreteFrechet];
    let abs = gadgets::precise(&gadgets::abs(v));
    let abs2 = gadgets::precise(&gadgets::abs2());
    let mut checks = Vec::new();

    let mut bad = Vec::new();
    for (i, c) in f.clauses().iter().enumerate() {
        let cg = gadgets::precise(&gadgets::clause(c, v));
        for m in metrics {
            let d = m.eval(&abs, &cg);
            if d != one {
                bad.push(format!("clause {} {m}: {d}", i + 1));
            }
        }
    }
    checks.push(Check::new(
        "abs vs clause gadgets",
        bad.is_empty(),
        if bad.is_empty() { "all 1".to_string() } else { bad.join("; ") },
    ));

    let d: Vec<Scalar> = metrics.iter().map(|m| m.eval(&abs2, &abs)).collect();
    checks.push(Check::new(
        "abs2 vs abs",
        d.iter().all(|x| *x == one),
        format!("{} / {}", d[0], d[1]),
    ));

    let mut bad = Vec::new();
    let mut count = 0usize;
    for a in assignments(v) {
        let vs = gadgets::assigned_section(&a);
        for (i, c) in f.clauses().iter().enumerate() {
            let cg = gadgets::precise(&gadgets::clause(c, v));
            let want = if clause_holds(c, &a) { &gap } else { &one };
            for m in metrics {
                count += 1;
                let d = m.eval(&cg, &vs);
                if d != *want {
                    bad.push(format!("clause {} under {a:?} {m}: {d}", i + 1));
                }
            }
        }
    }
    checks.push(Check::new(
        "clause gadget vs variable section",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{count} comparisons, 3/2 exactly when satisfied")
        } else {
            bad.join("; ")
        },
    ));
    checks
}

fn verify_weak(inst: &ReductionInstance, spec: &EnumerationSpec, sat: bool, report: &mut VerifyReport) -> Result<()> {
    let one = &inst.delta;
    let mut chosen = None;
    for adj in [Adjacency::Eight, Adjacency::Four] {
        let metric = Metric::DiscreteWeak(adj);
        let lower = bound_oracle(&inst.u, &inst.v, metric, Side::Lower, spec)?;
        let holds = (lower == *one) == sat && (lower > *one) == !sat;
        report.checks.push(Check::new(
            format!("floor ({}-adjacency)", adj.degree()),
            lower >= *one,
            format!("smallest distance {lower}"),
        ));
        report.bounds.push(MetricBounds {
            metric: format!("discrete-weak-{}", adj.degree()),
            lower,
            upper: None,
        });
        if holds {
            chosen = Some(adj);
            break;
        }
        report
            .notes
            .push(format!("equivalence fails with {}-adjacency", adj.degree()));
    }
    report.adjacency = chosen.map(Adjacency::degree);
    report.checks.push(Check::new(
        "distance 1 iff satisfiable",
        chosen.is_some(),
        match chosen {
            Some(a) => format!("holds with {}-adjacency", a.degree()),
            None => "holds under neither move set".to_string(),
        },
    ));
    Ok(())
}
