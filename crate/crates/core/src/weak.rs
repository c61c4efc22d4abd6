//! Lower-bound weak Fréchet distance between uncertain 1D curves.
//!
//! The weak distance of two precise curves is `max(r(π, σ), r(π⁻, σ⁻))`
//! where `r` only depends on the running images of the prefixes. Fixing
//! which vertices attain the global extremes (and at which values) makes the
//! two halves independent, so both can be minimised separately by a dynamic
//! program over running positions and images. Positions are restricted to a
//! finite grid of interval endpoints shifted by multiples of the threshold.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{UncertainCurve, UncertainPoint};
use crate::scalar::Scalar;

/// Default bound on the number of table entries of a single program.
pub const DEFAULT_STATE_CAP: u128 = 10_000_000;

/// Which vertices attain the extremes of each realisation, and where.
///
/// Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RespectConstraint {
    pub i_min: usize,
    pub i_max: usize,
    pub j_min: usize,
    pub j_max: usize,
    pub x: (Scalar, Scalar),
    pub y: (Scalar, Scalar),
}

impl RespectConstraint {
    /// The constraint on the reversed curves.
    pub fn reversed(&self, m: usize, n: usize) -> Self {
        RespectConstraint {
            i_min: m + 1 - self.i_min,
            i_max: m + 1 - self.i_max,
            j_min: n + 1 - self.j_min,
            j_max: n + 1 - self.j_max,
            x: self.x.clone(),
            y: self.y.clone(),
        }
    }

    /// Whether the indices are in range, the images are ordered and every
    /// pinned value lies in its uncertainty region.
    pub fn is_consistent(&self, u: &UncertainCurve, v: &UncertainCurve) -> bool {
        let side = |c: &UncertainCurve, a: usize, b: usize, x: &(Scalar, Scalar)| {
            (1..=c.len()).contains(&a)
                && (1..=c.len()).contains(&b)
                && x.0 <= x.1
                && c.points()[a - 1].contains(&x.0)
                && c.points()[b - 1].contains(&x.1)
        };
        side(u, self.i_min, self.i_max, &self.x) && side(v, self.j_min, self.j_max, &self.y)
    }
}

/// Threshold values at which the optimum can occur: `0`, all endpoint
/// differences, and every gap from a right endpoint up to a left endpoint
/// divided into `k ≤ m + n` equal steps.
pub fn candidate_deltas(u: &UncertainCurve, v: &UncertainCurve) -> Vec<Scalar> {
    let mut lefts = Vec::new();
    let mut rights = Vec::new();
    let mut all = Vec::new();
    for p in u.points().iter().chain(v.points()) {
        match p {
            UncertainPoint::Interval(lo, hi) => {
                lefts.push(lo.clone());
                rights.push(hi.clone());
            }
            _ => {
                lefts.extend(p.endpoints());
                rights.extend(p.endpoints());
            }
        }
        all.extend(p.endpoints());
    }
    for xs in [&mut lefts, &mut rights, &mut all] {
        xs.sort();
        xs.dedup();
    }
    let steps = (u.len() + v.len()) as i64;
    let mut out = vec![Scalar::zero()];
    for a in &all {
        for b in &all {
            if a < b {
                out.push(b - a);
            }
        }
    }
    for a in &rights {
        for b in lefts.iter().filter(|b| *b > a) {
            let gap = b - a;
            for k in 1..=steps {
                out.push(&gap / &Scalar::from_integer(k));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Per-vertex grids `{e + kδ : |k| ≤ m + n}` over all endpoints `e` of both
/// curves, restricted to each uncertainty region, together with the region's
/// own endpoints or elements.
pub fn candidate_positions(
    u: &UncertainCurve,
    v: &UncertainCurve,
    delta: &Scalar,
) -> (Vec<Vec<Scalar>>, Vec<Vec<Scalar>>) {
    let steps = (u.len() + v.len()) as i64;
    let mut ends: Vec<Scalar> = u.endpoints();
    ends.extend(v.endpoints());
    ends.sort();
    ends.dedup();
    let mut grid = Vec::new();
    for e in &ends {
        for k in -steps..=steps {
            grid.push(e + &(delta * &Scalar::from_integer(k)));
        }
    }
    grid.sort();
    grid.dedup();
    let per = |c: &UncertainCurve| -> Vec<Vec<Scalar>> {
        c.points()
            .iter()
            .map(|p| {
                let mut xs = p.endpoints();
                if let UncertainPoint::Interval(lo, hi) = p {
                    xs.extend(grid.iter().filter(|g| *g >= lo && *g <= hi).cloned());
                }
                xs.sort();
                xs.dedup();
                xs
            })
            .collect()
    };
    (per(u), per(v))
}

/// One curve's side of a program: per-vertex position indices and pins.
struct SideSpec {
    pos: Vec<Vec<u32>>,
    i_min: usize,
    i_max: usize,
}

impl SideSpec {
    /// Next running state after placing vertex `k` at `x`, or `None` when
    /// the placement breaks the extreme pins.
    fn place(&self, k: usize, prev: Option<(u32, u32)>, x: u32) -> Option<(u32, u32)> {
        let (lo, hi) = match prev {
            None => (x, x),
            Some((lo, hi)) => {
                if (k == self.i_min && x > lo) || (k > self.i_min && x < lo) {
                    return None;
                }
                if (k == self.i_max && x < hi) || (k > self.i_max && x > hi) {
                    return None;
                }
                (lo.min(x), hi.max(x))
            }
        };
        Some((lo, hi))
    }

    /// Upper bound on the running states at each vertex.
    fn state_bounds(&self, values: usize) -> Vec<u128> {
        let mut prod: u128 = 1;
        self.pos
            .iter()
            .map(|p| {
                prod = prod.saturating_mul(p.len() as u128);
                prod.min((p.len() as u128) * (values as u128) * (values as u128))
            })
            .collect()
    }
}

type Running = (u32, u32, u32);

/// Cheapest cost per final (first curve, second curve) running-extreme pair.
type FinalCosts = HashMap<((u32, u32), (u32, u32)), Scalar>;

/// Minimum-value program over realisations drawn from the given positions.
///
/// Returns the final image pairs `((x_lo, x_hi), (y_lo, y_hi))` with the
/// smallest `r` reaching each, dropping everything above `limit`.
struct Program<'a> {
    values: &'a [Scalar],
    limit: Option<&'a Scalar>,
}

impl<'a> Program<'a> {
    fn dist(&self, x: u32, lo: u32, hi: u32) -> Scalar {
        let (x, lo, hi) = (&self.values[x as usize], &self.values[lo as usize], &self.values[hi as usize]);
        if x < lo {
            lo - x
        } else if x > hi {
            x - hi
        } else {
            Scalar::zero()
        }
    }

    fn keep(&self, v: &Scalar) -> bool {
        self.limit.is_none_or(|l| v <= l)
    }

    fn relax(&self, table: &mut HashMap<(Running, Running), Scalar>, key: (Running, Running), v: Scalar) {
        if !self.keep(&v) {
            return;
        }
        match table.get_mut(&key) {
            Some(cur) if *cur <= v => {}
            Some(cur) => *cur = v,
            None => {
                table.insert(key, v);
            }
        }
    }

    fn run(&self, a: &SideSpec, b: &SideSpec) -> FinalCosts {
        let (m, n) = (a.pos.len(), b.pos.len());
        let mut prev_row: Vec<HashMap<(Running, Running), Scalar>> = Vec::new();
        for i in 0..m {
            let mut row: Vec<HashMap<(Running, Running), Scalar>> = Vec::with_capacity(n);
            for j in 0..n {
                let mut cell = HashMap::new();
                if i == 0 && j == 0 {
                    for &x in &a.pos[0] {
                        for &y in &b.pos[0] {
                            let (Some(xs), Some(ys)) = (a.place(0, None, x), b.place(0, None, y)) else {
                                continue;
                            };
                            let v = self.values[x as usize].dist(&self.values[y as usize]);
                            self.relax(&mut cell, ((x, xs.0, xs.1), (y, ys.0, ys.1)), v);
                        }
                    }
                }
                if i > 0 {
                    for (&((x, xl, xh), ys), val) in &prev_row[j] {
                        let v = val.clone().max(self.dist(x, ys.1, ys.2));
                        if !self.keep(&v) {
                            continue;
                        }
                        for &x2 in &a.pos[i] {
                            if let Some((l, h)) = a.place(i, Some((xl, xh)), x2) {
                                self.relax(&mut cell, ((x2, l, h), ys), v.clone());
                            }
                        }
                    }
                }
                if j > 0 {
                    for (&(xs, (y, yl, yh)), val) in &row[j - 1] {
                        let v = val.clone().max(self.dist(y, xs.1, xs.2));
                        if !self.keep(&v) {
                            continue;
                        }
                        for &y2 in &b.pos[j] {
                            if let Some((l, h)) = b.place(j, Some((yl, yh)), y2) {
                                self.relax(&mut cell, (xs, (y2, l, h)), v.clone());
                            }
                        }
                    }
                }
                row.push(cell);
            }
            prev_row = row;
        }
        let mut out: FinalCosts = HashMap::new();
        for (&((x, xl, xh), (y, yl, yh)), val) in &prev_row[n - 1] {
            let v = val
                .clone()
                .max(self.dist(x, yl, yh))
                .max(self.dist(y, xl, xh));
            if !self.keep(&v) {
                continue;
            }
            let key = ((xl, xh), (yl, yh));
            match out.get_mut(&key) {
                Some(cur) if *cur <= v => {}
                Some(cur) => *cur = v,
                None => {
                    out.insert(key, v);
                }
            }
        }
        out
    }
}

/// Shared index space for all positions of both curves.
struct Grid {
    values: Vec<Scalar>,
    u: Vec<Vec<u32>>,
    v: Vec<Vec<u32>>,
}

impl Grid {
    fn new(pu: &[Vec<Scalar>], pv: &[Vec<Scalar>]) -> Self {
        let mut values: Vec<Scalar> = pu.iter().chain(pv).flatten().cloned().collect();
        values.sort();
        values.dedup();
        let index = |xs: &[Vec<Scalar>]| -> Vec<Vec<u32>> {
            xs.iter()
                .map(|p| {
                    p.iter()
                        .map(|x| values.binary_search(x).expect("grid value") as u32)
                        .collect()
                })
                .collect()
        };
        let (u, v) = (index(pu), index(pv));
        Grid { values, u, v }
    }

    fn reversed(pos: &[Vec<u32>]) -> Vec<Vec<u32>> {
        pos.iter().rev().cloned().collect()
    }

    /// Estimated table entries of one program.
    fn table_size(&self) -> u128 {
        let size = |pos: &[Vec<u32>]| {
            SideSpec {
                pos: pos.to_vec(),
                i_min: 0,
                i_max: 0,
            }
            .state_bounds(self.values.len())
        };
        let (a, b) = (size(&self.u), size(&self.v));
        a.iter()
            .flat_map(|x| b.iter().map(move |y| x.saturating_mul(*y)))
            .fold(0u128, |s, t| s.saturating_add(t))
    }
}

/// Options for the weak lower-bound procedures.
#[derive(Clone, Debug)]
pub struct WeakOptions {
    /// Largest admissible table of a single program.
    pub cap: u128,
}

impl Default for WeakOptions {
    fn default() -> Self {
        WeakOptions {
            cap: DEFAULT_STATE_CAP,
        }
    }
}

fn check_cap(grid: &Grid, opts: &WeakOptions) -> Result<()> {
    let needed = grid.table_size();
    if needed > opts.cap {
        return Err(Error::CapExceeded {
            needed,
            cap: opts.cap,
        });
    }
    Ok(())
}

/// Minimum of `r(π, σ)` over realisations drawn from `positions` that
/// respect `rc`; `None` when no such realisations exist.
pub fn min_r_constrained(
    u: &UncertainCurve,
    v: &UncertainCurve,
    rc: &RespectConstraint,
    positions: &(Vec<Vec<Scalar>>, Vec<Vec<Scalar>>),
) -> Result<Option<Scalar>> {
    if positions.0.len() != u.len() || positions.1.len() != v.len() {
        return Err(Error::InvalidArgument("one position list per vertex is required".into()));
    }
    if !rc.is_consistent(u, v) {
        return Ok(None);
    }
    let clamp = |pos: &[Vec<Scalar>], (lo, hi): &(Scalar, Scalar), a: usize, b: usize| -> Vec<Vec<Scalar>> {
        pos.iter()
            .enumerate()
            .map(|(k, p)| {
                if k + 1 == a {
                    vec![lo.clone()]
                } else if k + 1 == b {
                    vec![hi.clone()]
                } else {
                    p.iter().filter(|x| *x >= lo && *x <= hi).cloned().collect()
                }
            })
            .collect()
    };
    let pu = clamp(&positions.0, &rc.x, rc.i_min, rc.i_max);
    let pv = clamp(&positions.1, &rc.y, rc.j_min, rc.j_max);
    if rc.i_min == rc.i_max && rc.x.0 != rc.x.1 || rc.j_min == rc.j_max && rc.y.0 != rc.y.1 {
        return Ok(None);
    }
    let grid = Grid::new(&pu, &pv);
    check_cap(&grid, &WeakOptions::default())?;
    let prog = Program {
        values: &grid.values,
        limit: None,
    };
    let a = SideSpec {
        pos: grid.u.clone(),
        i_min: rc.i_min - 1,
        i_max: rc.i_max - 1,
    };
    let b = SideSpec {
        pos: grid.v.clone(),
        i_min: rc.j_min - 1,
        i_max: rc.j_max - 1,
    };
    let out = prog.run(&a, &b);
    Ok(out.into_values().min())
}

pub fn wfr_min_decide(u: &UncertainCurve, v: &UncertainCurve, delta: &Scalar) -> Result<bool> {
    wfr_min_decide_with(u, v, delta, &WeakOptions::default())
}

/// Whether some realisations on the candidate grid of `delta` have weak
/// Fréchet distance at most `delta`.
pub fn wfr_min_decide_with(
    u: &UncertainCurve,
    v: &UncertainCurve,
    delta: &Scalar,
    opts: &WeakOptions,
) -> Result<bool> {
    if delta.is_negative() {
        return Err(Error::InvalidArgument(format!("threshold must be nonnegative, got {delta}")));
    }
    let (pu, pv) = candidate_positions(u, v, delta);
    let grid = Grid::new(&pu, &pv);
    check_cap(&grid, opts)?;
    let (m, n) = (u.len(), v.len());
    let (ru, rv) = (Grid::reversed(&grid.u), Grid::reversed(&grid.v));
    let prog = Program {
        values: &grid.values,
        limit: Some(delta),
    };
    let pins: Vec<(usize, usize, usize, usize)> = (0..m)
        .flat_map(|a| (0..m).map(move |b| (a, b)))
        .flat_map(|(a, b)| (0..n).flat_map(move |c| (0..n).map(move |d| (a, b, c, d))))
        .collect();
    Ok(pins.par_iter().any(|&(imin, imax, jmin, jmax)| {
        let fwd = prog.run(
            &SideSpec {
                pos: grid.u.clone(),
                i_min: imin,
                i_max: imax,
            },
            &SideSpec {
                pos: grid.v.clone(),
                i_min: jmin,
                i_max: jmax,
            },
        );
        if fwd.is_empty() {
            return false;
        }
        let bwd = prog.run(
            &SideSpec {
                pos: ru.clone(),
                i_min: m - 1 - imin,
                i_max: m - 1 - imax,
            },
            &SideSpec {
                pos: rv.clone(),
                i_min: n - 1 - jmin,
                i_max: n - 1 - jmax,
            },
        );
        fwd.keys().any(|k| bwd.contains_key(k))
    }))
}

pub fn wfr_min_value(u: &UncertainCurve, v: &UncertainCurve) -> Result<Scalar> {
    wfr_min_value_with(u, v, &WeakOptions::default())
}

/// Smallest candidate threshold accepted by [`wfr_min_decide`].
pub fn wfr_min_value_with(u: &UncertainCurve, v: &UncertainCurve, opts: &WeakOptions) -> Result<Scalar> {
    let gap = |a: &UncertainPoint, b: &UncertainPoint| -> Scalar {
        a.endpoints()
            .iter()
            .map(|x| b.dist_to(x))
            .chain(b.endpoints().iter().map(|y| a.dist_to(y)))
            .min()
            .expect("nonempty regions")
    };
    let (us, vs) = (u.points(), v.points());
    let floor = gap(&us[0], &vs[0]).max(gap(us.last().unwrap(), vs.last().unwrap()));
    for delta in candidate_deltas(u, v).into_iter().filter(|d| *d >= floor) {
        if wfr_min_decide_with(u, v, &delta, opts)? {
            return Ok(delta);
        }
    }
    unreachable!("the largest endpoint distance is always feasible")
}
