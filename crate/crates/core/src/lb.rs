//! Lower-bound Fréchet distance between imprecise 1D curves.
//!
//! Realisation pairs are tracked as points `(x, y)` of the plane, `x` on the
//! first curve and `y` on the second. For every pair of vertex indices the
//! propagation keeps four regions of feasible pairs, one per direction of the
//! edge currently being traversed:
//!
//! * `U`/`D`: sitting on a vertex of the first curve while moving up/down
//!   along an edge of the second curve;
//! * `R`/`L`: sitting on a vertex of the second curve while moving
//!   right/left along an edge of the first curve.
//!
//! Each region is obtained from the regions of the neighbouring cell by
//! Minkowski sums with cones and intersections with the strip of feasible
//! placements of the next vertex, so the whole decision is exact region
//! arithmetic in `O(mn)` steps of constant size.

use std::fs;
use std::io;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::model::{PolyCurve, UncertainCurve, UncertainPoint};
use crate::precise::frechet_decide;
use crate::region::{ClipBox, Coord, Cone, Piece, Pieces, Region};
use crate::scalar::Scalar;

/// Direction of the edge being traversed in a propagated region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    U,
    D,
    R,
    L,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::U, Dir::D, Dir::R, Dir::L];

    fn index(self) -> usize {
        self as usize
    }

    fn ray(self) -> Cone {
        match self {
            Dir::U => Cone::RayU,
            Dir::D => Cone::RayD,
            Dir::R => Cone::RayR,
            Dir::L => Cone::RayL,
        }
    }

    /// Predecessor terms of an interior region: source direction and cone.
    fn steps(self) -> [(Dir, Cone); 3] {
        match self {
            Dir::U => [(Dir::U, Cone::HalfU), (Dir::R, Cone::QuadRU), (Dir::L, Cone::QuadLU)],
            Dir::D => [(Dir::D, Cone::HalfD), (Dir::R, Cone::QuadRD), (Dir::L, Cone::QuadLD)],
            Dir::R => [(Dir::R, Cone::HalfR), (Dir::U, Cone::QuadRU), (Dir::D, Cone::QuadRD)],
            Dir::L => [(Dir::L, Cone::HalfL), (Dir::U, Cone::QuadLU), (Dir::D, Cone::QuadLD)],
        }
    }

    fn vertical(self) -> bool {
        matches!(self, Dir::U | Dir::D)
    }

    pub fn name(self) -> &'static str {
        match self {
            Dir::U => "U",
            Dir::D => "D",
            Dir::R => "R",
            Dir::L => "L",
        }
    }
}

/// Which term of the propagation produced (part of) a region.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    /// The first vertex pair, pushed along a ray.
    Start,
    /// The previous region on the first row or column, through the next strip.
    Chain { from: Dir, i: usize, j: usize },
    /// A region of the neighbouring cell summed with a cone.
    Step { from: Dir, i: usize, j: usize, cone: Cone },
}

/// The four regions of one vertex pair with their provenance.
#[derive(Clone, Debug)]
pub struct CellRegions<C: Coord = Scalar> {
    regions: [Region<C>; 4],
    origins: [Vec<Origin>; 4],
}

impl<C: Coord> CellRegions<C> {
    fn empty(clip: &ClipBox<C>) -> Self {
        let e = Region::empty(clip);
        CellRegions {
            regions: [e.clone(), e.clone(), e.clone(), e],
            origins: Default::default(),
        }
    }

    pub fn get(&self, dir: Dir) -> &Region<C> {
        &self.regions[dir.index()]
    }

    pub fn origins(&self, dir: Dir) -> &[Origin] {
        &self.origins[dir.index()]
    }

    fn map<D: Coord>(&self, f: impl Fn(&C) -> D + Copy) -> CellRegions<D> {
        CellRegions {
            regions: [
                self.regions[0].map(f),
                self.regions[1].map(f),
                self.regions[2].map(f),
                self.regions[3].map(f),
            ],
            origins: self.origins.clone(),
        }
    }
}

/// Whether the region `dir` at 0-based cell `(i, j)` is computed on the
/// first row or column rather than by an interior step.
pub fn is_base(dir: Dir, i: usize, j: usize) -> bool {
    if dir.vertical() {
        i == 0
    } else {
        j == 0
    }
}

/// Options for [`decide_lb_with`].
#[derive(Clone, Debug, Default)]
pub struct LbOptions {
    /// Reject finite-set vertices instead of replacing them by their hulls.
    pub strict: bool,
    /// Keep every region of the propagation.
    pub trace: bool,
    /// Extract and verify a witness pair when feasible (implies `trace`).
    pub witness: bool,
}

/// Outcome of the lower-bound decision.
#[derive(Clone, Debug)]
pub struct LbDecision {
    pub feasible: bool,
    /// Feasible placements of the two last vertices.
    pub final_region: Region,
    pub witness: Option<(PolyCurve, PolyCurve)>,
    pub trace: Option<LbTrace>,
    pub warnings: Vec<String>,
}

/// All regions of a traced run, in exact coordinates.
#[derive(Clone, Debug)]
pub struct LbTrace {
    pub u: UncertainCurve,
    pub v: UncertainCurve,
    pub delta: Scalar,
    pub clip: ClipBox,
    /// `cells[i][j]` for 0-based vertex indices.
    pub cells: Vec<Vec<CellRegions>>,
    pub final_region: Region,
}

impl LbTrace {
    pub fn cell(&self, i: usize, j: usize) -> &CellRegions {
        &self.cells[i][j]
    }

    /// Writes one file per nonempty region, named `U_i_j.txt` with 1-based
    /// indices, plus `final.txt`.
    pub fn dump_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for (i, col) in self.cells.iter().enumerate() {
            for (j, cell) in col.iter().enumerate() {
                for d in Dir::ALL {
                    let r = cell.get(d);
                    if !r.is_empty() {
                        let name = format!("{}_{}_{}.txt", d.name(), i + 1, j + 1);
                        fs::write(dir.join(name), r.dump())?;
                    }
                }
            }
        }
        fs::write(dir.join("final.txt"), self.final_region.dump())
    }
}

/// Propagation state for one coordinate type.
struct Engine<C: Coord> {
    clip: ClipBox<C>,
    cb: [C; 6],
    band: Piece<C>,
    islab: Vec<Option<Piece<C>>>,
    jslab: Vec<Option<Piece<C>>>,
    trace: bool,
}

struct Outcome<C: Coord> {
    final_region: Region<C>,
    cells: Option<Vec<Vec<CellRegions<C>>>>,
}

impl<C: Coord> Engine<C> {
    fn new(us: &[(C, C)], vs: &[(C, C)], delta: &C, clip: ClipBox<C>, trace: bool) -> Self {
        let band_region = Region::band(delta, &clip).expect("positive threshold");
        let band = band_region.pieces()[0].clone();
        let slab = |r: Region<C>| r.pieces().first().and_then(|p| p.intersect(&band));
        let islab = us
            .iter()
            .map(|(lo, hi)| slab(Region::vslab(lo, hi, &clip)))
            .collect();
        let jslab = vs
            .iter()
            .map(|(lo, hi)| slab(Region::hslab(lo, hi, &clip)))
            .collect();
        Engine {
            cb: clip.bounds(),
            clip,
            band,
            islab,
            jslab,
            trace,
        }
    }

    /// `(∪ parts ∩ slab) ⊕ ray ∩ band`, for the first row and column.
    fn chain(
        &self,
        parts: &[(Dir, usize, usize, &Region<C>)],
        slab: &Option<Piece<C>>,
        ray: Cone,
    ) -> (Region<C>, Vec<Origin>) {
        let mut ps: Pieces<C> = Pieces::new();
        let mut origins = Vec::new();
        let Some(slab) = slab else {
            return (Region::empty(&self.clip), origins);
        };
        for &(from, i, j, r) in parts {
            let before = ps.len();
            for p in r.pieces() {
                if let Some(q) = p
                    .intersect(slab)
                    .and_then(|q| q.minkowski(ray, &self.cb))
                    .and_then(|q| q.intersect(&self.band))
                {
                    ps.push(q);
                }
            }
            if self.trace && ps.len() > before {
                origins.push(Origin::Chain { from, i, j });
            }
        }
        (Region::from_raw(&self.clip, ps), origins)
    }

    fn start(&self, ray: Cone) -> (Region<C>, Vec<Origin>) {
        let mut ps: Pieces<C> = Pieces::new();
        if let (Some(a), Some(b)) = (&self.islab[0], &self.jslab[0]) {
            if let Some(q) = a
                .intersect(b)
                .and_then(|q| q.minkowski(ray, &self.cb))
                .and_then(|q| q.intersect(&self.band))
            {
                ps.push(q);
            }
        }
        let origins = if self.trace && !ps.is_empty() {
            vec![Origin::Start]
        } else {
            Vec::new()
        };
        (Region::from_raw(&self.clip, ps), origins)
    }

    /// `(∪ part ⊕ cone) ∩ slab`, for interior cells.
    fn step(
        &self,
        parts: [(Dir, usize, usize, &Region<C>, Cone); 3],
        slab: &Option<Piece<C>>,
    ) -> (Region<C>, Vec<Origin>) {
        let mut ps: Pieces<C> = Pieces::new();
        let mut origins = Vec::new();
        let Some(slab) = slab else {
            return (Region::empty(&self.clip), origins);
        };
        for (from, i, j, r, cone) in parts {
            let before = ps.len();
            for p in r.pieces() {
                if let Some(q) = p.minkowski(cone, &self.cb).and_then(|q| q.intersect(slab)) {
                    ps.push(q);
                }
            }
            if self.trace && ps.len() > before {
                origins.push(Origin::Step { from, i, j, cone });
            }
        }
        (Region::from_raw(&self.clip, ps), origins)
    }

    fn run(&self) -> Outcome<C> {
        let (m, n) = (self.islab.len(), self.jslab.len());
        let clip = &self.clip;
        let mut table: Vec<Vec<CellRegions<C>>> = Vec::new();
        let mut prev: Vec<CellRegions<C>> = Vec::new();
        for i in 0..m {
            let mut col: Vec<CellRegions<C>> = Vec::with_capacity(n);
            for j in 0..n {
                let mut cell = CellRegions::empty(clip);
                if j + 1 < n {
                    for d in [Dir::U, Dir::D] {
                        let (r, o) = if i == 0 {
                            if j == 0 {
                                self.start(d.ray())
                            } else {
                                let below: &CellRegions<C> = &col[j - 1];
                                self.chain(
                                    &[
                                        (Dir::U, 0, j - 1, below.get(Dir::U)),
                                        (Dir::D, 0, j - 1, below.get(Dir::D)),
                                    ],
                                    &self.jslab[j],
                                    d.ray(),
                                )
                            }
                        } else {
                            let left = &prev[j];
                            let [a, b, c] = d.steps();
                            self.step(
                                [
                                    (a.0, i - 1, j, left.get(a.0), a.1),
                                    (b.0, i - 1, j, left.get(b.0), b.1),
                                    (c.0, i - 1, j, left.get(c.0), c.1),
                                ],
                                &self.islab[i],
                            )
                        };
                        cell.regions[d.index()] = r;
                        cell.origins[d.index()] = o;
                    }
                }
                if i + 1 < m {
                    for d in [Dir::R, Dir::L] {
                        let (r, o) = if j == 0 {
                            if i == 0 {
                                self.start(d.ray())
                            } else {
                                let left = &prev[0];
                                self.chain(
                                    &[
                                        (Dir::R, i - 1, 0, left.get(Dir::R)),
                                        (Dir::L, i - 1, 0, left.get(Dir::L)),
                                    ],
                                    &self.islab[i],
                                    d.ray(),
                                )
                            }
                        } else {
                            let below = &col[j - 1];
                            let [a, b, c] = d.steps();
                            self.step(
                                [
                                    (a.0, i, j - 1, below.get(a.0), a.1),
                                    (b.0, i, j - 1, below.get(b.0), b.1),
                                    (c.0, i, j - 1, below.get(c.0), c.1),
                                ],
                                &self.jslab[j],
                            )
                        };
                        cell.regions[d.index()] = r;
                        cell.origins[d.index()] = o;
                    }
                }
                col.push(cell);
            }
            if i + 1 == m {
                let final_region = self.finish(&prev, &col);
                if self.trace {
                    if m > 1 {
                        table.push(prev);
                    }
                    table.push(col);
                }
                return Outcome {
                    final_region,
                    cells: self.trace.then_some(table),
                };
            }
            let done = std::mem::replace(&mut prev, col);
            if self.trace && i > 0 {
                table.push(done);
            }
        }
        unreachable!("curves are nonempty")
    }

    fn finish(&self, prev: &[CellRegions<C>], last: &[CellRegions<C>]) -> Region<C> {
        let (m, n) = (self.islab.len(), self.jslab.len());
        let mut ps: Pieces<C> = Pieces::new();
        let mut through = |regions: [&Region<C>; 2], slab: &Option<Piece<C>>| {
            if let Some(s) = slab {
                for r in regions {
                    for p in r.pieces() {
                        if let Some(q) = p.intersect(s) {
                            ps.push(q);
                        }
                    }
                }
            }
        };
        if m == 1 && n == 1 {
            if let (Some(a), Some(b)) = (&self.islab[0], &self.jslab[0]) {
                if let Some(q) = a.intersect(b) {
                    ps.push(q);
                }
            }
        } else {
            if m >= 2 {
                let c = &prev[n - 1];
                through([c.get(Dir::R), c.get(Dir::L)], &self.islab[m - 1]);
            }
            if n >= 2 {
                let c = &last[n - 2];
                through([c.get(Dir::U), c.get(Dir::D)], &self.jslab[n - 1]);
            }
        }
        Region::from_raw(&self.clip, ps)
    }
}

/// Largest magnitude handled on the machine-integer path.
const I64_LIMIT: i64 = 1 << 58;

/// Common denominator for all values, if every scaled value fits in `i64`.
fn integer_scale(values: &[&Scalar]) -> Option<i64> {
    let mut l = BigInt::one();
    for v in values {
        l = l.lcm(&v.denom());
    }
    let l_small = l.to_i64()?;
    for v in values {
        let s = (v.numer() * &l) / v.denom();
        if s.abs() >= BigInt::from(I64_LIMIT) {
            return None;
        }
    }
    Some(l_small)
}

fn prepare(u: &UncertainCurve, strict: bool, which: &str, warnings: &mut Vec<String>) -> Result<Vec<(Scalar, Scalar)>> {
    u.points()
        .iter()
        .enumerate()
        .map(|(k, p)| match p {
            UncertainPoint::Set(_) if strict => Err(Error::SetVertexRejected { index: k + 1 }),
            UncertainPoint::Set(_) => {
                warnings.push(format!(
                    "{which} vertex {} is a finite set; using its hull {}",
                    k + 1,
                    p.hull()
                ));
                Ok((p.lo().clone(), p.hi().clone()))
            }
            _ => Ok((p.lo().clone(), p.hi().clone())),
        })
        .collect()
}

/// Decides whether some realisations of `u` and `v` have Fréchet distance at
/// most `delta`.
pub fn decide_lb(u: &UncertainCurve, v: &UncertainCurve, delta: &Scalar) -> Result<LbDecision> {
    decide_lb_with(u, v, delta, &LbOptions::default())
}

pub fn decide_lb_with(
    u: &UncertainCurve,
    v: &UncertainCurve,
    delta: &Scalar,
    opts: &LbOptions,
) -> Result<LbDecision> {
    if !delta.is_positive() {
        return Err(Error::NonPositiveDelta(delta.clone()));
    }
    let mut warnings = Vec::new();
    let us = prepare(u, opts.strict, "first curve", &mut warnings)?;
    let vs = prepare(v, opts.strict, "second curve", &mut warnings)?;
    let mut all: Vec<Scalar> = Vec::with_capacity(2 * (us.len() + vs.len()));
    for (lo, hi) in us.iter().chain(vs.iter()) {
        all.push(lo.clone());
        all.push(hi.clone());
    }
    let clip = ClipBox::around(&all, delta)?;
    let trace = opts.trace || opts.witness;

    let mut scale_inputs: Vec<&Scalar> = all.iter().collect();
    scale_inputs.extend([delta, &clip.xl, &clip.xh]);
    let (final_region, cells) = match integer_scale(&scale_inputs) {
        Some(l) => {
            let ls = Scalar::from_integer(l);
            let to_int = |s: &Scalar| -> i64 {
                (s * &ls).as_small().expect("scaled value is an integer").0
            };
            let back = |c: &i64| &Scalar::from_integer(*c) / &ls;
            let conv = |xs: &[(Scalar, Scalar)]| -> Vec<(i64, i64)> {
                xs.iter().map(|(a, b)| (to_int(a), to_int(b))).collect()
            };
            let engine = Engine::new(&conv(&us), &conv(&vs), &to_int(delta), clip.map(to_int), trace);
            let out = engine.run();
            let cells = out.cells.map(|t| {
                t.iter()
                    .map(|col| col.iter().map(|c| c.map(back)).collect())
                    .collect()
            });
            (out.final_region.map(back), cells)
        }
        None => {
            let engine = Engine::new(&us, &vs, delta, clip.clone(), trace);
            let out = engine.run();
            (out.final_region, out.cells)
        }
    };
    let feasible = !final_region.is_empty();
    let hulled_u = u.hull();
    let hulled_v = v.hull();
    let trace = cells.map(|cells| LbTrace {
        u: hulled_u,
        v: hulled_v,
        delta: delta.clone(),
        clip,
        cells,
        final_region: final_region.clone(),
    });
    let witness = match (&trace, opts.witness && feasible) {
        (Some(t), true) => Some(extract_witness(t)?),
        _ => None,
    };
    Ok(LbDecision {
        feasible,
        final_region,
        witness,
        trace: if opts.trace { trace } else { None },
        warnings,
    })
}

/// Smallest threshold (up to `tol`) at which [`decide_lb`] succeeds, by
/// bisection with exact midpoints over `[0, span]`.
pub fn compute_lb(u: &UncertainCurve, v: &UncertainCurve, tol: &Scalar) -> Result<Scalar> {
    compute_lb_with(u, v, tol, &LbOptions::default())
}

pub fn compute_lb_with(
    u: &UncertainCurve,
    v: &UncertainCurve,
    tol: &Scalar,
    opts: &LbOptions,
) -> Result<Scalar> {
    if !tol.is_positive() {
        return Err(Error::NonPositiveTolerance(tol.clone()));
    }
    let opts = LbOptions {
        strict: opts.strict,
        trace: false,
        witness: false,
    };
    let ends: Vec<Scalar> = u.endpoints().into_iter().chain(v.endpoints()).collect();
    let span = ends.iter().max().unwrap() - ends.iter().min().unwrap();
    if span.is_zero() {
        return Ok(Scalar::zero());
    }
    let (mut lo, mut hi) = (Scalar::zero(), span);
    while &hi - &lo > *tol {
        let mid = (&lo + &hi).half();
        if decide_lb_with(u, v, &mid, &opts)?.feasible {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Reconstructs realisations that witness a feasible traced run, then
/// checks them with the precise decision procedure.
///
/// Starting from the lexicographically smallest point of the final region,
/// each backward step moves to the lexicographically smallest point of the
/// predecessor region that reaches the current point along the step's cone.
pub fn extract_witness(trace: &LbTrace) -> Result<(PolyCurve, PolyCurve)> {
    let (m, n) = (trace.u.len(), trace.v.len());
    let clip = &trace.clip;
    let band = Region::band(&trace.delta, clip)?;
    let islab = |i: usize| {
        let p = &trace.u.points()[i];
        Region::vslab(p.lo(), p.hi(), clip).intersect_unchecked(&band)
    };
    let jslab = |j: usize| {
        let p = &trace.v.points()[j];
        Region::hslab(p.lo(), p.hi(), clip).intersect_unchecked(&band)
    };
    let Some(mut z) = trace.final_region.lexmin() else {
        return Err(Error::Infeasible);
    };
    let mut ps: Vec<Option<Scalar>> = vec![None; m];
    let mut qs: Vec<Option<Scalar>> = vec![None; n];

    let pick = |r: Region, z: &(Scalar, Scalar), cone: Cone| -> Option<(Scalar, Scalar)> {
        let back = Region::point(&z.0, &z.1, clip).minkowski(cone.opposite());
        r.intersect_unchecked(&back).lexmin()
    };

    // Entry state: which last region the final point came through.
    let mut state: Option<(Dir, usize, usize)> = None;
    if m == 1 && n == 1 {
        ps[0] = Some(z.0.clone());
        qs[0] = Some(z.1.clone());
    } else {
        if m >= 2 {
            let c = trace.cell(m - 2, n - 1);
            for d in [Dir::R, Dir::L] {
                if state.is_none() && c.get(d).contains(&z.0, &z.1) && islab(m - 1).contains(&z.0, &z.1) {
                    ps[m - 1] = Some(z.0.clone());
                    state = Some((d, m - 2, n - 1));
                }
            }
        }
        if state.is_none() && n >= 2 {
            let c = trace.cell(m - 1, n - 2);
            for d in [Dir::U, Dir::D] {
                if state.is_none() && c.get(d).contains(&z.0, &z.1) && jslab(n - 1).contains(&z.0, &z.1) {
                    qs[n - 1] = Some(z.1.clone());
                    state = Some((d, m - 1, n - 2));
                }
            }
        }
        if state.is_none() {
            return Err(Error::WitnessRejected("final point has no source region".into()));
        }
    }

    while let Some((d, i, j)) = state {
        let lost = || Error::WitnessRejected(format!("no predecessor for {} at ({}, {})", d.name(), i + 1, j + 1));
        if d.vertical() {
            ps[i] = Some(z.0.clone());
        } else {
            qs[j] = Some(z.1.clone());
        }
        let base = is_base(d, i, j);
        if base && i == 0 && j == 0 {
            let w = pick(islab(0).intersect_unchecked(&jslab(0)), &z, d.ray()).ok_or_else(lost)?;
            ps[0] = Some(w.0);
            qs[0] = Some(w.1);
            state = None;
        } else if base {
            let (pi, pj, slab) = if d.vertical() {
                (0, j - 1, jslab(j))
            } else {
                (i - 1, 0, islab(i))
            };
            let sources = if d.vertical() { [Dir::U, Dir::D] } else { [Dir::R, Dir::L] };
            let mut next = None;
            for s in sources {
                let r = trace.cell(pi, pj).get(s).intersect_unchecked(&slab);
                if let Some(w) = pick(r, &z, d.ray()) {
                    next = Some((s, w));
                    break;
                }
            }
            let (s, w) = next.ok_or_else(lost)?;
            if d.vertical() {
                qs[j] = Some(w.1.clone());
            } else {
                ps[i] = Some(w.0.clone());
            }
            z = w;
            state = Some((s, pi, pj));
        } else {
            let (pi, pj) = if d.vertical() { (i - 1, j) } else { (i, j - 1) };
            let mut next = None;
            for (s, cone) in d.steps() {
                if let Some(w) = pick(trace.cell(pi, pj).get(s).clone(), &z, cone) {
                    next = Some((s, w));
                    break;
                }
            }
            let (s, w) = next.ok_or_else(lost)?;
            z = w;
            state = Some((s, pi, pj));
        }
    }

    let fill = |xs: Vec<Option<Scalar>>, c: &UncertainCurve| -> Result<PolyCurve> {
        PolyCurve::new(
            xs.into_iter()
                .zip(c.points())
                .map(|(x, p)| x.unwrap_or_else(|| p.lo().clone()))
                .collect(),
        )
    };
    let p = fill(ps, &trace.u)?;
    let q = fill(qs, &trace.v)?;
    if !p.is_realisation_of(&trace.u) || !q.is_realisation_of(&trace.v) {
        return Err(Error::WitnessRejected(format!("{p} / {q} are not realisations")));
    }
    if !frechet_decide(&p, &q, &trace.delta) {
        return Err(Error::WitnessRejected(format!(
            "{p} / {q} exceed the threshold {}",
            trace.delta
        )));
    }
    Ok((p, q))
}
