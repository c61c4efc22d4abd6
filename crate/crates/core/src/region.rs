//! Planar regions bounded by horizontal, vertical and slope-one edges.
//!
//! A [`Piece`] is a convex polygon of the form
//! `xl ≤ x ≤ xh, yl ≤ y ≤ yh, dl ≤ y − x ≤ dh`, stored with all six bounds
//! tightened so that each one is attained. Such polygons are closed under
//! intersection and under Minkowski sums with the axis-aligned cones used by
//! the lower-bound propagation, which is what makes the whole algebra exact
//! and cheap. A [`Region`] is a finite union of pieces inside a square clip
//! box, kept in a normalized form where no two pieces can be merged into a
//! convex piece covered by the region.
//!
//! The coordinate type is generic so that the propagation can run on machine
//! integers after scaling all inputs to a common denominator; [`Scalar`] is
//! the default.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Write as _};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Totally ordered coordinates closed under addition and subtraction.
pub trait Coord: Clone + Ord + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
}

impl Coord for i64 {
    #[inline]
    fn zero() -> Self {
        0
    }
    #[inline]
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    #[inline]
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl Coord for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

const XL: usize = 0;
const XH: usize = 1;
const YL: usize = 2;
const YH: usize = 3;
const DL: usize = 4;
const DH: usize = 5;

/// Directions that can be added to a region by a Minkowski sum.
///
/// `L`/`R` move along the x axis, `D`/`U` along the y axis. Quadrants combine
/// one horizontal and one vertical direction, half-planes fix one direction
/// and leave the other axis free, and rays move along a single direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cone {
    QuadLD,
    QuadLU,
    QuadRD,
    QuadRU,
    HalfL,
    HalfR,
    HalfD,
    HalfU,
    RayL,
    RayR,
    RayD,
    RayU,
}

impl Cone {
    pub const ALL: [Cone; 12] = [
        Cone::QuadLD,
        Cone::QuadLU,
        Cone::QuadRD,
        Cone::QuadRU,
        Cone::HalfL,
        Cone::HalfR,
        Cone::HalfD,
        Cone::HalfU,
        Cone::RayL,
        Cone::RayR,
        Cone::RayD,
        Cone::RayU,
    ];

    /// Bounds of a piece that survive the sum; the others open up to the box.
    fn kept(self) -> [bool; 6] {
        let mut k = [false; 6];
        let keep: &[usize] = match self {
            Cone::QuadLD => &[XH, YH],
            Cone::QuadLU => &[XH, YL, DL],
            Cone::QuadRD => &[XL, YH, DH],
            Cone::QuadRU => &[XL, YL],
            Cone::HalfL => &[XH],
            Cone::HalfR => &[XL],
            Cone::HalfD => &[YH],
            Cone::HalfU => &[YL],
            Cone::RayL => &[XH, YL, YH, DL],
            Cone::RayR => &[XL, YL, YH, DH],
            Cone::RayD => &[XL, XH, YH, DH],
            Cone::RayU => &[XL, XH, YL, DL],
        };
        for &i in keep {
            k[i] = true;
        }
        k
    }

    /// The cone of negated directions.
    pub fn opposite(self) -> Cone {
        match self {
            Cone::QuadLD => Cone::QuadRU,
            Cone::QuadLU => Cone::QuadRD,
            Cone::QuadRD => Cone::QuadLU,
            Cone::QuadRU => Cone::QuadLD,
            Cone::HalfL => Cone::HalfR,
            Cone::HalfR => Cone::HalfL,
            Cone::HalfD => Cone::HalfU,
            Cone::HalfU => Cone::HalfD,
            Cone::RayL => Cone::RayR,
            Cone::RayR => Cone::RayL,
            Cone::RayD => Cone::RayU,
            Cone::RayU => Cone::RayD,
        }
    }

    /// Whether the direction `(dx, dy)` belongs to the cone.
    pub fn contains_direction<C: Coord>(self, dx: &C, dy: &C) -> bool {
        let z = C::zero();
        let (l, r, d, u, h0, v0) = (*dx <= z, *dx >= z, *dy <= z, *dy >= z, *dy == z, *dx == z);
        match self {
            Cone::QuadLD => l && d,
            Cone::QuadLU => l && u,
            Cone::QuadRD => r && d,
            Cone::QuadRU => r && u,
            Cone::HalfL => l,
            Cone::HalfR => r,
            Cone::HalfD => d,
            Cone::HalfU => u,
            Cone::RayL => l && h0,
            Cone::RayR => r && h0,
            Cone::RayD => d && v0,
            Cone::RayU => u && v0,
        }
    }
}

/// The square (or rectangle) every region is clipped to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClipBox<C = Scalar> {
    pub xl: C,
    pub xh: C,
    pub yl: C,
    pub yh: C,
}

impl<C: Coord> ClipBox<C> {
    /// The square `[lo, hi]²`.
    pub fn square(lo: C, hi: C) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument("empty clip box".into()));
        }
        Ok(ClipBox {
            xl: lo.clone(),
            xh: hi.clone(),
            yl: lo,
            yh: hi,
        })
    }

    pub(crate) fn bounds(&self) -> [C; 6] {
        [
            self.xl.clone(),
            self.xh.clone(),
            self.yl.clone(),
            self.yh.clone(),
            self.yl.sub(&self.xh),
            self.yh.sub(&self.xl),
        ]
    }

    pub fn map<D: Coord>(&self, f: impl Fn(&C) -> D) -> ClipBox<D> {
        ClipBox {
            xl: f(&self.xl),
            xh: f(&self.xh),
            yl: f(&self.yl),
            yh: f(&self.yh),
        }
    }
}

impl ClipBox<Scalar> {
    /// `[lo − 2δ − 1, hi + 2δ + 1]²` where `lo`/`hi` span the given values.
    pub fn around(values: &[Scalar], delta: &Scalar) -> Result<Self> {
        let lo = values.iter().min().ok_or(Error::EmptyCurve)?;
        let hi = values.iter().max().unwrap();
        let pad = &(delta + delta) + &Scalar::one();
        ClipBox::square(lo - &pad, hi + &pad)
    }
}

/// A nonempty convex polygon `xl ≤ x ≤ xh, yl ≤ y ≤ yh, dl ≤ y − x ≤ dh`
/// with every bound tight.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Piece<C = Scalar> {
    b: [C; 6],
}

impl<C: Coord> Piece<C> {
    /// Tightens arbitrary bounds; `None` if they describe the empty set.
    pub fn from_bounds(xl: C, xh: C, yl: C, yh: C, dl: C, dh: C) -> Option<Self> {
        Self::tighten([xl, xh, yl, yh, dl, dh])
    }

    #[inline]
    fn tighten(b: [C; 6]) -> Option<Self> {
        // Shortest paths of length two suffice in a three-node constraint graph.
        let xh = (&b[XH]).min(&b[YH].sub(&b[DL])).clone();
        let xl = (&b[XL]).max(&b[YL].sub(&b[DH])).clone();
        let yh = (&b[YH]).min(&b[XH].add(&b[DH])).clone();
        let yl = (&b[YL]).max(&b[XL].add(&b[DL])).clone();
        let dh = (&b[DH]).min(&b[YH].sub(&b[XL])).clone();
        let dl = (&b[DL]).max(&b[YL].sub(&b[XH])).clone();
        if xl > xh || yl > yh || dl > dh {
            return None;
        }
        Some(Piece {
            b: [xl, xh, yl, yh, dl, dh],
        })
    }

    pub fn xl(&self) -> &C {
        &self.b[XL]
    }
    pub fn xh(&self) -> &C {
        &self.b[XH]
    }
    pub fn yl(&self) -> &C {
        &self.b[YL]
    }
    pub fn yh(&self) -> &C {
        &self.b[YH]
    }
    /// Lower bound on `y − x`.
    pub fn dl(&self) -> &C {
        &self.b[DL]
    }
    /// Upper bound on `y − x`.
    pub fn dh(&self) -> &C {
        &self.b[DH]
    }

    pub fn contains(&self, x: &C, y: &C) -> bool {
        let d = y.sub(x);
        self.b[XL] <= *x
            && *x <= self.b[XH]
            && self.b[YL] <= *y
            && *y <= self.b[YH]
            && self.b[DL] <= d
            && d <= self.b[DH]
    }

    pub fn intersect(&self, other: &Piece<C>) -> Option<Piece<C>> {
        let b = &self.b;
        let o = &other.b;
        Self::tighten([
            b[XL].clone().max(o[XL].clone()),
            b[XH].clone().min(o[XH].clone()),
            b[YL].clone().max(o[YL].clone()),
            b[YH].clone().min(o[YH].clone()),
            b[DL].clone().max(o[DL].clone()),
            b[DH].clone().min(o[DH].clone()),
        ])
    }

    /// Subset test; exact because both pieces are tight.
    pub fn is_subset(&self, other: &Piece<C>) -> bool {
        let (b, o) = (&self.b, &other.b);
        b[XL] >= o[XL]
            && b[XH] <= o[XH]
            && b[YL] >= o[YL]
            && b[YH] <= o[YH]
            && b[DL] >= o[DL]
            && b[DH] <= o[DH]
    }

    /// Smallest piece containing both.
    pub fn hull(&self, other: &Piece<C>) -> Piece<C> {
        let (b, o) = (&self.b, &other.b);
        Piece {
            b: [
                b[XL].clone().min(o[XL].clone()),
                b[XH].clone().max(o[XH].clone()),
                b[YL].clone().min(o[YL].clone()),
                b[YH].clone().max(o[YH].clone()),
                b[DL].clone().min(o[DL].clone()),
                b[DH].clone().max(o[DH].clone()),
            ],
        }
    }

    pub(crate) fn minkowski(&self, cone: Cone, clip: &[C; 6]) -> Option<Piece<C>> {
        let kept = cone.kept();
        let mut b = self.b.clone();
        for i in 0..6 {
            if !kept[i] {
                b[i] = clip[i].clone();
            }
        }
        Self::tighten(b)
    }

    /// The lexicographically smallest point `(x, y)`.
    pub fn lexmin(&self) -> (C, C) {
        let x = self.b[XL].clone();
        let y = (&self.b[YL]).max(&x.add(&self.b[DL])).clone();
        (x, y)
    }

    /// Polygon vertices in counter-clockwise order, without repeats.
    pub fn vertices(&self) -> Vec<(C, C)> {
        let b = &self.b;
        let cand = [
            (b[XL].clone(), b[YL].clone()),
            (b[YL].sub(&b[DL]), b[YL].clone()),
            (b[XH].clone(), b[XH].add(&b[DL])),
            (b[XH].clone(), b[YH].clone()),
            (b[YH].sub(&b[DH]), b[YH].clone()),
            (b[XL].clone(), b[XL].add(&b[DH])),
        ];
        let mut out: Vec<(C, C)> = Vec::with_capacity(6);
        for p in cand {
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
        while out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        out
    }

    pub fn map<D: Coord>(&self, f: impl Fn(&C) -> D) -> Piece<D> {
        Piece {
            b: [
                f(&self.b[0]),
                f(&self.b[1]),
                f(&self.b[2]),
                f(&self.b[3]),
                f(&self.b[4]),
                f(&self.b[5]),
            ],
        }
    }

    /// Closed pieces of `self` lying outside each constraint of `other`.
    fn outside_parts(&self, other: &Piece<C>) -> SmallVec<[Piece<C>; 6]> {
        let mut out = SmallVec::new();
        for i in 0..6 {
            let lower = i % 2 == 0;
            let beyond = if lower {
                self.b[i] < other.b[i]
            } else {
                self.b[i] > other.b[i]
            };
            if beyond {
                let mut b = self.b.clone();
                // Keep the part on the far side of the constraint, boundary included.
                b[i ^ 1] = other.b[i].clone();
                if let Some(p) = Self::tighten(b) {
                    out.push(p);
                }
            }
        }
        out
    }
}

impl<C: Coord> Ord for Piece<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.b.cmp(&other.b)
    }
}

impl<C: Coord> PartialOrd for Piece<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: Coord> Debug for Piece<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Piece{{x:[{:?},{:?}] y:[{:?},{:?}] y-x:[{:?},{:?}]}}",
            self.b[0], self.b[1], self.b[2], self.b[3], self.b[4], self.b[5]
        )
    }
}

/// `k ⊆ ⋃ others`, by recursively carving `k` along the constraints of the
/// first covering candidate.
fn covered<C: Coord>(k: &Piece<C>, others: &[Piece<C>]) -> bool {
    let Some((first, rest)) = others.split_first() else {
        return false;
    };
    if k.is_subset(first) {
        return true;
    }
    if k.intersect(first).is_none() {
        return covered(k, rest);
    }
    k.outside_parts(first).iter().all(|p| covered(p, rest))
}

pub(crate) type Pieces<C> = SmallVec<[Piece<C>; 4]>;

/// Brings a piece list to normal form: no piece contained in another, no
/// pair whose hull is covered by the union, no piece covered by the rest,
/// sorted.
fn normalize<C: Coord>(mut ps: Pieces<C>) -> Pieces<C> {
    if ps.len() <= 1 {
        return ps;
    }
    drop_contained(&mut ps);
    'merge: loop {
        for a in 0..ps.len() {
            for b in a + 1..ps.len() {
                let h = ps[a].hull(&ps[b]);
                if covered(&h, &ps) {
                    ps[a] = h;
                    ps.swap_remove(b);
                    drop_contained(&mut ps);
                    continue 'merge;
                }
            }
        }
        break;
    }
    let mut i = 0;
    while ps.len() > 1 && i < ps.len() {
        let rest: Pieces<C> = ps
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| p.clone())
            .collect();
        if covered(&ps[i], &rest) {
            ps.remove(i);
        } else {
            i += 1;
        }
    }
    ps.sort();
    ps
}

fn drop_contained<C: Coord>(ps: &mut Pieces<C>) {
    let mut i = 0;
    while i < ps.len() {
        let dominated = (0..ps.len()).any(|j| {
            j != i && ps[i].is_subset(&ps[j]) && (ps[i] != ps[j] || j < i)
        });
        if dominated {
            ps.remove(i);
        } else {
            i += 1;
        }
    }
}

/// A finite union of pieces inside a clip box.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Region<C = Scalar> {
    clip: ClipBox<C>,
    pieces: Pieces<C>,
}

impl<C: Coord> Region<C> {
    pub fn empty(clip: &ClipBox<C>) -> Self {
        Region {
            clip: clip.clone(),
            pieces: SmallVec::new(),
        }
    }

    /// The whole clip box.
    pub fn full(clip: &ClipBox<C>) -> Self {
        Self::from_bounds(clip, clip.bounds())
    }

    fn from_bounds(clip: &ClipBox<C>, b: [C; 6]) -> Self {
        let cb = clip.bounds();
        let clipped = [
            (&b[XL]).max(&cb[XL]).clone(),
            (&b[XH]).min(&cb[XH]).clone(),
            (&b[YL]).max(&cb[YL]).clone(),
            (&b[YH]).min(&cb[YH]).clone(),
            (&b[DL]).max(&cb[DL]).clone(),
            (&b[DH]).min(&cb[DH]).clone(),
        ];
        let mut pieces = SmallVec::new();
        if let Some(p) = Piece::tighten(clipped) {
            pieces.push(p);
        }
        Region {
            clip: clip.clone(),
            pieces,
        }
    }

    /// `{(x, y) : |x − y| ≤ δ}` within the box.
    pub fn band(delta: &C, clip: &ClipBox<C>) -> Result<Self> {
        if *delta <= C::zero() {
            return Err(Error::InvalidArgument(format!(
                "band half-width must be positive, got {delta:?}"
            )));
        }
        let mut b = clip.bounds();
        b[DL] = C::zero().sub(delta);
        b[DH] = delta.clone();
        Ok(Self::from_bounds(clip, b))
    }

    /// `[lo, hi] × ℝ` within the box.
    pub fn vslab(lo: &C, hi: &C, clip: &ClipBox<C>) -> Self {
        let mut b = clip.bounds();
        b[XL] = lo.clone();
        b[XH] = hi.clone();
        Self::from_bounds(clip, b)
    }

    /// `ℝ × [lo, hi]` within the box.
    pub fn hslab(lo: &C, hi: &C, clip: &ClipBox<C>) -> Self {
        let mut b = clip.bounds();
        b[YL] = lo.clone();
        b[YH] = hi.clone();
        Self::from_bounds(clip, b)
    }

    /// The axis-parallel rectangle `[xl, xh] × [yl, yh]` within the box.
    pub fn rect(xl: &C, xh: &C, yl: &C, yh: &C, clip: &ClipBox<C>) -> Self {
        let mut b = clip.bounds();
        b[XL] = xl.clone();
        b[XH] = xh.clone();
        b[YL] = yl.clone();
        b[YH] = yh.clone();
        Self::from_bounds(clip, b)
    }

    /// A single piece given by raw (not necessarily tight) bounds, clipped.
    pub fn hexagon(xl: &C, xh: &C, yl: &C, yh: &C, dl: &C, dh: &C, clip: &ClipBox<C>) -> Self {
        Self::from_bounds(
            clip,
            [xl.clone(), xh.clone(), yl.clone(), yh.clone(), dl.clone(), dh.clone()],
        )
    }

    /// Builds a region from arbitrary pieces, clipping and normalizing.
    pub fn from_pieces(clip: &ClipBox<C>, pieces: impl IntoIterator<Item = Piece<C>>) -> Self {
        let full = Self::full(clip);
        let Some(boxp) = full.pieces.first() else {
            return full;
        };
        let ps = pieces.into_iter().filter_map(|p| p.intersect(boxp)).collect();
        Region {
            clip: clip.clone(),
            pieces: normalize(ps),
        }
    }

    pub fn clip(&self) -> &ClipBox<C> {
        &self.clip
    }

    pub fn pieces(&self) -> &[Piece<C>] {
        &self.pieces
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, x: &C, y: &C) -> bool {
        self.pieces.iter().any(|p| p.contains(x, y))
    }

    fn check_clip(&self, other: &Region<C>) -> Result<()> {
        if self.clip != other.clip {
            return Err(Error::ClipMismatch);
        }
        Ok(())
    }

    pub fn union(&self, other: &Region<C>) -> Result<Self> {
        self.check_clip(other)?;
        Ok(self.union_unchecked(other))
    }

    pub fn intersect(&self, other: &Region<C>) -> Result<Self> {
        self.check_clip(other)?;
        Ok(self.intersect_unchecked(other))
    }

    /// Set equality.
    pub fn equals(&self, other: &Region<C>) -> Result<bool> {
        self.check_clip(other)?;
        Ok(self.is_subset_unchecked(other) && other.is_subset_unchecked(self))
    }

    pub fn is_subset(&self, other: &Region<C>) -> Result<bool> {
        self.check_clip(other)?;
        Ok(self.is_subset_unchecked(other))
    }

    pub(crate) fn is_subset_unchecked(&self, other: &Region<C>) -> bool {
        self.pieces.iter().all(|p| covered(p, &other.pieces))
    }

    pub(crate) fn union_unchecked(&self, other: &Region<C>) -> Self {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let ps = self.pieces.iter().chain(other.pieces.iter()).cloned().collect();
        Region {
            clip: self.clip.clone(),
            pieces: normalize(ps),
        }
    }

    /// Normalizes a raw piece list; pieces must already lie in the box.
    pub(crate) fn from_raw(clip: &ClipBox<C>, pieces: Pieces<C>) -> Self {
        Region {
            clip: clip.clone(),
            pieces: normalize(pieces),
        }
    }

    /// The single point `(x, y)`, or empty if it lies outside the box.
    pub fn point(x: &C, y: &C, clip: &ClipBox<C>) -> Self {
        Self::rect(x, x, y, y, clip)
    }

    pub(crate) fn intersect_unchecked(&self, other: &Region<C>) -> Self {
        let mut ps: Pieces<C> = SmallVec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                if let Some(p) = a.intersect(b) {
                    ps.push(p);
                }
            }
        }
        Region {
            clip: self.clip.clone(),
            pieces: normalize(ps),
        }
    }

    /// `{p + v : p ∈ self, v ∈ cone}`, clipped to the box.
    pub fn minkowski(&self, cone: Cone) -> Self {
        let cb = self.clip.bounds();
        let ps = self
            .pieces
            .iter()
            .filter_map(|p| p.minkowski(cone, &cb))
            .collect();
        Region {
            clip: self.clip.clone(),
            pieces: normalize(ps),
        }
    }

    /// The lexicographically smallest point, if any.
    pub fn lexmin(&self) -> Option<(C, C)> {
        self.pieces.iter().map(Piece::lexmin).min()
    }

    /// The projection onto the x axis as disjoint sorted closed intervals.
    pub fn project_x(&self) -> Vec<(C, C)> {
        merge_intervals(self.pieces.iter().map(|p| (p.b[XL].clone(), p.b[XH].clone())))
    }

    /// The projection onto the y axis as disjoint sorted closed intervals.
    pub fn project_y(&self) -> Vec<(C, C)> {
        merge_intervals(self.pieces.iter().map(|p| (p.b[YL].clone(), p.b[YH].clone())))
    }

    pub fn map<D: Coord>(&self, f: impl Fn(&C) -> D) -> Region<D> {
        Region {
            clip: self.clip.map(&f),
            pieces: self.pieces.iter().map(|p| p.map(&f)).collect(),
        }
    }
}

impl<C: Coord + fmt::Display> Region<C> {
    /// One line per piece, listing its vertices as `x,y` pairs.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for p in &self.pieces {
            let parts: Vec<String> = p
                .vertices()
                .iter()
                .map(|(x, y)| format!("{x},{y}"))
                .collect();
            let _ = writeln!(s, "{}", parts.join(" "));
        }
        s
    }
}

fn merge_intervals<C: Coord>(it: impl Iterator<Item = (C, C)>) -> Vec<(C, C)> {
    let mut v: Vec<(C, C)> = it.collect();
    v.sort();
    let mut out: Vec<(C, C)> = Vec::new();
    for (lo, hi) in v {
        match out.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

impl<C: Coord> Debug for Region<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.pieces.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::sc;
    use proptest::prelude::*;

    fn clip() -> ClipBox<i64> {
        ClipBox::square(-20, 20).unwrap()
    }

    fn pt(x: &str, y: &str) -> (Scalar, Scalar) {
        (sc(x), sc(y))
    }

    #[test]
    fn tightening_matches_brute_force_emptiness() {
        // Exhaustive over small integer bounds: nonempty iff some lattice
        // point of the 1/2-grid satisfies all six constraints.
        let vals = [-2i64, 0, 2];
        for xl in vals {
            for xh in vals {
                for yl in vals {
                    for yh in vals {
                        for dl in [-3i64, -1, 1] {
                            for dh in [-3i64, -1, 1] {
                                let p = Piece::from_bounds(xl * 2, xh * 2, yl * 2, yh * 2, dl, dh);
                                let brute = (-8..=8).any(|x| {
                                    (-8..=8).any(|y| {
                                        xl * 2 <= x
                                            && x <= xh * 2
                                            && yl * 2 <= y
                                            && y <= yh * 2
                                            && dl <= y - x
                                            && y - x <= dh
                                    })
                                });
                                assert_eq!(p.is_some(), brute);
                                if let Some(p) = p {
                                    // Each tight bound is attained by a vertex.
                                    let vs = p.vertices();
                                    assert!(vs.iter().all(|(x, y)| p.contains(x, y)));
                                    assert!(vs.iter().any(|v| v.0 == *p.xl()));
                                    assert!(vs.iter().any(|v| v.1 - v.0 == *p.dh()));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn band_membership_and_slabs() {
        let c = ClipBox::square(sc("-3"), sc("3")).unwrap();
        let band = Region::band(&sc("1"), &c).unwrap();
        assert_eq!(band.piece_count(), 1);
        assert!(band.contains(&sc("0"), &sc("0.5")));
        assert!(!band.contains(&sc("0"), &sc("2")));
        assert!(band.contains(&sc("0.3"), &sc("0.9")));
        assert!(Region::band(&sc("0"), &c).is_err());

        let i = Region::vslab(&sc("0"), &sc("1"), &c).intersect(&band).unwrap();
        assert_eq!(
            i.pieces()[0].vertices(),
            vec![pt("0", "-1"), pt("1", "0"), pt("1", "2"), pt("0", "1")]
        );
        let far = Region::hslab(&sc("5"), &sc("6"), &ClipBox::square(sc("-9"), sc("9")).unwrap());
        let c9 = far.clip().clone();
        let e = far
            .intersect(&Region::vslab(&sc("0"), &sc("1"), &c9))
            .unwrap()
            .intersect(&Region::band(&sc("1"), &c9).unwrap())
            .unwrap();
        assert!(e.is_empty());
        let seg = Region::vslab(&sc("2"), &sc("2"), &c);
        assert_eq!(seg.piece_count(), 1);
        assert_eq!(seg.pieces()[0].vertices(), vec![pt("2", "-3"), pt("2", "3")]);
        let e2 = Region::band(&sc("1"), &c)
            .unwrap()
            .intersect(&Region::vslab(&sc("2.5"), &sc("2.5"), &c))
            .unwrap()
            .intersect(&Region::hslab(&sc("0"), &sc("0"), &c))
            .unwrap();
        assert!(e2.is_empty());
    }

    #[test]
    fn minkowski_examples() {
        let c = clip();
        let sq = Region::rect(&0, &1, &0, &1, &c);
        assert!(sq.minkowski(Cone::QuadRU).equals(&Region::rect(&0, &20, &0, &20, &c)).unwrap());
        let quad = Region::vslab(&0, &1, &c).intersect_unchecked(&Region::band(&1, &c).unwrap());
        let up = quad.minkowski(Cone::RayU);
        let want = Region::hexagon(&0, &1, &-20, &20, &-1, &40, &c);
        assert!(up.equals(&want).unwrap());
        assert!(Region::empty(&c).minkowski(Cone::RayL).is_empty());
    }

    #[test]
    fn union_merges_adjacent_rectangles() {
        let c = clip();
        let a = Region::rect(&0, &1, &0, &1, &c);
        let b = Region::rect(&1, &2, &0, &1, &c);
        let u = a.union(&b).unwrap();
        assert_eq!(u.piece_count(), 1);
        assert!(u.equals(&Region::rect(&0, &2, &0, &1, &c)).unwrap());
        // An L shape stays in two pieces.
        let l = a.union(&Region::rect(&0, &2, &1, &2, &c)).unwrap().union(&Region::rect(&1, &2, &0, &1, &c)).unwrap();
        assert_eq!(l.piece_count(), 1);
        let step = a.union(&Region::rect(&0, &2, &1, &2, &c)).unwrap();
        assert_eq!(step.piece_count(), 2);
        assert_eq!(Region::empty(&c).piece_count(), 0);
        let other = ClipBox::square(-5, 5).unwrap();
        assert_eq!(a.union(&Region::empty(&other)), Err(Error::ClipMismatch));
        assert_eq!(a.intersect(&Region::empty(&other)), Err(Error::ClipMismatch));
    }

    #[test]
    fn staircase_piece_counts() {
        let c = clip();
        // A one-step staircase: two rectangles that do not union to a convex set.
        let st = Region::rect(&0, &4, &0, &2, &c).union_unchecked(&Region::rect(&0, &2, &0, &4, &c));
        assert_eq!(st.piece_count(), 2);
        let band = Region::band(&1, &c).unwrap();
        assert!(st.intersect_unchecked(&band).piece_count() <= 2);
        let simple = Region::rect(&0, &4, &0, &4, &c).intersect_unchecked(&band);
        assert_eq!(simple.piece_count(), 1);
    }

    #[test]
    fn dump_lists_vertices() {
        let c = ClipBox::square(sc("-3"), sc("3")).unwrap();
        let r = Region::rect(&sc("0"), &sc("0.5"), &sc("0"), &sc("1/3"), &c);
        assert_eq!(r.dump(), "0,0 0.5,0 0.5,1/3 0,1/3\n");
    }

    fn arb_piece() -> impl Strategy<Value = Option<Piece<i64>>> {
        (
            -5i64..=5,
            0i64..=5,
            -5i64..=5,
            0i64..=5,
            -8i64..=8,
            0i64..=10,
        )
            .prop_map(|(xl, w, yl, h, dl, dw)| {
                Piece::from_bounds(xl, xl + w, yl, yl + h, dl, dl + dw)
            })
    }

    fn arb_region() -> impl Strategy<Value = Region<i64>> {
        prop::collection::vec(arb_piece(), 0..4).prop_map(|ps| {
            let c = ClipBox::square(-20, 20).unwrap();
            Region::from_pieces(&c, ps.into_iter().flatten())
        })
    }

    fn arb_cone() -> impl Strategy<Value = Cone> {
        (0usize..12).prop_map(|i| Cone::ALL[i])
    }

    /// Membership on the 41×41 grid of half-integers in [-10, 10]².
    fn grid() -> impl Iterator<Item = (i64, i64)> {
        (-20..=20).flat_map(|x| (-20..=20).map(move |y| (x, y)))
    }

    fn scaled(r: &Region<i64>) -> Region<i64> {
        let c = ClipBox::square(-40, 40).unwrap();
        Region::from_pieces(&c, r.pieces().iter().map(|p| p.map(|v| v * 2)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn set_operations_match_membership(a in arb_region(), b in arb_region()) {
            let (a2, b2) = (scaled(&a), scaled(&b));
            let u = a2.union(&b2).unwrap();
            let i = a2.intersect(&b2).unwrap();
            for (x, y) in grid() {
                let (ina, inb) = (a2.contains(&x, &y), b2.contains(&x, &y));
                prop_assert_eq!(u.contains(&x, &y), ina || inb);
                prop_assert_eq!(i.contains(&x, &y), ina && inb);
            }
            prop_assert!(u.equals(&b2.union(&a2).unwrap()).unwrap());
        }

        #[test]
        fn normalized_pieces_are_not_mergeable(a in arb_region(), b in arb_region()) {
            let u = a.union_unchecked(&b);
            for (k, p) in u.pieces().iter().enumerate() {
                for q in &u.pieces()[k + 1..] {
                    prop_assert!(!covered(&p.hull(q), u.pieces()));
                }
            }
        }

        #[test]
        fn minkowski_matches_pointwise_sum(a in arb_region(), cone in arb_cone()) {
            let a2 = scaled(&a);
            let s = a2.minkowski(cone);
            prop_assert!(a2.is_subset(&s).unwrap());
            prop_assert!(s.minkowski(cone).equals(&s).unwrap());
            // Integer data gives integer witnesses, so the grid points of the
            // region are enough to decide membership in the sum.
            let inside: Vec<(i64, i64)> = grid().filter(|(x, y)| a2.contains(x, y)).collect();
            for (x, y) in grid() {
                let want = inside.iter().any(|(px, py)| cone.contains_direction(&(x - px), &(y - py)));
                prop_assert_eq!(s.contains(&x, &y), want, "({}, {}) {:?} {:?}", x, y, cone, a2);
            }
        }

        #[test]
        fn diagonal_quadrants_meet_in_ray(p in arb_piece()) {
            let a = Region::from_pieces(&clip(), p);
            let lu = a.minkowski(Cone::QuadLU);
            let ru = a.minkowski(Cone::QuadRU);
            let up = a.minkowski(Cone::RayU);
            prop_assert!(lu.intersect(&ru).unwrap().equals(&up).unwrap());
            let ld = a.minkowski(Cone::QuadLD);
            let rd = a.minkowski(Cone::QuadRD);
            prop_assert!(ld.intersect(&rd).unwrap().equals(&a.minkowski(Cone::RayD)).unwrap());
        }
    }
}
