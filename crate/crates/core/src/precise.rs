//! Distances between precise 1D curves.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::model::PolyCurve;
use crate::scalar::Scalar;

/// Which matching-based distance to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    Frechet,
    DiscreteFrechet,
    Weak,
    DiscreteWeak(Adjacency),
}

impl Metric {
    pub fn eval(self, p: &PolyCurve, q: &PolyCurve) -> Scalar {
        match self {
            Metric::Frechet => frechet_value(p, q),
            Metric::DiscreteFrechet => discrete_frechet(p, q),
            Metric::Weak => weak_frechet_1d(p, q),
            Metric::DiscreteWeak(adj) => discrete_weak(p, q, adj),
        }
    }

    /// Decision form; cheaper than [`Metric::eval`] for the continuous distance.
    pub fn at_most(self, p: &PolyCurve, q: &PolyCurve, delta: &Scalar) -> bool {
        match self {
            Metric::Frechet => frechet_decide(p, q, delta),
            _ => self.eval(p, q) <= *delta,
        }
    }

    pub fn measure(self, p: &PolyCurve, q: &PolyCurve) -> MatchingCost {
        MatchingCost {
            value: self.eval(p, q),
            kind: self,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Frechet => write!(f, "frechet"),
            Metric::DiscreteFrechet => write!(f, "discrete"),
            Metric::Weak => write!(f, "weak"),
            Metric::DiscreteWeak(_) => write!(f, "discrete-weak"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "frechet" => Ok(Metric::Frechet),
            "discrete" | "discrete-frechet" => Ok(Metric::DiscreteFrechet),
            "weak" => Ok(Metric::Weak),
            "discrete-weak" => Ok(Metric::DiscreteWeak(Adjacency::Eight)),
            _ => Err(Error::InvalidArgument(format!("unknown metric {s:?}"))),
        }
    }
}

/// A distance value tagged with the metric that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingCost {
    pub value: Scalar,
    pub kind: Metric,
}

/// Move set on the grid of vertex pairs for the discrete weak distance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Adjacency {
    /// One index changes by one.
    Four,
    /// Either or both indices change by one.
    #[default]
    Eight,
}

impl Adjacency {
    pub fn from_degree(k: u32) -> Option<Self> {
        match k {
            4 => Some(Adjacency::Four),
            8 => Some(Adjacency::Eight),
            _ => None,
        }
    }

    pub fn degree(self) -> u32 {
        match self {
            Adjacency::Four => 4,
            Adjacency::Eight => 8,
        }
    }

    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Adjacency::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
            Adjacency::Eight => &[
                (-1, 0),
                (1, 0),
                (0, -1),
                (0, 1),
                (-1, -1),
                (-1, 1),
                (1, -1),
                (1, 1),
            ],
        }
    }
}

type Interval = Option<(Scalar, Scalar)>;

/// Parameters `t ∈ [0, 1]` with `|a + t(b − a) − c| ≤ δ`.
fn free_interval(a: &Scalar, b: &Scalar, c: &Scalar, delta: &Scalar) -> Interval {
    if a == b {
        return (a.dist(c) <= *delta).then(|| (Scalar::zero(), Scalar::one()));
    }
    let span = b - a;
    let t1 = &(&(c - delta) - a) / &span;
    let t2 = &(&(c + delta) - a) / &span;
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    let lo = lo.max(Scalar::zero());
    let hi = hi.min(Scalar::one());
    (lo <= hi).then_some((lo, hi))
}

/// `d_F(p, q) ≤ δ`, by reachability propagation over the free-space cells.
pub fn frechet_decide(p: &PolyCurve, q: &PolyCurve, delta: &Scalar) -> bool {
    let (pv, qv) = (p.vertices(), q.vertices());
    let (m, n) = (pv.len(), qv.len());
    if m == 1 || n == 1 {
        return pv.iter().all(|a| qv.iter().all(|b| a.dist(b) <= *delta));
    }
    if pv[0].dist(&qv[0]) > *delta || pv[m - 1].dist(&qv[n - 1]) > *delta {
        return false;
    }
    let zero = Scalar::zero();
    let one = Scalar::one();
    // left[j]: reachable part of the boundary at p-vertex i along q-segment j.
    let mut left: Vec<Interval> = Vec::with_capacity(n - 1);
    let mut open = true;
    for j in 0..n - 1 {
        let f = if open {
            free_interval(&qv[j], &qv[j + 1], &pv[0], delta)
        } else {
            None
        };
        let reach = f.filter(|(lo, _)| *lo == zero);
        open = matches!(&reach, Some((_, hi)) if *hi == one);
        left.push(reach);
    }
    let mut bottom_open = true;
    let mut last_right: Interval = None;
    let mut last_top: Interval = None;
    for i in 0..m - 1 {
        // Bottom boundary of cell (i, 0) lies on q-vertex 0 along p-segment i.
        let mut bottom = if bottom_open {
            free_interval(&pv[i], &pv[i + 1], &qv[0], delta).filter(|(lo, _)| *lo == zero)
        } else {
            None
        };
        bottom_open = matches!(&bottom, Some((_, hi)) if *hi == one);
        for j in 0..n - 1 {
            let fr = free_interval(&qv[j], &qv[j + 1], &pv[i + 1], delta);
            let ft = free_interval(&pv[i], &pv[i + 1], &qv[j + 1], delta);
            let right = match (&bottom, &left[j]) {
                (Some(_), _) => fr,
                (None, Some((lo, _))) => fr
                    .and_then(|(a, b)| {
                        let a = a.max(lo.clone());
                        (a <= b).then_some((a, b))
                    }),
                (None, None) => None,
            };
            let top = match (&left[j], &bottom) {
                (Some(_), _) => ft,
                (None, Some((lo, _))) => ft.and_then(|(a, b)| {
                    let a = a.max(lo.clone());
                    (a <= b).then_some((a, b))
                }),
                (None, None) => None,
            };
            if i == m - 2 && j == n - 2 {
                last_right = right.clone();
                last_top = top.clone();
            }
            left[j] = right;
            bottom = top;
        }
    }
    let reaches_corner = |iv: &Interval| matches!(iv, Some((_, hi)) if *hi == one);
    reaches_corner(&last_right) || reaches_corner(&last_top)
}

/// Candidate values for the continuous distance in 1D.
pub fn frechet_candidates(p: &PolyCurve, q: &PolyCurve) -> Vec<Scalar> {
    let (pv, qv) = (p.vertices(), q.vertices());
    let mut c = vec![Scalar::zero()];
    for a in pv {
        for b in qv {
            c.push(a.dist(b));
        }
    }
    for vs in [pv, qv] {
        for (k, a) in vs.iter().enumerate() {
            for b in &vs[k + 1..] {
                c.push(a.dist(b).half());
            }
        }
    }
    c.sort();
    c.dedup();
    c
}

/// Exact continuous Fréchet distance.
pub fn frechet_value(p: &PolyCurve, q: &PolyCurve) -> Scalar {
    let c = frechet_candidates(p, q);
    // The largest candidate is at least every vertex distance, so it passes.
    let k = c.partition_point(|d| !frechet_decide(p, q, d));
    c[k.min(c.len() - 1)].clone()
}

/// Discrete Fréchet distance by the coupling recurrence.
pub fn discrete_frechet(p: &PolyCurve, q: &PolyCurve) -> Scalar {
    let (pv, qv) = (p.vertices(), q.vertices());
    let n = qv.len();
    let mut prev: Vec<Scalar> = Vec::with_capacity(n);
    for (i, a) in pv.iter().enumerate() {
        let mut cur: Vec<Scalar> = Vec::with_capacity(n);
        for (j, b) in qv.iter().enumerate() {
            let d = a.dist(b);
            let best = match (i, j) {
                (0, 0) => None,
                (0, _) => Some(cur[j - 1].clone()),
                (_, 0) => Some(prev[0].clone()),
                _ => Some(
                    prev[j]
                        .clone()
                        .min(prev[j - 1].clone())
                        .min(cur[j - 1].clone()),
                ),
            };
            cur.push(match best {
                Some(b) => b.max(d),
                None => d,
            });
        }
        prev = cur;
    }
    prev[n - 1].clone()
}

fn dist_to_range(x: &Scalar, lo: &Scalar, hi: &Scalar) -> Scalar {
    if x < lo {
        lo - x
    } else if x > hi {
        x - hi
    } else {
        Scalar::zero()
    }
}

/// Shared skeleton of the prefix-image and segment-image recurrences.
fn relaxed_dp(
    p: &PolyCurve,
    q: &PolyCurve,
    p_range: impl Fn(usize) -> (Scalar, Scalar),
    q_range: impl Fn(usize) -> (Scalar, Scalar),
) -> Scalar {
    let (pv, qv) = (p.vertices(), q.vertices());
    let (m, n) = (pv.len(), qv.len());
    let mut prev: Vec<Option<Scalar>> = vec![None; n];
    for a in 0..m {
        let mut cur: Vec<Option<Scalar>> = Vec::with_capacity(n);
        let (plo, phi) = p_range(a);
        for b in 0..n {
            if a == 0 && b == 0 {
                cur.push(Some(pv[0].dist(&qv[0])));
                continue;
            }
            let mut best: Option<Scalar> = None;
            if a >= 1 {
                if let Some(v) = &prev[b] {
                    let (qlo, qhi) = q_range(b);
                    let c = v.clone().max(dist_to_range(&pv[a - 1], &qlo, &qhi));
                    best = Some(best.map_or(c.clone(), |x: Scalar| x.min(c)));
                }
            }
            if b >= 1 {
                if let Some(v) = &cur[b - 1] {
                    let c = v.clone().max(dist_to_range(&qv[b - 1], &plo, &phi));
                    best = Some(best.map_or(c.clone(), |x: Scalar| x.min(c)));
                }
            }
            cur.push(best);
        }
        prev = cur;
    }
    // The final vertices are charged as well, so the value does not depend on
    // whether the last vertex of a curve extends its image.
    let (plo, phi) = p_range(m - 1);
    let (qlo, qhi) = q_range(n - 1);
    prev[n - 1]
        .clone()
        .expect("the grid is connected")
        .max(dist_to_range(&pv[m - 1], &qlo, &qhi))
        .max(dist_to_range(&qv[n - 1], &plo, &phi))
}

fn prefix_ranges(v: &[Scalar]) -> Vec<(Scalar, Scalar)> {
    let mut out = Vec::with_capacity(v.len());
    let (mut lo, mut hi) = (v[0].clone(), v[0].clone());
    for x in v {
        if *x < lo {
            lo = x.clone();
        }
        if *x > hi {
            hi = x.clone();
        }
        out.push((lo.clone(), hi.clone()));
    }
    out
}

fn segment_ranges(v: &[Scalar]) -> Vec<(Scalar, Scalar)> {
    (0..v.len())
        .map(|k| {
            let a = &v[k.saturating_sub(1)];
            let b = &v[k];
            (a.clone().min(b.clone()), a.clone().max(b.clone()))
        })
        .collect()
}

/// The prefix-image recurrence `r(π, σ)`.
///
/// Moving off vertex `π(i)` costs its distance to the image of the current
/// prefix of `σ`, and symmetrically. The last vertices of both curves are
/// charged against the full opposite images.
pub fn r_dp(p: &PolyCurve, q: &PolyCurve) -> Scalar {
    let (pr, qr) = (prefix_ranges(p.vertices()), prefix_ranges(q.vertices()));
    relaxed_dp(p, q, |a| pr[a].clone(), |b| qr[b].clone())
}

/// The segment-image recurrence `rm(π, σ)` over cell-monotone relaxed matchings.
///
/// Same shape as [`r_dp`] with the image of the current segment in place of
/// the prefix image.
pub fn rm_dp(p: &PolyCurve, q: &PolyCurve) -> Scalar {
    let (pr, qr) = (segment_ranges(p.vertices()), segment_ranges(q.vertices()));
    relaxed_dp(p, q, |a| pr[a].clone(), |b| qr[b].clone())
}

/// Weak Fréchet distance of 1D curves, `max(r(π, σ), r(rev π, rev σ))`.
pub fn weak_frechet_1d(p: &PolyCurve, q: &PolyCurve) -> Scalar {
    r_dp(p, q).max(r_dp(&p.reverse(), &q.reverse()))
}

/// Minimal disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

/// Bottleneck path value on an `m × n` grid of weights given by `w(i, j)`.
///
/// Spots are activated in increasing weight order until the two corners
/// share a component.
pub fn grid_bottleneck<T: Ord + Clone>(
    m: usize,
    n: usize,
    adjacency: Adjacency,
    w: impl Fn(usize, usize) -> T,
) -> T {
    let mut order: Vec<(T, usize)> = (0..m * n).map(|k| (w(k / n, k % n), k)).collect();
    order.sort();
    let mut active = vec![false; m * n];
    let mut dsu = DisjointSets::new(m * n);
    for (val, k) in order {
        active[k] = true;
        let (i, j) = ((k / n) as isize, (k % n) as isize);
        for &(di, dj) in adjacency.offsets() {
            let (a, b) = (i + di, j + dj);
            if a >= 0 && b >= 0 && (a as usize) < m && (b as usize) < n {
                let k2 = a as usize * n + b as usize;
                if active[k2] {
                    dsu.union(k, k2);
                }
            }
        }
        if active[0] && active[m * n - 1] && dsu.same(0, m * n - 1) {
            return val;
        }
    }
    unreachable!("all spots active connects the grid")
}

/// Discrete weak Fréchet distance: bottleneck path over vertex pairs.
pub fn discrete_weak(p: &PolyCurve, q: &PolyCurve, adjacency: Adjacency) -> Scalar {
    let (pv, qv) = (p.vertices(), q.vertices());
    grid_bottleneck(pv.len(), qv.len(), adjacency, |i, j| pv[i].dist(&qv[j]))
}

/// Whether a path of spots within `δ` joins the two corners.
pub fn discrete_weak_decide(p: &PolyCurve, q: &PolyCurve, delta: &Scalar, adjacency: Adjacency) -> bool {
    let (pv, qv) = (p.vertices(), q.vertices());
    let (m, n) = (pv.len(), qv.len());
    let ok = |i: usize, j: usize| pv[i].dist(&qv[j]) <= *delta;
    if !ok(0, 0) {
        return false;
    }
    let mut seen = vec![false; m * n];
    let mut stack = vec![(0usize, 0usize)];
    seen[0] = true;
    while let Some((i, j)) = stack.pop() {
        if (i, j) == (m - 1, n - 1) {
            return true;
        }
        for &(di, dj) in adjacency.offsets() {
            let (a, b) = (i as isize + di, j as isize + dj);
            if a < 0 || b < 0 || a as usize >= m || b as usize >= n {
                continue;
            }
            let (a, b) = (a as usize, b as usize);
            if !seen[a * n + b] && ok(a, b) {
                seen[a * n + b] = true;
                stack.push((a, b));
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::sc;
    use proptest::prelude::*;

    fn c(xs: &[i64]) -> PolyCurve {
        PolyCurve::from_ints(xs)
    }

    #[test]
    fn frechet_examples() {
        assert!(frechet_decide(&c(&[0, 4]), &c(&[0, 4]), &sc("0")));
        assert!(frechet_decide(&c(&[0, 4]), &c(&[1, 3]), &sc("1")));
        assert!(!frechet_decide(&c(&[0, 4]), &c(&[1, 3]), &sc("0.5")));
        assert!(!frechet_decide(&c(&[0, 10]), &c(&[5, 5]), &sc("4")));
        assert_eq!(frechet_value(&c(&[0, 4]), &c(&[1, 3])), sc("1"));
        assert_eq!(frechet_value(&c(&[3, -1, 2]), &c(&[3, -1, 2])), sc("0"));
        assert_eq!(frechet_value(&c(&[0]), &c(&[7])), sc("7"));
        // Backtracking on one curve must be matched: the detour 0 -> 4 -> 2 -> 6
        // against a straight segment costs half the backtrack.
        assert_eq!(frechet_value(&c(&[0, 4, 2, 6]), &c(&[0, 6])), sc("1"));
    }

    #[test]
    fn discrete_examples() {
        assert_eq!(discrete_frechet(&c(&[0, 5]), &c(&[0, 3, 5])), sc("2"));
        assert_eq!(discrete_frechet(&c(&[1, 2, 3]), &c(&[1, 2, 3])), sc("0"));
        assert_eq!(discrete_frechet(&c(&[0]), &c(&[7])), sc("7"));
    }

    #[test]
    fn weak_examples() {
        assert_eq!(r_dp(&c(&[0]), &c(&[5])), sc("5"));
        assert_eq!(r_dp(&c(&[0, 4]), &c(&[0, 1, 0, 4])), sc("0"));
        assert_eq!(r_dp(&c(&[0, -1, 0]), &c(&[0])), sc("1"));
        assert_eq!(r_dp(&c(&[0, -1]), &c(&[0])), sc("1"));
        assert_eq!(weak_frechet_1d(&c(&[0, 4]), &c(&[0, 1, 0, 4])), sc("0"));
        assert_eq!(weak_frechet_1d(&c(&[0, 1]), &c(&[0, -2, 1])), sc("2"));
        assert_eq!(weak_frechet_1d(&c(&[2, -3, 5]), &c(&[2, -3, 5])), sc("0"));
        assert_eq!(discrete_weak(&c(&[0, 1]), &c(&[0, -2, 1]), Adjacency::Eight), sc("2"));
        assert_eq!(discrete_weak(&c(&[4, 1]), &c(&[4, 1]), Adjacency::Eight), sc("0"));
        assert_eq!(discrete_weak(&c(&[4, 1]), &c(&[4, 1]), Adjacency::Four), sc("3"));
        assert_eq!(discrete_weak(&c(&[0]), &c(&[7]), Adjacency::Eight), sc("7"));
    }

    /// Path search over all spot sequences, for tiny grids.
    fn brute_discrete_weak(p: &PolyCurve, q: &PolyCurve, adj: Adjacency) -> Scalar {
        let mut cands: Vec<Scalar> = p
            .vertices()
            .iter()
            .flat_map(|a| q.vertices().iter().map(move |b| a.dist(b)))
            .collect();
        cands.sort();
        cands
            .into_iter()
            .find(|d| discrete_weak_decide(p, q, d, adj))
            .unwrap()
    }

    /// Exhaustive monotone couplings.
    fn brute_discrete(p: &[i64], q: &[i64]) -> i64 {
        fn go(p: &[i64], q: &[i64], i: usize, j: usize) -> i64 {
            let d = (p[i] - q[j]).abs();
            if i + 1 == p.len() && j + 1 == q.len() {
                return d;
            }
            let mut best = i64::MAX;
            if i + 1 < p.len() {
                best = best.min(go(p, q, i + 1, j));
            }
            if j + 1 < q.len() {
                best = best.min(go(p, q, i, j + 1));
            }
            if i + 1 < p.len() && j + 1 < q.len() {
                best = best.min(go(p, q, i + 1, j + 1));
            }
            d.max(best)
        }
        go(p, q, 0, 0)
    }

    fn curve() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-5i64..=5, 1..7)
    }

    proptest! {
        #[test]
        fn value_is_a_tight_candidate(p in curve(), q in curve()) {
            let (p, q) = (c(&p), c(&q));
            let v = frechet_value(&p, &q);
            let cands = frechet_candidates(&p, &q);
            let k = cands.binary_search(&v).unwrap();
            prop_assert!(frechet_decide(&p, &q, &v));
            if k > 0 {
                prop_assert!(!frechet_decide(&p, &q, &cands[k - 1]));
            }
        }

        #[test]
        fn orderings_between_metrics(p in curve(), q in curve()) {
            let (pc, qc) = (c(&p), c(&q));
            let f = frechet_value(&pc, &qc);
            let d = discrete_frechet(&pc, &qc);
            prop_assert_eq!(d.clone(), Scalar::from_integer(brute_discrete(&p, &q)));
            prop_assert!(weak_frechet_1d(&pc, &qc) <= f);
            prop_assert!(f <= d);
            let dw = discrete_weak(&pc, &qc, Adjacency::Eight);
            prop_assert!(dw <= d);
            prop_assert!(discrete_weak(&pc, &qc, Adjacency::Four) >= dw);
            prop_assert_eq!(dw, brute_discrete_weak(&pc, &qc, Adjacency::Eight));
            prop_assert_eq!(frechet_value(&qc, &pc), f);
        }

        #[test]
        fn growing_curves_preserve_r(p in curve(), q in curve()) {
            let (pc, qc) = (c(&p), c(&q));
            let (gp, gq) = (pc.growing_curve(), qc.growing_curve());
            prop_assert_eq!(r_dp(&pc, &qc), r_dp(&gp, &gq));
            prop_assert_eq!(rm_dp(&gp, &gq), r_dp(&pc, &qc));
        }
    }
}
