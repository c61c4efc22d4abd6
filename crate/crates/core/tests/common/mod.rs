#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use uncertain_frechet::{PolyCurve, Scalar, UncertainCurve, UncertainPoint};

pub fn half(k: i64) -> Scalar {
    Scalar::new(k, 2)
}

/// Curve with `len` vertices; each is an interval with probability `p`,
/// otherwise precise, endpoints drawn by `draw`.
pub fn random_uncertain(
    rng: &mut ChaCha8Rng,
    len: usize,
    p: f64,
    draw: impl Fn(&mut ChaCha8Rng) -> Scalar,
) -> UncertainCurve {
    let pts = (0..len)
        .map(|_| {
            let a = draw(rng);
            if rng.gen_bool(p) {
                let b = draw(rng);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                UncertainPoint::interval(lo, hi).unwrap()
            } else {
                UncertainPoint::precise(a)
            }
        })
        .collect();
    UncertainCurve::new(pts).unwrap()
}

pub fn random_precise(rng: &mut ChaCha8Rng, len: usize, lo: i64, hi: i64) -> PolyCurve {
    PolyCurve::from_ints(&(0..len).map(|_| rng.gen_range(lo..=hi)).collect::<Vec<_>>())
}

/// Weak Fréchet distance by bottleneck search on the cell graph of the
/// free space: a cell is a pair of segments, two cells touch when they
/// share a boundary edge, and the cost of crossing an edge is the distance
/// from the shared vertex to the other curve's segment.
pub fn weak_by_cells(p: &PolyCurve, q: &PolyCurve) -> Scalar {
    let seg = |c: &PolyCurve, k: usize| -> (Scalar, Scalar) {
        let v = c.vertices();
        if v.len() == 1 {
            (v[0].clone(), v[0].clone())
        } else {
            let (a, b) = (&v[k], &v[k + 1]);
            (a.clone().min(b.clone()), a.clone().max(b.clone()))
        }
    };
    let d = |x: &Scalar, (lo, hi): (Scalar, Scalar)| -> Scalar {
        if *x < lo {
            &lo - x
        } else if *x > hi {
            x - &hi
        } else {
            Scalar::zero()
        }
    };
    let (pv, qv) = (p.vertices(), q.vertices());
    let (cm, cn) = (pv.len().max(2) - 1, qv.len().max(2) - 1);
    let start = pv[0].dist(&qv[0]);
    let end = pv[pv.len() - 1].dist(&qv[qv.len() - 1]);
    let floor = start.max(end);
    // Edges between horizontally / vertically adjacent cells.
    let mut edges: Vec<(Scalar, usize, usize)> = Vec::new();
    for a in 0..cm {
        for b in 0..cn {
            if a + 1 < cm {
                edges.push((d(&pv[a + 1], seg(q, b)), a * cn + b, (a + 1) * cn + b));
            }
            if b + 1 < cn {
                edges.push((d(&qv[b + 1], seg(p, a)), a * cn + b, a * cn + b + 1));
            }
        }
    }
    edges.sort();
    let mut parent: Vec<usize> = (0..cm * cn).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    let target = cm * cn - 1;
    let mut best = Scalar::zero();
    if find(&mut parent, 0) != find(&mut parent, target) {
        for (w, a, b) in edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
            if find(&mut parent, 0) == find(&mut parent, target) {
                best = w;
                break;
            }
        }
    }
    best.max(floor)
}

/// A fixed family of small formulas: hand-picked unsatisfiable ones plus
/// seeded random clauses of width at most three over at most three
/// variables, without complementary literals inside a clause.
pub fn small_formulas(count: usize, max_clauses: usize, seed: u64) -> Vec<uncertain_frechet::CnfFormula> {
    use rand::SeedableRng;
    use uncertain_frechet::CnfFormula;
    let mut out = vec![
        CnfFormula::new(1, vec![vec![1]]).unwrap(),
        CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap(),
        CnfFormula::new(2, vec![vec![1, 2], vec![-1], vec![-2]]).unwrap(),
        CnfFormula::new(2, vec![vec![1], vec![-1, 2], vec![-2]]).unwrap(),
        CnfFormula::new(3, vec![vec![1, 3], vec![-1, 2, -3]]).unwrap(),
    ];
    out.retain(|f| f.num_clauses() <= max_clauses);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let n = rng.gen_range(1..=3usize);
        let c = rng.gen_range(1..=max_clauses);
        let clauses = (0..c)
            .map(|_| {
                let width = rng.gen_range(1..=n.min(3));
                let mut vars: Vec<i32> = (1..=n as i32).collect();
                for k in (1..vars.len()).rev() {
                    vars.swap(k, rng.gen_range(0..=k));
                }
                vars.truncate(width);
                vars.into_iter().map(|v| if rng.gen_bool(0.5) { v } else { -v }).collect()
            })
            .collect();
        let f = CnfFormula::new(n, clauses).unwrap();
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

/// Endpoints of both curves shifted by `k * delta` for `|k| <= reach`.
pub fn shifted_endpoints(u: &UncertainCurve, v: &UncertainCurve, delta: &Scalar, reach: i64) -> Vec<Scalar> {
    let mut out = Vec::new();
    for e in u.endpoints().into_iter().chain(v.endpoints()) {
        for k in -reach..=reach {
            out.push(&e + &(delta * &Scalar::from(k)));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Interval instance in the style of the region tests: endpoints are
/// halves in `[-3, 3]`.
pub fn random_halves(rng: &mut ChaCha8Rng, m: usize, n: usize, p: f64) -> (UncertainCurve, UncertainCurve) {
    let draw = |r: &mut ChaCha8Rng| half(r.gen_range(-6..=6));
    let u = random_uncertain(rng, m, p, draw);
    let v = random_uncertain(rng, n, p, draw);
    (u, v)
}

/// Tiny curves: up to three vertices, at most two of them intervals, all
/// endpoints in {-2, ..., 2}.
pub fn tiny(rng: &mut ChaCha8Rng) -> UncertainCurve {
    let len = rng.gen_range(1..=3);
    let mut intervals = 0;
    let pts = (0..len)
        .map(|_| {
            let a = rng.gen_range(-2i64..=2);
            if intervals < 2 && rng.gen_bool(0.6) {
                intervals += 1;
                let b = rng.gen_range(-2i64..=2);
                UncertainPoint::interval(Scalar::from(a.min(b)), Scalar::from(a.max(b))).unwrap()
            } else {
                UncertainPoint::precise(Scalar::from(a))
            }
        })
        .collect();
    UncertainCurve::new(pts).unwrap()
}

/// Smallest candidate threshold at which realisation enumeration over the
/// shifted-endpoint grid finds a pair within it.
pub fn brute_force_weak_value(u: &UncertainCurve, v: &UncertainCurve) -> Scalar {
    let coarse = uncertain_frechet::EnumerationSpec::default();
    let ceiling = uncertain_frechet::oracle::bound_oracle(u, v, uncertain_frechet::Metric::Weak, uncertain_frechet::Side::Lower, &coarse).unwrap();
    for delta in uncertain_frechet::weak::candidate_deltas(u, v).into_iter().filter(|d| *d <= ceiling) {
        let spec = uncertain_frechet::EnumerationSpec::default().with_positions(shifted_endpoints(u, v, &delta, (u.len() + v.len()) as i64));
        if uncertain_frechet::oracle::oracle_decide(u, v, uncertain_frechet::Metric::Weak, uncertain_frechet::Side::Lower, &delta, &spec).unwrap() {
            return delta;
        }
    }
    ceiling
}
