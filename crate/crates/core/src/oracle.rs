//! Brute-force bounds by enumerating realisations.
//!
//! Interval vertices are discretised: every interval contributes equally
//! spaced samples (always including both endpoints) plus any caller-supplied
//! positions that fall inside it. Set and precise vertices are enumerated
//! exactly.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{PolyCurve, UncertainCurve, UncertainPoint};
use crate::precise::Metric;
use crate::scalar::Scalar;

/// Default bound on the number of enumerated realisation pairs.
pub const DEFAULT_CAP: u128 = 10_000_000;

/// Which extreme of the metric over realisation pairs to report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Lower,
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" | "min" => Ok(Side::Lower),
            "upper" | "max" => Ok(Side::Upper),
            _ => Err(Error::InvalidArgument(format!("unknown side {s:?}"))),
        }
    }
}

/// How to discretise and how much to enumerate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationSpec {
    /// Equally spaced samples per interval, endpoints included.
    pub resolution: usize,
    /// Extra positions, kept for every interval vertex that contains them.
    pub include_positions: Vec<Scalar>,
    pub cap: u128,
}

impl Default for EnumerationSpec {
    fn default() -> Self {
        EnumerationSpec {
            resolution: 2,
            include_positions: Vec::new(),
            cap: DEFAULT_CAP,
        }
    }
}

impl EnumerationSpec {
    pub fn new(resolution: usize) -> Self {
        EnumerationSpec {
            resolution,
            ..Default::default()
        }
    }

    pub fn with_positions(mut self, positions: impl IntoIterator<Item = Scalar>) -> Self {
        self.include_positions.extend(positions);
        self
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidArgument("resolution must be at least 2".into()));
        }
        if self.cap == 0 {
            return Err(Error::InvalidArgument("cap must be positive".into()));
        }
        Ok(())
    }

    /// Sorted candidate values for one vertex.
    pub fn samples(&self, p: &UncertainPoint) -> Vec<Scalar> {
        match p {
            UncertainPoint::Precise(x) => vec![x.clone()],
            UncertainPoint::Set(xs) => xs.clone(),
            UncertainPoint::Interval(lo, hi) => {
                let steps = Scalar::from_integer(self.resolution as i64 - 1);
                let width = hi - lo;
                let mut out: Vec<Scalar> = (0..self.resolution)
                    .map(|k| lo + &(&(&width * &Scalar::from_integer(k as i64)) / &steps))
                    .collect();
                out.extend(self.include_positions.iter().filter(|x| p.contains(x)).cloned());
                out.sort();
                out.dedup();
                out
            }
        }
    }
}

/// Lexicographic stream over the Cartesian product of per-vertex samples.
#[derive(Clone, Debug)]
pub struct Realisations {
    samples: Vec<Vec<Scalar>>,
    odometer: Option<Vec<usize>>,
}

impl Iterator for Realisations {
    type Item = PolyCurve;

    fn next(&mut self) -> Option<PolyCurve> {
        let idx = self.odometer.as_mut()?;
        let curve = PolyCurve::new(
            idx.iter()
                .zip(&self.samples)
                .map(|(&k, s)| s[k].clone())
                .collect(),
        )
        .expect("curves are nonempty");
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                self.odometer = None;
                break;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < self.samples[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
        Some(curve)
    }
}

fn count(samples: &[Vec<Scalar>]) -> u128 {
    samples
        .iter()
        .try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128))
        .unwrap_or(u128::MAX)
}

fn sample_all(u: &UncertainCurve, spec: &EnumerationSpec) -> Vec<Vec<Scalar>> {
    u.points().iter().map(|p| spec.samples(p)).collect()
}

/// Number of realisations [`enumerate_realisations`] would produce.
pub fn realisation_count(u: &UncertainCurve, spec: &EnumerationSpec) -> u128 {
    count(&sample_all(u, spec))
}

pub fn enumerate_realisations(u: &UncertainCurve, spec: &EnumerationSpec) -> Result<Realisations> {
    spec.validate()?;
    let samples = sample_all(u, spec);
    let needed = count(&samples);
    if needed > spec.cap {
        return Err(Error::CapExceeded {
            needed,
            cap: spec.cap,
        });
    }
    Ok(Realisations {
        odometer: Some(vec![0; samples.len()]),
        samples,
    })
}

/// The extreme value together with a realisation pair attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub value: Scalar,
    pub witness: (PolyCurve, PolyCurve),
    pub pairs: u128,
}

fn both(u: &UncertainCurve, v: &UncertainCurve, spec: &EnumerationSpec) -> Result<(Vec<PolyCurve>, Vec<Vec<Scalar>>, u128)> {
    spec.validate()?;
    let su = sample_all(u, spec);
    let sv = sample_all(v, spec);
    let needed = count(&su).saturating_mul(count(&sv));
    if needed > spec.cap {
        return Err(Error::CapExceeded {
            needed,
            cap: spec.cap,
        });
    }
    let firsts: Vec<PolyCurve> = Realisations {
        odometer: Some(vec![0; su.len()]),
        samples: su,
    }
    .collect();
    Ok((firsts, sv, needed))
}

fn seconds(sv: &[Vec<Scalar>]) -> Realisations {
    Realisations {
        odometer: Some(vec![0; sv.len()]),
        samples: sv.to_vec(),
    }
}

/// Minimum or maximum of `metric` over all enumerated realisation pairs.
///
/// Ties are broken towards the lexicographically first pair, so the result
/// does not depend on the evaluation order.
pub fn bound_oracle_full(
    u: &UncertainCurve,
    v: &UncertainCurve,
    metric: Metric,
    side: Side,
    spec: &EnumerationSpec,
) -> Result<OracleResult> {
    let (firsts, sv, pairs) = both(u, v, spec)?;
    let better = |a: &(Scalar, usize, usize), b: &(Scalar, usize, usize)| match side {
        Side::Lower => (&a.0, a.1, a.2) < (&b.0, b.1, b.2),
        Side::Upper => a.0 > b.0 || (a.0 == b.0 && (a.1, a.2) < (b.1, b.2)),
    };
    let best = firsts
        .par_iter()
        .enumerate()
        .map(|(a, p)| {
            let mut best: Option<(Scalar, usize, usize)> = None;
            for (b, q) in seconds(&sv).enumerate() {
                let cand = (metric.eval(p, &q), a, b);
                if best.as_ref().is_none_or(|cur| better(&cand, cur)) {
                    best = Some(cand);
                }
            }
            best.expect("nonempty enumeration")
        })
        .reduce_with(|x, y| if better(&y, &x) { y } else { x })
        .expect("nonempty enumeration");
    let q = seconds(&sv).nth(best.2).expect("index in range");
    Ok(OracleResult {
        value: best.0,
        witness: (firsts[best.1].clone(), q),
        pairs,
    })
}

pub fn bound_oracle(
    u: &UncertainCurve,
    v: &UncertainCurve,
    metric: Metric,
    side: Side,
    spec: &EnumerationSpec,
) -> Result<Scalar> {
    Ok(bound_oracle_full(u, v, metric, side, spec)?.value)
}

/// Whether the chosen bound is at most `delta`, stopping at the first
/// deciding pair.
pub fn oracle_decide(
    u: &UncertainCurve,
    v: &UncertainCurve,
    metric: Metric,
    side: Side,
    delta: &Scalar,
    spec: &EnumerationSpec,
) -> Result<bool> {
    let (firsts, sv, _) = both(u, v, spec)?;
    Ok(match side {
        Side::Lower => firsts
            .par_iter()
            .any(|p| seconds(&sv).any(|q| metric.at_most(p, &q, delta))),
        Side::Upper => firsts
            .par_iter()
            .all(|p| seconds(&sv).all(|q| metric.at_most(p, &q, delta))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precise::Adjacency;
    use crate::scalar::sc;

    fn curve(ps: Vec<UncertainPoint>) -> UncertainCurve {
        UncertainCurve::new(ps).unwrap()
    }

    fn pr(x: &str) -> UncertainPoint {
        UncertainPoint::precise(sc(x))
    }

    #[test]
    fn enumeration_examples() {
        let u = curve(vec![
            UncertainPoint::set([sc("-1.5"), sc("0")]).unwrap(),
            pr("2.5"),
        ]);
        let all: Vec<_> = enumerate_realisations(&u, &EnumerationSpec::default()).unwrap().collect();
        assert_eq!(all, vec![PolyCurve::from_strs(&["-1.5", "2.5"]), PolyCurve::from_strs(&["0", "2.5"])]);

        let w = curve(vec![UncertainPoint::interval(sc("0"), sc("1")).unwrap()]);
        let all: Vec<_> = enumerate_realisations(&w, &EnumerationSpec::new(3)).unwrap().collect();
        assert_eq!(
            all,
            vec![PolyCurve::from_strs(&["0"]), PolyCurve::from_strs(&["0.5"]), PolyCurve::from_strs(&["1"])]
        );

        let p = curve(vec![pr("1"), pr("2")]);
        assert_eq!(enumerate_realisations(&p, &EnumerationSpec::default()).unwrap().count(), 1);
    }

    #[test]
    fn positions_are_injected_and_deduplicated() {
        let spec = EnumerationSpec::new(3).with_positions([sc("0.25"), sc("0.5"), sc("7")]);
        let p = UncertainPoint::interval(sc("0"), sc("1")).unwrap();
        assert_eq!(spec.samples(&p), vec![sc("0"), sc("0.25"), sc("0.5"), sc("1")]);
    }

    #[test]
    fn cap_is_enforced() {
        let pts = (0..15)
            .map(|_| UncertainPoint::set([sc("0"), sc("1")]).unwrap())
            .collect();
        let u = curve(pts);
        let spec = EnumerationSpec::default().with_cap(10);
        assert_eq!(
            enumerate_realisations(&u, &spec).unwrap_err(),
            Error::CapExceeded { needed: 1 << 15, cap: 10 }
        );
    }

    #[test]
    fn weak_bounds_on_a_set_vertex() {
        let u = curve(vec![UncertainPoint::set([sc("0"), sc("10")]).unwrap()]);
        let v = curve(vec![pr("4")]);
        let spec = EnumerationSpec::default();
        assert_eq!(bound_oracle(&u, &v, Metric::Weak, Side::Lower, &spec).unwrap(), sc("4"));
        assert_eq!(bound_oracle(&u, &v, Metric::Weak, Side::Upper, &spec).unwrap(), sc("6"));
        assert!(oracle_decide(&u, &v, Metric::Weak, Side::Lower, &sc("4"), &spec).unwrap());
        assert!(!oracle_decide(&u, &v, Metric::Weak, Side::Upper, &sc("5"), &spec).unwrap());
        let full = bound_oracle_full(&u, &v, Metric::Frechet, Side::Upper, &spec).unwrap();
        assert_eq!(full.witness.0, PolyCurve::from_strs(&["10"]));
        assert_eq!(full.pairs, 2);
    }

    #[test]
    fn precise_pair_gives_the_metric() {
        let u = curve(vec![pr("0"), pr("3"), pr("1")]);
        let v = curve(vec![pr("1"), pr("2")]);
        let spec = EnumerationSpec::default();
        for m in [
            Metric::Frechet,
            Metric::DiscreteFrechet,
            Metric::Weak,
            Metric::DiscreteWeak(Adjacency::Four),
        ] {
            let want = m.eval(&u.to_precise().unwrap(), &v.to_precise().unwrap());
            for side in [Side::Lower, Side::Upper] {
                assert_eq!(bound_oracle(&u, &v, m, side, &spec).unwrap(), want);
            }
        }
    }
}
