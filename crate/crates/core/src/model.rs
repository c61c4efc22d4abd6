//! Uncertain points, uncertain curves and their precise realisations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One vertex of an uncertain curve: a known value, a closed interval, or a
/// finite set of candidate values.
///
/// Degenerate regions collapse on construction: `Interval(a, a)` and a
/// one-element `Set` both become `Precise`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum UncertainPoint {
    Precise(Scalar),
    Interval(Scalar, Scalar),
    /// Strictly increasing, at least two elements.
    Set(Vec<Scalar>),
}

impl UncertainPoint {
    pub fn precise(x: Scalar) -> Self {
        UncertainPoint::Precise(x)
    }

    pub fn interval(lo: Scalar, hi: Scalar) -> Result<Self> {
        match lo.cmp(&hi) {
            std::cmp::Ordering::Greater => Err(Error::InvertedInterval { lo, hi }),
            std::cmp::Ordering::Equal => Ok(UncertainPoint::Precise(lo)),
            std::cmp::Ordering::Less => Ok(UncertainPoint::Interval(lo, hi)),
        }
    }

    /// Builds a set region; input order and duplicates do not matter.
    pub fn set(xs: impl IntoIterator<Item = Scalar>) -> Result<Self> {
        let mut xs: Vec<Scalar> = xs.into_iter().collect();
        xs.sort();
        xs.dedup();
        match xs.len() {
            0 => Err(Error::EmptySet),
            1 => Ok(UncertainPoint::Precise(xs.pop().unwrap())),
            _ => Ok(UncertainPoint::Set(xs)),
        }
    }

    pub fn is_precise(&self) -> bool {
        matches!(self, UncertainPoint::Precise(_))
    }

    pub fn lo(&self) -> &Scalar {
        match self {
            UncertainPoint::Precise(x) => x,
            UncertainPoint::Interval(lo, _) => lo,
            UncertainPoint::Set(xs) => &xs[0],
        }
    }

    pub fn hi(&self) -> &Scalar {
        match self {
            UncertainPoint::Precise(x) => x,
            UncertainPoint::Interval(_, hi) => hi,
            UncertainPoint::Set(xs) => xs.last().unwrap(),
        }
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        match self {
            UncertainPoint::Precise(p) => p == x,
            UncertainPoint::Interval(lo, hi) => lo <= x && x <= hi,
            UncertainPoint::Set(xs) => xs.binary_search(x).is_ok(),
        }
    }

    /// Interval endpoints, set elements, or the single precise value.
    pub fn endpoints(&self) -> Vec<Scalar> {
        match self {
            UncertainPoint::Precise(x) => vec![x.clone()],
            UncertainPoint::Interval(lo, hi) => vec![lo.clone(), hi.clone()],
            UncertainPoint::Set(xs) => xs.clone(),
        }
    }

    /// Smallest interval containing the region.
    pub fn hull(&self) -> UncertainPoint {
        match self {
            UncertainPoint::Set(xs) => {
                UncertainPoint::Interval(xs[0].clone(), xs.last().unwrap().clone())
            }
            other => other.clone(),
        }
    }

    /// Distance from `x` to the nearest point of the region.
    pub fn dist_to(&self, x: &Scalar) -> Scalar {
        match self {
            UncertainPoint::Precise(p) => p.dist(x),
            UncertainPoint::Interval(lo, hi) => {
                if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    Scalar::zero()
                }
            }
            UncertainPoint::Set(xs) => xs.iter().map(|p| p.dist(x)).min().unwrap(),
        }
    }
}

impl fmt::Display for UncertainPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UncertainPoint::Precise(x) => write!(f, "{x}"),
            UncertainPoint::Interval(lo, hi) => write!(f, "[{lo}, {hi}]"),
            UncertainPoint::Set(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

/// A precise 1D polygonal curve, given by its vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyCurve {
    vertices: Vec<Scalar>,
}

impl PolyCurve {
    pub fn new(vertices: Vec<Scalar>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyCurve);
        }
        Ok(PolyCurve { vertices })
    }

    /// Convenience constructor from integers. Panics on an empty slice.
    pub fn from_ints(xs: &[i64]) -> Self {
        PolyCurve::new(xs.iter().map(|&x| Scalar::from_integer(x)).collect())
            .expect("nonempty vertex list")
    }

    /// Parses each literal with [`crate::scalar::sc`]. Panics on bad input.
    pub fn from_strs(xs: &[&str]) -> Self {
        PolyCurve::new(xs.iter().map(|x| crate::scalar::sc(x)).collect())
            .expect("nonempty vertex list")
    }

    pub fn vertices(&self) -> &[Scalar] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Scalar> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Always false; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> &Scalar {
        &self.vertices[0]
    }

    pub fn last(&self) -> &Scalar {
        self.vertices.last().unwrap()
    }

    pub fn reverse(&self) -> PolyCurve {
        let mut v = self.vertices.clone();
        v.reverse();
        PolyCurve { vertices: v }
    }

    /// The image `[min, max]` of the curve.
    pub fn image(&self) -> (Scalar, Scalar) {
        let lo = self.vertices.iter().min().unwrap().clone();
        let hi = self.vertices.iter().max().unwrap().clone();
        (lo, hi)
    }

    /// The alternating sequence of record minima and maxima.
    ///
    /// A vertex survives the first pass if it lies strictly outside the image
    /// of everything before it. The second pass keeps the first and last
    /// survivors and every survivor whose kind (new maximum or new minimum)
    /// differs from the next survivor's.
    pub fn growing_curve(&self) -> PolyCurve {
        let mut kept: Vec<(Scalar, Option<bool>)> = vec![(self.vertices[0].clone(), None)];
        let (mut lo, mut hi) = (self.vertices[0].clone(), self.vertices[0].clone());
        for v in &self.vertices[1..] {
            if *v > hi {
                hi = v.clone();
                kept.push((v.clone(), Some(true)));
            } else if *v < lo {
                lo = v.clone();
                kept.push((v.clone(), Some(false)));
            }
        }
        let n = kept.len();
        let out = (0..n)
            .filter(|&k| k == 0 || k + 1 == n || kept[k].1 != kept[k + 1].1)
            .map(|k| kept[k].0.clone())
            .collect();
        PolyCurve { vertices: out }
    }

    /// Vertices `i..=j`, 1-based.
    pub fn subcurve(&self, i: usize, j: usize) -> Result<PolyCurve> {
        let len = self.len();
        if i < 1 || i > j || j > len {
            return Err(Error::IndexOutOfRange { i, j, len });
        }
        Ok(PolyCurve {
            vertices: self.vertices[i - 1..j].to_vec(),
        })
    }

    pub fn concat(&self, other: &PolyCurve) -> PolyCurve {
        let mut v = self.vertices.clone();
        v.extend_from_slice(&other.vertices);
        PolyCurve { vertices: v }
    }

    pub fn is_realisation_of(&self, u: &UncertainCurve) -> bool {
        is_realisation(self, u)
    }
}

impl fmt::Display for PolyCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|x| x.to_string()).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

/// True iff `c` has the same length as `u` and every vertex lies in its region.
pub fn is_realisation(c: &PolyCurve, u: &UncertainCurve) -> bool {
    c.len() == u.len() && c.vertices.iter().zip(&u.points).all(|(x, p)| p.contains(x))
}

/// A sequence of uncertain points with an optional label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UncertainCurve {
    points: Vec<UncertainPoint>,
    name: Option<String>,
}

impl UncertainCurve {
    pub fn new(points: Vec<UncertainPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCurve);
        }
        Ok(UncertainCurve { points, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Wraps every vertex as a precise point.
    pub fn from_precise(c: &PolyCurve) -> Self {
        UncertainCurve {
            points: c.vertices.iter().cloned().map(UncertainPoint::Precise).collect(),
            name: None,
        }
    }

    pub fn points(&self) -> &[UncertainPoint] {
        &self.points
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_precise(&self) -> bool {
        self.points.iter().all(UncertainPoint::is_precise)
    }

    pub fn has_sets(&self) -> bool {
        self.points.iter().any(|p| matches!(p, UncertainPoint::Set(_)))
    }

    /// The unique realisation of an all-precise curve.
    pub fn to_precise(&self) -> Result<PolyCurve> {
        self.points
            .iter()
            .enumerate()
            .map(|(index, p)| match p {
                UncertainPoint::Precise(x) => Ok(x.clone()),
                _ => Err(Error::NotPrecise { index: index + 1 }),
            })
            .collect::<Result<Vec<_>>>()
            .map(|vertices| PolyCurve { vertices })
    }

    pub fn reverse(&self) -> UncertainCurve {
        let mut points = self.points.clone();
        points.reverse();
        UncertainCurve {
            points,
            name: self.name.clone(),
        }
    }

    pub fn concat(&self, other: &UncertainCurve) -> UncertainCurve {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        UncertainCurve {
            points,
            name: self.name.clone(),
        }
    }

    /// Replaces set vertices by their interval hulls.
    pub fn hull(&self) -> UncertainCurve {
        UncertainCurve {
            points: self.points.iter().map(UncertainPoint::hull).collect(),
            name: self.name.clone(),
        }
    }

    /// Every endpoint of every region, sorted and deduplicated.
    pub fn endpoints(&self) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = self.points.iter().flat_map(|p| p.endpoints()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CurveFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.dimension != 1 {
            return Err(Error::Parse(format!(
                "expected a 1-dimensional curve, got dimension {}",
                file.dimension
            )));
        }
        let points = file
            .points
            .into_iter()
            .map(|p| match p {
                RawPoint::Precise { x } => Ok(UncertainPoint::Precise(x)),
                RawPoint::Interval { lo, hi } => UncertainPoint::interval(lo, hi),
                RawPoint::Set { xs } => UncertainPoint::set(xs),
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        let mut c = UncertainCurve::new(points).map_err(|e| Error::Parse(e.to_string()))?;
        c.name = file.name;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        let file = CurveFile {
            dimension: 1,
            name: self.name.clone(),
            points: self
                .points
                .iter()
                .map(|p| match p {
                    UncertainPoint::Precise(x) => RawPoint::Precise { x: x.clone() },
                    UncertainPoint::Interval(lo, hi) => RawPoint::Interval {
                        lo: lo.clone(),
                        hi: hi.clone(),
                    },
                    UncertainPoint::Set(xs) => RawPoint::Set { xs: xs.clone() },
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("curve serialization cannot fail")
    }
}

impl fmt::Display for UncertainCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.points.iter().map(|x| x.to_string()).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

impl From<&PolyCurve> for UncertainCurve {
    fn from(c: &PolyCurve) -> Self {
        UncertainCurve::from_precise(c)
    }
}

#[derive(Serialize, Deserialize)]
struct CurveFile {
    dimension: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    points: Vec<RawPoint>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawPoint {
    Precise { x: Scalar },
    Interval { lo: Scalar, hi: Scalar },
    Set { xs: Vec<Scalar> },
}
