//! Finite persistence diagrams, partial matchings and their costs.
//!
//! A diagram is a finite multiset of points `(x, y)` with `x < y`. Two
//! diagrams are compared through partial matchings: matched pairs pay their
//! `l∞` distance, unmatched points pay their `l∞` distance to the diagonal.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point strictly above the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagramPoint {
    x: f64,
    y: f64,
}

impl DiagramPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidPoint {
                x,
                y,
                reason: "coordinates must be finite",
            });
        }
        if x >= y {
            return Err(Error::InvalidPoint {
                x,
                y,
                reason: "birth must be less than death",
            });
        }
        Ok(Self { x, y })
    }

    #[inline]
    pub fn birth(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn death(&self) -> f64 {
        self.y
    }

    fn cmp_lex(&self, other: &Self) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl From<DiagramPoint> for [f64; 2] {
    fn from(p: DiagramPoint) -> Self {
        [p.x, p.y]
    }
}

impl<'de> Deserialize<'de> for DiagramPoint {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            x: f64,
            y: f64,
        }
        let raw = Raw::deserialize(de)?;
        DiagramPoint::new(raw.x, raw.y).map_err(serde::de::Error::custom)
    }
}

/// `l∞` distance between two points of the plane.
pub fn chebyshev(a: impl Into<[f64; 2]>, b: impl Into<[f64; 2]>) -> f64 {
    let (a, b) = (a.into(), b.into());
    (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
}

/// `l∞` distance from a point to the diagonal, `(y - x) / 2`.
pub fn diagonal_distance(a: DiagramPoint) -> f64 {
    (a.y - a.x) / 2.0
}

/// A finite persistence diagram in canonical (lexicographically sorted) form.
///
/// Duplicate points are kept; the index of a point is its position in the
/// sorted list.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DiagramPoint>", into = "Vec<DiagramPoint>")]
pub struct PersistenceDiagram {
    points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(mut points: Vec<DiagramPoint>) -> Self {
        points.sort_by(DiagramPoint::cmp_lex);
        Self { points }
    }

    /// Builds a diagram from raw `(birth, death)` pairs, validating each one.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let points = pairs
            .into_iter()
            .map(|(x, y)| DiagramPoint::new(x, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(points))
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<DiagramPoint> {
        self.points.get(index).copied()
    }

    /// Parses the whitespace separated `birth death` text format. Lines
    /// starting with `#` and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected two numbers, found {}", fields.len()),
                });
            }
            let x = parse_coordinate(fields[0], line)?;
            let y = parse_coordinate(fields[1], line)?;
            if x >= y {
                return Err(Error::Parse {
                    line,
                    message: format!("birth {x} is not less than death {y}"),
                });
            }
            points.push(DiagramPoint { x, y });
        }
        Ok(Self::new(points))
    }

    /// Renders the diagram in the text format accepted by [`Self::parse`].
    /// Coordinates use the shortest representation that parses back exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&format!("{} {}\n", p.x, p.y));
        }
        out
    }
}

fn parse_coordinate(field: &str, line: usize) -> Result<f64> {
    let value: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid number {field:?}"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("non-finite coordinate {field:?}"),
        });
    }
    Ok(value)
}

impl FromStr for PersistenceDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl TryFrom<Vec<DiagramPoint>> for PersistenceDiagram {
    type Error = Error;

    fn try_from(points: Vec<DiagramPoint>) -> Result<Self> {
        Ok(Self::new(points))
    }
}

impl From<PersistenceDiagram> for Vec<DiagramPoint> {
    fn from(d: PersistenceDiagram) -> Self {
        d.points
    }
}

/// Exponent of a Wasserstein-type cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Finite(f64),
    Infinity,
}

impl Order {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            Err(Error::InvalidOrder(p))
        } else if p.is_infinite() {
            Ok(Order::Infinity)
        } else {
            Ok(Order::Finite(p))
        }
    }

    /// Combines non-negative terms into an `lp` norm (or their maximum).
    pub(crate) fn combine<I: IntoIterator<Item = f64>>(self, terms: I) -> f64 {
        match self {
            Order::Infinity => terms.into_iter().fold(0.0, f64::max),
            Order::Finite(1.0) => terms.into_iter().sum(),
            Order::Finite(p) => terms.into_iter().map(|t| t.powf(p)).sum::<f64>().powf(p.recip()),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(p) => write!(f, "{p}"),
            Order::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Order::Infinity),
            other => {
                let p: f64 = other.parse().map_err(|_| Error::InvalidOrder(f64::NAN))?;
                Order::new(p)
            }
        }
    }
}

/// Non-negative, possibly infinite, cost of a partial matching.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Cost(f64);

impl Cost {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

/// A bijection between a subset of the indices of one diagram and a subset
/// of the indices of another, stored as pairs sorted by left index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialMatching {
    pairs: Vec<(usize, usize)>,
}

impl PartialMatching {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Matches index `k` with index `k` for `k < n`.
    pub fn identity(n: usize) -> Self {
        Self {
            pairs: (0..n).map(|k| (k, k)).collect(),
        }
    }

    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::NotBijection { index: w[0].0 });
            }
        }
        let mut rights: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        rights.sort_unstable();
        for w in rights.windows(2) {
            if w[0] == w[1] {
                return Err(Error::NotBijection { index: w[0] });
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn left_matched(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn right_matched(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.pairs.iter().map(|p| p.1).collect();
        r.sort_unstable();
        r
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Cost of a partial matching: the `lp` combination (or maximum, for
/// `p = ∞`) of matched `l∞` distances and unmatched diagonal distances.
pub fn matching_cost(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    matching: &PartialMatching,
    order: Order,
) -> Result<Cost> {
    let mut left_used = vec![false; d1.len()];
    let mut right_used = vec![false; d2.len()];
    let mut terms = Vec::with_capacity(d1.len() + d2.len());
    for &(i, j) in matching.pairs() {
        let (a, b) = match (d1.get(i), d2.get(j)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::MissingIndex),
        };
        left_used[i] = true;
        right_used[j] = true;
        terms.push(chebyshev(a, b));
    }
    terms.extend(
        d1.points()
            .iter()
            .zip(&left_used)
            .filter(|(_, used)| !**used)
            .map(|(p, _)| diagonal_distance(*p)),
    );
    terms.extend(
        d2.points()
            .iter()
            .zip(&right_used)
            .filter(|(_, used)| !**used)
            .map(|(p, _)| diagonal_distance(*p)),
    );
    Ok(Cost(order.combine(terms)))
}
