//! Finite semi-metric spaces.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// The first axiom a candidate distance matrix violates.
#[derive(Debug, Clone, PartialEq)]
pub enum AxiomViolation {
    NotSquare { rows: usize, cols: usize },
    LabelCount { labels: usize, points: usize },
    NonFinite { i: usize, j: usize },
    Negative { i: usize, j: usize, value: f64 },
    NonzeroDiagonal { i: usize, value: f64 },
    Asymmetric { i: usize, j: usize },
    NotPositive { i: usize, j: usize },
    Triangle { i: usize, j: usize, k: usize },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AxiomViolation::*;
        match *self {
            NotSquare { rows, cols } => write!(f, "distance matrix is {rows}x{cols}, not square"),
            LabelCount { labels, points } => {
                write!(f, "{labels} labels given for {points} points")
            }
            NonFinite { i, j } => write!(f, "d({i}, {j}) is not finite"),
            Negative { i, j, value } => write!(f, "d({i}, {j}) = {value} is negative"),
            NonzeroDiagonal { i, value } => write!(f, "d({i}, {i}) = {value} is not zero"),
            Asymmetric { i, j } => write!(f, "d({i}, {j}) != d({j}, {i})"),
            NotPositive { i, j } => write!(f, "d({i}, {j}) = 0 for distinct points"),
            Triangle { i, j, k } => {
                write!(f, "triangle inequality fails: d({i}, {k}) > d({i}, {j}) + d({j}, {k})")
            }
        }
    }
}

impl std::error::Error for AxiomViolation {}

/// Point labels with a symmetric, non-negative distance matrix that vanishes
/// on the diagonal. The triangle inequality is not assumed; see
/// [`FiniteMetricSpace::check_metric`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: DMatrix<f64>,
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist: DMatrix<f64>) -> Result<Self> {
        validate_semi_metric(&labels, &dist)?;
        Ok(Self { labels, dist })
    }

    /// Like [`Self::new`], additionally requiring positivity off the diagonal
    /// and the triangle inequality.
    pub fn new_metric(labels: Vec<String>, dist: DMatrix<f64>) -> Result<Self> {
        let space = Self::new(labels, dist)?;
        space.check_metric()?;
        Ok(space)
    }

    /// Builds a space from rows with default labels `x1, x2, ...`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(AxiomViolation::NotSquare { rows: n, cols: bad.len() }.into());
        }
        let dist = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(default_labels(n), dist)
    }

    /// Builds a space from a distance function on `0..n`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::new(default_labels(n), DMatrix::from_fn(n, n, f))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.dist
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[(i, j)]
    }

    /// Largest pairwise distance; zero for spaces with fewer than two points.
    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(AxiomViolation::LabelCount {
                labels: labels.len(),
                points: self.len(),
            }
            .into());
        }
        self.labels = labels;
        Ok(self)
    }

    /// Applies `f` to every off-diagonal distance.
    pub fn map_distances(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = self.len();
        let dist = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { f(self.dist[(i, j)]) });
        Self::new(self.labels.clone(), dist)
    }

    /// Sub-space on the given indices, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange { index: i, len: self.len() });
            }
        }
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        let k = indices.len();
        let dist = DMatrix::from_fn(k, k, |a, b| self.dist[(indices[a], indices[b])]);
        Ok(Self { labels, dist })
    }

    /// Checks positivity and the triangle inequality, reporting the first
    /// violation in row-major order. The triangle inequality is tested with a
    /// relative slack of `1e-12` times the diameter.
    pub fn check_metric(&self) -> std::result::Result<(), AxiomViolation> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.dist[(i, j)] == 0.0 {
                    return Err(AxiomViolation::NotPositive { i, j });
                }
            }
        }
        let slack = 1e-12 * self.diameter();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.dist[(i, k)] > self.dist[(i, j)] + self.dist[(j, k)] + slack {
                        return Err(AxiomViolation::Triangle { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Parses a comma separated square matrix, one row per line, with an
    /// optional first line of labels. Blank lines and `#` comments are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut labels: Option<Vec<String>> = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            let parsed: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if rows.is_empty() && labels.is_none() => {
                    labels = Some(fields.iter().map(|s| s.to_string()).collect());
                }
                Err(_) => {
                    return Err(Error::Parse {
                        line,
                        message: format!("invalid number in row {trimmed:?}"),
                    })
                }
            }
        }
        let space = Self::from_rows(&rows)?;
        match labels {
            Some(labels) => space.with_labels(labels),
            None => Ok(space),
        }
    }

    /// Renders the space as CSV with a label header. Values use the shortest
    /// representation that parses back exactly.
    pub fn to_csv(&self) -> String {
        let mut out = self.labels.join(",");
        out.push('\n');
        for i in 0..self.len() {
            let row: Vec<String> = (0..self.len()).map(|j| format!("{}", self.dist[(i, j)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn validate_semi_metric(labels: &[String], dist: &DMatrix<f64>) -> std::result::Result<(), AxiomViolation> {
    let (rows, cols) = dist.shape();
    if rows != cols {
        return Err(AxiomViolation::NotSquare { rows, cols });
    }
    if labels.len() != rows {
        return Err(AxiomViolation::LabelCount { labels: labels.len(), points: rows });
    }
    for i in 0..rows {
        for j in 0..rows {
            let v = dist[(i, j)];
            if !v.is_finite() {
                return Err(AxiomViolation::NonFinite { i, j });
            }
            if v < 0.0 {
                return Err(AxiomViolation::Negative { i, j, value: v });
            }
        }
    }
    for i in 0..rows {
        if dist[(i, i)] != 0.0 {
            return Err(AxiomViolation::NonzeroDiagonal { i, value: dist[(i, i)] });
        }
    }
    for i in 0..rows {
        for j in (i + 1)..rows {
            if dist[(i, j)] != dist[(j, i)] {
                return Err(AxiomViolation::Asymmetric { i, j });
            }
        }
    }
    Ok(())
}

/// `n` collinear points `0, 1, ..., n-1` on the real line.
pub fn line(n: usize) -> FiniteMetricSpace {
    FiniteMetricSpace::from_fn(n, |i, j| (i as f64 - j as f64).abs())
        .expect("line distances form a metric")
}

/// Three points with `d(x1,x2) = 0.3`, `d(x2,x3) = 0.5`, `d(x1,x3) = 0.8`.
pub fn three_point() -> FiniteMetricSpace {
    FiniteMetricSpace::from_rows(&[
        vec![0.0, 0.3, 0.8],
        vec![0.3, 0.0, 0.5],
        vec![0.8, 0.5, 0.0],
    ])
    .expect("valid metric")
}
