//! Filtered simplicial complexes and persistent homology over Z/2.
//!
//! [`realize`] turns a finite diagram into a disjoint union of filled
//! triangles: the boundary of the i-th triangle enters at the birth of the
//! i-th point and the 2-cell at its death, so degree-one persistence returns
//! the diagram.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::error::{Error, Result};

pub type Vertex = u64;

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<Vertex>,
    value: f64,
}

impl Simplex {
    /// Vertices are sorted; repeated vertices and non-finite values are
    /// rejected.
    pub fn new(mut vertices: Vec<Vertex>, value: f64) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Filtration("simplex without vertices".into()));
        }
        if !value.is_finite() {
            return Err(Error::Filtration(format!("non-finite value {value}")));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Filtration(format!("repeated vertex in {vertices:?}")));
        }
        Ok(Self { vertices, value })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    fn facets(&self) -> impl Iterator<Item = Vec<Vertex>> + '_ {
        let k = self.vertices.len();
        (0..k).filter(move |_| k > 1).map(move |skip| {
            self.vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect()
        })
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(Vertex::to_string).collect();
        write!(f, "{} @ {}", vs.join(" "), self.value)
    }
}

/// A simplicial complex closed under faces, with values nondecreasing along
/// face inclusions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilteredComplex {
    simplices: Vec<Simplex>,
}

impl FilteredComplex {
    pub fn new(simplices: Vec<Simplex>) -> Result<Self> {
        let mut values: HashMap<&[Vertex], f64> = HashMap::with_capacity(simplices.len());
        for s in &simplices {
            if values.insert(s.vertices(), s.value).is_some() {
                return Err(Error::Filtration(format!("duplicate simplex {:?}", s.vertices)));
            }
        }
        for s in &simplices {
            for facet in s.facets() {
                match values.get(facet.as_slice()) {
                    None => {
                        return Err(Error::Filtration(format!(
                            "face {facet:?} of coface {:?} is missing",
                            s.vertices
                        )))
                    }
                    Some(&v) if v > s.value => {
                        return Err(Error::Filtration(format!(
                            "face {facet:?} enters at {v} after its coface {:?} at {}",
                            s.vertices, s.value
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(Self { simplices })
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Simplices in filtration order: by value, then dimension, then
    /// lexicographically by vertices.
    pub fn sorted(&self) -> Vec<&Simplex> {
        let mut order: Vec<&Simplex> = self.simplices.iter().collect();
        order.sort_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then(a.dimension().cmp(&b.dimension()))
                .then_with(|| a.vertices.cmp(&b.vertices))
        });
        order
    }

    /// One simplex per line as `v1 v2 ... vk @ value`.
    pub fn to_text(&self) -> String {
        self.simplices.iter().map(|s| format!("{s}\n")).collect()
    }

    /// Parses the format written by [`Self::to_text`]. Blank lines and `#`
    /// comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut simplices = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line, message };
            let (verts, value) = trimmed
                .split_once('@')
                .ok_or_else(|| parse_err("expected 'v1 ... vk @ value'".into()))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("invalid value {:?}", value.trim())))?;
            let vertices = verts
                .split_whitespace()
                .map(|v| v.parse::<Vertex>().map_err(|_| parse_err(format!("invalid vertex {v:?}"))))
                .collect::<Result<Vec<_>>>()?;
            simplices.push(Simplex::new(vertices, value).map_err(|e| parse_err(e.to_string()))?);
        }
        Self::new(simplices)
    }
}

impl std::str::FromStr for FilteredComplex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
    pub dimension: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssentialClass {
    pub birth: f64,
    pub dimension: usize,
}

/// Finite pairs with positive length, and classes that never die.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PersistencePairs {
    pub pairs: Vec<PersistencePair>,
    pub essential: Vec<EssentialClass>,
}

impl PersistencePairs {
    /// Finite pairs of the given dimension as a diagram.
    pub fn diagram(&self, dimension: usize) -> PersistenceDiagram {
        let points = self
            .pairs
            .iter()
            .filter(|p| p.dimension == dimension)
            .map(|p| DiagramPoint::new(p.birth, p.death).expect("pairs have birth < death"))
            .collect();
        PersistenceDiagram::new(points)
    }

    /// Births of essential classes of the given dimension, sorted.
    pub fn essential_births(&self, dimension: usize) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .essential
            .iter()
            .filter(|e| e.dimension == dimension)
            .map(|e| e.birth)
            .collect();
        b.sort_by(f64::total_cmp);
        b
    }
}

/// Standard column reduction of the Z/2 boundary matrix.
pub fn persistence(complex: &FilteredComplex) -> PersistencePairs {
    let order = complex.sorted();
    let index: HashMap<&[Vertex], usize> = order
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices(), i))
        .collect();

    // Columns as sorted row-index lists; Z/2 addition is symmetric difference.
    let mut columns: Vec<Vec<usize>> = order
        .iter()
        .map(|s| {
            let mut col: Vec<usize> = s.facets().map(|f| index[f.as_slice()]).collect();
            col.sort_unstable();
            col
        })
        .collect();

    let mut owner_of_low: HashMap<usize, usize> = HashMap::new();
    let mut paired: HashSet<usize> = HashSet::new();
    let mut result = PersistencePairs::default();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match owner_of_low.get(&low) {
                Some(&k) => {
                    let other = std::mem::take(&mut columns[k]);
                    columns[j] = symmetric_difference(&columns[j], &other);
                    columns[k] = other;
                }
                None => break,
            }
        }
        if let Some(&low) = columns[j].last() {
            owner_of_low.insert(low, j);
            paired.insert(low);
            paired.insert(j);
            let (birth, death) = (order[low].value, order[j].value);
            if birth < death {
                result.pairs.push(PersistencePair {
                    birth,
                    death,
                    dimension: order[low].dimension(),
                });
            }
        }
    }
    for (j, s) in order.iter().enumerate() {
        if columns[j].is_empty() && !paired.contains(&j) {
            result.essential.push(EssentialClass {
                birth: s.value,
                dimension: s.dimension(),
            });
        }
    }
    result
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Vertex id of role `role` (0, 1, 2 for a, b, c) in triangle block `block`.
pub fn block_vertex(block: usize, role: u8) -> Vertex {
    3 * block as Vertex + role as Vertex
}

/// One triangle per diagram point: vertices and edges at the birth, the
/// 2-cell at the death. Duplicate points give distinct blocks.
pub fn realize(diagram: &PersistenceDiagram) -> FilteredComplex {
    let mut simplices = Vec::with_capacity(7 * diagram.len());
    for (i, p) in diagram.points().iter().enumerate() {
        let [a, b, c] = [0, 1, 2].map(|r| block_vertex(i, r));
        let (x, y) = (p.birth(), p.death());
        for vs in [vec![a], vec![b], vec![c], vec![a, b], vec![a, c], vec![b, c]] {
            simplices.push(Simplex::new(vs, x).expect("distinct vertices"));
        }
        simplices.push(Simplex::new(vec![a, b, c], y).expect("distinct vertices"));
    }
    FilteredComplex::new(simplices).expect("triangle blocks form a valid filtration")
}

/// Whether degree-one persistence of [`realize`]`(diagram)` equals `diagram`.
pub fn roundtrip_check(diagram: &PersistenceDiagram) -> bool {
    persistence(&realize(diagram)).diagram(1) == *diagram
}
