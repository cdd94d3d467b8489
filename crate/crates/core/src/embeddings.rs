//! Isometric embeddings of finite metric spaces into diagrams under the
//! bottleneck distance, and the obstruction families built on them.
//!
//! Point `x` of a space `{x_1, ..., x_n}` is sent to the diagram whose k-th
//! point is `(2c(k-1), 2ck + d(x, x_k))`. For `c` above the diameter, an
//! optimal matching between two images pairs points with equal birth, so the
//! bottleneck distance reproduces `d`, and every image has norm in
//! `[c, 3c/2)`.

use nalgebra::DMatrix;

use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::distance::bottleneck;
use crate::error::{Error, Result};
use crate::space::FiniteMetricSpace;

/// Default cap on the number of points of a cyclic grid.
pub const GRID_CAP: usize = 10_000;

/// Choice of the separation constant `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    /// `1 + diameter`.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    source: FiniteMetricSpace,
    scale: f64,
    images: Vec<PersistenceDiagram>,
}

impl EmbeddingResult {
    /// Assembles a result without checking the embedding invariants, e.g. to
    /// audit diagrams produced elsewhere with [`verify_annulus`].
    pub fn from_parts(source: FiniteMetricSpace, scale: f64, images: Vec<PersistenceDiagram>) -> Self {
        Self { source, scale, images }
    }

    pub fn source(&self) -> &FiniteMetricSpace {
        &self.source
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn images(&self) -> &[PersistenceDiagram] {
        &self.images
    }

    pub fn into_images(self) -> Vec<PersistenceDiagram> {
        self.images
    }

    /// Pairwise bottleneck distances between the images.
    pub fn image_distances(&self) -> DMatrix<f64> {
        pairwise_bottleneck(&self.images)
    }

    /// `w_∞(φ(x_i), φ(x_j)) - d(x_i, x_j)` for every pair.
    pub fn residuals(&self) -> DMatrix<f64> {
        self.image_distances() - self.source.matrix()
    }
}

/// Embeds `space` into diagrams under the bottleneck distance.
pub fn kuratowski_embed(space: &FiniteMetricSpace, scale: Scale) -> Result<EmbeddingResult> {
    let diameter = space.diameter();
    let c = match scale {
        Scale::Auto => 1.0 + diameter,
        Scale::Fixed(c) => c,
    };
    if !(c > diameter) || !c.is_finite() {
        return Err(Error::ScaleTooSmall { scale: c, diameter });
    }
    let n = space.len();
    let images = (0..n)
        .map(|x| {
            let points = (1..=n)
                .map(|k| {
                    let birth = 2.0 * c * (k - 1) as f64;
                    let death = 2.0 * c * k as f64 + space.dist(x, k - 1);
                    DiagramPoint::new(birth, death)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(PersistenceDiagram::new(points))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EmbeddingResult {
        source: space.clone(),
        scale: c,
        images,
    })
}

/// Norm `w_∞(D, ∅)` of one image and whether it lies in `[c, 3c/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusEntry {
    pub norm: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusReport {
    pub scale: f64,
    pub entries: Vec<AnnulusEntry>,
}

impl AnnulusReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

pub fn verify_annulus(result: &EmbeddingResult) -> AnnulusReport {
    let c = result.scale;
    let empty = PersistenceDiagram::empty();
    let entries = result
        .images
        .iter()
        .map(|d| {
            let norm = bottleneck(d, &empty);
            AnnulusEntry {
                norm,
                pass: c <= norm && norm < 1.5 * c,
            }
        })
        .collect();
    AnnulusReport { scale: c, entries }
}

/// Symmetric matrix of bottleneck distances between diagrams.
pub fn pairwise_bottleneck(diagrams: &[PersistenceDiagram]) -> DMatrix<f64> {
    let n = diagrams.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = bottleneck(&diagrams[i], &diagrams[j]);
            m[(i, j)] = d;
            m[(j, i)] = d;
        }
    }
    m
}

/// The diagrams as a semi-metric space under the bottleneck distance.
pub fn bottleneck_space(labels: Vec<String>, diagrams: &[PersistenceDiagram]) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::new(labels, pairwise_bottleneck(diagrams))
}

/// `K_{n,n}`: points `a1..an, b1..bn`, distance 2 within each part and 1
/// across.
pub fn build_knn(n: usize) -> Result<FiniteMetricSpace> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "K_{n,n} needs n >= 2",
        });
    }
    let labels = (1..=n)
        .map(|i| format!("a{i}"))
        .chain((1..=n).map(|i| format!("b{i}")))
        .collect();
    let dist = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i == j {
            0.0
        } else if (i < n) == (j < n) {
            2.0
        } else {
            1.0
        }
    });
    FiniteMetricSpace::new(labels, dist)
}

/// The m-fold product of the cyclic group of order `n` under the maximum of
/// the coordinate-wise circular distances.
pub fn build_torus_grid(n: usize, m: usize) -> Result<FiniteMetricSpace> {
    build_torus_grid_capped(n, m, GRID_CAP)
}

pub fn build_torus_grid_capped(n: usize, m: usize, cap: usize) -> Result<FiniteMetricSpace> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter {
            name: if n == 0 { "n" } else { "m" },
            value: 0.0,
            reason: "grid parameters must be positive",
        });
    }
    let size = u32::try_from(m)
        .ok()
        .and_then(|m| n.checked_pow(m))
        .filter(|&s| s <= cap)
        .ok_or(Error::GridTooLarge { n, m, cap })?;
    let tuples: Vec<Vec<usize>> = (0..size)
        .map(|mut idx| {
            let mut t = vec![0; m];
            for slot in t.iter_mut().rev() {
                *slot = idx % n;
                idx /= n;
            }
            t
        })
        .collect();
    let circular = |k: usize, l: usize| {
        let diff = k.abs_diff(l);
        diff.min(n - diff)
    };
    let dist = DMatrix::from_fn(size, size, |i, j| {
        tuples[i]
            .iter()
            .zip(&tuples[j])
            .map(|(&k, &l)| circular(k, l))
            .max()
            .unwrap_or(0) as f64
    });
    let labels = tuples
        .iter()
        .map(|t| {
            let parts: Vec<String> = t.iter().map(usize::to_string).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    FiniteMetricSpace::new(labels, dist)
}

/// One cyclic grid of a [`UnionSpace`] with its embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionBlock {
    pub n: usize,
    pub m: usize,
    pub embedding: EmbeddingResult,
}

impl UnionBlock {
    pub fn grid(&self) -> &FiniteMetricSpace {
        self.embedding.source()
    }

    pub fn scale(&self) -> f64 {
        self.embedding.scale()
    }
}

/// Disjoint union of cyclic grids, each embedded with its own constant
/// `c_i`, metrized by the bottleneck distance between images.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionSpace {
    blocks: Vec<UnionBlock>,
}

impl UnionSpace {
    pub fn blocks(&self) -> &[UnionBlock] {
        &self.blocks
    }

    pub fn constants(&self) -> Vec<f64> {
        self.blocks.iter().map(UnionBlock::scale).collect()
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.grid().len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distance between point `i` of block `a` and point `j` of block `b`.
    pub fn distance(&self, (a, i): (usize, usize), (b, j): (usize, usize)) -> f64 {
        bottleneck(
            &self.blocks[a].embedding.images()[i],
            &self.blocks[b].embedding.images()[j],
        )
    }
}

/// Sorts `(n, m)` pairs by `n + m` then ascending `n`, sets `c_1 = 1` and
/// `c_i = 4 max(c_{i-1}, n_i + m_i)`, and embeds each grid with its constant.
///
/// `c_1 = 1` requires the first grid to be a single point (`n_1 = 1`). When
/// the first grid has positive diameter, `c_1 = 4 (n_1 + m_1)` instead, the
/// same bound the recursion uses for later blocks.
pub fn build_union_space(pairs: &[(usize, usize)]) -> Result<UnionSpace> {
    let mut sorted = pairs.to_vec();
    sorted.sort_by_key(|&(n, m)| (n + m, n));
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateBlock(w[0].0, w[0].1));
    }
    let mut blocks = Vec::with_capacity(sorted.len());
    let mut prev: Option<f64> = None;
    for (n, m) in sorted {
        let grid = build_torus_grid(n, m)?;
        let c = match prev {
            None if n == 1 => 1.0,
            None => 4.0 * (n + m) as f64,
            Some(p) => 4.0 * p.max((n + m) as f64),
        };
        prev = Some(c);
        let embedding = kuratowski_embed(&grid, Scale::Fixed(c))?;
        blocks.push(UnionBlock { n, m, embedding });
    }
    Ok(UnionSpace { blocks })
}

/// Outcome of checking both separation conditions of a [`UnionSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnionReport {
    pub constants: Vec<f64>,
    /// Largest `|d̃(x,y) - d(x,y)|` within a block.
    pub max_isometry_residual: f64,
    pub isometry_pass: bool,
    /// Smallest `d̃(x,y) - (n + m + n' + m')` across blocks; `None` when there
    /// is a single block.
    pub min_separation_margin: Option<f64>,
    pub separation_pass: bool,
    pub pairs_checked: usize,
}

impl UnionReport {
    pub fn pass(&self) -> bool {
        self.isometry_pass && self.separation_pass
    }
}

/// Tolerance for the within-block isometry condition.
pub const ISOMETRY_TOLERANCE: f64 = 1e-12;

pub fn verify_union_conditions(u: &UnionSpace) -> UnionReport {
    let mut max_residual: f64 = 0.0;
    let mut min_margin: Option<f64> = None;
    let mut pairs_checked = 0;
    for (a, block_a) in u.blocks.iter().enumerate() {
        let images_a = block_a.embedding.images();
        for (b, block_b) in u.blocks.iter().enumerate().skip(a) {
            let images_b = block_b.embedding.images();
            let bound = (block_a.n + block_a.m + block_b.n + block_b.m) as f64;
            for (i, da) in images_a.iter().enumerate() {
                let start = if a == b { i + 1 } else { 0 };
                for (j, db) in images_b.iter().enumerate().skip(start) {
                    let d = bottleneck(da, db);
                    pairs_checked += 1;
                    if a == b {
                        max_residual = max_residual.max((d - block_a.grid().dist(i, j)).abs());
                    } else {
                        let margin = d - bound;
                        min_margin = Some(min_margin.map_or(margin, |mm| mm.min(margin)));
                    }
                }
            }
        }
    }
    UnionReport {
        constants: u.constants(),
        max_isometry_residual: max_residual,
        isometry_pass: max_residual <= ISOMETRY_TOLERANCE,
        min_separation_margin: min_margin,
        separation_pass: min_margin.is_none_or(|m| m > 0.0),
        pairs_checked,
    }
}
