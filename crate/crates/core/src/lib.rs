//! Metric geometry of the space of finite persistence diagrams.
//!
//! * [`diagram`] and [`distance`]: diagrams, partial matchings, exact
//!   bottleneck and p-Wasserstein distances, and a brute-force oracle.
//! * [`space`]: finite semi-metric spaces and their text format.
//! * [`embeddings`]: the shifted Kuratowski embedding of a bounded metric
//!   space into diagrams under the bottleneck distance, the `K_{n,n}` and
//!   cyclic grid families, and the separated disjoint-union construction.
//! * [`negtype`]: spectral certificates for q-negative type, generalized
//!   roundness, Schoenberg kernel tests and distortion envelopes.
//! * [`homology`]: filtered simplicial complexes, Z/2 persistence, and the
//!   realization of any finite diagram as degree-one persistent homology.

pub mod bipartite;
pub mod diagram;
pub mod distance;
pub mod embeddings;
pub mod error;
pub mod homology;
pub mod negtype;
pub mod space;

pub use diagram::{chebyshev, diagonal_distance, matching_cost, Cost, DiagramPoint, Order, PartialMatching, PersistenceDiagram};
pub use distance::{bottleneck, brute_force_distance, distance, wasserstein};
pub use error::{Error, Result};
pub use space::FiniteMetricSpace;
