//! Exact bottleneck and p-Wasserstein distances between finite diagrams.
//!
//! Both reduce to bipartite problems on the diagonal-augmented point sets:
//! the left side holds the points of `d1` followed by one diagonal slot per
//! point of `d2`; the right side holds the points of `d2` followed by one
//! diagonal slot per point of `d1`. Diagonal slots match each other for free.

use crate::bipartite::{hopcroft_karp, min_cost_assignment};
use crate::diagram::{
    chebyshev, diagonal_distance, matching_cost, Order, PartialMatching, PersistenceDiagram,
};
use crate::error::{Error, Result};

/// Default bound on `|d1| + |d2|` for [`brute_force_distance`].
pub const ORACLE_LIMIT: usize = 8;

/// Bottleneck distance `w_∞`.
pub fn bottleneck(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> f64 {
    bottleneck_with_matching(d1, d2).0
}

/// Bottleneck distance together with an optimal partial matching.
pub fn bottleneck_with_matching(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
) -> (f64, PartialMatching) {
    let candidates = candidate_values(d1, d2);
    // The largest candidate is always feasible: leave everything unmatched.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible_matching(d1, d2, candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let delta = candidates[lo];
    let matching = feasible_matching(d1, d2, delta).expect("largest candidate is feasible");
    (delta, matching)
}

/// Sorted, deduplicated set of values the bottleneck distance can take.
pub fn candidate_values(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> Vec<f64> {
    let mut values = Vec::with_capacity(d1.len() * d2.len() + d1.len() + d2.len() + 1);
    values.push(0.0);
    values.extend(d1.points().iter().map(|&p| diagonal_distance(p)));
    values.extend(d2.points().iter().map(|&p| diagonal_distance(p)));
    for &a in d1.points() {
        for &b in d2.points() {
            values.push(chebyshev(a, b));
        }
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

// Perfect matching of the augmented graph with all edge costs <= delta, if
// one exists; returned as the induced point-to-point partial matching.
fn feasible_matching(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    delta: f64,
) -> Option<PartialMatching> {
    let (n1, n2) = (d1.len(), d2.len());
    let total = n1 + n2;
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(total);
    for (i, &a) in d1.points().iter().enumerate() {
        let mut row: Vec<usize> = d2
            .points()
            .iter()
            .enumerate()
            .filter(|(_, &b)| chebyshev(a, b) <= delta)
            .map(|(j, _)| j)
            .collect();
        if diagonal_distance(a) <= delta {
            row.push(n2 + i);
        }
        adj.push(row);
    }
    for (j, &b) in d2.points().iter().enumerate() {
        let mut row = Vec::with_capacity(n1 + 1);
        if diagonal_distance(b) <= delta {
            row.push(j);
        }
        row.extend(n2..total);
        adj.push(row);
    }
    let matched = hopcroft_karp(&adj, total);
    if matched.iter().any(Option::is_none) {
        return None;
    }
    let pairs = matched[..n1]
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.filter(|&j| j < n2).map(|j| (i, j)))
        .collect();
    Some(PartialMatching::new(pairs).expect("matching output is a bijection"))
}

/// p-Wasserstein distance for finite `p >= 1`.
pub fn wasserstein(d1: &PersistenceDiagram, d2: &PersistenceDiagram, p: f64) -> Result<f64> {
    wasserstein_with_matching(d1, d2, p).map(|(value, _)| value)
}

/// p-Wasserstein distance together with an optimal partial matching.
pub fn wasserstein_with_matching(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    p: f64,
) -> Result<(f64, PartialMatching)> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidOrder(p));
    }
    let (n1, n2) = (d1.len(), d2.len());
    let n = n1 + n2;
    let pow = |t: f64| if p == 1.0 { t } else { t.powf(p) };
    // Any diagonal column stands in for the projection of a point, since
    // diagonal-to-diagonal costs are zero.
    let mut cost = vec![0.0; n * n];
    for (i, &a) in d1.points().iter().enumerate() {
        let row = &mut cost[i * n..(i + 1) * n];
        for (j, &b) in d2.points().iter().enumerate() {
            row[j] = pow(chebyshev(a, b));
        }
        let diag = pow(diagonal_distance(a));
        row[n2..].fill(diag);
    }
    for (j, &b) in d2.points().iter().enumerate() {
        let row = &mut cost[(n1 + j) * n..(n1 + j + 1) * n];
        row[..n2].fill(f64::INFINITY);
        row[j] = pow(diagonal_distance(b));
    }
    let assignment = min_cost_assignment(&cost, n);
    let pairs = assignment[..n1]
        .iter()
        .enumerate()
        .filter(|(_, &j)| j < n2)
        .map(|(i, &j)| (i, j))
        .collect();
    let matching = PartialMatching::new(pairs).expect("assignment is a bijection");
    let value = matching_cost(d1, d2, &matching, Order::Finite(p))?.value();
    Ok((value, matching))
}

/// Distance of the given order, dispatching to the bottleneck engine for `∞`.
pub fn distance(d1: &PersistenceDiagram, d2: &PersistenceDiagram, order: Order) -> Result<f64> {
    match order {
        Order::Infinity => Ok(bottleneck(d1, d2)),
        Order::Finite(p) => wasserstein(d1, d2, p),
    }
}

/// Minimum cost over every partial matching, by exhaustive enumeration.
/// Intended as an independent oracle for small inputs.
pub fn brute_force_distance(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    order: Order,
) -> Result<f64> {
    brute_force_distance_with_limit(d1, d2, order, ORACLE_LIMIT)
}

pub fn brute_force_distance_with_limit(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    order: Order,
    limit: usize,
) -> Result<f64> {
    let size = d1.len() + d2.len();
    if size > limit {
        return Err(Error::OracleLimit { size, limit });
    }
    let mut best = f64::INFINITY;
    let mut pairs = Vec::new();
    let mut used = vec![false; d2.len()];
    enumerate(0, d1, d2, order, &mut pairs, &mut used, &mut best)?;
    Ok(best)
}

fn enumerate(
    i: usize,
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    order: Order,
    pairs: &mut Vec<(usize, usize)>,
    used: &mut [bool],
    best: &mut f64,
) -> Result<()> {
    if i == d1.len() {
        let m = PartialMatching::new(pairs.clone())?;
        *best = best.min(matching_cost(d1, d2, &m, order)?.value());
        return Ok(());
    }
    enumerate(i + 1, d1, d2, order, pairs, used, best)?;
    for j in 0..d2.len() {
        if !used[j] {
            used[j] = true;
            pairs.push((i, j));
            enumerate(i + 1, d1, d2, order, pairs, used, best)?;
            pairs.pop();
            used[j] = false;
        }
    }
    Ok(())
}
