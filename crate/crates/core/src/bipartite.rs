//! Bipartite matching primitives: Hopcroft–Karp maximum-cardinality matching
//! and the Hungarian method for square min-cost assignment.

use std::collections::VecDeque;

const UNMATCHED: usize = usize::MAX;

/// Maximum-cardinality matching on a bipartite graph given as adjacency lists
/// from left vertices to right vertices `0..n_right`.
///
/// Returns `match_of_left`, with `None` for unmatched left vertices.
/// Adjacency lists are scanned in order, so ties resolve towards lower indices.
pub fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    let n_left = adj.len();
    let mut match_l = vec![UNMATCHED; n_left];
    let mut match_r = vec![UNMATCHED; n_right];
    let mut dist = vec![0usize; n_left];

    loop {
        // BFS layering from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == UNMATCHED {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == UNMATCHED {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }

        let mut next_edge = vec![0usize; n_left];
        for u in 0..n_left {
            if match_l[u] == UNMATCHED {
                augment(u, adj, &mut match_l, &mut match_r, &mut dist, &mut next_edge);
            }
        }
    }

    match_l
        .into_iter()
        .map(|v| (v != UNMATCHED).then_some(v))
        .collect()
}

// Iterative DFS along the BFS layers, so long augmenting paths cannot
// overflow the call stack.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    next_edge: &mut [usize],
) -> bool {
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if next_edge[u] == adj[u].len() {
            dist[u] = usize::MAX;
            stack.pop();
            if let Some(&parent) = stack.last() {
                next_edge[parent] += 1;
            }
            continue;
        }
        let v = adj[u][next_edge[u]];
        let w = match_r[v];
        if w == UNMATCHED {
            for &x in &stack {
                let y = adj[x][next_edge[x]];
                match_l[x] = y;
                match_r[y] = x;
            }
            return true;
        }
        if dist[w] != usize::MAX && dist[w] == dist[u] + 1 {
            stack.push(w);
        } else {
            next_edge[u] += 1;
        }
    }
    false
}

/// Minimum-cost perfect assignment for a square `n x n` cost matrix in
/// row-major order. Returns `assignment[row] = column`.
///
/// Shortest augmenting path formulation with row and column potentials,
/// `O(n^3)`. Costs must be finite.
pub fn min_cost_assignment(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    if n == 0 {
        return Vec::new();
    }
    let at = |r: usize, c: usize| cost[(r - 1) * n + (c - 1)];
    // 1-based internal indexing; column 0 is a sentinel.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        row_of_col[0] = row;
        let mut col0 = 0usize;
        let mut min_v = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r0 = row_of_col[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = at(r0, col) - u[r0] - v[col];
                if reduced < min_v[col] {
                    min_v[col] = reduced;
                    way[col] = col0;
                }
                if min_v[col] < delta {
                    delta = min_v[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[row_of_col[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_v[col] -= delta;
                }
            }
            col0 = col1;
            if row_of_col[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            row_of_col[col0] = row_of_col[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for col in 1..=n {
        assignment[row_of_col[col] - 1] = col - 1;
    }
    assignment
}
