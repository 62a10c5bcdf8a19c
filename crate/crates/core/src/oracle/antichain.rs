//! Antichains and chain decompositions of `[k]^d` under strict dominance
//! (`x ≺ y` iff `x_i < y_i` for every coordinate).

use crate::domain::checked_pow;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::oracle::matching::maximum_matching;

/// Points of `[k]^d`, 1-based, lexicographic.
pub fn grid_points(k: usize, d: usize) -> Vec<Vec<usize>> {
    let total = k.pow(d as u32);
    (0..total)
        .map(|mut i| {
            let mut p = vec![0; d];
            for c in p.iter_mut().rev() {
                *c = i % k + 1;
                i /= k;
            }
            p
        })
        .collect()
}

pub fn strictly_below(x: &[usize], y: &[usize]) -> bool {
    x.iter().zip(y).all(|(a, b)| a < b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntichainBound {
    /// Maximum antichain size when `exact`, otherwise the chain-count upper bound.
    pub size: usize,
    pub exact: bool,
    /// A maximum antichain (empty when not exact).
    pub witness: Vec<Vec<usize>>,
}

/// Maximum antichain of `[k]^d` under strict dominance. Exact (by clique
/// search in the incomparability graph) while `k^d` is within the antichain
/// cap; beyond it, the chain-decomposition bound `k^d - (k-1)^d` is returned
/// with `exact = false`.
pub fn max_antichain_strict(k: usize, d: usize) -> Result<AntichainBound> {
    if k == 0 || d == 0 {
        return Err(Error::InvalidParameter("k and d must be positive".into()));
    }
    let total = checked_pow(k as u64, d).ok_or_else(|| Error::InvalidParameter("k^d overflows".into()))?;
    let cap = Limits::global().antichain_elements.min(128);
    if total as usize > cap {
        let lower = checked_pow(k as u64 - 1, d).expect("smaller than k^d");
        return Ok(AntichainBound {
            size: (total - lower) as usize,
            exact: false,
            witness: Vec::new(),
        });
    }
    let points = grid_points(k, d);
    let n = points.len();
    // Incomparability adjacency as bitmasks.
    let adj: Vec<u128> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    j != i
                        && !strictly_below(&points[i], &points[j])
                        && !strictly_below(&points[j], &points[i])
                })
                .fold(0u128, |m, j| m | 1 << j)
        })
        .collect();
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut best = 0u128;
    max_clique(&adj, 0, all, &mut best);
    let witness = (0..n)
        .filter(|&i| best >> i & 1 == 1)
        .map(|i| points[i].clone())
        .collect::<Vec<_>>();
    Ok(AntichainBound {
        size: witness.len(),
        exact: true,
        witness,
    })
}

// Branch and bound: `current` is a clique, `candidates` its common neighbours.
fn max_clique(adj: &[u128], current: u128, candidates: u128, best: &mut u128) {
    if candidates == 0 {
        if current.count_ones() > best.count_ones() {
            *best = current;
        }
        return;
    }
    let mut cand = candidates;
    while cand != 0 {
        if current.count_ones() + cand.count_ones() <= best.count_ones() {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        cand &= !(1u128 << v);
        max_clique(adj, current | 1 << v, cand & adj[v], best);
    }
    if current.count_ones() > best.count_ones() {
        *best = current;
    }
}

/// The chains `x, x+1, x+2·1, ...` started at every point with minimum
/// coordinate 1; they partition `[k]^d` into `k^d - (k-1)^d` chains.
pub fn diagonal_chain_decomposition(k: usize, d: usize) -> Vec<Vec<Vec<usize>>> {
    grid_points(k, d)
        .into_iter()
        .filter(|x| x.iter().min() == Some(&1))
        .map(|start| {
            let steps = k - start.iter().max().copied().unwrap_or(1);
            (0..=steps)
                .map(|t| start.iter().map(|c| c + t).collect())
                .collect()
        })
        .collect()
}

/// Checks that `chains` are disjoint, cover `[k]^d`, and are totally ordered.
pub fn verify_chain_decomposition(k: usize, d: usize, chains: &[Vec<Vec<usize>>]) -> bool {
    let mut seen = std::collections::HashSet::new();
    for chain in chains {
        for w in chain.windows(2) {
            if !strictly_below(&w[0], &w[1]) {
                return false;
            }
        }
        for p in chain {
            if p.len() != d || p.iter().any(|&c| c == 0 || c > k) || !seen.insert(p.clone()) {
                return false;
            }
        }
    }
    seen.len() == k.pow(d as u32)
}

/// Width of the poset via Dilworth: `|P|` minus a maximum matching in the
/// split comparability graph.
pub fn dilworth_width(k: usize, d: usize) -> usize {
    let points = grid_points(k, d);
    let adj: Vec<Vec<usize>> = points
        .iter()
        .map(|x| {
            points
                .iter()
                .enumerate()
                .filter(|(_, y)| strictly_below(x, y))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    points.len() - maximum_matching(&adj, points.len()).size
}
