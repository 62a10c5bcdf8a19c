use std::collections::VecDeque;

const FREE: usize = usize::MAX;

/// Maximum matching of a bipartite graph given as left adjacency lists,
/// computed with layered augmenting paths (Hopcroft-Karp).
#[derive(Debug, Clone)]
pub struct BipartiteMatching {
    /// `left_match[u]` is the right vertex matched to `u`, if any.
    pub left_match: Vec<Option<usize>>,
    pub right_match: Vec<Option<usize>>,
    pub size: usize,
}

pub fn maximum_matching(adj: &[Vec<usize>], right_count: usize) -> BipartiteMatching {
    let left_count = adj.len();
    let mut ml = vec![FREE; left_count];
    let mut mr = vec![FREE; right_count];
    let mut dist = vec![0usize; left_count];
    let mut size = 0;

    loop {
        // BFS layering from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..left_count {
            if ml[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match mr[v] {
                    FREE => found = true,
                    w if dist[w] == usize::MAX => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        for u in 0..left_count {
            if ml[u] == FREE && augment(u, adj, &mut ml, &mut mr, &mut dist) {
                size += 1;
            }
        }
    }

    let wrap = |v: Vec<usize>| v.into_iter().map(|m| (m != FREE).then_some(m)).collect();
    BipartiteMatching {
        left_match: wrap(ml),
        right_match: wrap(mr),
        size,
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    ml: &mut [usize],
    mr: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &v in &adj[u] {
        let w = mr[v];
        if w == FREE || (dist[w] == dist[u] + 1 && augment(w, adj, ml, mr, dist)) {
            ml[u] = v;
            mr[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// Minimum vertex cover from a maximum matching (König): with `Z` the set of
/// vertices reachable from free left vertices by alternating paths, the cover
/// is `(L \ Z) ∪ (R ∩ Z)`. Returns `(left_cover, right_cover)`.
pub fn konig_cover(adj: &[Vec<usize>], m: &BipartiteMatching) -> (Vec<usize>, Vec<usize>) {
    let right_count = m.right_match.len();
    let mut seen_l = vec![false; adj.len()];
    let mut seen_r = vec![false; right_count];
    let mut queue: VecDeque<usize> = (0..adj.len())
        .filter(|&u| m.left_match[u].is_none())
        .collect();
    for &u in &queue {
        seen_l[u] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if seen_r[v] || m.left_match[u] == Some(v) {
                continue;
            }
            seen_r[v] = true;
            if let Some(w) = m.right_match[v] {
                if !seen_l[w] {
                    seen_l[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let left = (0..adj.len()).filter(|&u| !seen_l[u]).collect();
    let right = (0..right_count).filter(|&v| seen_r[v]).collect();
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute_force_matching(adj: &[Vec<usize>], right: usize) -> usize {
        fn go(u: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if u == adj.len() {
                return 0;
            }
            let mut best = go(u + 1, adj, used);
            for &v in &adj[u] {
                if !used[v] {
                    used[v] = true;
                    best = best.max(1 + go(u + 1, adj, used));
                    used[v] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; right])
    }

    #[test]
    fn matches_brute_force_and_cover_is_tight() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let (l, r) = (rng.gen_range(0..7), rng.gen_range(1..7));
            let adj: Vec<Vec<usize>> = (0..l)
                .map(|_| (0..r).filter(|_| rng.gen_bool(0.35)).collect())
                .collect();
            let m = maximum_matching(&adj, r);
            assert_eq!(m.size, brute_force_matching(&adj, r));
            let (cl, cr) = konig_cover(&adj, &m);
            assert_eq!(cl.len() + cr.len(), m.size);
            for (u, nbrs) in adj.iter().enumerate() {
                for &v in nbrs {
                    assert!(cl.contains(&u) || cr.contains(&v), "edge ({u},{v}) uncovered");
                }
            }
        }
    }

    #[test]
    fn empty_graph() {
        let m = maximum_matching(&[vec![], vec![]], 3);
        assert_eq!(m.size, 0);
        assert_eq!(konig_cover(&[vec![], vec![]], &m), (vec![], vec![]));
    }
}
