//! Enumeration caps shared by the brute-force routines.
//!
//! Defaults can be overridden through environment variables, read once per
//! process:
//!
//! | variable                    | default |
//! |-----------------------------|---------|
//! | `SYMTEST_ENUM_CAP`          | 24      |
//! | `SYMTEST_MONOTONE_CAP`      | 10^7    |
//! | `SYMTEST_TUPLE_CAP`         | 10^8    |
//! | `SYMTEST_EDGE_CAP`          | 2^22    |
//! | `SYMTEST_ANTICHAIN_CAP`     | 20      |
//! | `SYMTEST_CLOSURE_CAP`       | 2^22    |
//! | `SYMTEST_AFFINE_CAP`        | 81      |
//! | `SYMTEST_SUBSET_CAP`        | 20      |
//! | `SYMTEST_COUNT_VECTOR_CAP`  | 2^22    |

use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest |X| for which all 2^|X| functions may be enumerated.
    pub enumeration_bits: usize,
    /// Largest number of monotone functions collected by recursive extension.
    pub monotone_functions: u64,
    /// Largest |X|^s evaluated by exhaustive acceptance probability.
    pub tester_tuples: u128,
    /// Largest |V|^s stored as a dense hypergraph table.
    pub hypergraph_edges: u128,
    /// Largest poset handled by exact maximum antichain search.
    pub antichain_elements: usize,
    /// Largest member set produced by group closure.
    pub closure_members: usize,
    /// Largest p^n for affine map enumeration.
    pub affine_points: u64,
    /// Largest |V| for the all-subsets family.
    pub subset_vertices: usize,
    /// Largest explicit admissible count-vector set.
    pub count_vectors: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration_bits: 24,
            monotone_functions: 10_000_000,
            tester_tuples: 100_000_000,
            hypergraph_edges: 1 << 22,
            antichain_elements: 20,
            closure_members: 1 << 22,
            affine_points: 81,
            subset_vertices: 20,
            count_vectors: 1 << 22,
        }
    }
}

fn env_or<T: std::str::FromStr>(name: &str, default: T) -> T {
    std::env::var(name)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(default)
}

impl Limits {
    pub fn from_env() -> Self {
        let d = Limits::default();
        Limits {
            enumeration_bits: env_or("SYMTEST_ENUM_CAP", d.enumeration_bits),
            monotone_functions: env_or("SYMTEST_MONOTONE_CAP", d.monotone_functions),
            tester_tuples: env_or("SYMTEST_TUPLE_CAP", d.tester_tuples),
            hypergraph_edges: env_or("SYMTEST_EDGE_CAP", d.hypergraph_edges),
            antichain_elements: env_or("SYMTEST_ANTICHAIN_CAP", d.antichain_elements),
            closure_members: env_or("SYMTEST_CLOSURE_CAP", d.closure_members),
            affine_points: env_or("SYMTEST_AFFINE_CAP", d.affine_points),
            subset_vertices: env_or("SYMTEST_SUBSET_CAP", d.subset_vertices),
            count_vectors: env_or("SYMTEST_COUNT_VECTOR_CAP", d.count_vectors),
        }
    }

    /// Process-wide limits, initialised from the environment on first use.
    pub fn global() -> &'static Limits {
        static LIMITS: OnceLock<Limits> = OnceLock::new();
        LIMITS.get_or_init(Limits::from_env)
    }
}
