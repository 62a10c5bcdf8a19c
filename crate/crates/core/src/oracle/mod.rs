//! Ground-truth machinery: exact distances, group closures and antichains.

pub mod antichain;
pub mod closure;
pub mod distance;
pub mod matching;

pub use antichain::{
    diagonal_chain_decomposition, dilworth_width, max_antichain_strict, verify_chain_decomposition,
    AntichainBound,
};
pub use closure::{affine_maps, all_transpositions, closure_under_group, vertex_permutation_generators, Permutation};
pub use distance::{distance_table, enumerated_distance, exact_distance, kpart_distance, monotone_distance, monotone_repair_set};
