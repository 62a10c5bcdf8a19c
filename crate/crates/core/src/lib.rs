//! Sample-based property testing for partially symmetric properties.
//!
//! The crate covers the full loop between testers and symmetry:
//!
//! - [`domain`] and [`function`]: finite domains, Boolean functions, partitions,
//!   densities and the normalized Hamming metric.
//! - [`property`]: k-part symmetric properties in count-vector form, monotonicity,
//!   `NotEq(g)`, and the granular cover of the monotone functions.
//! - [`oracle`]: exact distances, group closures, affine maps, and antichains.
//! - [`tester`]: sample testers, exact and Monte Carlo acceptance probabilities,
//!   the density-estimation tester and the monotonicity tester.
//! - [`regularity`]: weighted hypergraphs and the information-theoretic weak
//!   regularity refinement.
//! - [`extraction`]: recovering a covering k-part symmetric property from any
//!   sample tester.
//!
//! Densities, distances and defects are exact rationals; floating point only
//! appears at reporting boundaries and in certified probability enclosures.

pub mod domain;
pub mod error;
pub mod extraction;
pub mod function;
pub mod hp;
pub mod limits;
pub mod oracle;
pub mod property;
pub mod regularity;
pub mod rng;
pub mod tester;

/// Exact rational used for densities, distances and tolerances.
pub type Rational = num_rational::Ratio<i64>;

pub use domain::{hypergrid_blocks, CountVector, Domain, DomainPartition, DomainRef, DomainSpec, Element};
pub use error::{Error, Result};
pub use extraction::{
    atoms_of_family,
    build_cover_property, build_tester_hypergraph, extract_family, run_pipeline, verify_sandwich, CoverConstruction,
    DensityProfileMap, PipelineReport, SandwichReport, TesterHypergraph,
};
pub use function::{density, enumerate_functions, hamming_distance, part_counts, BoolFunction};
pub use property::{KPartSymmetricProperty, Property, PropertySpec};
