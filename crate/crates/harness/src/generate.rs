//! Seeded instance generators and the bundled regularity instance.

use rand::seq::SliceRandom;
use rand::Rng;
use symtest_core::regularity::{HypergraphRecord, VertexPartition, WeightedHypergraph};
use symtest_core::rng::trial_rng;
use symtest_core::{CountVector, Domain, DomainPartition, KPartSymmetricProperty, Rational, Result};

/// 2-uniform, 10 vertices, weights in sixths, three planted blocks with noise.
pub const BUNDLED_GRAPH: &str = include_str!("../data/regularity_10.json");

pub fn bundled_graph() -> Result<WeightedHypergraph> {
    let record: HypergraphRecord = serde_json::from_str(BUNDLED_GRAPH)
        .map_err(|e| symtest_core::Error::Parse(format!("bundled instance: {e}")))?;
    WeightedHypergraph::from_record(&record)
}

fn count_vectors(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes.iter().fold(vec![vec![]], |acc, &s| {
        acc.into_iter()
            .flat_map(|c| (0..=s).map(move |v| [c.clone(), vec![v]].concat()))
            .collect()
    })
}

/// A random k-part symmetric property on `{0..size-1}` from stream `index` of
/// `seed`: k uniform in 1..=3, a random partition into k non-empty parts, and
/// each count vector admitted with probability 1/2 (at least one admitted).
pub fn random_structured_property(size: usize, seed: u64, index: u64) -> Result<KPartSymmetricProperty> {
    let mut rng = trial_rng(seed, index);
    let k = rng.gen_range(1..=3.min(size));
    let mut order: Vec<usize> = (0..size).collect();
    order.shuffle(&mut rng);
    let mut labels = vec![0; size];
    for (i, &x) in order.iter().enumerate() {
        labels[x] = if i < k { i } else { rng.gen_range(0..k) };
    }
    let partition = DomainPartition::from_labels(Domain::indexed(size)?, &labels)?;
    let all = count_vectors(&partition.part_sizes());
    let mut admissible: Vec<CountVector> = all.iter().filter(|_| rng.gen_bool(0.5)).cloned().map(CountVector).collect();
    if admissible.is_empty() {
        admissible.push(CountVector(all[rng.gen_range(0..all.len())].clone()));
    }
    KPartSymmetricProperty::new(partition, admissible)
}

/// A random enumerable instance for the information kernel: a τ-granular
/// hypergraph with 3 to 6 vertices and arity 1 or 2, a random partition and a
/// random vertex set.
#[derive(Debug, Clone)]
pub struct InfoInstance {
    pub graph: WeightedHypergraph,
    pub partition: VertexPartition,
    pub set: Vec<usize>,
    pub tau: Rational,
}

pub fn random_info_instance(seed: u64, index: u64) -> Result<InfoInstance> {
    let mut rng = trial_rng(seed, index);
    let n = rng.gen_range(3..=6);
    let arity = rng.gen_range(1..=2);
    let tau = Rational::new(1, [2, 3, 4, 6][rng.gen_range(0..4)]);
    let graph = WeightedHypergraph::random_granular(n, arity, tau, rng.gen(), 0)?;
    let k = rng.gen_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|v| if v < k { v } else { rng.gen_range(0..k) }).collect();
    let parts = (0..k).map(|i| (0..n).filter(|&v| labels[v] == i).collect()).collect();
    let partition = VertexPartition::new(n, parts)?;
    let set = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    Ok(InfoInstance {
        graph,
        partition,
        set,
        tau,
    })
}
