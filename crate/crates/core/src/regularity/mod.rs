//! Weighted hypergraphs, the regularity defect, and the information-value
//! refinement that produces weakly regular partitions.

mod info;
mod refine;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::checked_pow;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::property::{format_rational, parse_rational};
use crate::rng::trial_rng;
use crate::Rational;

pub use info::{mutual_information_state, tao_inequality_check, MIState, TaoCheck};
pub use refine::{
    information_threshold, iteration_bound, max_defect_over_family, weak_regularity_partition, RegularityCertificate,
    RegularityResult, SetFamily,
};

/// An `s`-uniform weighted hypergraph on `V = {0, …, |V|−1}`, stored as a dense
/// row-major table of weights over `V^s` (first coordinate most significant).
/// Weights are kept as integer numerators over one common denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedHypergraph {
    vertices: usize,
    arity: usize,
    numerators: Vec<i64>,
    denominator: i64,
}

impl WeightedHypergraph {
    pub fn new(vertices: usize, arity: usize, weights: Vec<Rational>) -> Result<WeightedHypergraph> {
        if vertices == 0 || arity == 0 {
            return Err(Error::InvalidParameter("hypergraph needs vertices and arity ≥ 1".into()));
        }
        let edges = checked_pow(vertices as u64, arity).map(u128::from).unwrap_or(u128::MAX);
        let cap = Limits::global().hypergraph_edges;
        if edges > cap {
            return Err(Error::cap("hypergraph edges |V|^s", edges, cap));
        }
        if weights.len() as u128 != edges {
            return Err(Error::InvalidParameter(format!(
                "{} weights given for {edges} hyperedges",
                weights.len()
            )));
        }
        let mut denominator = 1i64;
        for w in &weights {
            if *w < Rational::zero() || *w > Rational::from(1) {
                return Err(Error::InvalidParameter(format!("weight {w} outside [0,1]")));
            }
            denominator = denominator
                .checked_mul(w.denom() / denominator.gcd(w.denom()))
                .ok_or_else(|| Error::InvalidParameter("weight denominators too large".into()))?;
        }
        let numerators = weights.iter().map(|w| w.numer() * (denominator / w.denom())).collect();
        Ok(WeightedHypergraph {
            vertices,
            arity,
            numerators,
            denominator,
        })
    }

    pub fn from_fn(
        vertices: usize,
        arity: usize,
        mut weight: impl FnMut(&[usize]) -> Rational,
    ) -> Result<WeightedHypergraph> {
        let edges = checked_pow(vertices as u64, arity).unwrap_or(u64::MAX);
        let cap = Limits::global().hypergraph_edges;
        if u128::from(edges) > cap {
            return Err(Error::cap("hypergraph edges |V|^s", edges, cap));
        }
        let mut tuple = vec![0; arity];
        let weights = (0..edges as usize)
            .map(|e| {
                decode_edge(e, vertices, &mut tuple);
                weight(&tuple)
            })
            .collect();
        WeightedHypergraph::new(vertices, arity, weights)
    }

    pub fn constant(vertices: usize, arity: usize, c: Rational) -> Result<WeightedHypergraph> {
        WeightedHypergraph::from_fn(vertices, arity, |_| c)
    }

    /// Weights drawn uniformly from the multiples of `tau` in `[0,1]`, from
    /// stream `index` of `seed`.
    pub fn random_granular(vertices: usize, arity: usize, tau: Rational, seed: u64, index: u64) -> Result<WeightedHypergraph> {
        let steps = (Rational::from(1) / tau).floor().to_integer();
        if tau <= Rational::zero() || steps < 1 {
            return Err(Error::InvalidParameter("tau must lie in (0,1]".into()));
        }
        let mut rng = trial_rng(seed, index);
        WeightedHypergraph::from_fn(vertices, arity, |_| tau * rng.gen_range(0..=steps))
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn edge_count(&self) -> usize {
        self.numerators.len()
    }

    pub fn edge_index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &v| acc * self.vertices + v)
    }

    pub fn weight(&self, tuple: &[usize]) -> Rational {
        Rational::new(self.numerators[self.edge_index(tuple)], self.denominator)
    }

    pub fn weights(&self) -> Vec<Rational> {
        self.numerators.iter().map(|&n| Rational::new(n, self.denominator)).collect()
    }

    pub(crate) fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub(crate) fn denominator(&self) -> i64 {
        self.denominator
    }

    /// Mean weight over all of `V^s`.
    pub fn average(&self) -> Rational {
        let sum: i128 = self.numerators.iter().map(|&n| i128::from(n)).sum();
        let total = i128::from(self.denominator) * self.numerators.len() as i128;
        let g = sum.gcd(&total).max(1);
        Rational::new((sum / g) as i64, (total / g) as i64)
    }

    /// Whether every weight is a multiple of `tau` or equal to 1.
    pub fn is_granular(&self, tau: Rational) -> bool {
        self.weights()
            .into_iter()
            .all(|w| w == Rational::from(1) || (w / tau).is_integer())
    }

    /// Rounds every weight to the nearest multiple of `tau`, ties down. A
    /// rounded value above 1 is clamped to 1, which keeps weights in `[0,1]`
    /// and only shrinks the change.
    pub fn granularize(&self, tau: Rational) -> Result<WeightedHypergraph> {
        if tau <= Rational::zero() || tau > Rational::from(1) {
            return Err(Error::InvalidParameter("tau must lie in (0,1]".into()));
        }
        let rounded = self
            .weights()
            .into_iter()
            .map(|w| {
                let steps = w / tau;
                let down = steps.floor();
                let m = if steps - down > Rational::new(1, 2) { down + 1 } else { down };
                (m * tau).min(Rational::from(1))
            })
            .collect();
        WeightedHypergraph::new(self.vertices, self.arity, rounded)
    }

    pub fn to_record(&self) -> HypergraphRecord {
        HypergraphRecord {
            arity: self.arity,
            vertices: self.vertices,
            weights: self.weights().iter().map(format_rational).collect(),
        }
    }

    pub fn from_record(record: &HypergraphRecord) -> Result<WeightedHypergraph> {
        let weights = record.weights.iter().map(|w| parse_rational(w)).collect::<Result<_>>()?;
        WeightedHypergraph::new(record.vertices, record.arity, weights)
    }
}

pub(crate) fn decode_edge(mut e: usize, vertices: usize, tuple: &mut [usize]) {
    for slot in tuple.iter_mut().rev() {
        *slot = e % vertices;
        e /= vertices;
    }
}

/// Dense weight table with weights as `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphRecord {
    pub arity: usize,
    pub vertices: usize,
    pub weights: Vec<String>,
}

/// Disjoint, covering, non-empty vertex sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexPartition {
    parts: Vec<Vec<usize>>,
    #[serde(skip)]
    part_of: Vec<usize>,
}

impl VertexPartition {
    pub fn new(vertices: usize, parts: Vec<Vec<usize>>) -> Result<VertexPartition> {
        let mut part_of = vec![usize::MAX; vertices];
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::InvalidParameter("partition parts must be non-empty".into()));
            }
            for &v in part {
                if v >= vertices || part_of[v] != usize::MAX {
                    return Err(Error::InvalidParameter(format!("vertex {v} out of range or repeated")));
                }
                part_of[v] = i;
            }
        }
        if part_of.contains(&usize::MAX) {
            return Err(Error::InvalidParameter("partition does not cover every vertex".into()));
        }
        let mut parts = parts;
        parts.iter_mut().for_each(|p| p.sort_unstable());
        Ok(VertexPartition { parts, part_of })
    }

    pub fn trivial(vertices: usize) -> VertexPartition {
        VertexPartition {
            parts: vec![(0..vertices).collect()],
            part_of: vec![0; vertices],
        }
    }

    pub fn singletons(vertices: usize) -> VertexPartition {
        VertexPartition {
            parts: (0..vertices).map(|v| vec![v]).collect(),
            part_of: (0..vertices).collect(),
        }
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn vertices(&self) -> usize {
        self.part_of.len()
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.part_of[v]
    }

    /// Splits every part by membership in `set`: `V_i ∩ S` then `V_i ∖ S`,
    /// dropping empty pieces.
    pub fn refine(&self, set: &[bool]) -> VertexPartition {
        let parts: Vec<Vec<usize>> = self
            .parts
            .iter()
            .flat_map(|p| {
                let (inside, outside): (Vec<usize>, Vec<usize>) = p.iter().partition(|&&v| set[v]);
                [inside, outside]
            })
            .filter(|p| !p.is_empty())
            .collect();
        VertexPartition::new(self.vertices(), parts).expect("refinement of a valid partition")
    }
}

pub fn membership(vertices: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; vertices];
    for &v in set {
        m[v] = true;
    }
    m
}

/// `w_G(V_I)`: the mean weight over `V_{i_1} × ⋯ × V_{i_s}`, or 0 when some
/// indexed set is empty.
pub fn expected_weight(g: &WeightedHypergraph, sets: &[Vec<usize>], index: &[usize]) -> Result<Rational> {
    if index.len() != g.arity || index.iter().any(|&i| i >= sets.len()) {
        return Err(Error::InvalidParameter("multi-index does not match the arity or the sets".into()));
    }
    let chosen: Vec<&Vec<usize>> = index.iter().map(|&i| &sets[i]).collect();
    if chosen.iter().any(|s| s.is_empty()) {
        return Ok(Rational::zero());
    }
    let mut sum = 0i128;
    let mut count = 0i128;
    let mut pos = vec![0usize; g.arity];
    let mut tuple: Vec<usize> = chosen.iter().map(|s| s[0]).collect();
    loop {
        sum += i128::from(g.numerators[g.edge_index(&tuple)]);
        count += 1;
        // Odometer over the product set.
        let mut j = g.arity;
        loop {
            if j == 0 {
                let den = count * i128::from(g.denominator);
                let gcd = sum.gcd(&den).max(1);
                return Ok(Rational::new((sum / gcd) as i64, (den / gcd) as i64));
            }
            j -= 1;
            pos[j] += 1;
            if pos[j] < chosen[j].len() {
                tuple[j] = chosen[j][pos[j]];
                break;
            }
            pos[j] = 0;
            tuple[j] = chosen[j][0];
        }
    }
}

/// Sums of exact terms `num / den` with varying denominators.
#[derive(Default)]
pub(crate) struct TermSum {
    by_den: HashMap<i128, i128>,
}

impl TermSum {
    pub(crate) fn add(&mut self, num: i128, den: i128) {
        if num != 0 {
            *self.by_den.entry(den).or_insert(0) += num;
        }
    }

    pub(crate) fn total(&self) -> BigRational {
        let mut total = BigRational::zero();
        for (&den, &num) in &self.by_den {
            total += BigRational::new(BigInt::from(num), BigInt::from(den));
        }
        total
    }
}

/// Per-cell sums over `V^s` restricted to tuples whose coordinate `j` lies in
/// `sets[pick(j)]`-style selections; shared by the defect computations.
struct CellTable {
    k: usize,
    arity: usize,
}

impl CellTable {
    fn cells(&self) -> usize {
        self.k.pow(self.arity as u32)
    }

    fn cell_of(&self, tuple: &[usize], partition: &VertexPartition) -> usize {
        tuple.iter().fold(0, |acc, &v| acc * self.k + partition.part_of(v))
    }
}

/// Eq. (1)-style defect `Σ_I (Π_j |S ∩ V_{i_j}| / |V|^s) · |w_G(S ∩ V_I) − w_G(V_I)|`,
/// exactly.
pub fn defect(g: &WeightedHypergraph, partition: &VertexPartition, set: &[usize]) -> Result<BigRational> {
    check_partition(g, partition)?;
    Ok(defect_of_membership(g, partition, &membership(g.vertices, set)))
}

fn check_partition(g: &WeightedHypergraph, partition: &VertexPartition) -> Result<()> {
    if partition.vertices() != g.vertices {
        return Err(Error::InvalidParameter(format!(
            "partition covers {} vertices, hypergraph has {}",
            partition.vertices(),
            g.vertices
        )));
    }
    Ok(())
}

pub(crate) fn defect_of_membership(g: &WeightedHypergraph, partition: &VertexPartition, set: &[bool]) -> BigRational {
    let table = CellTable {
        k: partition.k(),
        arity: g.arity,
    };
    let cells = table.cells();
    let mut cell_sum = vec![0i128; cells];
    let mut s_sum = vec![0i128; cells];
    let mut tuple = vec![0; g.arity];
    for (e, &w) in g.numerators.iter().enumerate() {
        decode_edge(e, g.vertices, &mut tuple);
        let c = table.cell_of(&tuple, partition);
        cell_sum[c] += i128::from(w);
        if tuple.iter().all(|&v| set[v]) {
            s_sum[c] += i128::from(w);
        }
    }
    let sizes: Vec<i128> = partition.parts().iter().map(|p| p.len() as i128).collect();
    let s_sizes: Vec<i128> = partition
        .parts()
        .iter()
        .map(|p| p.iter().filter(|&&v| set[v]).count() as i128)
        .collect();
    let scale = (g.numerators.len() as i128) * i128::from(g.denominator);
    let mut sum = TermSum::default();
    let mut index = vec![0; g.arity];
    for c in 0..cells {
        decode_edge(c, table.k, &mut index);
        let full: i128 = index.iter().map(|&i| sizes[i]).product();
        let inside: i128 = index.iter().map(|&i| s_sizes[i]).product();
        if inside == 0 {
            continue;
        }
        // (inside/|V|^s)·|s_sum/(D·inside) − cell_sum/(D·full)|
        let num = (s_sum[c] * full - inside * cell_sum[c]).abs();
        sum.add(num, scale * full);
    }
    sum.total()
}

/// The defect summed over all `2^s` sign patterns, using `S` for coordinates
/// with bit 1 and `V ∖ S` for bit 0. This equals `E|E[y|z′] − E[y|z_S]|`.
pub fn extended_defect(g: &WeightedHypergraph, partition: &VertexPartition, set: &[usize]) -> Result<BigRational> {
    check_partition(g, partition)?;
    let member = membership(g.vertices, set);
    let table = CellTable {
        k: partition.k(),
        arity: g.arity,
    };
    let cells = table.cells();
    let patterns = 1usize << g.arity;
    let mut cell_sum = vec![0i128; cells];
    let mut split_sum = vec![0i128; cells * patterns];
    let mut tuple = vec![0; g.arity];
    for (e, &w) in g.numerators.iter().enumerate() {
        decode_edge(e, g.vertices, &mut tuple);
        let c = table.cell_of(&tuple, partition);
        let b = tuple
            .iter()
            .fold(0, |acc, &v| (acc << 1) | usize::from(member[v]));
        cell_sum[c] += i128::from(w);
        split_sum[c * patterns + b] += i128::from(w);
    }
    let sizes: Vec<[i128; 2]> = partition
        .parts()
        .iter()
        .map(|p| {
            let inside = p.iter().filter(|&&v| member[v]).count() as i128;
            [p.len() as i128 - inside, inside]
        })
        .collect();
    let scale = (g.numerators.len() as i128) * i128::from(g.denominator);
    let mut sum = TermSum::default();
    let mut index = vec![0; g.arity];
    for c in 0..cells {
        decode_edge(c, table.k, &mut index);
        let full: i128 = index.iter().map(|&i| sizes[i][0] + sizes[i][1]).product();
        for b in 0..patterns {
            let piece: i128 = index
                .iter()
                .enumerate()
                .map(|(j, &i)| sizes[i][(b >> (g.arity - 1 - j)) & 1])
                .product();
            if piece == 0 {
                continue;
            }
            let num = (split_sum[c * patterns + b] * full - piece * cell_sum[c]).abs();
            sum.add(num, scale * full);
        }
    }
    Ok(sum.total())
}

pub(crate) fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
