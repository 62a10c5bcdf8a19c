//! Exact joint distributions of `(y, z′, z_S)` and their information measures.

use std::collections::HashMap;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hp::{self, HpFloat};
use crate::property::format_rational;
use crate::regularity::{big_to_f64, check_partition, decode_edge, membership, TermSum, VertexPartition, WeightedHypergraph};
use crate::Rational;

/// Counts of `(y, ψ(v), 1_S(v))` over all `v ∈ V^s`. With `N = |V|^s`, each
/// probability is `count / N` exactly.
#[derive(Debug, Clone)]
pub struct MIState {
    total: u64,
    arity: usize,
    k: usize,
    denominator: i64,
    /// Distinct weight numerators (over `denominator`), ascending.
    y_values: Vec<i64>,
    /// `(y index, cell, sign pattern) → count`, sorted by key.
    joint: Vec<((usize, usize, usize), u64)>,
}

/// Marginal counts used by every information formula.
struct Marginals {
    y: HashMap<usize, u64>,
    cell: HashMap<usize, u64>,
    z: HashMap<(usize, usize), u64>,
    y_cell: HashMap<(usize, usize), u64>,
}

impl MIState {
    pub(crate) fn build(g: &WeightedHypergraph, partition: &VertexPartition, member: &[bool]) -> MIState {
        let mut y_values: Vec<i64> = g.numerators().to_vec();
        y_values.sort_unstable();
        y_values.dedup();
        let cells = edge_cells(g, partition);
        let keys = joint_keys(g, &y_values, &cells, member);
        MIState {
            total: g.edge_count() as u64,
            arity: g.arity(),
            k: partition.k(),
            denominator: g.denominator(),
            y_values,
            joint: run_lengths(keys),
        }
    }

    fn marginals(&self) -> Marginals {
        let mut m = Marginals {
            y: HashMap::new(),
            cell: HashMap::new(),
            z: HashMap::new(),
            y_cell: HashMap::new(),
        };
        for &((y, cell, b), c) in &self.joint {
            *m.y.entry(y).or_default() += c;
            *m.cell.entry(cell).or_default() += c;
            *m.z.entry((cell, b)).or_default() += c;
            *m.y_cell.entry((y, cell)).or_default() += c;
        }
        m
    }

    /// The joint table as `(y, cell multi-index, S-pattern, probability)`.
    pub fn table(&self) -> Vec<(Rational, Vec<usize>, Vec<bool>, BigRational)> {
        self.joint
            .iter()
            .map(|&((y, cell, b), c)| {
                let mut index = vec![0; self.arity];
                decode_edge(cell, self.k, &mut index);
                let pattern = (0..self.arity).map(|j| (b >> (self.arity - 1 - j)) & 1 == 1).collect();
                (
                    Rational::new(self.y_values[y], self.denominator),
                    index,
                    pattern,
                    BigRational::new(c.into(), self.total.into()),
                )
            })
            .collect()
    }

    pub fn total_probability(&self) -> BigRational {
        let sum: u64 = self.joint.iter().map(|&(_, c)| c).sum();
        BigRational::new(sum.into(), self.total.into())
    }

    /// `H(y)` in bits.
    pub fn entropy_y(&self) -> HpFloat {
        let m = self.marginals();
        let mut logs = LnCache::default();
        let mut sum = hp::zero();
        for &c in m.y.values() {
            sum += weight(c, self.total) * (logs.ln(self.total) - logs.ln(c));
        }
        sum / hp::ln2()
    }

    /// `I(y; z′)` in bits, the information value of the partition.
    pub fn mi_y_zprime(&self) -> HpFloat {
        let m = self.marginals();
        let mut logs = LnCache::default();
        let mut sum = hp::zero();
        for (&(y, cell), &c) in &m.y_cell {
            let log = logs.ln(c) + logs.ln(self.total) - logs.ln(m.y[&y]) - logs.ln(m.cell[&cell]);
            sum += weight(c, self.total) * log;
        }
        sum / hp::ln2()
    }

    /// `I(y; z_S)` in bits.
    pub fn mi_y_zs(&self) -> HpFloat {
        let m = self.marginals();
        let mut logs = LnCache::default();
        let mut sum = hp::zero();
        for &((y, cell, b), c) in &self.joint {
            let log = logs.ln(c) + logs.ln(self.total) - logs.ln(m.y[&y]) - logs.ln(m.z[&(cell, b)]);
            sum += weight(c, self.total) * log;
        }
        sum / hp::ln2()
    }

    /// `I(y; z_S | z′)` in bits, from its own definition
    /// `Σ p(y,z) log(p(y,z) p(z′) / (p(y,z′) p(z)))`.
    pub fn mi_y_zs_given_zprime(&self) -> HpFloat {
        let m = self.marginals();
        let mut logs = LnCache::default();
        let mut sum = hp::zero();
        for &((y, cell, b), c) in &self.joint {
            let log = logs.ln(c) + logs.ln(m.cell[&cell]) - logs.ln(m.y_cell[&(y, cell)]) - logs.ln(m.z[&(cell, b)]);
            sum += weight(c, self.total) * log;
        }
        sum / hp::ln2()
    }

    /// `E|E[y|z′] − E[y|z_S]|`, exactly.
    pub fn conditional_mean_shift(&self) -> BigRational {
        let mut y_sum_cell: HashMap<usize, i128> = HashMap::new();
        let mut y_sum_z: HashMap<(usize, usize), i128> = HashMap::new();
        for &((y, cell, b), c) in &self.joint {
            let mass = i128::from(self.y_values[y]) * i128::from(c);
            *y_sum_cell.entry(cell).or_default() += mass;
            *y_sum_z.entry((cell, b)).or_default() += mass;
        }
        let m = self.marginals();
        let mut sum = TermSum::default();
        for (&(cell, b), &cz) in &m.z {
            let ccell = i128::from(m.cell[&cell]);
            let num = (y_sum_cell[&cell] * i128::from(cz) - y_sum_z[&(cell, b)] * ccell).abs();
            sum.add(num, i128::from(self.total) * i128::from(self.denominator) * ccell);
        }
        sum.total()
    }
}

fn weight(count: u64, total: u64) -> HpFloat {
    hp::ratio(u128::from(count), u128::from(total))
}

#[derive(Default)]
struct LnCache(HashMap<u64, HpFloat>);

impl LnCache {
    fn ln(&mut self, n: u64) -> HpFloat {
        self.0.entry(n).or_insert_with(|| hp::ln_u128(u128::from(n))).clone()
    }
}

pub(crate) fn edge_cells(g: &WeightedHypergraph, partition: &VertexPartition) -> Vec<usize> {
    let k = partition.k();
    let mut tuple = vec![0; g.arity()];
    (0..g.edge_count())
        .map(|e| {
            decode_edge(e, g.vertices(), &mut tuple);
            tuple.iter().fold(0, |acc, &v| acc * k + partition.part_of(v))
        })
        .collect()
}

fn joint_keys(g: &WeightedHypergraph, y_values: &[i64], cells: &[usize], member: &[bool]) -> Vec<(usize, usize, usize)> {
    let mut tuple = vec![0; g.arity()];
    g.numerators()
        .iter()
        .enumerate()
        .map(|(e, w)| {
            decode_edge(e, g.vertices(), &mut tuple);
            let b = tuple.iter().fold(0, |acc, &v| (acc << 1) | usize::from(member[v]));
            let y = y_values.binary_search(w).expect("weight among the y values");
            (y, cells[e], b)
        })
        .collect()
}

fn run_lengths<K: Ord + Copy>(mut keys: Vec<K>) -> Vec<(K, u64)> {
    keys.sort_unstable();
    let mut out: Vec<(K, u64)> = Vec::new();
    for key in keys {
        match out.last_mut() {
            Some((last, c)) if *last == key => *c += 1,
            _ => out.push((key, 1)),
        }
    }
    out
}

/// Fast double-precision `I(y; z_S | z′)` in bits, used to screen candidate
/// sets; `y_index` and `cells` are per-edge and `member` marks `S`.
pub(crate) fn screen_conditional_mi(
    g: &WeightedHypergraph,
    y_index: &[usize],
    cells: &[usize],
    member: &[bool],
    scratch: &mut Vec<(usize, usize, usize)>,
) -> f64 {
    scratch.clear();
    let mut tuple = vec![0; g.arity()];
    for e in 0..g.edge_count() {
        decode_edge(e, g.vertices(), &mut tuple);
        let b = tuple.iter().fold(0, |acc, &v| (acc << 1) | usize::from(member[v]));
        scratch.push((cells[e], b, y_index[e]));
    }
    scratch.sort_unstable();
    // Sorted by (cell, b, y): marginals within a cell are contiguous.
    let total = g.edge_count() as f64;
    let mut sum = 0.0;
    let mut i = 0;
    while i < scratch.len() {
        let cell = scratch[i].0;
        let mut j = i;
        while j < scratch.len() && scratch[j].0 == cell {
            j += 1;
        }
        let block = &scratch[i..j];
        let c_cell = block.len() as f64;
        let mut y_cell: HashMap<usize, f64> = HashMap::new();
        for &(_, _, y) in block {
            *y_cell.entry(y).or_default() += 1.0;
        }
        let mut a = 0;
        while a < block.len() {
            let b = block[a].1;
            let mut z_end = a;
            while z_end < block.len() && block[z_end].1 == b {
                z_end += 1;
            }
            let c_z = (z_end - a) as f64;
            let mut u = a;
            while u < z_end {
                let y = block[u].2;
                let mut v = u;
                while v < z_end && block[v].2 == y {
                    v += 1;
                }
                let c_yz = (v - u) as f64;
                sum += c_yz / total * (c_yz * c_cell / (y_cell[&y] * c_z)).log2();
                u = v;
            }
            a = z_end;
        }
        i = j;
    }
    sum
}

/// Exact joint distribution for `(G, P, S)`. `G` must be `tau`-granular.
pub fn mutual_information_state(
    g: &WeightedHypergraph,
    partition: &VertexPartition,
    set: &[usize],
    tau: Rational,
) -> Result<MIState> {
    check_partition(g, partition)?;
    if !g.is_granular(tau) {
        return Err(Error::NotGranular("weights are not multiples of tau; granularize first".into()));
    }
    Ok(MIState::build(g, partition, &membership(g.vertices(), set)))
}

/// Both sides of `E|E[y|z′] − E[y|z_S]| ≤ sqrt(2 ln 2 · I(y; z_S | z′))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaoCheck {
    /// Exact left-hand side as `p/q`.
    pub lhs: String,
    pub lhs_f64: f64,
    pub rhs_f64: f64,
    /// `I(y; z_S | z′)` in bits.
    pub conditional_mi: f64,
    /// Decided at 256-bit precision.
    pub holds: bool,
}

pub fn tao_inequality_check(state: &MIState) -> TaoCheck {
    let lhs = state.conditional_mean_shift();
    let mi = state.mi_y_zs_given_zprime();
    let mi = if mi < hp::zero() { hp::zero() } else { mi };
    let rhs = (hp::from_u128(2) * hp::ln2() * mi.clone()).sqrt();
    let lhs_hp = hp::from_bigrational(&lhs);
    TaoCheck {
        lhs: format_rational(&lhs),
        lhs_f64: big_to_f64(&lhs),
        rhs_f64: hp::to_f64(&rhs),
        conditional_mi: hp::to_f64(&mi),
        holds: lhs_hp <= rhs,
    }
}
