//! Boolean functions over a finite domain, densities, and the Hamming metric.

use std::fmt;
use std::sync::Arc;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{CountVector, Domain, DomainPartition, DomainRef, DomainSpec};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::Rational;

/// A function `f: X -> {0,1}` stored as a bit vector indexed by element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolFunction {
    domain: DomainRef,
    bits: BitVec<u64, Lsb0>,
}

impl BoolFunction {
    pub fn new(domain: DomainRef, bits: BitVec<u64, Lsb0>) -> Result<BoolFunction> {
        if bits.len() != domain.size() {
            return Err(Error::DomainMismatch(format!(
                "{} bits for a domain of size {}",
                bits.len(),
                domain.size()
            )));
        }
        Ok(BoolFunction { domain, bits })
    }

    pub fn zeros(domain: DomainRef) -> BoolFunction {
        let bits = bitvec![u64, Lsb0; 0; domain.size()];
        BoolFunction { domain, bits }
    }

    pub fn ones(domain: DomainRef) -> BoolFunction {
        let bits = bitvec![u64, Lsb0; 1; domain.size()];
        BoolFunction { domain, bits }
    }

    pub fn from_fn(domain: DomainRef, f: impl Fn(usize) -> bool) -> BoolFunction {
        let bits = (0..domain.size()).map(f).collect();
        BoolFunction { domain, bits }
    }

    /// Packed form for domains of at most 64 elements: bit `i` holds `f(i)`.
    pub fn from_word(domain: DomainRef, word: u64) -> BoolFunction {
        assert!(domain.size() <= 64, "word form needs |X| <= 64");
        BoolFunction::from_fn(domain, |i| word >> i & 1 == 1)
    }

    pub fn word(&self) -> u64 {
        assert!(self.len() <= 64, "word form needs |X| <= 64");
        self.bits
            .iter_ones()
            .fold(0u64, |acc, i| acc | (1u64 << i))
    }

    /// The `index`-th function in enumeration order, which reads the bit
    /// string `f(0) f(1) ... f(|X|-1)` as a binary number, `f(0)` most
    /// significant.
    pub fn from_index(domain: DomainRef, index: u64) -> BoolFunction {
        let n = domain.size();
        BoolFunction::from_fn(domain, |i| index >> (n - 1 - i) & 1 == 1)
    }

    /// Parses a string of `0`/`1` characters, element 0 first.
    pub fn from_bit_str(domain: DomainRef, s: &str) -> Result<BoolFunction> {
        let bits: Result<BitVec<u64, Lsb0>> = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect();
        BoolFunction::new(domain, bits?)
    }

    pub fn to_bit_str(&self) -> String {
        self.bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }

    /// Hex form of the bit string (element 0 is the high bit of the first
    /// digit), right-padded with zero bits to a whole number of digits.
    pub fn to_hex(&self) -> String {
        self.bits
            .chunks(4)
            .map(|chunk| {
                let nibble = chunk
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (j, b)| acc | (u32::from(*b) << (3 - j)));
                char::from_digit(nibble, 16).expect("nibble")
            })
            .collect()
    }

    pub fn from_hex(domain: DomainRef, hex: &str) -> Result<BoolFunction> {
        let n = domain.size();
        let hex = hex.trim().trim_start_matches("0x");
        if hex.len() != n.div_ceil(4) {
            return Err(Error::Parse(format!(
                "expected {} hex digits for |X| = {n}, got {}",
                n.div_ceil(4),
                hex.len()
            )));
        }
        let mut bits = BitVec::<u64, Lsb0>::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
            for j in 0..4 {
                bits.push(nibble >> (3 - j) & 1 == 1);
            }
        }
        if bits[n..].any() {
            return Err(Error::Parse("non-zero padding bits in hex string".into()));
        }
        bits.truncate(n);
        BoolFunction::new(domain, bits)
    }

    pub fn domain(&self) -> &DomainRef {
        &self.domain
    }

    pub fn bits(&self) -> &BitSlice<u64, Lsb0> {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, x: usize) -> bool {
        self.bits[x]
    }

    pub fn set(&mut self, x: usize, value: bool) {
        self.bits.set(x, value);
    }

    pub fn flip(&mut self, x: usize) {
        let v = self.bits[x];
        self.bits.set(x, !v);
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_constant(&self) -> bool {
        self.bits.all() || self.bits.not_any()
    }

    pub fn complement(&self) -> BoolFunction {
        BoolFunction {
            domain: self.domain.clone(),
            bits: !self.bits.clone(),
        }
    }

    /// `(πf)(x) = f(π(x))` for a permutation given as an index map.
    pub fn permuted(&self, perm: &[usize]) -> BoolFunction {
        BoolFunction::from_fn(self.domain.clone(), |x| self.bits[perm[x]])
    }

    /// Number of elements where the two functions differ.
    pub fn disagreements(&self, other: &BoolFunction) -> Result<usize> {
        self.domain.check_same(&other.domain)?;
        Ok((self.bits.clone() ^ other.bits.as_bitslice()).count_ones())
    }
}

impl fmt::Debug for BoolFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolFunction({} on {})", self.to_bit_str(), self.domain)
    }
}

/// Serialized form of a function: the domain record plus hex bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub domain: DomainSpec,
    pub bits: String,
}

impl From<&BoolFunction> for FunctionRecord {
    fn from(f: &BoolFunction) -> Self {
        FunctionRecord {
            domain: f.domain.spec(),
            bits: f.to_hex(),
        }
    }
}

impl TryFrom<&FunctionRecord> for BoolFunction {
    type Error = Error;
    fn try_from(rec: &FunctionRecord) -> Result<Self> {
        BoolFunction::from_hex(Arc::new(Domain::new(rec.domain)?), &rec.bits)
    }
}

/// `μ_S(f)`: the fraction of `S` on which `f` is 1.
pub fn density(f: &BoolFunction, set: &[usize]) -> Result<Rational> {
    if set.is_empty() {
        return Err(Error::UndefinedDensity);
    }
    let mut ones = 0i64;
    for &x in set {
        if x >= f.len() {
            return Err(Error::DomainMismatch(format!(
                "element {x} outside domain of size {}",
                f.len()
            )));
        }
        ones += i64::from(f.get(x));
    }
    Ok(Rational::new(ones, set.len() as i64))
}

pub fn part_counts(f: &BoolFunction, partition: &DomainPartition) -> Result<CountVector> {
    f.domain().check_same(partition.domain())?;
    Ok(CountVector(
        partition
            .parts()
            .iter()
            .map(|part| part.iter().filter(|&&x| f.get(x)).count())
            .collect(),
    ))
}

/// Normalized Hamming distance `|{x : f(x) != g(x)}| / |X|`.
pub fn hamming_distance(f: &BoolFunction, g: &BoolFunction) -> Result<Rational> {
    let diff = f.disagreements(g)?;
    Ok(Rational::new(diff as i64, f.len() as i64))
}

/// All `2^|X|` functions in enumeration order, subject to the global cap.
pub fn enumerate_functions(domain: &DomainRef) -> Result<FunctionIter> {
    enumerate_functions_capped(domain, Limits::global().enumeration_bits)
}

pub fn enumerate_functions_capped(domain: &DomainRef, cap_bits: usize) -> Result<FunctionIter> {
    let n = domain.size();
    if n > cap_bits || n >= 64 {
        return Err(Error::TooLargeForEnumeration {
            size: n,
            cap: cap_bits.min(63),
        });
    }
    Ok(FunctionIter {
        domain: domain.clone(),
        next: 0,
        end: 1u64 << n,
    })
}

/// Streaming iterator over all functions of a small domain.
#[derive(Debug)]
pub struct FunctionIter {
    domain: DomainRef,
    next: u64,
    end: u64,
}

impl Iterator for FunctionIter {
    type Item = BoolFunction;

    fn next(&mut self) -> Option<BoolFunction> {
        if self.next >= self.end {
            return None;
        }
        let f = BoolFunction::from_index(self.domain.clone(), self.next);
        self.next += 1;
        Some(f)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for FunctionIter {}

/// Packed words (`bit i = f(i)`) of every function on a small domain, in
/// word order. Used by the oracles' inner loops.
pub(crate) fn all_words(domain: &Domain) -> Result<std::ops::Range<u64>> {
    let n = domain.size();
    let cap = Limits::global().enumeration_bits;
    if n > cap || n >= 64 {
        return Err(Error::TooLargeForEnumeration { size: n, cap });
    }
    Ok(0..1u64 << n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(n: usize) -> DomainRef {
        Domain::line(n).unwrap()
    }

    #[test]
    fn density_examples() {
        let dom = line(4);
        let all: Vec<usize> = (0..4).collect();
        assert_eq!(density(&BoolFunction::ones(dom.clone()), &[1, 3]).unwrap(), Rational::from(1));
        assert_eq!(density(&BoolFunction::zeros(dom.clone()), &all).unwrap(), Rational::from(0));
        let f = BoolFunction::from_bit_str(dom.clone(), "1010").unwrap();
        assert_eq!(density(&f, &all).unwrap(), Rational::new(1, 2));
        assert_eq!(density(&f, &[]), Err(Error::UndefinedDensity));
    }

    #[test]
    fn part_count_examples() {
        let dom = Domain::indexed(8).unwrap();
        let p = DomainPartition::new(dom.clone(), vec![(0..3).collect(), (3..8).collect()]).unwrap();
        assert_eq!(part_counts(&BoolFunction::zeros(dom.clone()), &p).unwrap().0, vec![0, 0]);
        assert_eq!(part_counts(&BoolFunction::ones(dom.clone()), &p).unwrap().0, vec![3, 5]);
        let q = DomainPartition::new(dom.clone(), vec![(0..4).collect(), (4..8).collect()]).unwrap();
        let ind = BoolFunction::from_fn(dom, |x| x < 4);
        assert_eq!(part_counts(&ind, &q).unwrap().0, vec![4, 0]);
        let other = BoolFunction::zeros(line(8));
        assert!(part_counts(&other, &q).is_err());
    }

    #[test]
    fn hamming_examples() {
        let dom = line(4);
        let f = BoolFunction::from_bit_str(dom.clone(), "1100").unwrap();
        let g = BoolFunction::from_bit_str(dom.clone(), "1010").unwrap();
        assert_eq!(hamming_distance(&f, &f).unwrap(), Rational::from(0));
        assert_eq!(hamming_distance(&f, &f.complement()).unwrap(), Rational::from(1));
        assert_eq!(hamming_distance(&f, &g).unwrap(), Rational::new(1, 2));
        assert!(hamming_distance(&f, &BoolFunction::zeros(line(5))).is_err());
    }

    #[test]
    fn enumeration_order_and_cap() {
        let fs: Vec<String> = enumerate_functions(&line(2))
            .unwrap()
            .map(|f| f.to_bit_str())
            .collect();
        assert_eq!(fs, vec!["00", "01", "10", "11"]);
        assert_eq!(enumerate_functions(&line(4)).unwrap().count(), 16);
        let err = enumerate_functions(&Domain::indexed(25).unwrap()).unwrap_err();
        assert!(matches!(err, Error::TooLargeForEnumeration { size: 25, cap: 24 }));
    }

    #[test]
    fn hex_codec() {
        let dom = line(6);
        let f = BoolFunction::from_bit_str(dom.clone(), "101101").unwrap();
        assert_eq!(f.to_hex(), "b4");
        assert_eq!(BoolFunction::from_hex(dom.clone(), "b4").unwrap(), f);
        assert!(BoolFunction::from_hex(dom.clone(), "b5").is_err());
        assert!(BoolFunction::from_hex(dom, "b").is_err());
        let rec = FunctionRecord::from(&f);
        assert_eq!(BoolFunction::try_from(&rec).unwrap(), f);
    }

    #[test]
    fn hamming_is_a_metric_on_small_domains() {
        for n in 1..=6 {
            let dom = line(n);
            let fs: Vec<BoolFunction> = enumerate_functions(&dom).unwrap().collect();
            for f in &fs {
                for g in &fs {
                    let fg = hamming_distance(f, g).unwrap();
                    assert_eq!(fg, hamming_distance(g, f).unwrap());
                    assert_eq!(fg == Rational::from(0), f == g);
                }
            }
            // Triangle inequality on a deterministic subsample for n = 6,
            // all triples below.
            let step = if n == 6 { 5 } else { 1 };
            for f in fs.iter().step_by(step) {
                for g in fs.iter().step_by(step) {
                    for h in &fs {
                        let lhs = hamming_distance(f, h).unwrap();
                        let rhs = hamming_distance(f, g).unwrap() + hamming_distance(g, h).unwrap();
                        assert!(lhs <= rhs);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn counts_sum_to_weight_and_densities_average(word in 0u64..(1 << 12), labels in prop::collection::vec(0usize..4, 12)) {
            let dom = Domain::indexed(12).unwrap();
            let f = BoolFunction::from_word(dom.clone(), word);
            let p = DomainPartition::from_labels(dom, &labels).unwrap();
            let counts = part_counts(&f, &p).unwrap();
            prop_assert_eq!(counts.total(), f.count_ones());
            let all: Vec<usize> = (0..12).collect();
            let weighted = p.parts().iter().fold(Rational::from(0), |acc, part| {
                acc + density(&f, part).unwrap() * Rational::from(part.len() as i64)
            }) / Rational::from(12);
            prop_assert_eq!(weighted, density(&f, &all).unwrap());
        }

        #[test]
        fn word_and_hex_round_trip(word in any::<u64>(), n in 1usize..=64) {
            let dom = Domain::indexed(n).unwrap();
            let masked = if n == 64 { word } else { word & ((1u64 << n) - 1) };
            let f = BoolFunction::from_word(dom.clone(), masked);
            prop_assert_eq!(f.word(), masked);
            prop_assert_eq!(BoolFunction::from_hex(dom, &f.to_hex()).unwrap(), f);
        }
    }
}
