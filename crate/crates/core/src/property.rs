//! Properties `P ⊆ {0,1}^X`: generic predicates, k-part symmetric properties in
//! count-vector form, and the concrete properties used by the testers.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{hypergrid_blocks, CountVector, DomainPartition, DomainRef};
use crate::error::{Error, Result};
use crate::function::{all_words, part_counts, BoolFunction};
use crate::limits::Limits;
use crate::Rational;

/// A k-part symmetric property: membership is decided by the per-part count
/// vector alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KPartSymmetricProperty {
    partition: DomainPartition,
    admissible: BTreeSet<CountVector>,
}

impl KPartSymmetricProperty {
    pub fn new(
        partition: DomainPartition,
        admissible: impl IntoIterator<Item = CountVector>,
    ) -> Result<KPartSymmetricProperty> {
        let sizes = partition.part_sizes();
        let admissible: BTreeSet<CountVector> = admissible.into_iter().collect();
        for c in &admissible {
            if c.len() != sizes.len() || c.iter().zip(&sizes).any(|(&ci, &si)| ci > si) {
                return Err(Error::InvalidParameter(format!(
                    "count vector {c} does not fit part sizes {sizes:?}"
                )));
            }
        }
        Ok(KPartSymmetricProperty {
            partition,
            admissible,
        })
    }

    pub fn partition(&self) -> &DomainPartition {
        &self.partition
    }

    pub fn admissible(&self) -> &BTreeSet<CountVector> {
        &self.admissible
    }

    pub fn k(&self) -> usize {
        self.partition.k()
    }

    pub fn domain(&self) -> &DomainRef {
        self.partition.domain()
    }

    pub fn is_empty(&self) -> bool {
        self.admissible.is_empty()
    }

    pub fn contains(&self, f: &BoolFunction) -> bool {
        part_counts(f, &self.partition)
            .map(|c| self.admissible.contains(&c))
            .unwrap_or(false)
    }

    pub(crate) fn counts_of_word(&self, word: u64) -> CountVector {
        CountVector(
            self.partition
                .parts()
                .iter()
                .map(|part| part.iter().filter(|&&x| word >> x & 1 == 1).count())
                .collect(),
        )
    }

    /// Number of functions with the given count vector.
    pub fn class_size(&self, counts: &CountVector) -> u128 {
        self.partition
            .part_sizes()
            .iter()
            .zip(counts.iter())
            .map(|(&n, &c)| binomial(n as u64, c as u64))
            .product()
    }

    /// All count vectors `c` with `0 <= c_i <= |X_i|`, in lexicographic order.
    pub fn all_count_vectors(&self) -> Vec<CountVector> {
        product_ranges(&self.partition.part_sizes())
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Every vector `v` with `0 <= v_i <= bounds[i]`, lexicographic.
pub(crate) fn product_ranges(bounds: &[usize]) -> Vec<CountVector> {
    let mut out = vec![Vec::with_capacity(bounds.len())];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=b).map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(CountVector).collect()
}

/// Block classification in the granular representation of a function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Trit {
    Zero,
    One,
    Star,
}

impl fmt::Display for Trit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trit::Zero => "0",
            Trit::One => "1",
            Trit::Star => "*",
        })
    }
}

/// Per-block `{0, 1, *}` summary of a function, blocks in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GranularPattern(pub Vec<Trit>);

impl GranularPattern {
    fn of_counts(counts: &[usize], sizes: &[usize]) -> GranularPattern {
        GranularPattern(
            counts
                .iter()
                .zip(sizes)
                .map(|(&c, &n)| match c {
                    0 => Trit::Zero,
                    c if c == n => Trit::One,
                    _ => Trit::Star,
                })
                .collect(),
        )
    }

    pub fn stars(&self) -> usize {
        self.0.iter().filter(|&&t| t == Trit::Star).count()
    }
}

impl fmt::Display for GranularPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.0 {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

pub fn granular_pattern(f: &BoolFunction, blocks: &DomainPartition) -> Result<GranularPattern> {
    let counts = part_counts(f, blocks)?;
    Ok(GranularPattern::of_counts(&counts, &blocks.part_sizes()))
}

type Predicate = Arc<dyn Fn(&BoolFunction) -> bool + Send + Sync>;

#[derive(Clone)]
enum Kind {
    KPart(KPartSymmetricProperty),
    Monotone,
    NotEq(BoolFunction),
    /// Explicit member set in word form (`bit i = f(i)`).
    Members(Arc<HashSet<u64>>),
    Predicate(Predicate),
}

/// A property of Boolean functions on a fixed domain.
#[derive(Clone)]
pub struct Property {
    domain: DomainRef,
    name: String,
    kind: Kind,
    spec: Option<PropertySpec>,
}

impl fmt::Debug for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Property")
            .field("name", &self.name)
            .field("domain", &self.domain.to_string())
            .finish()
    }
}

impl Property {
    pub fn from_predicate(
        domain: DomainRef,
        name: impl Into<String>,
        pred: impl Fn(&BoolFunction) -> bool + Send + Sync + 'static,
    ) -> Property {
        Property {
            domain,
            name: name.into(),
            kind: Kind::Predicate(Arc::new(pred)),
            spec: None,
        }
    }

    /// A property given by its member list.
    pub fn from_members(
        domain: DomainRef,
        name: impl Into<String>,
        members: impl IntoIterator<Item = BoolFunction>,
    ) -> Result<Property> {
        if domain.size() > 64 {
            return Err(Error::TooLargeForEnumeration {
                size: domain.size(),
                cap: 64,
            });
        }
        let mut set = HashSet::new();
        for f in members {
            domain.check_same(f.domain())?;
            set.insert(f.word());
        }
        Ok(Property::from_words(domain, name, set))
    }

    pub(crate) fn from_words(domain: DomainRef, name: impl Into<String>, words: HashSet<u64>) -> Property {
        Property {
            domain,
            name: name.into(),
            kind: Kind::Members(Arc::new(words)),
            spec: None,
        }
    }

    pub fn domain(&self) -> &DomainRef {
        &self.domain
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Property {
        self.name = name.into();
        self
    }

    /// The structured form, when the property was built as k-part symmetric.
    pub fn as_kpart(&self) -> Option<&KPartSymmetricProperty> {
        match &self.kind {
            Kind::KPart(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_monotone(&self) -> bool {
        matches!(self.kind, Kind::Monotone)
    }

    /// Config record this property was built from, if any.
    pub fn spec(&self) -> Option<&PropertySpec> {
        self.spec.as_ref()
    }

    pub fn contains(&self, f: &BoolFunction) -> bool {
        if f.domain() != &self.domain && **f.domain() != *self.domain {
            return false;
        }
        match &self.kind {
            Kind::KPart(p) => p.contains(f),
            Kind::Monotone => is_monotone(f),
            Kind::NotEq(g) => f != g,
            Kind::Members(set) => f.len() <= 64 && set.contains(&f.word()),
            Kind::Predicate(pred) => pred(f),
        }
    }

    /// Membership for a packed word; the domain must have at most 64 elements.
    pub fn contains_word(&self, word: u64) -> bool {
        match &self.kind {
            Kind::KPart(p) => p.admissible.contains(&p.counts_of_word(word)),
            Kind::Members(set) => set.contains(&word),
            Kind::NotEq(g) => g.word() != word,
            _ => self.contains(&BoolFunction::from_word(self.domain.clone(), word)),
        }
    }

    /// Every member in packed-word form, sorted.
    pub fn member_words(&self) -> Result<Vec<u64>> {
        let mut words = match &self.kind {
            Kind::Monotone => {
                if self.domain.size() > 64 {
                    return Err(Error::TooLargeForEnumeration {
                        size: self.domain.size(),
                        cap: 64,
                    });
                }
                monotone_functions(&self.domain)?
                    .into_iter()
                    .map(|f| f.word())
                    .collect()
            }
            Kind::Members(set) => set.iter().copied().collect(),
            _ => all_words(&self.domain)?
                .filter(|&w| self.contains_word(w))
                .collect::<Vec<u64>>(),
        };
        words.sort_unstable();
        Ok(words)
    }

    pub fn members(&self) -> Result<Vec<BoolFunction>> {
        Ok(self
            .member_words()?
            .into_iter()
            .map(|w| BoolFunction::from_word(self.domain.clone(), w))
            .collect())
    }
}

impl From<KPartSymmetricProperty> for Property {
    fn from(p: KPartSymmetricProperty) -> Property {
        let spec = PropertySpec::Kpart {
            parts: p.partition.parts().to_vec(),
            admissible: p.admissible.iter().map(|c| c.0.clone()).collect(),
        };
        Property {
            domain: p.domain().clone(),
            name: format!("{}-part symmetric", p.k()),
            kind: Kind::KPart(p),
            spec: Some(spec),
        }
    }
}

/// `f(x) <= f(y)` for every covering pair `y = x + e_i` of the hypergrid.
pub fn is_monotone(f: &BoolFunction) -> bool {
    let Some((n, d)) = f.domain().grid_shape() else {
        return false;
    };
    let bits = f.bits();
    let mut stride = 1;
    for _ in 0..d {
        for x in bits.iter_ones() {
            // x + e_i exists iff the axis digit is below n - 1.
            if (x / stride) % n + 1 < n && !bits[x + stride] {
                return false;
            }
        }
        stride *= n;
    }
    true
}

pub fn monotone_property(domain: &DomainRef) -> Result<Property> {
    let (n, d) = domain.require_grid()?;
    Ok(Property {
        domain: domain.clone(),
        name: format!("monotone on [{n}]^{d}"),
        kind: Kind::Monotone,
        spec: Some(PropertySpec::Monotone),
    })
}

/// Every monotone function on a hypergrid, in enumeration order, built by
/// extending partial assignments along index order: a point is forced to 1
/// whenever one of its immediate predecessors is 1.
pub fn monotone_functions(domain: &DomainRef) -> Result<Vec<BoolFunction>> {
    let mut out = Vec::new();
    for_each_monotone(domain, Limits::global().monotone_functions, |bits| {
        out.push(BoolFunction::new(domain.clone(), bits.to_bitvec()).expect("length"));
    })?;
    Ok(out)
}

/// Calls `visit` on every monotone function; errors once more than `cap`
/// functions have been produced.
pub fn for_each_monotone(
    domain: &DomainRef,
    cap: u64,
    mut visit: impl FnMut(&BitSlice<u64, Lsb0>),
) -> Result<u64> {
    let (n, d) = domain.require_grid()?;
    let size = domain.size();
    let strides: Vec<usize> = (0..d).map(|i| n.pow((d - 1 - i) as u32)).collect();
    let mut bits = bitvec![u64, Lsb0; 0; size];
    let mut count = 0u64;

    fn extend(
        x: usize,
        n: usize,
        strides: &[usize],
        bits: &mut BitVec<u64, Lsb0>,
        count: &mut u64,
        cap: u64,
        visit: &mut dyn FnMut(&BitSlice<u64, Lsb0>),
    ) -> bool {
        if x == bits.len() {
            *count += 1;
            if *count > cap {
                return false;
            }
            visit(bits);
            return true;
        }
        let forced = strides
            .iter()
            .any(|&s| !(x / s).is_multiple_of(n) && bits[x - s]);
        if !forced {
            bits.set(x, false);
            if !extend(x + 1, n, strides, bits, count, cap, visit) {
                return false;
            }
        }
        bits.set(x, true);
        let ok = extend(x + 1, n, strides, bits, count, cap, visit);
        bits.set(x, false);
        ok
    }

    if !extend(0, n, &strides, &mut bits, &mut count, cap, &mut visit) {
        return Err(Error::cap("monotone function enumeration", format!("> {cap}"), cap));
    }
    Ok(count)
}

/// The 1-part property whose admissible global counts are given.
pub fn fully_symmetric_property(
    domain: &DomainRef,
    admissible_counts: impl IntoIterator<Item = usize>,
) -> Result<KPartSymmetricProperty> {
    let size = domain.size();
    let counts: Vec<CountVector> = admissible_counts
        .into_iter()
        .map(|c| {
            if c > size {
                Err(Error::InvalidParameter(format!(
                    "count {c} exceeds domain size {size}"
                )))
            } else {
                Ok(CountVector(vec![c]))
            }
        })
        .collect::<Result<_>>()?;
    KPartSymmetricProperty::new(DomainPartition::whole(domain.clone()), counts)
}

/// Every function except the given non-constant `g`.
pub fn noteq_property(g: &BoolFunction) -> Result<Property> {
    if g.is_constant() {
        return Err(Error::InvalidParameter(
            "NotEq(g) requires a non-constant g".into(),
        ));
    }
    Ok(Property {
        domain: g.domain().clone(),
        name: format!("NotEq({})", g.to_bit_str()),
        kind: Kind::NotEq(g.clone()),
        spec: Some(PropertySpec::Noteq { g: g.to_hex() }),
    })
}

/// `⌈d/ε⌉`, the number of blocks per axis used by the granular cover.
pub fn cover_blocks_per_axis(d: usize, epsilon: Rational) -> Result<usize> {
    if epsilon <= Rational::from(0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let k = (Rational::from(d as i64) / epsilon).ceil().to_integer();
    Ok(k.max(1) as usize)
}

/// Granular patterns of all monotone functions for the given block partition.
pub fn realizable_monotone_patterns(
    domain: &DomainRef,
    blocks: &DomainPartition,
) -> Result<BTreeSet<GranularPattern>> {
    let sizes = blocks.part_sizes();
    let mut patterns = BTreeSet::new();
    let mut counts = vec![0usize; blocks.k()];
    for_each_monotone(domain, Limits::global().monotone_functions, |bits| {
        counts.iter_mut().for_each(|c| *c = 0);
        for x in bits.iter_ones() {
            counts[blocks.part_of(x)] += 1;
        }
        patterns.insert(GranularPattern::of_counts(&counts, &sizes));
    })?;
    Ok(patterns)
}

/// The `k^d`-part symmetric cover of the monotone functions on `[n]^d`, with
/// `k = ⌈d/ε⌉`: all functions whose granular pattern equals that of some
/// monotone function.
pub fn granular_cover_property(
    domain: &DomainRef,
    epsilon: Rational,
) -> Result<KPartSymmetricProperty> {
    let (_, d) = domain.require_grid()?;
    let k = cover_blocks_per_axis(d, epsilon)?;
    let blocks = hypergrid_blocks(domain, k)?;
    let patterns = realizable_monotone_patterns(domain, &blocks)?;
    let sizes = blocks.part_sizes();
    let cap = Limits::global().count_vectors;
    let mut admissible = BTreeSet::new();
    for pattern in &patterns {
        let ranges: Vec<(usize, usize)> = pattern
            .0
            .iter()
            .zip(&sizes)
            .map(|(t, &n)| match t {
                Trit::Zero => (0, 0),
                Trit::One => (n, n),
                Trit::Star => (1, n - 1),
            })
            .collect();
        let mut vectors = vec![Vec::with_capacity(ranges.len())];
        for &(lo, hi) in &ranges {
            vectors = vectors
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    (lo..=hi).map(move |c| {
                        let mut v = prefix.clone();
                        v.push(c);
                        v
                    })
                })
                .collect();
            if (admissible.len() + vectors.len()) as u128 > cap {
                return Err(Error::cap("granular cover count vectors", "more", cap));
            }
        }
        admissible.extend(vectors.into_iter().map(CountVector));
    }
    KPartSymmetricProperty::new(blocks, admissible)
}

/// Whether `property` is invariant under every transposition of two elements
/// lying in the same part, checked on every member.
pub fn is_k_part_symmetric(property: &Property, partition: &DomainPartition) -> Result<bool> {
    property.domain().check_same(partition.domain())?;
    let members: HashSet<u64> = property.member_words()?.into_iter().collect();
    let pairs: Vec<(usize, usize)> = partition
        .parts()
        .iter()
        .flat_map(|part| {
            part.iter().enumerate().flat_map(move |(a, &i)| {
                part[a + 1..].iter().map(move |&j| (i, j))
            })
        })
        .collect();
    for &w in &members {
        for &(i, j) in &pairs {
            if (w >> i & 1) != (w >> j & 1) {
                let swapped = w ^ (1 << i) ^ (1 << j);
                if !members.contains(&swapped) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Serializable description of a property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PropertySpec {
    /// Explicit partition and admissible count vectors.
    Kpart {
        parts: Vec<Vec<usize>>,
        admissible: Vec<Vec<usize>>,
    },
    /// Single part; admissible global counts.
    FullySymmetric { counts: Vec<usize> },
    Monotone,
    /// NotEq(g), `g` given in hex form.
    Noteq { g: String },
    /// Granular cover of the monotone functions; `epsilon` as `"p/q"`.
    GranularCover { epsilon: String },
}

impl PropertySpec {
    pub fn build(&self, domain: &DomainRef) -> Result<Property> {
        let mut prop = match self {
            PropertySpec::Kpart { parts, admissible } => {
                let partition = DomainPartition::new(domain.clone(), parts.clone())?;
                KPartSymmetricProperty::new(
                    partition,
                    admissible.iter().cloned().map(CountVector),
                )?
                .into()
            }
            PropertySpec::FullySymmetric { counts } => {
                Property::from(fully_symmetric_property(domain, counts.iter().copied())?)
                    .with_name("fully symmetric")
            }
            PropertySpec::Monotone => monotone_property(domain)?,
            PropertySpec::Noteq { g } => noteq_property(&BoolFunction::from_hex(domain.clone(), g)?)?,
            PropertySpec::GranularCover { epsilon } => {
                let eps = parse_rational(epsilon)?;
                Property::from(granular_cover_property(domain, eps)?)
                    .with_name(format!("granular cover (eps = {eps})"))
            }
        };
        prop.spec = Some(self.clone());
        Ok(prop)
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = 10i64.pow(frac.len() as u32);
        let negative = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let mag = int.abs() * scale + frac;
        return Ok(Rational::new(if negative { -mag } else { mag }, scale));
    }
    s.parse::<i64>().map(Rational::from).map_err(|_| bad())
}

/// Formats an exact rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational<T>(r: &num_rational::Ratio<T>) -> String
where
    T: Clone + num_integer::Integer + fmt::Display,
{
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::function::enumerate_functions;

    fn f(dom: &DomainRef, s: &str) -> BoolFunction {
        BoolFunction::from_bit_str(dom.clone(), s).unwrap()
    }

    #[test]
    fn monotone_examples() {
        let line = Domain::line(4).unwrap();
        let mono = monotone_property(&line).unwrap();
        assert!(mono.contains(&BoolFunction::zeros(line.clone())));
        assert!(mono.contains(&BoolFunction::ones(line.clone())));
        assert!(mono.contains(&f(&line, "0011")));
        assert!(!mono.contains(&f(&line, "0110")));
        let square = Domain::hypergrid(2, 2).unwrap();
        let mono2 = monotone_property(&square).unwrap();
        let count = enumerate_functions(&square).unwrap().filter(|g| mono2.contains(g)).count();
        assert_eq!(count, 6);
        assert!(monotone_property(&Domain::indexed(4).unwrap()).is_err());
    }

    #[test]
    fn recursive_extension_matches_filtering() {
        for (n, d) in [(4, 1), (3, 2), (4, 2), (2, 3), (2, 4)] {
            let dom = Domain::hypergrid(n, d).unwrap();
            let mono = monotone_property(&dom).unwrap();
            let filtered: Vec<u64> = enumerate_functions(&dom)
                .unwrap()
                .filter(is_monotone)
                .map(|g| g.word())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            assert_eq!(mono.member_words().unwrap(), filtered, "[{n}]^{d}");
        }
        // Lattice paths in a 4x4 grid.
        let dom = Domain::hypergrid(4, 2).unwrap();
        assert_eq!(monotone_functions(&dom).unwrap().len(), 70);
    }

    #[test]
    fn monotone_cap_is_enforced() {
        let dom = Domain::hypergrid(4, 2).unwrap();
        assert!(for_each_monotone(&dom, 69, |_| {}).is_err());
        assert_eq!(for_each_monotone(&dom, 70, |_| {}).unwrap(), 70);
    }

    #[test]
    fn fully_symmetric_examples() {
        let dom = Domain::indexed(8).unwrap();
        let everything = Property::from(fully_symmetric_property(&dom, 0..=8).unwrap());
        assert_eq!(everything.member_words().unwrap().len(), 256);
        let nothing = Property::from(fully_symmetric_property(&dom, []).unwrap());
        assert!(nothing.member_words().unwrap().is_empty());
        let balanced = Property::from(fully_symmetric_property(&dom, [4]).unwrap());
        assert_eq!(balanced.member_words().unwrap().len(), 70);
        assert!(fully_symmetric_property(&dom, [9]).is_err());
    }

    #[test]
    fn noteq_examples() {
        let dom = Domain::indexed(4).unwrap();
        let g = f(&dom, "0110");
        let p = noteq_property(&g).unwrap();
        assert!(!p.contains(&g));
        assert!(p.contains(&f(&dom, "0111")));
        assert_eq!(p.member_words().unwrap().len(), 15);
        assert!(noteq_property(&BoolFunction::ones(dom)).is_err());
    }

    #[test]
    fn granular_pattern_examples() {
        let line = Domain::line(4).unwrap();
        let blocks = hypergrid_blocks(&line, 2).unwrap();
        let show = |s: &str| granular_pattern(&f(&line, s), &blocks).unwrap().to_string();
        assert_eq!(show("1111"), "11");
        assert_eq!(show("1011"), "*1");
        assert_eq!(show("0001"), "0*");
    }

    #[test]
    fn granular_cover_on_a_short_line() {
        let line = Domain::line(4).unwrap();
        let blocks = hypergrid_blocks(&line, 2).unwrap();
        let patterns: Vec<String> = realizable_monotone_patterns(&line, &blocks)
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        let mut expected = vec!["00", "0*", "01", "*1", "11"];
        expected.sort_by_key(|s| {
            s.chars()
                .map(|c| match c {
                    '0' => Trit::Zero,
                    '1' => Trit::One,
                    _ => Trit::Star,
                })
                .collect::<Vec<_>>()
        });
        assert_eq!(patterns, expected);
        let cover = granular_cover_property(&line, Rational::new(1, 2)).unwrap();
        assert_eq!(cover.k(), 2);
        assert!(cover.contains(&f(&line, "1011")));
        assert!(!cover.contains(&f(&line, "1000")));
        for g in monotone_functions(&line).unwrap() {
            assert!(cover.contains(&g));
        }
        assert!(granular_cover_property(&line, Rational::new(1, 5)).is_err());
    }

    #[test]
    fn granular_cover_contains_monotone() {
        for (n, d, eps) in [(4, 2, Rational::new(1, 1)), (4, 2, Rational::new(2, 3)), (3, 2, Rational::new(1, 1)), (6, 1, Rational::new(1, 3))] {
            let dom = Domain::hypergrid(n, d).unwrap();
            let cover = Property::from(granular_cover_property(&dom, eps).unwrap());
            for g in monotone_functions(&dom).unwrap() {
                assert!(cover.contains(&g), "[{n}]^{d} eps={eps}: {g:?}");
            }
        }
    }

    #[test]
    fn kpart_symmetry_examples() {
        let dom = Domain::indexed(6).unwrap();
        let p = DomainPartition::new(dom.clone(), vec![vec![0, 2, 4], vec![1, 3, 5]]).unwrap();
        let kp = KPartSymmetricProperty::new(
            p.clone(),
            [CountVector(vec![1, 2]), CountVector(vec![3, 0])],
        )
        .unwrap();
        assert!(is_k_part_symmetric(&kp.into(), &p).unwrap());

        let dom4 = Domain::indexed(4).unwrap();
        let noteq = noteq_property(&f(&dom4, "0110")).unwrap();
        let whole = DomainPartition::whole(dom4.clone());
        assert!(!is_k_part_symmetric(&noteq, &whole).unwrap());

        let line = Domain::line(4).unwrap();
        let mono = monotone_property(&line).unwrap();
        assert!(is_k_part_symmetric(&mono, &DomainPartition::singletons(line)).unwrap());
    }

    #[test]
    fn kpart_rejects_out_of_range_vectors() {
        let dom = Domain::indexed(4).unwrap();
        let p = DomainPartition::new(dom, vec![vec![0], vec![1, 2, 3]]).unwrap();
        assert!(KPartSymmetricProperty::new(p.clone(), [CountVector(vec![2, 0])]).is_err());
        assert!(KPartSymmetricProperty::new(p, [CountVector(vec![1])]).is_err());
    }

    #[test]
    fn specs_build_and_round_trip() {
        let dom = Domain::indexed(4).unwrap();
        let spec = PropertySpec::Kpart {
            parts: vec![vec![0, 1], vec![2, 3]],
            admissible: vec![vec![0, 2], vec![1, 1]],
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.starts_with(r#"{"type":"kpart""#));
        let prop = serde_json::from_str::<PropertySpec>(&json).unwrap().build(&dom).unwrap();
        assert_eq!(prop.member_words().unwrap().len(), 1 + 4);
        let noteq = PropertySpec::Noteq { g: "6".into() }.build(&dom).unwrap();
        assert_eq!(noteq.member_words().unwrap().len(), 15);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/2").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("3").unwrap(), Rational::from(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&Rational::new(6, 4)), "3/2");
        assert_eq!(format_rational(&Rational::from(2)), "2");
    }

    proptest::proptest! {
        #[test]
        fn kpart_membership_depends_only_on_counts(labels in proptest::collection::vec(0usize..3, 10), seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let dom = Domain::indexed(10).unwrap();
            let partition = DomainPartition::from_labels(dom.clone(), &labels).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let all = product_ranges(&partition.part_sizes());
            let admissible: Vec<CountVector> = all.into_iter().filter(|_| rng.gen_bool(0.3)).collect();
            let kp = KPartSymmetricProperty::new(partition.clone(), admissible).unwrap();
            let prop = Property::from(kp.clone());
            let mut by_counts = std::collections::HashMap::new();
            for g in enumerate_functions(&dom).unwrap() {
                let c = part_counts(&g, &partition).unwrap();
                let m = prop.contains(&g);
                proptest::prop_assert_eq!(*by_counts.entry(c).or_insert(m), m);
            }
            proptest::prop_assert!(is_k_part_symmetric(&prop, &partition).unwrap());
        }
    }
}
