//! Finite domains, their element codecs, and ordered partitions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Structural description of a finite domain, as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    /// The line `[n] = {1, ..., n}`.
    Line { n: usize },
    /// The hypergrid `[n]^d`.
    Hypergrid { n: usize, d: usize },
    /// The vector space `F_p^n`.
    VectorSpace { p: u64, n: usize },
    /// The `n(n-1)/2` vertex pairs of a graph on `n` vertices.
    GraphEdges { n: usize },
    /// An opaque set `{0, ..., size-1}`.
    Indexed { size: usize },
}

/// A structured label for a domain element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Index(usize),
    /// Grid point with 1-based coordinates; lines use one coordinate.
    Point(Vec<usize>),
    /// Vector over `F_p`, coordinates in `0..p`.
    Vector(Vec<u64>),
    /// Vertex pair `(u, v)` with `u < v`, vertices 0-based.
    Edge(usize, usize),
}

/// A finite domain `X` with a bijection between indices `0..|X|` and labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    spec: DomainSpec,
    size: usize,
}

pub type DomainRef = Arc<Domain>;

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|q| q * q <= p).all(|q| !p.is_multiple_of(q))
}

impl Domain {
    pub fn new(spec: DomainSpec) -> Result<Domain> {
        let size = match spec {
            DomainSpec::Line { n } => {
                if n == 0 {
                    return Err(Error::InvalidParameter("line needs n >= 1".into()));
                }
                n
            }
            DomainSpec::Hypergrid { n, d } => {
                if n == 0 || d == 0 {
                    return Err(Error::InvalidParameter("hypergrid needs n, d >= 1".into()));
                }
                checked_pow(n as u64, d).ok_or_else(|| {
                    Error::InvalidParameter(format!("hypergrid [{n}]^{d} is too large"))
                })? as usize
            }
            DomainSpec::VectorSpace { p, n } => {
                if !is_prime(p) || n == 0 {
                    return Err(Error::InvalidParameter(format!(
                        "vector space needs prime p and n >= 1, got p={p}, n={n}"
                    )));
                }
                checked_pow(p, n).ok_or_else(|| {
                    Error::InvalidParameter(format!("F_{p}^{n} is too large"))
                })? as usize
            }
            DomainSpec::GraphEdges { n } => {
                if n < 2 {
                    return Err(Error::InvalidParameter("graph needs n >= 2 vertices".into()));
                }
                n * (n - 1) / 2
            }
            DomainSpec::Indexed { size } => {
                if size == 0 {
                    return Err(Error::InvalidParameter("domain must be non-empty".into()));
                }
                size
            }
        };
        Ok(Domain { spec, size })
    }

    pub fn line(n: usize) -> Result<DomainRef> {
        Domain::new(DomainSpec::Line { n }).map(Arc::new)
    }

    pub fn hypergrid(n: usize, d: usize) -> Result<DomainRef> {
        Domain::new(DomainSpec::Hypergrid { n, d }).map(Arc::new)
    }

    pub fn vector_space(p: u64, n: usize) -> Result<DomainRef> {
        Domain::new(DomainSpec::VectorSpace { p, n }).map(Arc::new)
    }

    pub fn graph_edges(n: usize) -> Result<DomainRef> {
        Domain::new(DomainSpec::GraphEdges { n }).map(Arc::new)
    }

    pub fn indexed(size: usize) -> Result<DomainRef> {
        Domain::new(DomainSpec::Indexed { size }).map(Arc::new)
    }

    pub fn spec(&self) -> DomainSpec {
        self.spec
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `(n, d)` when the domain is a line or hypergrid.
    pub fn grid_shape(&self) -> Option<(usize, usize)> {
        match self.spec {
            DomainSpec::Line { n } => Some((n, 1)),
            DomainSpec::Hypergrid { n, d } => Some((n, d)),
            _ => None,
        }
    }

    pub(crate) fn require_grid(&self) -> Result<(usize, usize)> {
        self.grid_shape().ok_or_else(|| {
            Error::DomainMismatch(format!("expected a hypergrid domain, got {self}"))
        })
    }

    /// 1-based grid coordinates of an index; the first coordinate is most significant.
    pub fn grid_coords(&self, index: usize) -> Option<Vec<usize>> {
        let (n, d) = self.grid_shape()?;
        let mut coords = vec![0; d];
        let mut rest = index;
        for c in coords.iter_mut().rev() {
            *c = rest % n + 1;
            rest /= n;
        }
        Some(coords)
    }

    pub fn grid_index(&self, coords: &[usize]) -> Option<usize> {
        let (n, d) = self.grid_shape()?;
        if coords.len() != d || coords.iter().any(|&c| c == 0 || c > n) {
            return None;
        }
        Some(coords.iter().fold(0, |acc, &c| acc * n + (c - 1)))
    }

    pub fn decode(&self, index: usize) -> Result<Element> {
        if index >= self.size {
            return Err(Error::InvalidParameter(format!(
                "index {index} outside domain of size {}",
                self.size
            )));
        }
        Ok(match self.spec {
            DomainSpec::Line { .. } | DomainSpec::Hypergrid { .. } => {
                Element::Point(self.grid_coords(index).expect("grid domain"))
            }
            DomainSpec::VectorSpace { p, n } => {
                let mut digits = vec![0; n];
                let mut rest = index as u64;
                for dgt in digits.iter_mut().rev() {
                    *dgt = rest % p;
                    rest /= p;
                }
                Element::Vector(digits)
            }
            DomainSpec::GraphEdges { n } => {
                let mut rest = index;
                let mut u = 0;
                while rest >= n - 1 - u {
                    rest -= n - 1 - u;
                    u += 1;
                }
                Element::Edge(u, u + 1 + rest)
            }
            DomainSpec::Indexed { .. } => Element::Index(index),
        })
    }

    pub fn encode(&self, element: &Element) -> Result<usize> {
        let bad = || Error::InvalidParameter(format!("{element:?} is not an element of {self}"));
        match (self.spec, element) {
            (DomainSpec::Line { .. } | DomainSpec::Hypergrid { .. }, Element::Point(c)) => {
                self.grid_index(c).ok_or_else(bad)
            }
            (DomainSpec::VectorSpace { p, n }, Element::Vector(v)) => {
                if v.len() != n || v.iter().any(|&x| x >= p) {
                    return Err(bad());
                }
                Ok(v.iter().fold(0u64, |acc, &x| acc * p + x) as usize)
            }
            (DomainSpec::GraphEdges { n }, &Element::Edge(u, v)) => {
                if u >= v || v >= n {
                    return Err(bad());
                }
                let before: usize = (0..u).map(|a| n - 1 - a).sum();
                Ok(before + (v - u - 1))
            }
            (DomainSpec::Indexed { size }, &Element::Index(i)) if i < size => Ok(i),
            _ => Err(bad()),
        }
    }

    pub(crate) fn check_same(&self, other: &Domain) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!("{self} vs {other}")))
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.spec {
            DomainSpec::Line { n } => write!(f, "[{n}]"),
            DomainSpec::Hypergrid { n, d } => write!(f, "[{n}]^{d}"),
            DomainSpec::VectorSpace { p, n } => write!(f, "F_{p}^{n}"),
            DomainSpec::GraphEdges { n } => write!(f, "edges(K_{n})"),
            DomainSpec::Indexed { size } => write!(f, "indexed({size})"),
        }
    }
}

pub(crate) fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Per-part counts of ones, aligned to a [`DomainPartition`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountVector(pub Vec<usize>);

impl CountVector {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// L1 distance between two count vectors of equal length.
    pub fn l1(&self, other: &CountVector) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.abs_diff(b))
            .sum()
    }
}

impl std::ops::Deref for CountVector {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for CountVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// An ordered partition `X_1, ..., X_k` of a domain into non-empty parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainPartition {
    domain: DomainRef,
    parts: Vec<Vec<usize>>,
    part_of: Vec<usize>,
}

impl DomainPartition {
    /// Builds a partition from explicit parts. Empty parts are dropped; the
    /// remaining parts must be disjoint and cover the domain.
    pub fn new(domain: DomainRef, parts: Vec<Vec<usize>>) -> Result<DomainPartition> {
        let size = domain.size();
        let mut part_of = vec![usize::MAX; size];
        let mut kept = Vec::with_capacity(parts.len());
        for mut part in parts.into_iter().filter(|p| !p.is_empty()) {
            part.sort_unstable();
            let id = kept.len();
            for &x in &part {
                if x >= size {
                    return Err(Error::InvalidParameter(format!(
                        "element {x} outside domain of size {size}"
                    )));
                }
                if part_of[x] != usize::MAX {
                    return Err(Error::InvalidParameter(format!(
                        "element {x} appears in two parts"
                    )));
                }
                part_of[x] = id;
            }
            kept.push(part);
        }
        if let Some(x) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(Error::InvalidParameter(format!(
                "element {x} is not covered by any part"
            )));
        }
        Ok(DomainPartition {
            domain,
            parts: kept,
            part_of,
        })
    }

    /// Groups elements by label; parts are ordered by label value.
    pub fn from_labels(domain: DomainRef, labels: &[usize]) -> Result<DomainPartition> {
        if labels.len() != domain.size() {
            return Err(Error::DomainMismatch(format!(
                "{} labels for a domain of size {}",
                labels.len(),
                domain.size()
            )));
        }
        let k = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut parts = vec![Vec::new(); k];
        for (x, &l) in labels.iter().enumerate() {
            parts[l].push(x);
        }
        DomainPartition::new(domain, parts)
    }

    /// The one-part partition `{X}`.
    pub fn whole(domain: DomainRef) -> DomainPartition {
        let all = (0..domain.size()).collect();
        DomainPartition::new(domain, vec![all]).expect("whole domain is a partition")
    }

    pub fn singletons(domain: DomainRef) -> DomainPartition {
        let parts = (0..domain.size()).map(|x| vec![x]).collect();
        DomainPartition::new(domain, parts).expect("singletons form a partition")
    }

    pub fn domain(&self) -> &DomainRef {
        &self.domain
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn part_of(&self, x: usize) -> usize {
        self.part_of[x]
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }
}

/// Splits `[n]` into `k` consecutive intervals whose lengths differ by at most
/// one, longer intervals first. Returns the interval id of each coordinate
/// value `1..=n` (0-based in the output vector).
pub fn axis_intervals(n: usize, k: usize) -> Vec<usize> {
    let (base, extra) = (n / k, n % k);
    let mut out = Vec::with_capacity(n);
    for j in 0..k {
        let len = base + usize::from(j < extra);
        out.extend(std::iter::repeat_n(j, len));
    }
    out
}

/// Partitions `[n]^d` into `k^d` combinatorial boxes, ordered lexicographically
/// by block coordinate in `[k]^d`.
pub fn hypergrid_blocks(domain: &DomainRef, k: usize) -> Result<DomainPartition> {
    let (n, d) = domain.require_grid()?;
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "block count per axis must satisfy 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let axis = axis_intervals(n, k);
    let blocks = checked_pow(k as u64, d)
        .ok_or_else(|| Error::InvalidParameter("too many blocks".into()))? as usize;
    let mut parts = vec![Vec::new(); blocks];
    for x in 0..domain.size() {
        let coords = domain.grid_coords(x).expect("grid domain");
        let b = coords.iter().fold(0, |acc, &c| acc * k + axis[c - 1]);
        parts[b].push(x);
    }
    DomainPartition::new(domain.clone(), parts)
}
