//! The density-estimation tester for k-part symmetric properties.

use std::collections::HashMap;
use std::fmt;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::function::{part_counts, BoolFunction};
use crate::hp;
use crate::property::{format_rational, KPartSymmetricProperty, PropertySpec};
use crate::tester::TesterSpec;
use crate::Rational;

/// `q = ⌈(8k²/ε²)·ln(6k)⌉`: with this many samples Hoeffding gives
/// `Pr[|c̃_i − c_i| ≥ (ε/4k)|X|] ≤ 1/(3k)` for every part.
pub fn density_sample_count(k: usize, epsilon: Rational) -> Result<usize> {
    if epsilon <= Rational::zero() {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("the partition has no parts".into()));
    }
    let (p, r) = (*epsilon.numer() as u128, *epsilon.denom() as u128);
    let k = k as u128;
    let factor = hp::ratio(8 * k * k * r * r, p * p);
    let q = hp::ceil_u64(&(factor * hp::ln_u128(6 * k)));
    usize::try_from(q)
        .ok()
        .filter(|&q| q <= 1 << 32)
        .ok_or_else(|| Error::InvalidParameter(format!("sample count {q} is impractically large")))
}

/// Certified bounds on an acceptance probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
    /// Probability mass of the pruned branches (already inside `[lo, hi]`).
    pub truncated: f64,
}

impl Enclosure {
    pub fn at_least(&self, p: f64) -> bool {
        self.lo >= p
    }

    pub fn at_most(&self, p: f64) -> bool {
        self.hi <= p
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }
}

/// Branches below this probability are pruned and their mass tracked.
const CUTOFF: f64 = 1e-16;
/// Allowance for floating-point error in the pmf tables and sums.
const FP_SLACK: f64 = 1e-9;

/// Draws `q` samples, estimates each part count as `c̃_i = (|X|/q)·n_i`
/// where `n_i` counts samples in part `i` labeled 1, and accepts iff some
/// admissible `c` has `Σ_i |c̃_i − c_i| < (ε/4)|X|`.
///
/// With `per_part` set, each part gets its own block of `q` samples (so
/// `s = kq`) and `n_i` only counts hits in block `i`.
#[derive(Clone)]
pub struct DensityTester {
    property: KPartSymmetricProperty,
    epsilon: Rational,
    q: usize,
    per_part: bool,
    admissible: Vec<Vec<i64>>,
    spec: Option<TesterSpec>,
}

impl fmt::Debug for DensityTester {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityTester")
            .field("k", &self.k())
            .field("epsilon", &self.epsilon)
            .field("q", &self.q)
            .field("per_part", &self.per_part)
            .field("admissible", &self.admissible.len())
            .finish()
    }
}

impl DensityTester {
    pub fn new(property: KPartSymmetricProperty, epsilon: Rational) -> Result<DensityTester> {
        let q = density_sample_count(property.k(), epsilon)?;
        DensityTester::with_sample_count(property, epsilon, q)
    }

    /// Same decision rule with an explicit `q`; used to cross-check the exact
    /// engine against tuple enumeration at tiny sample sizes.
    pub fn with_sample_count(property: KPartSymmetricProperty, epsilon: Rational, q: usize) -> Result<DensityTester> {
        if epsilon <= Rational::zero() {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if q == 0 {
            return Err(Error::InvalidParameter("q must be positive".into()));
        }
        let admissible = property
            .admissible()
            .iter()
            .map(|c| c.iter().map(|&v| v as i64).collect())
            .collect();
        Ok(DensityTester {
            property,
            epsilon,
            q,
            per_part: false,
            admissible,
            spec: None,
        })
    }

    pub fn per_part(mut self, per_part: bool) -> DensityTester {
        self.per_part = per_part;
        self
    }

    pub(crate) fn set_spec(&mut self, spec: Option<TesterSpec>) {
        self.spec = spec;
    }

    pub fn describe(&self) -> Option<TesterSpec> {
        self.spec.clone().or_else(|| {
            Some(TesterSpec::Density {
                property: PropertySpec::Kpart {
                    parts: self.property.partition().parts().to_vec(),
                    admissible: self.property.admissible().iter().map(|c| c.0.clone()).collect(),
                },
                epsilon: format_rational(&self.epsilon),
                per_part: self.per_part,
            })
        })
    }

    pub fn property(&self) -> &KPartSymmetricProperty {
        &self.property
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    pub fn k(&self) -> usize {
        self.property.k()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn is_per_part(&self) -> bool {
        self.per_part
    }

    /// Total number of samples `s` the tester observes.
    pub fn sample_count(&self) -> usize {
        if self.per_part {
            self.q * self.k()
        } else {
            self.q
        }
    }

    /// Hit counts `n_i`.
    pub fn hits(&self, xs: &[usize], ys: &[bool]) -> Vec<usize> {
        let partition = self.property.partition();
        let mut n = vec![0; self.k()];
        for (j, (&x, &y)) in xs.iter().zip(ys).enumerate() {
            let part = partition.part_of(x);
            if y && (!self.per_part || j / self.q == part) {
                n[part] += 1;
            }
        }
        n
    }

    /// The estimates `c̃_i = (|X|/q)·n_i`.
    pub fn estimates(&self, xs: &[usize], ys: &[bool]) -> Vec<Rational> {
        let size = self.property.domain().size() as i64;
        self.hits(xs, ys)
            .into_iter()
            .map(|n| Rational::new(size * n as i64, self.q as i64))
            .collect()
    }

    /// The decision on hit counts, in integers:
    /// `4·den(ε)·Σ_i |n_i|X| − c_i q| < num(ε)·|X|·q`.
    pub fn accepts_hits(&self, n: &[usize]) -> bool {
        let size = self.property.domain().size() as i128;
        let q = self.q as i128;
        let (num, den) = (i128::from(*self.epsilon.numer()), i128::from(*self.epsilon.denom()));
        let bound = num * size * q;
        self.admissible.iter().any(|c| {
            let dev: i128 = n
                .iter()
                .zip(c)
                .map(|(&ni, &ci)| (ni as i128 * size - i128::from(ci) * q).abs())
                .sum();
            4 * den * dev < bound
        })
    }

    pub fn accepts_sample(&self, xs: &[usize], ys: &[bool]) -> bool {
        self.accepts_hits(&self.hits(xs, ys))
    }

    /// `p_T(f)`, which depends on `f` only through its part counts.
    pub fn acceptance_enclosure(&self, f: &BoolFunction) -> Result<Enclosure> {
        let counts = part_counts(f, self.property.partition())?;
        Ok(self.enclosure_for_counts(&counts))
    }

    /// `p_T` for a function with part counts `c`, by exhaustive enumeration of
    /// the hit-count distribution. Parts `1..k−1` are enumerated branch by
    /// branch (sequential conditional binomials for the shared pool,
    /// independent binomials per part); the accepted set of the last part's
    /// count is a union of intervals summed through a cached CDF. Branches of
    /// probability below `1e-16` are pruned and their mass is added to the
    /// upper end of the enclosure.
    pub fn enclosure_for_counts(&self, c: &[usize]) -> Enclosure {
        let k = self.k();
        assert_eq!(c.len(), k, "count vector has the wrong number of parts");
        let size = self.property.domain().size();
        let rates: Vec<f64> = if self.per_part {
            c.iter().map(|&ci| ci as f64 / size as f64).collect()
        } else {
            let mut used = 0;
            c.iter()
                .map(|&ci| {
                    let left = size - used;
                    used += ci;
                    if left == 0 {
                        0.0
                    } else {
                        ci as f64 / left as f64
                    }
                })
                .collect()
        };
        let mut engine = Engine {
            tester: self,
            size: size as i128,
            rates,
            ln_fact: ln_factorials(self.q),
            last_cdf: HashMap::new(),
            accepted: 0.0,
            truncated: 0.0,
            prefix: Vec::with_capacity(k),
        };
        engine.descend(0, self.q, 1.0);
        let (acc, trunc) = (engine.accepted, engine.truncated);
        Enclosure {
            lo: (acc - FP_SLACK).max(0.0),
            hi: (acc + trunc + FP_SLACK).min(1.0),
            truncated: trunc,
        }
    }
}

fn ln_factorials(q: usize) -> Vec<f64> {
    // Neumaier-compensated running sum of ln i.
    let mut out = Vec::with_capacity(q + 1);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    out.push(0.0);
    for i in 1..=q {
        let term = (i as f64).ln();
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
        out.push(sum + comp);
    }
    out
}

fn binomial_pmf(ln_fact: &[f64], m: usize, n: usize, r: f64) -> f64 {
    if r <= 0.0 {
        return f64::from(u8::from(n == 0));
    }
    if r >= 1.0 {
        return f64::from(u8::from(n == m));
    }
    let ln = ln_fact[m] - ln_fact[n] - ln_fact[m - n] + n as f64 * r.ln() + (m - n) as f64 * (-r).ln_1p();
    ln.exp()
}

struct Engine<'a> {
    tester: &'a DensityTester,
    size: i128,
    rates: Vec<f64>,
    ln_fact: Vec<f64>,
    last_cdf: HashMap<usize, Vec<f64>>,
    accepted: f64,
    truncated: f64,
    prefix: Vec<usize>,
}

impl Engine<'_> {
    fn trials_after(&self, level_trials: usize, n: usize) -> usize {
        if self.tester.per_part {
            self.tester.q
        } else {
            level_trials - n
        }
    }

    fn descend(&mut self, level: usize, trials: usize, prob: f64) {
        if level + 1 == self.rates.len() {
            let mass = self.last_level_mass(trials);
            self.accepted += prob * mass;
            return;
        }
        let r = self.rates[level];
        for n in 0..=trials {
            let branch = prob * binomial_pmf(&self.ln_fact, trials, n, r);
            if branch < CUTOFF {
                self.truncated += branch;
                continue;
            }
            self.prefix.push(n);
            let next = self.trials_after(trials, n);
            self.descend(level + 1, next, branch);
            self.prefix.pop();
        }
    }

    fn last_level_mass(&mut self, m: usize) -> f64 {
        let t = self.tester;
        let q = t.q as i128;
        let size = self.size;
        let (num, den) = (i128::from(*t.epsilon.numer()), i128::from(*t.epsilon.denom()));
        let bound = num * size * q;
        let last = self.rates.len() - 1;
        let mut intervals: Vec<(usize, usize)> = Vec::new();
        for a in &t.admissible {
            let dev: i128 = self
                .prefix
                .iter()
                .zip(a)
                .map(|(&ni, &ci)| (ni as i128 * size - i128::from(ci) * q).abs())
                .sum();
            let slack = bound - 4 * den * dev;
            if slack <= 0 {
                continue;
            }
            // Largest |n·|X| − a_k q| allowed by the strict inequality.
            let reach = (slack - 1) / (4 * den);
            let centre = i128::from(a[last]) * q;
            let lo = (centre - reach).max(0);
            let lo = (lo + size - 1) / size;
            let hi = (centre + reach) / size;
            let hi = hi.min(m as i128);
            if lo <= hi {
                intervals.push((lo as usize, hi as usize));
            }
        }
        if intervals.is_empty() {
            return 0.0;
        }
        intervals.sort_unstable();
        let r = self.rates[last];
        let ln_fact = &self.ln_fact;
        let cdf = self.last_cdf.entry(m).or_insert_with(|| {
            let mut acc = vec![0.0; m + 2];
            for n in 0..=m {
                acc[n + 1] = acc[n] + binomial_pmf(ln_fact, m, n, r);
            }
            acc
        });
        let mut mass = 0.0;
        let mut current = intervals[0];
        for &(lo, hi) in &intervals[1..] {
            if lo <= current.1 + 1 {
                current.1 = current.1.max(hi);
            } else {
                mass += cdf[current.1 + 1] - cdf[current.0];
                current = (lo, hi);
            }
        }
        mass + cdf[current.1 + 1] - cdf[current.0]
    }
}

impl Enclosure {
    pub fn from_exact(p: &Rational) -> Enclosure {
        let v = p.to_f64().unwrap_or(f64::NAN);
        Enclosure { lo: v, hi: v, truncated: 0.0 }
    }
}
