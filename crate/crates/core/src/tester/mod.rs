//! Sample-based testers `T(x⃗, y⃗)` and their acceptance probabilities.

mod certify;
mod density;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{checked_pow, DomainRef};
use crate::error::{Error, Result};
use crate::function::BoolFunction;
use crate::limits::Limits;
use crate::property::{format_rational, granular_cover_property, parse_rational, PropertySpec};
use crate::rng::trial_rng;
use crate::Rational;

pub use certify::{certify_density_gap, part_size_shapes, GapCertificate, GapViolation};
pub use density::{density_sample_count, DensityTester, Enclosure};

type RuleFn = dyn Fn(&[usize], &[bool]) -> Rational + Send + Sync;

/// How a tester maps an observation `(x⃗, y⃗)` to an acceptance probability.
#[derive(Clone)]
pub enum Rule {
    /// Accepts with a fixed probability.
    Constant(Rational),
    /// Accepts iff every observed label equals `expected(x_j)`.
    LabelMatch(BoolFunction),
    /// Two samples on a hypergrid; rejects iff they witness a violation
    /// `x ⪯ y`, `f(x) = 1`, `f(y) = 0`.
    ViolationPair,
    /// Explicit table indexed by `tuple_index · 2^s + label_bits`, where
    /// `tuple_index` reads `x⃗` in base `|X|` (first sample most significant)
    /// and bit `j` of `label_bits` is `y_j`.
    Table(Arc<Vec<Rational>>),
    Density(Arc<DensityTester>),
    Custom(Arc<RuleFn>),
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Constant(p) => write!(f, "Constant({p})"),
            Rule::LabelMatch(g) => write!(f, "LabelMatch({})", g.to_bit_str()),
            Rule::ViolationPair => write!(f, "ViolationPair"),
            Rule::Table(t) => write!(f, "Table({} entries)", t.len()),
            Rule::Density(d) => write!(f, "{d:?}"),
            Rule::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A tester observing `s` uniform labeled samples.
#[derive(Debug, Clone)]
pub struct SampleTester {
    domain: DomainRef,
    s: usize,
    rule: Rule,
}

fn unit_interval(p: Rational) -> Result<Rational> {
    if p < Rational::zero() || p > Rational::from(1) {
        return Err(Error::InvalidParameter(format!("acceptance probability {p} outside [0,1]")));
    }
    Ok(p)
}

impl SampleTester {
    pub fn constant(domain: DomainRef, s: usize, p: Rational) -> Result<SampleTester> {
        Ok(SampleTester {
            domain,
            s,
            rule: Rule::Constant(unit_interval(p)?),
        })
    }

    pub fn label_match(expected: BoolFunction, s: usize) -> Result<SampleTester> {
        if s == 0 {
            return Err(Error::InvalidParameter("label tester needs s ≥ 1".into()));
        }
        Ok(SampleTester {
            domain: expected.domain().clone(),
            s,
            rule: Rule::LabelMatch(expected),
        })
    }

    pub fn violation_pair(domain: DomainRef) -> Result<SampleTester> {
        domain.require_grid()?;
        Ok(SampleTester {
            domain,
            s: 2,
            rule: Rule::ViolationPair,
        })
    }

    pub fn table(domain: DomainRef, s: usize, table: Vec<Rational>) -> Result<SampleTester> {
        let tuples = checked_pow(domain.size() as u64, s)
            .and_then(|t| t.checked_mul(1 << s))
            .ok_or_else(|| Error::InvalidParameter("table tester too large".into()))?;
        if table.len() as u64 != tuples {
            return Err(Error::InvalidParameter(format!(
                "table has {} entries, expected {tuples}",
                table.len()
            )));
        }
        for &p in &table {
            unit_interval(p)?;
        }
        Ok(SampleTester {
            domain,
            s,
            rule: Rule::Table(Arc::new(table)),
        })
    }

    /// A tester from an arbitrary rule. Values are checked to lie in `[0,1]`
    /// whenever they are evaluated.
    pub fn custom(
        domain: DomainRef,
        s: usize,
        rule: impl Fn(&[usize], &[bool]) -> Rational + Send + Sync + 'static,
    ) -> SampleTester {
        SampleTester {
            domain,
            s,
            rule: Rule::Custom(Arc::new(rule)),
        }
    }

    pub fn density(tester: DensityTester) -> SampleTester {
        SampleTester {
            domain: tester.property().domain().clone(),
            s: tester.sample_count(),
            rule: Rule::Density(Arc::new(tester)),
        }
    }

    pub fn domain(&self) -> &DomainRef {
        &self.domain
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn as_density(&self) -> Option<&DensityTester> {
        match &self.rule {
            Rule::Density(d) => Some(d),
            _ => None,
        }
    }

    /// `T(x⃗, y⃗)`.
    pub fn accept_prob(&self, xs: &[usize], ys: &[bool]) -> Rational {
        debug_assert_eq!(xs.len(), self.s);
        debug_assert_eq!(ys.len(), self.s);
        let indicator = |b: bool| Rational::from(i64::from(b));
        match &self.rule {
            Rule::Constant(p) => *p,
            Rule::LabelMatch(g) => indicator(xs.iter().zip(ys).all(|(&x, &y)| g.get(x) == y)),
            Rule::ViolationPair => {
                let below = |a: usize, b: usize| {
                    let (ca, cb) = (
                        self.domain.grid_coords(a).expect("grid"),
                        self.domain.grid_coords(b).expect("grid"),
                    );
                    ca.iter().zip(&cb).all(|(u, v)| u <= v)
                };
                let violation = |i: usize, j: usize| ys[i] && !ys[j] && below(xs[i], xs[j]);
                indicator(!(violation(0, 1) || violation(1, 0)))
            }
            Rule::Table(t) => {
                let n = self.domain.size();
                let tuple = xs.iter().fold(0usize, |acc, &x| acc * n + x);
                let labels = ys
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (j, &y)| acc | usize::from(y) << j);
                t[(tuple << self.s) | labels]
            }
            Rule::Density(d) => indicator(d.accepts_sample(xs, ys)),
            Rule::Custom(rule) => rule(xs, ys),
        }
    }

    fn checked_accept_prob(&self, xs: &[usize], ys: &[bool]) -> Result<Rational> {
        let p = self.accept_prob(xs, ys);
        if matches!(self.rule, Rule::Custom(_)) {
            unit_interval(p)?;
        }
        Ok(p)
    }

    /// Serializable description, for testers built from a spec.
    pub fn describe(&self) -> Option<TesterSpec> {
        match &self.rule {
            Rule::Constant(p) => Some(TesterSpec::Constant {
                p: format_rational(p),
                s: self.s,
            }),
            Rule::LabelMatch(g) => Some(TesterSpec::LabelMatch {
                expected: g.to_bit_str(),
                s: self.s,
            }),
            Rule::ViolationPair => Some(TesterSpec::ViolationPair),
            Rule::Density(d) => d.describe(),
            Rule::Table(_) | Rule::Custom(_) => None,
        }
    }
}

/// Tester description as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum TesterSpec {
    Constant { p: String, s: usize },
    LabelMatch { expected: String, s: usize },
    ViolationPair,
    Density {
        property: PropertySpec,
        epsilon: String,
        #[serde(default)]
        per_part: bool,
    },
    Monotonicity { epsilon: String },
}

impl TesterSpec {
    pub fn build(&self, domain: &DomainRef) -> Result<SampleTester> {
        match self {
            TesterSpec::Constant { p, s } => SampleTester::constant(domain.clone(), *s, parse_rational(p)?),
            TesterSpec::LabelMatch { expected, s } => {
                SampleTester::label_match(BoolFunction::from_bit_str(domain.clone(), expected)?, *s)
            }
            TesterSpec::ViolationPair => SampleTester::violation_pair(domain.clone()),
            TesterSpec::Density {
                property,
                epsilon,
                per_part,
            } => {
                let built = property.build(domain)?;
                let kp = built.as_kpart().ok_or_else(|| {
                    Error::InvalidParameter("the density tester needs a k-part symmetric property".into())
                })?;
                let mut t = DensityTester::new(kp.clone(), parse_rational(epsilon)?)?.per_part(*per_part);
                t.set_spec(Some(self.clone()));
                Ok(SampleTester::density(t))
            }
            TesterSpec::Monotonicity { epsilon } => monotonicity_tester(domain, parse_rational(epsilon)?),
        }
    }
}

/// Exact `p_T(f) = E_x⃗[T(x⃗, f(x⃗))]` by summing over all of `X^s`.
pub fn acceptance_probability_exact(t: &SampleTester, f: &BoolFunction) -> Result<Rational> {
    t.domain.check_same(f.domain())?;
    let n = t.domain.size() as u64;
    let tuples = checked_pow(n, t.s).map(u128::from).unwrap_or(u128::MAX);
    let cap = Limits::global().tester_tuples;
    if tuples > cap {
        return Err(Error::cap_with_hint(
            "exact acceptance probability: |X|^s tuples",
            tuples,
            cap,
            "estimate with acceptance_probability_mc (or use DensityTester::acceptance_enclosure)",
        ));
    }
    let tuples = tuples as u64;
    // Numerators grouped by denominator keep the inner loop in integers.
    let chunks = 64u64.min(tuples.max(1));
    let per_chunk = tuples.div_ceil(chunks);
    let partials: Vec<Result<HashMap<i64, i128>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut sums: HashMap<i64, i128> = HashMap::new();
            let mut xs = vec![0usize; t.s];
            let mut ys = vec![false; t.s];
            for idx in c * per_chunk..((c + 1) * per_chunk).min(tuples) {
                let mut rest = idx;
                for j in (0..t.s).rev() {
                    xs[j] = (rest % n) as usize;
                    rest /= n;
                    ys[j] = f.get(xs[j]);
                }
                let p = t.checked_accept_prob(&xs, &ys)?;
                if !p.is_zero() {
                    *sums.entry(*p.denom()).or_insert(0) += i128::from(*p.numer());
                }
            }
            Ok(sums)
        })
        .collect();
    let mut total = num_rational::BigRational::zero();
    for part in partials {
        for (den, num) in part? {
            total += num_rational::BigRational::new(num.into(), den.into());
        }
    }
    total /= num_rational::BigRational::from_integer(tuples.into());
    let (num, den) = (total.numer().to_i64(), total.denom().to_i64());
    match (num, den) {
        (Some(num), Some(den)) => Ok(Rational::new(num, den)),
        _ => Err(Error::Internal("acceptance probability denominator overflows i64".into())),
    }
}

/// Monte Carlo estimate of `p_T(f)` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn within(&self, value: f64, sigmas: f64) -> bool {
        let slack = sigmas * self.std_error.max(0.5 / (self.trials as f64).sqrt() * 1e-9);
        (self.mean - value).abs() <= slack.max(1e-12)
    }
}

fn draw_sample(t: &SampleTester, f: &BoolFunction, rng: &mut impl Rng) -> (Vec<usize>, Vec<bool>) {
    let n = t.domain.size();
    let xs: Vec<usize> = (0..t.s).map(|_| rng.gen_range(0..n)).collect();
    let ys = xs.iter().map(|&x| f.get(x)).collect();
    (xs, ys)
}

/// Mean of `T(x⃗, f(x⃗))` over `trials` independent uniform draws; trial `t`
/// uses stream `t` of `seed`.
pub fn acceptance_probability_mc(
    t: &SampleTester,
    f: &BoolFunction,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    t.domain.check_same(f.domain())?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let (xs, ys) = draw_sample(t, f, &mut rng);
            t.checked_accept_prob(&xs, &ys).map(|p| p.to_f64().unwrap_or(f64::NAN))
        })
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if trials > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(Estimate {
        mean,
        std_error: (var / n).sqrt(),
        trials,
    })
}

/// Outcome of one tester run together with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TesterVerdict {
    pub accept: bool,
    pub seed: u64,
    pub trial: u64,
    pub samples: Vec<usize>,
    pub labels: Vec<bool>,
    /// `T(x⃗, y⃗)` as `p/q`.
    pub accept_prob: String,
    /// Density estimates `c̃_i`, for density testers.
    pub estimates: Vec<String>,
}

pub fn run_tester(t: &SampleTester, f: &BoolFunction, seed: u64) -> Result<TesterVerdict> {
    run_tester_trial(t, f, seed, 0)
}

/// One run on stream `trial` of `seed`: draw `x⃗`, then accept with
/// probability `T(x⃗, f(x⃗))` using an exact integer coin.
pub fn run_tester_trial(t: &SampleTester, f: &BoolFunction, seed: u64, trial: u64) -> Result<TesterVerdict> {
    t.domain.check_same(f.domain())?;
    let mut rng = trial_rng(seed, trial);
    let (xs, ys) = draw_sample(t, f, &mut rng);
    let p = t.checked_accept_prob(&xs, &ys)?;
    let accept = rng.gen_range(0..*p.denom()) < *p.numer();
    let estimates = t
        .as_density()
        .map(|d| d.estimates(&xs, &ys).iter().map(format_rational).collect())
        .unwrap_or_default();
    Ok(TesterVerdict {
        accept,
        seed,
        trial,
        samples: xs,
        labels: ys,
        accept_prob: format_rational(&p),
        estimates,
    })
}

/// Empirical acceptance rate over `trials` runs (trial `t` on stream `t`).
pub fn empirical_accept_rate(t: &SampleTester, f: &BoolFunction, trials: u64, seed: u64) -> Result<Estimate> {
    let accepts: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|trial| run_tester_trial(t, f, seed, trial).map(|v| v.accept))
        .collect::<Result<_>>()?;
    let n = trials.max(1) as f64;
    let mean = accepts.iter().filter(|&&a| a).count() as f64 / n;
    Ok(Estimate {
        mean,
        std_error: (mean * (1.0 - mean) / n).sqrt(),
        trials,
    })
}

/// The density tester for the granular cover of the monotone functions at
/// radius `ε/2`, run at tester radius `ε/2`.
pub fn monotonicity_tester(domain: &DomainRef, epsilon: Rational) -> Result<SampleTester> {
    let (n, d) = domain.require_grid()?;
    if epsilon <= Rational::zero() {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let blocks = (Rational::from(d as i64) / epsilon).ceil().to_integer();
    if blocks > n as i64 {
        return Err(Error::InvalidParameter(format!(
            "monotonicity tester needs ⌈d/ε⌉ = {blocks} ≤ n = {n}"
        )));
    }
    let half = epsilon / 2;
    let cover = granular_cover_property(domain, half)?;
    let mut t = DensityTester::new(cover, half)?;
    t.set_spec(Some(TesterSpec::Monotonicity {
        epsilon: format_rational(&epsilon),
    }));
    Ok(SampleTester::density(t))
}
