//! Exhaustive certification of the density tester's completeness/soundness gap.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{CountVector, Domain, DomainPartition};
use crate::error::{Error, Result};
use crate::property::{product_ranges, KPartSymmetricProperty};
use crate::tester::density::{density_sample_count, DensityTester};
use crate::Rational;

/// Non-increasing compositions of `size` into exactly `k` positive parts.
pub fn part_size_shapes(size: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, parts: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if rest == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for first in (1..=max.min(rest)).rev() {
            if first * parts < rest {
                break;
            }
            prefix.push(first);
            go(rest - first, parts - 1, first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(size, k, size, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapViolation {
    pub shape: Vec<usize>,
    pub counts: Vec<usize>,
    /// `"member"` when the lower bound on acceptance is below 2/3, `"far"`
    /// when the upper bound on far acceptance exceeds 1/3.
    pub side: &'static str,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCertificate {
    pub size: usize,
    pub k: usize,
    pub q: usize,
    pub shapes: usize,
    pub count_vectors: usize,
    /// Smallest certified lower bound on `p_T(f)` over members.
    pub min_member_acceptance: f64,
    /// Largest certified upper bound on `p_T(f)` over ε-far inputs.
    pub max_far_acceptance: f64,
    pub violations: Vec<GapViolation>,
}

impl GapCertificate {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the 2/3–1/3 gap of the density tester for every k-part symmetric
/// property on a domain of `size` points and every input function.
///
/// Acceptance is monotone in the admissible set `A` and depends on `f` only
/// through its count vector `c`. So for each part-size shape and each `c` it
/// suffices to bound two testers: `A = {c}` (the smallest `A` containing `f`)
/// from below, and `A = {a : ‖a − c‖₁ > ε|X|}` (the largest `A` from which
/// `f` is ε-far) from above.
pub fn certify_density_gap(size: usize, k: usize, epsilon: Rational, per_part: bool) -> Result<GapCertificate> {
    let domain = Domain::indexed(size)?;
    let shapes = part_size_shapes(size, k);
    if shapes.is_empty() {
        return Err(Error::InvalidParameter(format!("cannot split {size} points into {k} parts")));
    }
    let far_l1 = |a: &CountVector, c: &CountVector| {
        Rational::from(a.l1(c) as i64) > epsilon * Rational::from(size as i64)
    };
    let mut jobs = Vec::new();
    for shape in &shapes {
        let mut start = 0;
        let parts: Vec<Vec<usize>> = shape
            .iter()
            .map(|&len| {
                start += len;
                (start - len..start).collect()
            })
            .collect();
        let partition = DomainPartition::new(domain.clone(), parts)?;
        let vectors = product_ranges(shape);
        for c in &vectors {
            jobs.push((shape.clone(), partition.clone(), vectors.clone(), c.clone()));
        }
    }
    let results: Vec<(f64, f64, Vec<GapViolation>)> = jobs
        .par_iter()
        .map(|(shape, partition, vectors, c)| {
            let build = |adm: BTreeSet<CountVector>| -> Result<DensityTester> {
                Ok(DensityTester::new(KPartSymmetricProperty::new(partition.clone(), adm)?, epsilon)?
                    .per_part(per_part))
            };
            let member = build([c.clone()].into())?.enclosure_for_counts(c);
            let far_set: BTreeSet<CountVector> = vectors.iter().filter(|a| far_l1(a, c)).cloned().collect();
            let far_hi = if far_set.is_empty() {
                0.0
            } else {
                build(far_set)?.enclosure_for_counts(c).hi
            };
            let mut violations = Vec::new();
            if !member.at_least(2.0 / 3.0) {
                violations.push(GapViolation {
                    shape: shape.clone(),
                    counts: c.0.clone(),
                    side: "member",
                    bound: member.lo,
                });
            }
            if far_hi > 1.0 / 3.0 {
                violations.push(GapViolation {
                    shape: shape.clone(),
                    counts: c.0.clone(),
                    side: "far",
                    bound: far_hi,
                });
            }
            Ok((member.lo, far_hi, violations))
        })
        .collect::<Result<_>>()?;
    let q = density_sample_count(k, epsilon)? * if per_part { k } else { 1 };
    let mut cert = GapCertificate {
        size,
        k,
        q,
        shapes: shapes.len(),
        count_vectors: jobs.len(),
        min_member_acceptance: 1.0,
        max_far_acceptance: 0.0,
        violations: Vec::new(),
    };
    for (lo, hi, v) in results {
        cert.min_member_acceptance = cert.min_member_acceptance.min(lo);
        cert.max_far_acceptance = cert.max_far_acceptance.max(hi);
        cert.violations.extend(v);
    }
    Ok(cert)
}
