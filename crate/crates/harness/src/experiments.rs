//! The experiment kinds behind `symtest experiment`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use symtest_core::extraction::{run_pipeline, CoverConstruction, PipelineReport};
use symtest_core::oracle::{
    dilworth_width, distance_table, exact_distance, kpart_distance, max_antichain_strict, monotone_distance,
};
use symtest_core::property::monotone_property;
use symtest_core::regularity::{weak_regularity_partition, RegularityResult, SetFamily, WeightedHypergraph};
use symtest_core::rng::RNG_ALGORITHM;
use symtest_core::tester::{
    acceptance_probability_exact, empirical_accept_rate, monotonicity_tester, Enclosure, SampleTester,
};
use symtest_core::{enumerate_functions, BoolFunction, Domain, Property, Rational};

use crate::config::{ExperimentConfig, Plan};
use crate::error::Result;
use crate::far::generate_far_function;
use crate::generate::random_structured_property;
use crate::output::{exact, ratio_f64, sig12, Table};

/// Tables, summary, and verdict of one experiment.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub details: Value,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn verified(&self) -> bool {
        self.failures.is_empty()
    }

    /// The structured summary record written next to the CSV.
    pub fn summary(&self, config: &ExperimentConfig) -> Value {
        json!({
            "experiment": config.experiment.name(),
            "seed": config.seed,
            "rng": RNG_ALGORITHM,
            "config": config,
            "verified": self.verified(),
            "failures": self.failures,
            "rows": self.table.rows.len(),
            "details": self.details,
        })
    }
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    let plan = config.validate()?;
    let seed = config.seed;
    match plan {
        Plan::TesterRoc {
            property,
            tester,
            epsilon,
            trials,
            per_bucket,
        } => tester_roc(&property, &tester, epsilon, trials, per_bucket, seed),
        Plan::Sandwich {
            cases,
            gamma,
            construction,
        } => sandwich(&cases, gamma, construction),
        Plan::RegularityCertify {
            graphs,
            epsilon,
            family,
        } => regularity_certify(&graphs, epsilon, &family),
        Plan::OracleCrosscheck { grid, instances, size } => oracle_crosscheck(grid, instances, size, seed),
        Plan::MonotonicityScaling {
            sizes,
            epsilon,
            far_epsilon,
            trials,
        } => monotonicity_scaling(&sizes, epsilon, far_epsilon, trials, seed),
    }
}

/// Seed for the `j`-th function of an experiment, so that functions use
/// disjoint randomness and each row can be replayed on its own.
pub fn function_seed(seed: u64, j: u64) -> u64 {
    seed ^ j.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Exact acceptance probability as an enclosure, when it is cheap: density
/// testers with at most two parts, and any other tester within the tuple cap.
pub fn cheap_exact_acceptance(t: &SampleTester, f: &BoolFunction) -> Option<Enclosure> {
    match t.as_density() {
        Some(d) if d.k() <= 2 => d.acceptance_enclosure(f).ok(),
        Some(_) => None,
        None => {
            let tuples = (t.domain().size() as f64).powi(t.s() as i32);
            (tuples <= 1e6)
                .then(|| acceptance_probability_exact(t, f).ok())
                .flatten()
                .map(|p| Enclosure::from_exact(&p))
        }
    }
}

fn tester_roc(
    property: &Property,
    tester: &SampleTester,
    epsilon: Rational,
    trials: u64,
    per_bucket: usize,
    seed: u64,
) -> Result<Outcome> {
    let dom = property.domain();
    let distances = distance_table(property)?;
    let mut buckets: BTreeMap<Rational, Vec<u64>> = BTreeMap::new();
    for (w, d) in distances.iter().enumerate() {
        buckets.entry(*d).or_default().push(w as u64);
    }
    let mut table = Table::new(&[
        "distance",
        "distance_f64",
        "functions",
        "sampled",
        "trials",
        "accepted",
        "empirical_rate",
        "exact_min",
        "exact_max",
        "first_seed",
    ]);
    let mut sampled = Vec::new();
    let mut failures = Vec::new();
    let mut j = 0u64;
    for (d, words) in &buckets {
        let picks: Vec<u64> = (0..per_bucket.min(words.len()))
            .map(|i| words[i * words.len() / per_bucket.min(words.len())])
            .collect();
        let first_seed = function_seed(seed, j);
        let mut accepted = 0u64;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut all_exact = true;
        for &w in &picks {
            let f = BoolFunction::from_word(dom.clone(), w);
            let fseed = function_seed(seed, j);
            j += 1;
            let est = empirical_accept_rate(tester, &f, trials, fseed)?;
            accepted += (est.mean * trials as f64).round() as u64;
            match cheap_exact_acceptance(tester, &f) {
                Some(enc) => {
                    lo = lo.min(enc.lo);
                    hi = hi.max(enc.hi);
                    if *d == Rational::from(0) && !enc.at_least(2.0 / 3.0) {
                        failures.push(format!("member {} accepted with probability below 2/3", f.to_hex()));
                    }
                    if *d > epsilon && !enc.at_most(1.0 / 3.0) {
                        failures.push(format!("far function {} accepted with probability above 1/3", f.to_hex()));
                    }
                }
                None => all_exact = false,
            }
            sampled.push(json!({ "function": f.to_hex(), "distance": exact(d), "seed": fseed, "trials": trials }));
        }
        let total = trials * picks.len() as u64;
        let (lo, hi) = if all_exact {
            (sig12(lo), sig12(hi))
        } else {
            (String::new(), String::new())
        };
        table.push(vec![
            exact(d),
            sig12(ratio_f64(d)),
            words.len().to_string(),
            picks.len().to_string(),
            total.to_string(),
            accepted.to_string(),
            sig12(accepted as f64 / total as f64),
            lo,
            hi,
            first_seed.to_string(),
        ]);
    }
    Ok(Outcome {
        table,
        details: json!({
            "property": property.name(),
            "domain": dom.to_string(),
            "tester": tester.describe(),
            "sample_size": tester.s(),
            "epsilon": exact(&epsilon),
            "functions": sampled,
        }),
        failures,
    })
}

fn sandwich(
    cases: &[(Property, SampleTester, Rational)],
    gamma: Rational,
    construction: CoverConstruction,
) -> Result<Outcome> {
    let mut table = Table::new(&[
        "case",
        "property",
        "domain_size",
        "s",
        "epsilon",
        "gamma",
        "construction",
        "tester_valid",
        "min_member_acceptance",
        "max_far_acceptance",
        "parts",
        "iterations",
        "max_defect",
        "family_size",
        "atoms",
        "profiles",
        "lemma3_max_error",
        "lemma3_max_error_f64",
        "lemma3_holds",
        "lemma4_min_slack",
        "lemma4_holds",
        "property_size",
        "cover_size",
        "max_distance",
        "sandwich_holds",
    ]);
    let mut reports: Vec<PipelineReport> = Vec::new();
    let mut failures = Vec::new();
    for (i, (property, tester, epsilon)) in cases.iter().enumerate() {
        let r = run_pipeline(property, tester, *epsilon, gamma, construction)?;
        if !r.holds() {
            failures.push(format!("case {i} ({}): pipeline check failed", r.property));
        }
        table.push(vec![
            i.to_string(),
            r.property.clone(),
            r.domain_size.to_string(),
            r.s.to_string(),
            r.epsilon.clone(),
            r.gamma.clone(),
            serde_json::to_value(r.construction).expect("enum").as_str().unwrap_or_default().to_string(),
            r.validity.holds.to_string(),
            r.validity.min_member_acceptance.clone(),
            r.validity.max_far_acceptance.clone().unwrap_or_default(),
            r.regularity_parts.to_string(),
            r.regularity_iterations.to_string(),
            r.regularity_max_defect.clone(),
            r.family_size.to_string(),
            r.atom_sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
            r.profiles.to_string(),
            r.lemma3_max_error.clone(),
            sig12(r.lemma3_max_error_f64),
            r.lemma3_holds.to_string(),
            r.lemma4_min_slack.clone(),
            r.lemma4_holds.to_string(),
            r.sandwich.property_size.to_string(),
            r.sandwich.cover_size.to_string(),
            r.sandwich.max_distance.clone(),
            r.sandwich.holds.to_string(),
        ]);
        reports.push(r);
    }
    Ok(Outcome {
        table,
        details: json!({ "reports": reports }),
        failures,
    })
}

fn regularity_certify(graphs: &[(String, WeightedHypergraph)], epsilon: Rational, family: &SetFamily) -> Result<Outcome> {
    let mut table = Table::new(&[
        "instance",
        "vertices",
        "parts",
        "iterations",
        "iteration_bound",
        "entropy_bits",
        "family",
        "family_size",
        "max_defect",
        "max_defect_f64",
        "epsilon",
        "holds",
    ]);
    let results: Vec<RegularityResult> = graphs
        .par_iter()
        .map(|(_, g)| weak_regularity_partition(g, epsilon, family))
        .collect::<symtest_core::Result<_>>()?;
    let mut failures = Vec::new();
    let mut certificates = Vec::new();
    for ((name, g), res) in graphs.iter().zip(&results) {
        let c = &res.certificate;
        if !c.holds || res.iterations > res.iteration_bound {
            failures.push(format!("{name}: certificate fails or bound exceeded"));
        }
        table.push(vec![
            name.clone(),
            g.vertices().to_string(),
            res.partition.k().to_string(),
            res.iterations.to_string(),
            res.iteration_bound.to_string(),
            sig12(res.entropy_y),
            c.family.to_string(),
            c.family_size.to_string(),
            c.max_defect.clone(),
            sig12(c.max_defect_f64),
            c.epsilon.clone(),
            c.holds.to_string(),
        ]);
        certificates.push(json!({
            "instance": name,
            "partition": res.partition.parts(),
            "certificate": c,
            "information_values": res.information_values,
        }));
    }
    Ok(Outcome {
        table,
        details: json!({ "certificates": certificates }),
        failures,
    })
}

#[derive(Serialize)]
struct CheckRow {
    check: String,
    parameters: String,
    instances: u64,
    comparisons: u64,
    mismatches: u64,
    value: String,
    bound: String,
}

fn oracle_crosscheck(grid: (usize, usize), instances: u64, size: usize, seed: u64) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut failures = Vec::new();

    let (n, d) = grid;
    let dom = Domain::hypergrid(n, d)?;
    let mono = monotone_property(&dom)?;
    let table = distance_table(&mono)?;
    let functions: Vec<BoolFunction> = enumerate_functions(&dom)?.collect();
    let mismatches = functions
        .par_iter()
        .map(|f| monotone_distance(f).map(|m| u64::from(m != table[f.word() as usize])))
        .collect::<symtest_core::Result<Vec<u64>>>()?
        .into_iter()
        .sum::<u64>();
    rows.push(CheckRow {
        check: "monotone-matching-vs-enumeration".into(),
        parameters: format!("[{n}]^{d}"),
        instances: 1,
        comparisons: functions.len() as u64,
        mismatches,
        value: String::new(),
        bound: String::new(),
    });

    let idx = Domain::indexed(size)?;
    let mut compared = 0;
    let mut structured_mismatches = 0;
    for i in 0..instances {
        let p = random_structured_property(size, seed, i)?;
        let table = distance_table(&Property::from(p.clone()))?;
        let bad: u64 = (0..1u64 << size)
            .into_par_iter()
            .map(|w| {
                let f = BoolFunction::from_word(idx.clone(), w);
                kpart_distance(&f, &p).map(|d| u64::from(d != table[w as usize]))
            })
            .collect::<symtest_core::Result<Vec<u64>>>()?
            .into_iter()
            .sum();
        compared += 1u64 << size;
        structured_mismatches += bad;
    }
    rows.push(CheckRow {
        check: "kpart-closed-form-vs-enumeration".into(),
        parameters: format!("|X|={size}"),
        instances,
        comparisons: compared,
        mismatches: structured_mismatches,
        value: String::new(),
        bound: String::new(),
    });

    for k in 1..=4 {
        for d in 1..=2 {
            let a = max_antichain_strict(k, d)?;
            let bound = d * k.pow(d as u32 - 1);
            let width = dilworth_width(k, d);
            rows.push(CheckRow {
                check: "antichain".into(),
                parameters: format!("k={k} d={d}"),
                instances: 1,
                comparisons: 1,
                mismatches: u64::from(a.size > bound || (a.exact && a.size != width)),
                value: a.size.to_string(),
                bound: bound.to_string(),
            });
        }
    }

    let mut out = Table::new(&["check", "parameters", "instances", "comparisons", "mismatches", "value", "bound"]);
    for r in &rows {
        if r.mismatches > 0 {
            failures.push(format!("{} {}: {} mismatches", r.check, r.parameters, r.mismatches));
        }
        out.push(vec![
            r.check.clone(),
            r.parameters.clone(),
            r.instances.to_string(),
            r.comparisons.to_string(),
            r.mismatches.to_string(),
            r.value.clone(),
            r.bound.clone(),
        ]);
    }
    Ok(Outcome {
        table: out,
        details: json!({ "checks": rows }),
        failures,
    })
}

/// Monotone inputs on `[n]`: the constants and the threshold at `n/2`.
pub fn monotone_inputs(dom: &symtest_core::DomainRef) -> Vec<BoolFunction> {
    let n = dom.size();
    vec![
        BoolFunction::zeros(dom.clone()),
        BoolFunction::from_fn(dom.clone(), |x| x >= n / 2),
        BoolFunction::ones(dom.clone()),
    ]
}

fn monotonicity_scaling(
    sizes: &[usize],
    epsilon: Rational,
    far_epsilon: Rational,
    trials: u64,
    seed: u64,
) -> Result<Outcome> {
    let mut table = Table::new(&[
        "n",
        "sample_size",
        "input",
        "function",
        "distance",
        "trials",
        "accepted",
        "rate",
        "std_error",
        "seed",
    ]);
    let mut failures = Vec::new();
    let mut sample_sizes = Vec::new();
    let mut j = 0u64;
    for &n in sizes {
        let dom = Domain::line(n)?;
        let tester = monotonicity_tester(&dom, epsilon)?;
        let mono = monotone_property(&dom)?;
        sample_sizes.push(tester.s());
        let anti = BoolFunction::from_fn(dom.clone(), |x| x < n / 2);
        let searched = generate_far_function(&mono, far_epsilon, function_seed(seed, 1 << 32 | n as u64))?;
        let inputs = monotone_inputs(&dom)
            .into_iter()
            .map(|f| ("monotone", f))
            .chain([("far", anti), ("far-searched", searched)]);
        for (kind, f) in inputs {
            let d = exact_distance(&f, &mono)?;
            let far = kind != "monotone";
            if far && d <= far_epsilon {
                failures.push(format!("n={n}: input {} is not far", f.to_hex()));
            }
            let fseed = function_seed(seed, j);
            j += 1;
            let est = empirical_accept_rate(&tester, &f, trials, fseed)?;
            let accepted = (est.mean * trials as f64).round() as u64;
            if !far && est.mean < 0.63 {
                failures.push(format!("n={n}: monotone input {} accepted at rate {}", f.to_hex(), est.mean));
            }
            if far && est.mean > 0.37 {
                failures.push(format!("n={n}: far input {} accepted at rate {}", f.to_hex(), est.mean));
            }
            table.push(vec![
                n.to_string(),
                tester.s().to_string(),
                kind.to_string(),
                f.to_hex(),
                exact(&d),
                trials.to_string(),
                accepted.to_string(),
                sig12(est.mean),
                sig12(est.std_error),
                fseed.to_string(),
            ]);
        }
    }
    if sample_sizes.windows(2).any(|w| w[0] != w[1]) {
        failures.push(format!("sample sizes differ across n: {sample_sizes:?}"));
    }
    Ok(Outcome {
        table,
        details: json!({
            "sizes": sizes,
            "sample_sizes": sample_sizes,
            "epsilon": exact(&epsilon),
            "far_epsilon": exact(&far_epsilon),
        }),
        failures,
    })
}
