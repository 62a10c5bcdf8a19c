//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every check recomputes the quantity it judges through a path that does
//! not share code with the implementation under test where that is
//! practical: BFS distance tables, brute-force antichains, direct defect
//! sums, floating-point information values, and a naive `φ` evaluation.

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_rational::BigRational;
use symtest::config::default_sandwich_cases;
use symtest::generate::{random_info_instance, random_structured_property};
use symtest::{ExperimentConfig, ExperimentKind};
use symtest_core::extraction::{build_cover_property, extract_family, run_pipeline, CoverConstruction};
use symtest_core::hp;
use symtest_core::oracle::{distance_table, max_antichain_strict};
use symtest_core::regularity::{
    mutual_information_state, tao_inequality_check, VertexPartition, WeightedHypergraph,
};
use symtest_core::tester::{acceptance_probability_exact, certify_density_gap, DensityTester, SampleTester};
use symtest_core::{enumerate_functions, part_counts, BoolFunction, Domain, Property, Rational};

const SEED: u64 = 2024;

fn r(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

fn big(x: Rational) -> BigRational {
    BigRational::new((*x.numer()).into(), (*x.denom()).into())
}

struct Line {
    pass: bool,
    detail: String,
}

fn report(n: usize, title: &str, start: Instant, line: Line) -> bool {
    println!(
        "criterion {n} [{}] {title}: {} ({:.1}s)",
        if line.pass { "PASS" } else { "FAIL" },
        line.detail,
        start.elapsed().as_secs_f64()
    );
    line.pass
}

fn criterion_1() -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 1..=3 {
        let cert = certify_density_gap(10, k, r(1, 2), false).unwrap();
        pass &= cert.holds();
        parts.push(format!(
            "k={k} q={} vectors={} min member {:.4} max far {:.2e}",
            cert.q, cert.count_vectors, cert.min_member_acceptance, cert.max_far_acceptance
        ));
    }
    // Literal spot check: every function against sampled properties.
    let mut checked = 0;
    let mut violations = 0;
    let mut found = [0; 4];
    for i in 0.. {
        if found[1..].iter().all(|&c| c >= 2) {
            break;
        }
        let p = random_structured_property(10, SEED, i).unwrap();
        if found[p.k()] >= 2 {
            continue;
        }
        found[p.k()] += 1;
        let prop = Property::from(p.clone());
        let dist = distance_table(&prop).unwrap();
        let t = DensityTester::new(p.clone(), r(1, 2)).unwrap();
        let mut cache = HashMap::new();
        for f in enumerate_functions(prop.domain()).unwrap() {
            let counts = part_counts(&f, p.partition()).unwrap();
            let enc = *cache.entry(counts.clone()).or_insert_with(|| t.enclosure_for_counts(&counts));
            let d = dist[f.word() as usize];
            if (d == Rational::from(0) && !enc.at_least(2.0 / 3.0)) || (d > r(1, 2) && !enc.at_most(1.0 / 3.0)) {
                violations += 1;
            }
            checked += 1;
        }
    }
    pass &= violations == 0;
    parts.push(format!("literal check {checked} functions over 6 properties, {violations} violations"));
    Line {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_2() -> Line {
    let mut cfg = ExperimentConfig::new(ExperimentKind::MonotonicityScaling);
    cfg.seed = SEED;
    cfg.sizes = Some(vec![8, 16, 32]);
    cfg.trials = Some(10_000);
    let out = symtest::run(&cfg).unwrap();
    let col = |name: &str| out.table.columns.iter().position(|c| *c == name).unwrap();
    let (q, input, rate) = (col("sample_size"), col("input"), col("rate"));
    let qs: Vec<&str> = out.table.rows.iter().map(|row| row[q].as_str()).collect();
    let rates = |far: bool| {
        out.table
            .rows
            .iter()
            .filter(|row| (row[input] != "monotone") == far)
            .map(|row| row[rate].parse::<f64>().unwrap())
            .collect::<Vec<_>>()
    };
    let min_mono = rates(false).into_iter().fold(1.0, f64::min);
    let max_far = rates(true).into_iter().fold(0.0, f64::max);
    let same_q = qs.windows(2).all(|w| w[0] == w[1]);
    Line {
        pass: same_q && min_mono >= 0.63 && max_far <= 0.37 && out.verified(),
        detail: format!(
            "q = {} for n = 8, 16, 32; min monotone rate {min_mono:.4}; max far rate {max_far:.4} (far inputs at distance 1/2, 10^4 trials each)",
            qs[0]
        ),
    }
}

fn criterion_3() -> Line {
    let mut cfg = ExperimentConfig::new(ExperimentKind::OracleCrosscheck);
    cfg.seed = SEED;
    cfg.grid = Some([4, 2]);
    cfg.instances = Some(100);
    cfg.size = Some(12);
    let out = symtest::run(&cfg).unwrap();
    let rows: Vec<_> = out.table.rows.iter().filter(|row| row[0] != "antichain").collect();
    let detail = rows
        .iter()
        .map(|row| format!("{} {}: {} comparisons, {} mismatches", row[0], row[1], row[3], row[4]))
        .collect::<Vec<_>>()
        .join("; ");
    let pass = rows.len() == 2 && rows.iter().all(|row| row[4] == "0") && rows[0][3] == "65536";
    Line { pass, detail }
}

/// Defect straight from its definition, in exact rationals.
fn direct_defect(g: &WeightedHypergraph, parts: &[Vec<usize>], set: &[bool]) -> Rational {
    let n = g.vertices();
    let mut total = Rational::from(0);
    for a in parts {
        for b in parts {
            let full: Rational = a.iter().flat_map(|&u| b.iter().map(move |&v| (u, v))).map(|(u, v)| g.weight(&[u, v])).sum();
            let (sa, sb): (Vec<usize>, Vec<usize>) = (
                a.iter().copied().filter(|&v| set[v]).collect(),
                b.iter().copied().filter(|&v| set[v]).collect(),
            );
            if sa.is_empty() || sb.is_empty() {
                continue;
            }
            let inside: Rational = sa.iter().flat_map(|&u| sb.iter().map(move |&v| (u, v))).map(|(u, v)| g.weight(&[u, v])).sum();
            let na = (sa.len() * sb.len()) as i64;
            let diff = inside / na - full / (a.len() * b.len()) as i64;
            let diff = if diff < Rational::from(0) { -diff } else { diff };
            total += diff * na / (n * n) as i64;
        }
    }
    total
}

fn criterion_4() -> Line {
    let mut cfg = ExperimentConfig::new(ExperimentKind::RegularityCertify);
    cfg.seed = SEED;
    cfg.instances = Some(200);
    cfg.vertices = Some(10);
    cfg.tau = Some("1/6".into());
    cfg.epsilon = Some("1/2".into());
    let out = symtest::run(&cfg).unwrap();
    let details = &out.details["certificates"];
    let mut worst = Rational::from(0);
    let mut over_bound = 0;
    let mut max_parts = 0;
    for (i, row) in out.table.rows.iter().enumerate() {
        let (iters, bound): (u64, u64) = (row[3].parse().unwrap(), row[4].parse().unwrap());
        over_bound += u64::from(iters > bound);
        let g = WeightedHypergraph::random_granular(10, 2, r(1, 6), SEED, i as u64).unwrap();
        let parts: Vec<Vec<usize>> = serde_json::from_value(details[i]["partition"].clone()).unwrap();
        max_parts = max_parts.max(parts.len());
        for mask in 0u32..1 << 10 {
            let set: Vec<bool> = (0..10).map(|v| mask >> v & 1 == 1).collect();
            worst = worst.max(direct_defect(&g, &parts, &set));
        }
    }
    Line {
        pass: out.verified() && over_bound == 0 && worst <= r(1, 2) && out.table.rows.len() == 200,
        detail: format!(
            "200 instances, all-subsets max defect {} (recomputed directly), {over_bound} over the iteration bound, at most {max_parts} parts",
            symtest::output::exact(&worst)
        ),
    }
}

fn entropy(p: &HashMap<Vec<i64>, f64>) -> f64 {
    -p.values().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

fn criterion_5() -> Line {
    let mut chain_violations = 0;
    let mut tao_violations = 0;
    let mut float_mismatch = 0;
    let mut worst_gap = 0.0f64;
    for i in 0..1000 {
        let inst = random_info_instance(SEED, i).unwrap();
        let st = mutual_information_state(&inst.graph, &inst.partition, &inst.set, inst.tau).unwrap();
        let (zs, zp, cond) = (st.mi_y_zs(), st.mi_y_zprime(), st.mi_y_zs_given_zprime());
        let gap = hp::to_f64(&(zs.clone() - zp.clone() - cond.clone())).abs();
        worst_gap = worst_gap.max(gap);
        chain_violations += u32::from(gap > 1e-30);
        tao_violations += u32::from(!tao_inequality_check(&st).holds);
        // Independent floating-point evaluation from the joint table.
        let mut joint: HashMap<Vec<i64>, f64> = HashMap::new();
        for (y, cell, pattern, p) in st.table() {
            let mut key = vec![*y.numer() * 1_000_000 / *y.denom()];
            key.extend(cell.iter().map(|&c| c as i64));
            key.extend(pattern.iter().map(|&b| i64::from(b)));
            *joint.entry(key).or_default() += symtest::output::ratio_f64(&Rational::new(
                p.numer().try_into().unwrap(),
                p.denom().try_into().unwrap(),
            ));
        }
        let arity = inst.graph.arity();
        let marginal = |keep: &dyn Fn(&[i64]) -> Vec<i64>| {
            let mut m: HashMap<Vec<i64>, f64> = HashMap::new();
            for (k, &v) in &joint {
                *m.entry(keep(k)).or_default() += v;
            }
            m
        };
        let y = marginal(&|k| vec![k[0]]);
        let cell = marginal(&|k| k[1..1 + arity].to_vec());
        let z = marginal(&|k| k[1..].to_vec());
        let y_cell = marginal(&|k| k[..1 + arity].to_vec());
        let i_zs = entropy(&y) + entropy(&z) - entropy(&joint);
        let i_zp = entropy(&y) + entropy(&cell) - entropy(&y_cell);
        if (i_zs - hp::to_f64(&zs)).abs() > 1e-9 || (i_zp - hp::to_f64(&zp)).abs() > 1e-9 {
            float_mismatch += 1;
        }
    }
    Line {
        pass: chain_violations == 0 && tao_violations == 0 && float_mismatch == 0,
        detail: format!(
            "1000 instances: worst chain-rule gap {worst_gap:.1e}, {chain_violations} chain violations, {tao_violations} Tao violations, {float_mismatch} disagreements with float recomputation"
        ),
    }
}

type Case = (Property, SampleTester, Rational);

fn pipeline_cases() -> Vec<Case> {
    default_sandwich_cases()
        .into_iter()
        .map(|c| {
            let dom = std::sync::Arc::new(Domain::new(c.domain).unwrap());
            let p = c.property.build(&dom).unwrap();
            let t = c.tester.build(&dom).unwrap();
            (p, t, symtest_core::property::parse_rational(&c.epsilon).unwrap())
        })
        .collect()
}

fn criterion_6(cases: &[Case]) -> Line {
    let gamma = r(3, 10);
    let mut violations = 0;
    let mut member_sets = Vec::new();
    let mut sizes = Vec::new();
    for (p, t, eps) in cases {
        member_sets.push(p.member_words().unwrap());
        let ex = extract_family(t, gamma).unwrap();
        let dist = distance_table(p).unwrap();
        for construction in [CoverConstruction::AtomCounts, CoverConstruction::ProfileEquality] {
            let report = run_pipeline(p, t, *eps, gamma, construction).unwrap();
            violations += usize::from(!report.sandwich.holds || !report.validity.holds || !report.lemma4_holds);
            let cover = build_cover_property(p, ex.profile_map.family(), construction).unwrap();
            let mut cover_size = 0;
            for f in enumerate_functions(p.domain()).unwrap() {
                let inside = cover.contains(&f);
                cover_size += usize::from(inside);
                if (p.contains(&f) && !inside) || (inside && dist[f.word() as usize] > *eps) {
                    violations += 1;
                }
            }
            if construction == CoverConstruction::AtomCounts {
                sizes.push(format!("{}/{}", p.member_words().unwrap().len(), cover_size));
            }
        }
    }
    member_sets.sort();
    member_sets.dedup();
    Line {
        pass: violations == 0 && member_sets.len() >= 5,
        detail: format!(
            "{} distinct properties on |X| = 8, s in {{1,2}}, gamma = 3/10, both cover constructions; |P|/|P'| = {}; {violations} violations",
            member_sets.len(),
            sizes.join(" ")
        ),
    }
}

/// `φ(profile(f))` evaluated naively: the mean, over `x⃗ ∈ X^s`, of the average
/// weight of the partition cell containing `((x_j, f(x_j)))_j`.
fn naive_phi(t: &SampleTester, partition: &VertexPartition, f: &BoolFunction) -> Rational {
    let n = t.domain().size();
    let s = t.s();
    let v = 2 * n;
    let label = |u: usize| partition.parts().iter().position(|p| p.contains(&u)).unwrap();
    let mut cell_sum: HashMap<Vec<usize>, (Rational, i64)> = HashMap::new();
    for e in 0..v.pow(s as u32) {
        let tuple: Vec<usize> = (0..s).map(|j| e / v.pow((s - 1 - j) as u32) % v).collect();
        let xs: Vec<usize> = tuple.iter().map(|u| u / 2).collect();
        let ys: Vec<bool> = tuple.iter().map(|u| u % 2 == 1).collect();
        let entry = cell_sum.entry(tuple.iter().map(|&u| label(u)).collect()).or_insert((Rational::from(0), 0));
        entry.0 += t.accept_prob(&xs, &ys);
        entry.1 += 1;
    }
    let mut total = Rational::from(0);
    for e in 0..n.pow(s as u32) {
        let xs: Vec<usize> = (0..s).map(|j| e / n.pow((s - 1 - j) as u32) % n).collect();
        let cell: Vec<usize> = xs.iter().map(|&x| label(2 * x + usize::from(f.get(x)))).collect();
        let (sum, count) = cell_sum[&cell];
        total += sum / count;
    }
    total / n.pow(s as u32) as i64
}

fn criterion_7(cases: &[Case]) -> Line {
    let gamma = r(3, 10);
    let mut worst = BigRational::from_integer(0.into());
    let mut failures = 0;
    for (_, t, _) in cases {
        let ex = extract_family(t, gamma).unwrap();
        for f in enumerate_functions(t.domain()).unwrap() {
            let phi = naive_phi(t, &ex.regularity.partition, &f);
            if big(phi) != *ex.profile_map.phi_of(&f).unwrap() {
                failures += 1;
            }
            let p = acceptance_probability_exact(t, &f).unwrap();
            let err = big(if p > phi { p - phi } else { phi - p });
            worst = worst.max(err);
        }
    }
    Line {
        pass: failures == 0 && worst <= big(gamma),
        detail: format!(
            "max |p_T - phi| = {} over all 256 functions of {} runs (gamma = 3/10); naive phi disagrees {failures} times",
            symtest_core::property::format_rational(&worst),
            cases.len()
        ),
    }
}

fn brute_antichain(k: usize, d: usize) -> usize {
    let points: Vec<Vec<usize>> = (0..k.pow(d as u32))
        .map(|i| (0..d).map(|j| i / k.pow(j as u32) % k).collect())
        .collect();
    let below = |a: &[usize], b: &[usize]| a.iter().zip(b).all(|(x, y)| x < y);
    (0u32..1 << points.len())
        .filter(|mask| {
            let chosen: Vec<&Vec<usize>> = (0..points.len()).filter(|i| mask >> i & 1 == 1).map(|i| &points[i]).collect();
            chosen.iter().all(|a| chosen.iter().all(|b| !below(a, b)))
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap()
}

fn criterion_8() -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 1..=4 {
        for d in 1..=2 {
            let a = max_antichain_strict(k, d).unwrap();
            let bound = d * k.pow(d as u32 - 1);
            pass &= a.exact && a.size <= bound && a.size == brute_antichain(k, d);
            parts.push(format!("({k},{d})={}<={bound}", a.size));
        }
    }
    pass &= max_antichain_strict(3, 2).unwrap().size == 5;
    Line {
        pass,
        detail: format!("{} (brute force agrees)", parts.join(" ")),
    }
}

fn run_cli(config: &Path, out: &Path) -> (bool, Vec<u8>) {
    let status = Command::new(env!("CARGO_BIN_EXE_symtest"))
        .arg("experiment")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    let csv = std::fs::read_dir(out)
        .unwrap()
        .filter_map(|e| e.ok())
        .find(|e| e.path().extension().is_some_and(|x| x == "csv"))
        .map(|e| std::fs::read(e.path()).unwrap())
        .unwrap_or_default();
    (status.status.success(), csv)
}

fn criterion_9() -> Line {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        ("tester-roc", "trials = 200\n"),
        ("sandwich", ""),
        ("regularity-certify", "instances = 20\n"),
        ("oracle-crosscheck", "instances = 10\n"),
        ("monotonicity-scaling", "trials = 500\nsizes = [8, 16]\n"),
    ];
    let mut identical = 0;
    let mut notes = Vec::new();
    for (kind, extra) in configs {
        let path = dir.path().join(format!("{kind}.toml"));
        std::fs::write(&path, format!("experiment = \"{kind}\"\nseed = {SEED}\n{extra}")).unwrap();
        let (ok_a, a) = run_cli(&path, &dir.path().join(format!("{kind}-a")));
        let (ok_b, b) = run_cli(&path, &dir.path().join(format!("{kind}-b")));
        if ok_a && ok_b && !a.is_empty() && a == b {
            identical += 1;
        } else {
            notes.push(format!("{kind} differs or failed"));
        }
    }
    Line {
        pass: identical == configs.len(),
        detail: format!("{identical}/{} experiments byte-identical on replay {}", configs.len(), notes.join(", ")),
    }
}

fn main() {
    let mut all = true;
    let t = Instant::now();
    all &= report(1, "density tester completeness/soundness, |X| = 10", t, criterion_1());
    let t = Instant::now();
    all &= report(2, "monotonicity tester independent of n", t, criterion_2());
    let t = Instant::now();
    all &= report(3, "oracle agreement", t, criterion_3());
    let t = Instant::now();
    all &= report(4, "weak regularity certificates", t, criterion_4());
    let t = Instant::now();
    all &= report(5, "information kernel", t, criterion_5());
    let cases = pipeline_cases();
    let t = Instant::now();
    all &= report(6, "pipeline sandwich P in P' in P_eps", t, criterion_6(&cases));
    let t = Instant::now();
    all &= report(7, "phi approximates p_T within gamma", t, criterion_7(&cases));
    let t = Instant::now();
    all &= report(8, "antichain bound", t, criterion_8());
    let t = Instant::now();
    all &= report(9, "CLI determinism", t, criterion_9());
    if !all {
        std::process::exit(1);
    }
}
