use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use symtest::cli::{parse_domain, parse_function, parse_property, parse_ratio, parse_tester};
use symtest::error::{HarnessError, Result};
use symtest::experiments::cheap_exact_acceptance;
use symtest::{generate_far_function, ExperimentConfig};
use symtest_core::extraction::{run_pipeline, CoverConstruction};
use symtest_core::oracle::{dilworth_width, exact_distance, max_antichain_strict};
use symtest_core::property::format_rational;
use symtest_core::regularity::{weak_regularity_partition, SetFamily, WeightedHypergraph};
use symtest_core::rng::RNG_ALGORITHM;
use symtest_core::tester::{empirical_accept_rate, run_tester};

#[derive(Parser)]
#[command(name = "symtest", version, about = "Sample-based testers, weak regularity, and exact oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Target {
    /// line:N, grid:N^D, fp:P^N, graph:N or indexed:N
    #[arg(long, default_value = "line:8")]
    domain: String,
    /// monotone, noteq:BITS, symmetric:C1,C2,..., granular-cover:EPS or json:{...}
    #[arg(long, default_value = "monotone")]
    property: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run a tester on one function.
    Test {
        #[command(flatten)]
        target: Target,
        /// auto, monotonicity, density, violation-pair, constant:P:S, label:BITS:S or json:{...}
        #[arg(long, default_value = "auto")]
        tester: String,
        /// Bit string f(0)...f(n-1) or 0x-prefixed hex.
        #[arg(long)]
        function: String,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// One run prints its transcript; more runs print the acceptance rate.
        #[arg(long, default_value_t = 1)]
        trials: u64,
    },
    /// Exact distance from a function to a property.
    Distance {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        function: String,
    },
    /// Weakly regular partition of a hypergraph, with its certificate.
    Regularity {
        /// Hypergraph record (JSON); omit for a random instance.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        vertices: usize,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, default_value = "1/6")]
        tau: String,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        /// all-subsets or function-sets
        #[arg(long, default_value = "all-subsets")]
        family: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Extract the covering partially symmetric property from a tester.
    Extract {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "auto")]
        tester: String,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long, default_value = "3/10")]
        gamma: String,
        #[arg(long, value_enum, default_value = "atom-counts")]
        construction: Construction,
    },
    /// Ground-truth oracles.
    Oracle {
        #[command(subcommand)]
        query: OracleQuery,
    },
    /// Run an experiment from a TOML config (or the defaults of a kind).
    Experiment {
        config: Option<PathBuf>,
        /// tester-roc, sandwich, regularity-certify, oracle-crosscheck or monotonicity-scaling
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        epsilon: Option<String>,
        /// Directory for `<kind>.csv` and `<kind>.summary.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Construction {
    AtomCounts,
    ProfileEquality,
}

#[derive(Subcommand)]
enum OracleQuery {
    /// Largest antichain of the strict-coordinate order on [k]^d.
    Antichain {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
    },
    /// Search for a function farther than epsilon from the property.
    Far {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::other)?;
    writeln!(out)?;
    Ok(())
}

fn verify(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(HarnessError::Verification(what.into()))
    }
}

fn experiment(
    config: Option<PathBuf>,
    kind: Option<String>,
    seed: Option<u64>,
    trials: Option<u64>,
    epsilon: Option<String>,
    out: Option<PathBuf>,
) -> Result<()> {
    let mut cfg = match (config, kind) {
        (Some(path), _) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| HarnessError::Validation(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_toml(&text)?
        }
        (None, Some(kind)) => ExperimentConfig::from_toml(&format!("experiment = {kind:?}"))?,
        (None, None) => return Err(HarnessError::Validation("give a config file or --kind".into())),
    };
    cfg.seed = seed.unwrap_or(cfg.seed);
    cfg.trials = trials.or(cfg.trials);
    cfg.epsilon = epsilon.or(cfg.epsilon);
    if let Some(dir) = out {
        fs::create_dir_all(&dir)?;
        let name = cfg.experiment.name();
        cfg.output.csv = Some(dir.join(format!("{name}.csv")));
        cfg.output.summary = Some(dir.join(format!("{name}.summary.json")));
    }
    let outcome = symtest::run(&cfg)?;
    let csv = outcome.table.to_csv(cfg.experiment.name(), cfg.seed)?;
    let summary = serde_json::to_string_pretty(&outcome.summary(&cfg)).map_err(std::io::Error::other)? + "\n";
    match &cfg.output.csv {
        Some(path) => fs::write(path, &csv)?,
        None => std::io::stdout().write_all(&csv)?,
    }
    match &cfg.output.summary {
        Some(path) => fs::write(path, summary)?,
        None => eprint!("{summary}"),
    }
    if !outcome.verified() {
        return Err(HarnessError::Verification(outcome.failures.join("; ")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Test {
            target,
            tester,
            function,
            epsilon,
            seed,
            trials,
        } => {
            let dom = parse_domain(&target.domain)?;
            let property = parse_property(&dom, &target.property)?;
            let epsilon = parse_ratio("epsilon", &epsilon)?;
            let t = parse_tester(&dom, &property, epsilon, &tester)?;
            let f = parse_function(&dom, &function)?;
            if trials <= 1 {
                let verdict = run_tester(&t, &f, seed)?;
                print_json(&json!({ "rng": RNG_ALGORITHM, "verdict": verdict }))
            } else {
                let est = empirical_accept_rate(&t, &f, trials, seed)?;
                let enc = cheap_exact_acceptance(&t, &f);
                print_json(&json!({
                    "rng": RNG_ALGORITHM,
                    "seed": seed,
                    "trials": trials,
                    "sample_size": t.s(),
                    "accept_rate": est.mean,
                    "std_error": est.std_error,
                    "exact": enc.map(|e| json!({ "lo": e.lo, "hi": e.hi })),
                }))
            }
        }
        Command::Distance { target, function } => {
            let dom = parse_domain(&target.domain)?;
            let property = parse_property(&dom, &target.property)?;
            let f = parse_function(&dom, &function)?;
            let d = exact_distance(&f, &property)?;
            print_json(&json!({
                "property": property.name(),
                "function": f.to_hex(),
                "distance": format_rational(&d),
                "distance_f64": *d.numer() as f64 / *d.denom() as f64,
            }))
        }
        Command::Regularity {
            graph,
            vertices,
            arity,
            tau,
            epsilon,
            family,
            seed,
        } => {
            let g = match graph {
                Some(path) => {
                    let text = fs::read_to_string(&path)?;
                    let record = serde_json::from_str(&text)
                        .map_err(|e| HarnessError::Validation(format!("{}: {e}", path.display())))?;
                    WeightedHypergraph::from_record(&record)?
                }
                None => WeightedHypergraph::random_granular(vertices, arity, parse_ratio("tau", &tau)?, seed, 0)?,
            };
            let family = match family.as_str() {
                "all-subsets" => SetFamily::AllSubsets,
                "function-sets" => SetFamily::FunctionSets,
                other => return Err(HarnessError::Validation(format!("unknown set family {other:?}"))),
            };
            let res = weak_regularity_partition(&g, parse_ratio("epsilon", &epsilon)?, &family)?;
            print_json(&json!({
                "partition": res.partition.parts(),
                "iterations": res.iterations,
                "iteration_bound": res.iteration_bound,
                "entropy_bits": res.entropy_y,
                "information_values": res.information_values,
                "certificate": res.certificate,
            }))?;
            verify(res.certificate.holds, "regularity certificate exceeds epsilon")
        }
        Command::Extract {
            target,
            tester,
            epsilon,
            gamma,
            construction,
        } => {
            let dom = parse_domain(&target.domain)?;
            let property = parse_property(&dom, &target.property)?;
            let epsilon = parse_ratio("epsilon", &epsilon)?;
            let t = parse_tester(&dom, &property, epsilon, &tester)?;
            let construction = match construction {
                Construction::AtomCounts => CoverConstruction::AtomCounts,
                Construction::ProfileEquality => CoverConstruction::ProfileEquality,
            };
            let report = run_pipeline(&property, &t, epsilon, parse_ratio("gamma", &gamma)?, construction)?;
            print_json(&serde_json::to_value(&report).map_err(std::io::Error::other)?)?;
            verify(report.holds(), "pipeline checks failed")
        }
        Command::Oracle { query } => match query {
            OracleQuery::Antichain { k, d } => {
                let a = max_antichain_strict(k, d)?;
                print_json(&json!({
                    "k": k,
                    "d": d,
                    "size": a.size,
                    "exact": a.exact,
                    "witness": a.witness,
                    "bound": d * k.pow(d.saturating_sub(1) as u32),
                    "dilworth_width": a.exact.then(|| dilworth_width(k, d)),
                }))
            }
            OracleQuery::Far { target, epsilon, seed } => {
                let dom = parse_domain(&target.domain)?;
                let property = parse_property(&dom, &target.property)?;
                let f = generate_far_function(&property, parse_ratio("epsilon", &epsilon)?, seed)?;
                let d = exact_distance(&f, &property)?;
                print_json(&json!({
                    "function": f.to_bit_str(),
                    "hex": f.to_hex(),
                    "distance": format_rational(&d),
                }))
            }
        },
        Command::Experiment {
            config,
            kind,
            seed,
            trials,
            epsilon,
            out,
        } => experiment(config, kind, seed, trials, epsilon, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
