//! Experiment configuration files and their validation.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use symtest_core::extraction::CoverConstruction;
use symtest_core::limits::Limits;
use symtest_core::property::parse_rational;
use symtest_core::regularity::{SetFamily, WeightedHypergraph};
use symtest_core::tester::{monotonicity_tester, DensityTester, SampleTester, TesterSpec};
use symtest_core::{Domain, DomainRef, DomainSpec, Property, PropertySpec, Rational};

use crate::error::{HarnessError, Result};
use crate::generate::bundled_graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    TesterRoc,
    Sandwich,
    RegularityCertify,
    OracleCrosscheck,
    MonotonicityScaling,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::TesterRoc => "tester-roc",
            ExperimentKind::Sandwich => "sandwich",
            ExperimentKind::RegularityCertify => "regularity-certify",
            ExperimentKind::OracleCrosscheck => "oracle-crosscheck",
            ExperimentKind::MonotonicityScaling => "monotonicity-scaling",
        }
    }
}

/// One property/tester pair for the sandwich experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SandwichCase {
    pub domain: DomainSpec,
    pub property: PropertySpec,
    pub tester: TesterSpec,
    pub epsilon: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

/// A complete experiment description. Fields irrelevant to the chosen kind
/// are ignored; missing ones take the documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    pub trials: Option<u64>,
    pub epsilon: Option<String>,
    pub gamma: Option<String>,
    pub domain: Option<DomainSpec>,
    pub property: Option<PropertySpec>,
    pub tester: Option<TesterSpec>,
    /// tester-roc: functions sampled per distance bucket.
    pub functions_per_bucket: Option<usize>,
    /// monotonicity-scaling: line lengths.
    pub sizes: Option<Vec<usize>>,
    /// monotonicity-scaling: far inputs have distance greater than this.
    pub far_epsilon: Option<String>,
    /// regularity-certify: random instances instead of the bundled one;
    /// oracle-crosscheck: number of random structured properties.
    pub instances: Option<u64>,
    pub vertices: Option<usize>,
    pub tau: Option<String>,
    /// regularity-certify: a hypergraph record (JSON) to certify.
    pub graph: Option<PathBuf>,
    /// regularity-certify: `all-subsets` or `function-sets`.
    pub family: Option<String>,
    /// oracle-crosscheck: hypergrid `[n]^d` for the monotone check.
    pub grid: Option<[usize; 2]>,
    /// oracle-crosscheck: domain size for the structured check.
    pub size: Option<usize>,
    pub construction: Option<CoverConstruction>,
    pub cases: Option<Vec<SandwichCase>>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            experiment,
            seed: 0,
            trials: None,
            epsilon: None,
            gamma: None,
            domain: None,
            property: None,
            tester: None,
            functions_per_bucket: None,
            sizes: None,
            far_epsilon: None,
            instances: None,
            vertices: None,
            tau: None,
            graph: None,
            family: None,
            grid: None,
            size: None,
            construction: None,
            cases: None,
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<ExperimentConfig> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            if msg.contains("unknown variant") && text.contains("experiment") {
                HarnessError::Validation(format!("unknown experiment kind: {msg}"))
            } else {
                HarnessError::Validation(format!("config: {e}"))
            }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// A validated experiment, with every parameter parsed and every cap checked.
pub enum Plan {
    TesterRoc {
        property: Property,
        tester: SampleTester,
        epsilon: Rational,
        trials: u64,
        per_bucket: usize,
    },
    Sandwich {
        cases: Vec<(Property, SampleTester, Rational)>,
        gamma: Rational,
        construction: CoverConstruction,
    },
    RegularityCertify {
        graphs: Vec<(String, WeightedHypergraph)>,
        epsilon: Rational,
        family: SetFamily,
    },
    OracleCrosscheck {
        grid: (usize, usize),
        instances: u64,
        size: usize,
    },
    MonotonicityScaling {
        sizes: Vec<usize>,
        epsilon: Rational,
        far_epsilon: Rational,
        trials: u64,
    },
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::Validation(msg.into())
}

fn rational(field: &str, value: Option<&String>, default: &str) -> Result<Rational> {
    let text = value.map_or(default, String::as_str);
    let r = parse_rational(text).map_err(|e| invalid(format!("{field}: {e}")))?;
    if r <= Rational::from(0) {
        return Err(invalid(format!("{field} must be positive, got {text}")));
    }
    Ok(r)
}

fn domain(spec: DomainSpec) -> Result<DomainRef> {
    Ok(Arc::new(Domain::new(spec)?))
}

fn require_enumerable(dom: &DomainRef) -> Result<()> {
    let cap = Limits::global().enumeration_bits;
    if dom.size() > cap {
        return Err(invalid(format!(
            "domain {dom} has {} elements; exhaustive checks need at most {cap} (raise SYMTEST_ENUM_CAP)",
            dom.size()
        )));
    }
    Ok(())
}

/// The tester used when none is configured: the monotonicity tester for
/// monotone properties and the density tester for structured ones.
pub fn default_tester(dom: &DomainRef, property: &Property, epsilon: Rational) -> Result<SampleTester> {
    if property.is_monotone() {
        return Ok(monotonicity_tester(dom, epsilon)?);
    }
    let kp = property
        .as_kpart()
        .ok_or_else(|| invalid("no default tester for this property; give a [tester] table"))?;
    Ok(SampleTester::density(DensityTester::new(kp.clone(), epsilon)?))
}

/// The six pipeline cases on eight points used when no cases are configured.
pub fn default_sandwich_cases() -> Vec<SandwichCase> {
    let indexed = DomainSpec::Indexed { size: 8 };
    let two_part = |admissible: Vec<Vec<usize>>| PropertySpec::Kpart {
        parts: vec![(0..4).collect(), (4..8).collect()],
        admissible,
    };
    let case = |domain, property, tester, epsilon: &str| SandwichCase {
        domain,
        property,
        tester,
        epsilon: epsilon.into(),
    };
    let label = |expected: &str, s| TesterSpec::LabelMatch {
        expected: expected.into(),
        s,
    };
    vec![
        case(
            indexed,
            PropertySpec::Noteq { g: "96".into() },
            TesterSpec::Constant { p: "1".into(), s: 1 },
            "1/6",
        ),
        case(indexed, PropertySpec::FullySymmetric { counts: vec![6, 7, 8] }, label("11111111", 1), "3/8"),
        case(indexed, PropertySpec::FullySymmetric { counts: vec![7, 8] }, label("11111111", 2), "1/4"),
        case(
            indexed,
            two_part(vec![vec![3, 0], vec![3, 1], vec![4, 0], vec![4, 1]]),
            label("11110000", 1),
            "3/8",
        ),
        case(indexed, two_part(vec![vec![4, 0]]), label("11110000", 2), "3/8"),
        case(DomainSpec::Line { n: 8 }, PropertySpec::Monotone, TesterSpec::ViolationPair, "1/2"),
    ]
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<Plan> {
        let limits = Limits::global();
        match self.experiment {
            ExperimentKind::TesterRoc => {
                let dom = domain(self.domain.unwrap_or(DomainSpec::Line { n: 8 }))?;
                require_enumerable(&dom)?;
                let property = self.property.clone().unwrap_or(PropertySpec::Monotone).build(&dom)?;
                let epsilon = rational("epsilon", self.epsilon.as_ref(), "1/2")?;
                let tester = match &self.tester {
                    Some(spec) => spec.build(&dom)?,
                    None => default_tester(&dom, &property, epsilon)?,
                };
                let trials = self.trials.unwrap_or(1000);
                let per_bucket = self.functions_per_bucket.unwrap_or(4);
                if trials == 0 || per_bucket == 0 {
                    return Err(invalid("trials and functions_per_bucket must be positive"));
                }
                Ok(Plan::TesterRoc {
                    property,
                    tester,
                    epsilon,
                    trials,
                    per_bucket,
                })
            }
            ExperimentKind::Sandwich => {
                let gamma = rational("gamma", self.gamma.as_ref(), "3/10")?;
                if gamma >= Rational::new(1, 3) {
                    return Err(invalid("gamma must be below 1/3"));
                }
                let specs = self.cases.clone().unwrap_or_else(default_sandwich_cases);
                if specs.is_empty() {
                    return Err(invalid("sandwich needs at least one case"));
                }
                let mut cases = Vec::new();
                for (i, c) in specs.iter().enumerate() {
                    let dom = domain(c.domain)?;
                    require_enumerable(&dom)?;
                    let property = c.property.build(&dom)?;
                    let tester = c.tester.build(&dom)?;
                    let vertices = 2 * dom.size() as u128;
                    let edges = vertices.checked_pow(tester.s() as u32).unwrap_or(u128::MAX);
                    if edges > limits.hypergraph_edges {
                        return Err(invalid(format!(
                            "case {i}: tester hypergraph needs (2|X|)^s = {edges} edges, cap is {} (raise SYMTEST_EDGE_CAP)",
                            limits.hypergraph_edges
                        )));
                    }
                    let epsilon = rational("epsilon", Some(&c.epsilon), "")?;
                    cases.push((property, tester, epsilon));
                }
                Ok(Plan::Sandwich {
                    cases,
                    gamma,
                    construction: self.construction.unwrap_or_default(),
                })
            }
            ExperimentKind::RegularityCertify => {
                let epsilon = rational("epsilon", self.epsilon.as_ref(), "1/2")?;
                let family = match self.family.as_deref().unwrap_or("all-subsets") {
                    "all-subsets" => SetFamily::AllSubsets,
                    "function-sets" => SetFamily::FunctionSets,
                    other => return Err(invalid(format!("unknown set family {other:?}"))),
                };
                let graphs = if let Some(count) = self.instances {
                    let vertices = self.vertices.unwrap_or(10);
                    let tau = rational("tau", self.tau.as_ref(), "1/6")?;
                    (0..count)
                        .map(|i| {
                            WeightedHypergraph::random_granular(vertices, 2, tau, self.seed, i)
                                .map(|g| (format!("random-{i}"), g))
                        })
                        .collect::<symtest_core::Result<Vec<_>>>()?
                } else if let Some(path) = &self.graph {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
                    let record = serde_json::from_str(&text)
                        .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
                    vec![(path.display().to_string(), WeightedHypergraph::from_record(&record)?)]
                } else {
                    vec![("bundled-10".to_string(), bundled_graph()?)]
                };
                for (_, g) in &graphs {
                    family.validate(g.vertices())?;
                }
                Ok(Plan::RegularityCertify {
                    graphs,
                    epsilon,
                    family,
                })
            }
            ExperimentKind::OracleCrosscheck => {
                let [n, d] = self.grid.unwrap_or([4, 2]);
                let size = self.size.unwrap_or(12);
                let grid_points = n.checked_pow(d as u32).unwrap_or(usize::MAX);
                for (what, m) in [("grid", grid_points), ("size", size)] {
                    if m > limits.enumeration_bits {
                        return Err(invalid(format!(
                            "{what} has {m} elements; the crosscheck enumerates 2^{m} functions, cap is {} (raise SYMTEST_ENUM_CAP)",
                            limits.enumeration_bits
                        )));
                    }
                }
                Domain::hypergrid(n, d)?;
                Domain::indexed(size)?;
                Ok(Plan::OracleCrosscheck {
                    grid: (n, d),
                    instances: self.instances.unwrap_or(100),
                    size,
                })
            }
            ExperimentKind::MonotonicityScaling => {
                let sizes = self.sizes.clone().unwrap_or_else(|| vec![8, 16, 32]);
                let epsilon = rational("epsilon", self.epsilon.as_ref(), "1/2")?;
                let far_epsilon = rational("far_epsilon", self.far_epsilon.as_ref(), "49/100")?;
                for &n in &sizes {
                    monotonicity_tester(&Domain::line(n)?, epsilon)?;
                }
                let trials = self.trials.unwrap_or(10_000);
                if trials == 0 || sizes.is_empty() {
                    return Err(invalid("monotonicity-scaling needs sizes and trials"));
                }
                Ok(Plan::MonotonicityScaling {
                    sizes,
                    epsilon,
                    far_epsilon,
                    trials,
                })
            }
        }
    }
}
