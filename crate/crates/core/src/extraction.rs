//! From a sample tester to a covering k-part symmetric property: the tester
//! hypergraph on `X × {0,1}`, its weakly regular partition, the density
//! profile map `φ_T`, and the sandwich `P ⊆ P′ ⊆ P_ε`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{CountVector, DomainPartition, DomainRef};
use crate::error::{Error, Result};
use crate::function::{all_words, BoolFunction};
use crate::oracle::distance::nearest_flips;
use crate::property::{format_rational, product_ranges, KPartSymmetricProperty, Property};
use crate::regularity::{weak_regularity_partition, RegularityResult, SetFamily, WeightedHypergraph};
use crate::tester::{acceptance_probability_exact, SampleTester};
use crate::Rational;

fn big(r: Rational) -> BigRational {
    BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

/// `G_T` on `V = X × {0,1}`, vertex `(x, b)` at index `2x + b`, with weight
/// `T(x⃗, y⃗)` on `((x_1,y_1),…,(x_s,y_s))`.
#[derive(Debug, Clone)]
pub struct TesterHypergraph {
    graph: WeightedHypergraph,
    tester: SampleTester,
}

pub fn build_tester_hypergraph(tester: &SampleTester) -> Result<TesterHypergraph> {
    let s = tester.s();
    let mut xs = vec![0; s];
    let mut ys = vec![false; s];
    let graph = WeightedHypergraph::from_fn(2 * tester.domain().size(), s, |tuple| {
        for (j, &v) in tuple.iter().enumerate() {
            xs[j] = v / 2;
            ys[j] = v % 2 == 1;
        }
        tester.accept_prob(&xs, &ys)
    })?;
    Ok(TesterHypergraph {
        graph,
        tester: tester.clone(),
    })
}

impl TesterHypergraph {
    pub fn graph(&self) -> &WeightedHypergraph {
        &self.graph
    }

    pub fn tester(&self) -> &SampleTester {
        &self.tester
    }

    /// `S_f = {(x, f(x))}`.
    pub fn function_set(f: &BoolFunction) -> Vec<usize> {
        (0..f.len()).map(|x| 2 * x + usize::from(f.get(x))).collect()
    }

    /// `E_{v ∈ S_f^s}[E(v)]`, which equals `p_T(f)`.
    pub fn conditioned_average(&self, f: &BoolFunction) -> Result<Rational> {
        self.tester.domain().check_same(f.domain())?;
        let set = TesterHypergraph::function_set(f);
        let s = self.graph.arity();
        let n = set.len();
        let total = n.pow(s as u32);
        let mut tuple = vec![0; s];
        let mut sum = Rational::zero();
        for idx in 0..total {
            let mut rest = idx;
            for slot in tuple.iter_mut().rev() {
                *slot = set[rest % n];
                rest /= n;
            }
            sum += self.graph.weight(&tuple);
        }
        Ok(sum / total as i64)
    }
}

/// Non-empty Boolean atoms of a family of subsets of `X`, ordered by their
/// smallest element.
pub fn atoms_of_family(domain: &DomainRef, family: &[Vec<usize>]) -> Result<DomainPartition> {
    let size = domain.size();
    let mut signature: Vec<Vec<bool>> = vec![Vec::with_capacity(family.len()); size];
    for set in family {
        let mut member = vec![false; size];
        for &x in set {
            if x >= size {
                return Err(Error::InvalidParameter(format!("family set mentions {x} outside X")));
            }
            member[x] = true;
        }
        for x in 0..size {
            signature[x].push(member[x]);
        }
    }
    let mut atoms: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<&Vec<bool>, usize> = HashMap::new();
    for (x, sig) in signature.iter().enumerate() {
        match index.get(sig) {
            Some(&a) => atoms[a].push(x),
            None => {
                index.insert(sig, atoms.len());
                atoms.push(vec![x]);
            }
        }
    }
    DomainPartition::new(domain.clone(), atoms)
}

/// The family `S_1..S_m` and `φ_T` on achievable density profiles.
///
/// A profile is stored as the count vector `(c_{S_1}(f), …, c_{S_m}(f))`,
/// which is `|X|` times the density profile `(μ_{S_1}(f), …)`.
#[derive(Debug, Clone)]
pub struct DensityProfileMap {
    family: Vec<Vec<usize>>,
    atoms: DomainPartition,
    phi: BTreeMap<Vec<usize>, BigRational>,
}

impl DensityProfileMap {
    pub fn family(&self) -> &[Vec<usize>] {
        &self.family
    }

    pub fn atoms(&self) -> &DomainPartition {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn profile(&self, f: &BoolFunction) -> Vec<usize> {
        self.family.iter().map(|set| set.iter().filter(|&&x| f.get(x)).count()).collect()
    }

    pub fn phi(&self, profile: &[usize]) -> Result<&BigRational> {
        self.phi
            .get(profile)
            .ok_or_else(|| Error::UnrealizedProfile(format!("{profile:?}")))
    }

    pub fn phi_of(&self, f: &BoolFunction) -> Result<&BigRational> {
        self.phi(&self.profile(f))
    }

    pub fn table(&self) -> &BTreeMap<Vec<usize>, BigRational> {
        &self.phi
    }
}

/// The regularity partition of `G_T` and the profile map it induces.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub regularity: RegularityResult,
    pub profile_map: DensityProfileMap,
    /// For part `i`, the family indices of `V_i^1` and `V_i^0` (if non-empty).
    pub part_sets: Vec<[Option<usize>; 2]>,
}

/// Runs weak regularity on `G_T` with `γ/2^s` over the function-sets family,
/// reads off `V_i^1 = {x : (x,1) ∈ V_i}` and `V_i^0 = {x : (x,0) ∈ V_i}`, and
/// tabulates `φ_T(profile) = Σ_I Π_j (|V_{i_j} ∩ S_f| / |X|) · w_G(V_I)`, where
/// `|V_i ∩ S_f| = c_{V_i^1}(f) + |V_i^0| − c_{V_i^0}(f)`.
pub fn extract_family(tester: &SampleTester, gamma: Rational) -> Result<Extraction> {
    if gamma <= Rational::zero() {
        return Err(Error::InvalidParameter("gamma must be positive".into()));
    }
    let hypergraph = build_tester_hypergraph(tester)?;
    let g = hypergraph.graph();
    let s = g.arity();
    let eps = gamma / (1i64 << s);
    let regularity = weak_regularity_partition(g, eps, &SetFamily::FunctionSets)?;
    let domain = tester.domain().clone();
    let size = domain.size();

    let mut family: Vec<Vec<usize>> = Vec::new();
    let mut part_sets = Vec::new();
    for part in regularity.partition.parts() {
        let mut slots = [None, None];
        for b in [1usize, 0] {
            let set: Vec<usize> = part.iter().filter(|&&v| v % 2 == b).map(|&v| v / 2).collect();
            if set.is_empty() {
                continue;
            }
            let at = family.iter().position(|f| *f == set).unwrap_or_else(|| {
                family.push(set);
                family.len() - 1
            });
            slots[b] = Some(at);
        }
        part_sets.push(slots);
    }
    let atoms = atoms_of_family(&domain, &family)?;

    // Cell averages w_G(V_I) over the original weights.
    let partition = &regularity.partition;
    let k = partition.k();
    let cells = k.pow(s as u32);
    let mut cell_sum = vec![Rational::zero(); cells];
    let mut tuple = vec![0; s];
    for e in 0..g.edge_count() {
        crate::regularity::decode_edge(e, g.vertices(), &mut tuple);
        let c = tuple.iter().fold(0, |acc, &v| acc * k + partition.part_of(v));
        cell_sum[c] += g.weight(&tuple);
    }
    let sizes: Vec<usize> = partition.parts().iter().map(Vec::len).collect();
    let mut index = vec![0; s];
    let cell_mean: Vec<BigRational> = (0..cells)
        .map(|c| {
            crate::regularity::decode_edge(c, k, &mut index);
            let volume: i64 = index.iter().map(|&i| sizes[i] as i64).product();
            big(cell_sum[c] / volume)
        })
        .collect();

    let set_size = |slot: Option<usize>| slot.map_or(0, |j| family[j].len());
    let phi_of_profile = |profile: &[usize]| -> BigRational {
        let hits: Vec<usize> = part_sets
            .iter()
            .map(|[zero, one]| {
                one.map_or(0, |j| profile[j]) + set_size(*zero) - zero.map_or(0, |j| profile[j])
            })
            .collect();
        let mut total = BigRational::zero();
        let mut index = vec![0; s];
        for (c, mean) in cell_mean.iter().enumerate() {
            crate::regularity::decode_edge(c, k, &mut index);
            let mass: usize = index.iter().map(|&i| hits[i]).product();
            if mass != 0 {
                total += mean * BigRational::new(mass.into(), size.pow(s as u32).into());
            }
        }
        total
    };

    // Achievable profiles come from atom count vectors.
    let mut phi = BTreeMap::new();
    let atom_of: Vec<Vec<usize>> = family
        .iter()
        .map(|set| {
            let mut ids: Vec<usize> = set.iter().map(|&x| atoms.part_of(x)).collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        })
        .collect();
    for counts in product_ranges(&atoms.part_sizes()) {
        let profile: Vec<usize> = atom_of.iter().map(|ids| ids.iter().map(|&a| counts[a]).sum()).collect();
        phi.entry(profile).or_insert_with_key(|p| phi_of_profile(p));
    }
    Ok(Extraction {
        regularity,
        profile_map: DensityProfileMap {
            family,
            atoms,
            phi,
        },
        part_sets,
    })
}

/// How `P′` is read off the family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverConstruction {
    /// Admissible vectors are the atom-count vectors of members of `P`.
    #[default]
    AtomCounts,
    /// Admissible vectors are all atom-count vectors whose density profile
    /// over the family equals the profile of some member of `P`.
    ProfileEquality,
}

/// `P′` over the atoms of `family`. Either construction contains `P`.
pub fn build_cover_property(
    property: &Property,
    family: &[Vec<usize>],
    construction: CoverConstruction,
) -> Result<KPartSymmetricProperty> {
    let domain = property.domain();
    let atoms = atoms_of_family(domain, family)?;
    let members = property.member_words()?;
    let atom_counts = |w: u64| {
        let mut c = vec![0; atoms.k()];
        for x in 0..domain.size() {
            if w >> x & 1 == 1 {
                c[atoms.part_of(x)] += 1;
            }
        }
        CountVector(c)
    };
    let realized: BTreeSet<CountVector> = members.iter().map(|&w| atom_counts(w)).collect();
    let admissible = match construction {
        CoverConstruction::AtomCounts => realized,
        CoverConstruction::ProfileEquality => {
            let atom_ids: Vec<Vec<usize>> = family
                .iter()
                .map(|set| {
                    let mut ids: Vec<usize> = set.iter().map(|&x| atoms.part_of(x)).collect();
                    ids.sort_unstable();
                    ids.dedup();
                    ids
                })
                .collect();
            let profile = |c: &CountVector| -> Vec<usize> {
                atom_ids.iter().map(|ids| ids.iter().map(|&a| c[a]).sum()).collect()
            };
            let targets: BTreeSet<Vec<usize>> = realized.iter().map(profile).collect();
            product_ranges(&atoms.part_sizes())
                .into_iter()
                .filter(|c| targets.contains(&profile(c)))
                .collect()
        }
    };
    KPartSymmetricProperty::new(atoms, admissible)
}

/// Outcome of the exhaustive check of `P ⊆ P′ ⊆ P_ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub epsilon: String,
    pub property_size: usize,
    pub cover_size: usize,
    /// Members of `P` missing from `P′` (hex).
    pub missing: Vec<String>,
    /// Members of `P′` farther than ε from `P`, with their distance.
    pub too_far: Vec<(String, String)>,
    /// Largest distance from a member of `P′` to `P`.
    pub max_distance: String,
    pub holds: bool,
}

pub fn verify_sandwich(property: &Property, cover: &KPartSymmetricProperty, epsilon: Rational) -> Result<SandwichReport> {
    let domain = property.domain();
    domain.check_same(cover.domain())?;
    let members = property.member_words()?;
    let cover_prop = Property::from(cover.clone());
    let cover_words = cover_prop.member_words()?;
    let hex = |w: u64| BoolFunction::from_word(domain.clone(), w).to_hex();
    let missing: Vec<String> = members.iter().filter(|&&w| !cover_prop.contains_word(w)).map(|&w| hex(w)).collect();
    let size = domain.size() as i64;
    let flips: Vec<(u64, Option<u32>)> = cover_words
        .par_iter()
        .map(|&w| (w, nearest_flips(w, &members)))
        .collect();
    let mut too_far = Vec::new();
    let mut max_flips = 0;
    for (w, d) in flips {
        let Some(d) = d else {
            too_far.push((hex(w), "undefined".to_string()));
            continue;
        };
        max_flips = max_flips.max(d);
        let dist = Rational::new(i64::from(d), size);
        if dist > epsilon {
            too_far.push((hex(w), format_rational(&dist)));
        }
    }
    let holds = missing.is_empty() && too_far.is_empty();
    Ok(SandwichReport {
        epsilon: format_rational(&epsilon),
        property_size: members.len(),
        cover_size: cover_words.len(),
        missing,
        too_far,
        max_distance: format_rational(&Rational::new(i64::from(max_flips), size)),
        holds,
    })
}

/// Exhaustive check that `T` is an ε-tester for `P`: members accepted with
/// probability ≥ 2/3 and ε-far functions with probability ≤ 1/3.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub min_member_acceptance: String,
    pub max_far_acceptance: Option<String>,
    pub far_functions: usize,
    pub holds: bool,
}

fn acceptance_table(tester: &SampleTester) -> Result<Vec<Rational>> {
    let domain = tester.domain();
    all_words(domain)?
        .into_par_iter()
        .map(|w| acceptance_probability_exact(tester, &BoolFunction::from_word(domain.clone(), w)))
        .collect()
}

fn validity_from_table(property: &Property, epsilon: Rational, p: &[Rational]) -> Result<ValidityReport> {
    let domain = property.domain();
    let members = property.member_words()?;
    if members.is_empty() {
        return Err(Error::EmptyProperty);
    }
    let size = domain.size() as i64;
    let min_member = members.iter().map(|&w| p[w as usize]).min().expect("non-empty");
    let far: Vec<u64> = all_words(domain)?
        .filter(|&w| Rational::new(i64::from(nearest_flips(w, &members).expect("non-empty")), size) > epsilon)
        .collect();
    let max_far = far.iter().map(|&w| p[w as usize]).max();
    let holds = min_member >= Rational::new(2, 3) && max_far.is_none_or(|m| m <= Rational::new(1, 3));
    Ok(ValidityReport {
        min_member_acceptance: format_rational(&min_member),
        max_far_acceptance: max_far.as_ref().map(format_rational),
        far_functions: far.len(),
        holds,
    })
}

pub fn tester_validity(tester: &SampleTester, property: &Property, epsilon: Rational) -> Result<ValidityReport> {
    tester.domain().check_same(property.domain())?;
    validity_from_table(property, epsilon, &acceptance_table(tester)?)
}

/// Everything the end-to-end pipeline checks for one `(P, T, ε, γ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub property: String,
    pub domain_size: usize,
    pub s: usize,
    pub epsilon: String,
    pub gamma: String,
    pub validity: ValidityReport,
    pub regularity_parts: usize,
    pub regularity_iterations: u64,
    pub regularity_max_defect: String,
    /// Parts of `V = X × {0,1}`.
    pub partition: Vec<Vec<usize>>,
    pub family: Vec<Vec<usize>>,
    pub family_size: usize,
    pub atom_sizes: Vec<usize>,
    pub profiles: usize,
    /// `φ_T` on every achievable profile, as `"p/q"`.
    pub phi_table: Vec<(Vec<usize>, String)>,
    /// `max_f |p_T(f) − φ_T(profile(f))|`, exactly.
    pub lemma3_max_error: String,
    pub lemma3_max_error_f64: f64,
    pub lemma3_holds: bool,
    /// `min (p_T(f) − p_T(g) + 2γ)` over `f ∈ P′` and profile witnesses `g ∈ P`.
    pub lemma4_min_slack: String,
    pub lemma4_holds: bool,
    pub construction: CoverConstruction,
    pub admissible: Vec<Vec<usize>>,
    pub sandwich: SandwichReport,
}

impl PipelineReport {
    pub fn holds(&self) -> bool {
        self.validity.holds && self.lemma3_holds && self.lemma4_holds && self.sandwich.holds
    }
}

pub fn run_pipeline(
    property: &Property,
    tester: &SampleTester,
    epsilon: Rational,
    gamma: Rational,
    construction: CoverConstruction,
) -> Result<PipelineReport> {
    let domain = property.domain();
    tester.domain().check_same(domain)?;
    let p_table = acceptance_table(tester)?;
    let validity = validity_from_table(property, epsilon, &p_table)?;
    let extraction = extract_family(tester, gamma)?;
    let map = &extraction.profile_map;

    let gamma_big = big(gamma);
    let mut max_err = BigRational::zero();
    for w in all_words(domain)? {
        let f = BoolFunction::from_word(domain.clone(), w);
        let err = (big(p_table[w as usize]) - map.phi_of(&f)?).abs();
        if err > max_err {
            max_err = err;
        }
    }

    let cover = build_cover_property(property, map.family(), construction)?;
    let sandwich = verify_sandwich(property, &cover, epsilon)?;

    // Lemma 4: p_T(f) ≥ p_T(g) − 2γ whenever f ∈ P′ shares a profile with g ∈ P.
    let mut best_member: HashMap<Vec<usize>, Rational> = HashMap::new();
    for w in property.member_words()? {
        let profile = map.profile(&BoolFunction::from_word(domain.clone(), w));
        let p = p_table[w as usize];
        best_member.entry(profile).and_modify(|m| *m = (*m).max(p)).or_insert(p);
    }
    let cover_prop = Property::from(cover.clone());
    let mut min_slack: Option<Rational> = None;
    for w in cover_prop.member_words()? {
        let profile = map.profile(&BoolFunction::from_word(domain.clone(), w));
        if let Some(&pg) = best_member.get(&profile) {
            let slack = p_table[w as usize] - pg + gamma * 2;
            min_slack = Some(min_slack.map_or(slack, |m: Rational| m.min(slack)));
        }
    }
    let min_slack = min_slack.unwrap_or_else(|| gamma * 2);

    Ok(PipelineReport {
        property: property.name().to_string(),
        domain_size: domain.size(),
        s: tester.s(),
        epsilon: format_rational(&epsilon),
        gamma: format_rational(&gamma),
        validity,
        regularity_parts: extraction.regularity.partition.k(),
        regularity_iterations: extraction.regularity.iterations,
        regularity_max_defect: extraction.regularity.certificate.max_defect.clone(),
        partition: extraction.regularity.partition.parts().to_vec(),
        family: map.family().to_vec(),
        family_size: map.family().len(),
        atom_sizes: map.atoms().part_sizes(),
        profiles: map.len(),
        phi_table: map.table().iter().map(|(p, v)| (p.clone(), format_rational(v))).collect(),
        lemma3_max_error: format_rational(&max_err),
        lemma3_max_error_f64: max_err.to_f64().unwrap_or(f64::NAN),
        lemma3_holds: max_err <= gamma_big,
        lemma4_min_slack: format_rational(&min_slack),
        lemma4_holds: min_slack >= Rational::zero(),
        construction,
        admissible: cover.admissible().iter().map(|c| c.0.clone()).collect(),
        sandwich,
    })
}
