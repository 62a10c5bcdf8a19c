use std::collections::{HashSet, VecDeque};

use crate::domain::{checked_pow, DomainRef, Element};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::property::Property;

/// A permutation of domain indices, `perm[x] = π(x)`.
pub type Permutation = Vec<usize>;

fn check_permutation(perm: &[usize], size: usize) -> Result<()> {
    if perm.len() != size {
        return Err(Error::InvalidParameter(format!(
            "permutation of length {} on a domain of size {size}",
            perm.len()
        )));
    }
    let mut seen = vec![false; size];
    for &y in perm {
        if y >= size || std::mem::replace(&mut seen[y], true) {
            return Err(Error::InvalidParameter("generator is not a permutation".into()));
        }
    }
    Ok(())
}

/// Applies `(πf)(x) = f(π(x))` to a packed word.
pub fn act_on_word(perm: &[usize], word: u64) -> u64 {
    perm.iter()
        .enumerate()
        .fold(0u64, |acc, (x, &px)| acc | ((word >> px & 1) << x))
}

/// Smallest superset of `property` closed under the group generated by
/// `generators`, by breadth-first orbit expansion over the member set.
pub fn closure_under_group(property: &Property, generators: &[Permutation]) -> Result<Property> {
    let size = property.domain().size();
    for g in generators {
        check_permutation(g, size)?;
    }
    let cap = Limits::global().closure_members;
    let mut members: HashSet<u64> = HashSet::new();
    let mut queue = VecDeque::new();
    for w in property.member_words()? {
        if members.insert(w) {
            queue.push_back(w);
        }
    }
    while let Some(w) = queue.pop_front() {
        for g in generators {
            let image = act_on_word(g, w);
            if members.insert(image) {
                if members.len() > cap {
                    return Err(Error::cap("group closure members", members.len(), cap));
                }
                queue.push_back(image);
            }
        }
    }
    Ok(Property::from_words(
        property.domain().clone(),
        format!("closure of {}", property.name()),
        members,
    ))
}

/// All transpositions `(i j)` of the domain.
pub fn all_transpositions(size: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    for i in 0..size {
        for j in i + 1..size {
            let mut p: Permutation = (0..size).collect();
            p.swap(i, j);
            out.push(p);
        }
    }
    out
}

/// The permutation of vertex pairs induced by a vertex permutation.
pub fn induced_edge_permutation(domain: &DomainRef, vertex_perm: &[usize]) -> Result<Permutation> {
    (0..domain.size())
        .map(|e| match domain.decode(e)? {
            Element::Edge(u, v) => {
                let (a, b) = (vertex_perm[u], vertex_perm[v]);
                domain.encode(&Element::Edge(a.min(b), a.max(b)))
            }
            _ => Err(Error::DomainMismatch(format!("{domain} is not a graph-edge domain"))),
        })
        .collect()
}

/// Generators of the vertex-permutation action on a graph-edge domain: the
/// adjacent vertex transpositions `(i, i+1)`.
pub fn vertex_permutation_generators(domain: &DomainRef) -> Result<Vec<Permutation>> {
    let crate::domain::DomainSpec::GraphEdges { n } = domain.spec() else {
        return Err(Error::DomainMismatch(format!("{domain} is not a graph-edge domain")));
    };
    (0..n - 1)
        .map(|i| {
            let mut vp: Vec<usize> = (0..n).collect();
            vp.swap(i, i + 1);
            induced_edge_permutation(domain, &vp)
        })
        .collect()
}

/// All invertible affine maps `x ↦ Ax + b` of `F_p^n`, as permutations of the
/// index codec (first coordinate most significant).
pub fn affine_maps(p: u64, n: usize) -> Result<Vec<Permutation>> {
    let points = checked_pow(p, n).unwrap_or(u64::MAX);
    let cap = Limits::global().affine_points;
    if points > cap {
        return Err(Error::cap("affine maps: p^n", points, cap));
    }
    let points = points as usize;
    let vectors: Vec<Vec<u64>> = (0..points)
        .map(|i| {
            let mut v = vec![0; n];
            let mut rest = i as u64;
            for c in v.iter_mut().rev() {
                *c = rest % p;
                rest /= p;
            }
            v
        })
        .collect();
    let index = |v: &[u64]| v.iter().fold(0u64, |acc, &c| acc * p + c) as usize;

    let matrices = checked_pow(p, n * n).expect("bounded by cap squared") as usize;
    let mut out = Vec::new();
    for code in 0..matrices {
        let mut a = vec![0u64; n * n];
        let mut rest = code as u64;
        for c in a.iter_mut().rev() {
            *c = rest % p;
            rest /= p;
        }
        if !invertible_mod_p(&a, n, p) {
            continue;
        }
        let linear: Vec<Vec<u64>> = vectors
            .iter()
            .map(|x| {
                (0..n)
                    .map(|r| (0..n).map(|c| a[r * n + c] * x[c]).sum::<u64>() % p)
                    .collect()
            })
            .collect();
        for b in &vectors {
            out.push(
                linear
                    .iter()
                    .map(|ax| {
                        let y: Vec<u64> = ax.iter().zip(b).map(|(u, v)| (u + v) % p).collect();
                        index(&y)
                    })
                    .collect(),
            );
        }
    }
    Ok(out)
}

fn invertible_mod_p(a: &[u64], n: usize, p: u64) -> bool {
    let mut m = a.to_vec();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r * n + col].is_multiple_of(p)) else {
            return false;
        };
        for c in 0..n {
            m.swap(col * n + c, pivot * n + c);
        }
        let inv = mod_inverse(m[col * n + col], p);
        for r in 0..n {
            if r != col && m[r * n + col] != 0 {
                let factor = m[r * n + col] * inv % p;
                for c in 0..n {
                    m[r * n + c] = (m[r * n + c] + p * p - factor * m[col * n + c] % p) % p;
                }
            }
        }
    }
    true
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is prime: a^(p-2) mod p.
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::function::BoolFunction;
    use crate::property::monotone_property;
    use rand::{seq::SliceRandom, Rng, SeedableRng};

    #[test]
    fn identity_closure_is_unchanged() {
        let line = Domain::line(4).unwrap();
        let mono = monotone_property(&line).unwrap();
        let id: Permutation = (0..4).collect();
        let closed = closure_under_group(&mono, &[id]).unwrap();
        assert_eq!(closed.member_words().unwrap(), mono.member_words().unwrap());
    }

    #[test]
    fn symmetric_group_orbit_is_a_weight_class() {
        let dom = Domain::indexed(6).unwrap();
        let f = BoolFunction::from_bit_str(dom.clone(), "101100").unwrap();
        let single = Property::from_members(dom.clone(), "single", [f.clone()]).unwrap();
        let closed = closure_under_group(&single, &all_transpositions(6)).unwrap();
        let expected: Vec<u64> = (0..64u64).filter(|w| w.count_ones() == 3).collect();
        assert_eq!(closed.member_words().unwrap(), expected);
    }

    #[test]
    fn closure_is_a_fixpoint() {
        let dom = Domain::indexed(5).unwrap();
        let members = [0b00011u64, 0b10100].map(|w| BoolFunction::from_word(dom.clone(), w));
        let p = Property::from_members(dom.clone(), "p", members).unwrap();
        let gens = vec![vec![1, 2, 3, 4, 0], vec![1, 0, 2, 3, 4]];
        let closed = closure_under_group(&p, &gens).unwrap();
        for w in closed.member_words().unwrap() {
            for g in &gens {
                assert!(closed.contains_word(act_on_word(g, w)));
            }
        }
    }

    #[test]
    fn graph_closure_contains_isomorphism_classes() {
        let dom = Domain::graph_edges(4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut words: Vec<u64> = (0..64).collect();
        words.shuffle(&mut rng);
        let members = words[..10].iter().map(|&w| BoolFunction::from_word(dom.clone(), w));
        let p = Property::from_members(dom.clone(), "random graphs", members).unwrap();
        let closed = closure_under_group(&p, &vertex_permutation_generators(&dom).unwrap()).unwrap();
        let mut perms = vec![vec![0, 1, 2, 3]];
        for i in 1..4 {
            perms = perms
                .into_iter()
                .flat_map(|p: Vec<usize>| {
                    (0..=i).map(move |pos| {
                        let mut q = p.clone();
                        q.retain(|&v| v != i);
                        q.insert(pos, i);
                        q
                    })
                })
                .collect();
            perms.dedup();
        }
        let all: HashSet<Vec<usize>> = perms.into_iter().collect();
        assert_eq!(all.len(), 24);
        for &w in &words[..10] {
            for vp in &all {
                let ep = induced_edge_permutation(&dom, vp).unwrap();
                assert!(closed.contains_word(act_on_word(&ep, w)));
            }
        }
    }

    #[test]
    fn affine_map_counts() {
        assert_eq!(affine_maps(2, 1).unwrap().len(), 2);
        assert_eq!(affine_maps(2, 2).unwrap().len(), 24);
        // |GL_2(F_3)| = 48, times 9 translations.
        assert_eq!(affine_maps(3, 2).unwrap().len(), 432);
        assert!(affine_maps(5, 3).is_err());
    }

    #[test]
    fn affine_maps_form_a_group() {
        let maps = affine_maps(2, 2).unwrap();
        let set: HashSet<&Permutation> = maps.iter().collect();
        for a in &maps {
            for b in &maps {
                let composed: Permutation = (0..4).map(|x| a[b[x]]).collect();
                assert!(set.contains(&composed));
            }
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let maps3 = affine_maps(3, 2).unwrap();
        let set3: HashSet<&Permutation> = maps3.iter().collect();
        for _ in 0..200 {
            let a = &maps3[rng.gen_range(0..maps3.len())];
            let b = &maps3[rng.gen_range(0..maps3.len())];
            let composed: Permutation = (0..9).map(|x| a[b[x]]).collect();
            assert!(set3.contains(&composed));
        }
    }

    #[test]
    fn rejects_non_permutations() {
        let dom = Domain::indexed(3).unwrap();
        let p = Property::from_members(dom.clone(), "p", [BoolFunction::zeros(dom)]).unwrap();
        assert!(closure_under_group(&p, &[vec![0, 0, 1]]).is_err());
        assert!(closure_under_group(&p, &[vec![0, 1]]).is_err());
    }
}
