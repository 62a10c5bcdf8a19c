use crate::error::{Error, Result};
use crate::function::{part_counts, BoolFunction};
use crate::oracle::matching::{konig_cover, maximum_matching};
use crate::property::{KPartSymmetricProperty, Property};
use crate::Rational;

/// `min_{g ∈ P} d(f, g)`, exactly.
///
/// Structured properties use the closed form
/// `min_c Σ_i |c_i(f) - c_i| / |X|`; monotonicity uses the matching oracle;
/// anything else is enumerated.
pub fn exact_distance(f: &BoolFunction, property: &Property) -> Result<Rational> {
    f.domain().check_same(property.domain())?;
    if let Some(kp) = property.as_kpart() {
        return kpart_distance(f, kp);
    }
    if property.is_monotone() && f.len() > 24 {
        return monotone_distance(f);
    }
    enumerated_distance(f, property)
}

/// Distance by scanning every member of the property.
pub fn enumerated_distance(f: &BoolFunction, property: &Property) -> Result<Rational> {
    f.domain().check_same(property.domain())?;
    let members = property.member_words()?;
    let word = f.word();
    let best = members
        .iter()
        .map(|&g| (g ^ word).count_ones())
        .min()
        .ok_or(Error::EmptyProperty)?;
    Ok(Rational::new(i64::from(best), f.len() as i64))
}

/// Distance from every function to the property, indexed by word, by a
/// breadth-first search of the hypercube started from all members at once.
pub fn distance_table(property: &Property) -> Result<Vec<Rational>> {
    let n = property.domain().size();
    let members = property.member_words()?;
    if members.is_empty() {
        return Err(Error::EmptyProperty);
    }
    let mut flips = vec![u32::MAX; 1usize << n];
    let mut frontier = members;
    for &w in &frontier {
        flips[w as usize] = 0;
    }
    let mut depth = 0;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &w in &frontier {
            for x in 0..n {
                let v = (w ^ (1 << x)) as usize;
                if flips[v] == u32::MAX {
                    flips[v] = depth;
                    next.push(v as u64);
                }
            }
        }
        frontier = next;
    }
    Ok(flips.into_iter().map(|d| Rational::new(i64::from(d), n as i64)).collect())
}

/// Minimum number of flips to the nearest member of a member list, given in
/// word form.
pub(crate) fn nearest_flips(word: u64, members: &[u64]) -> Option<u32> {
    members.iter().map(|&g| (g ^ word).count_ones()).min()
}

pub fn kpart_distance(f: &BoolFunction, p: &KPartSymmetricProperty) -> Result<Rational> {
    let counts = part_counts(f, p.partition())?;
    let best = p
        .admissible()
        .iter()
        .map(|c| counts.l1(c))
        .min()
        .ok_or(Error::EmptyProperty)?;
    Ok(Rational::new(best as i64, f.len() as i64))
}

/// Distance to the monotone functions on a hypergrid, as the size of a
/// minimum vertex cover of the violation graph divided by `|X|`.
pub fn monotone_distance(f: &BoolFunction) -> Result<Rational> {
    let cover = monotone_repair_set(f)?;
    Ok(Rational::new(cover.len() as i64, f.len() as i64))
}

/// A minimum vertex cover of the violation graph: pairs `x ⪯ y` with
/// `f(x) = 1`, `f(y) = 0`. Returned as sorted domain indices.
pub fn monotone_repair_set(f: &BoolFunction) -> Result<Vec<usize>> {
    let domain = f.domain();
    let (_, d) = domain.require_grid()?;
    let ones: Vec<usize> = f.bits().iter_ones().collect();
    let zeros: Vec<usize> = f.bits().iter_zeros().collect();
    let coords: Vec<Vec<usize>> = (0..domain.size())
        .map(|x| domain.grid_coords(x).expect("grid"))
        .collect();
    let below = |x: usize, y: usize| (0..d).all(|i| coords[x][i] <= coords[y][i]);
    let adj: Vec<Vec<usize>> = ones
        .iter()
        .map(|&x| {
            zeros
                .iter()
                .enumerate()
                .filter(|&(_, &y)| below(x, y))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let m = maximum_matching(&adj, zeros.len());
    let (cl, cr) = konig_cover(&adj, &m);
    let mut cover: Vec<usize> = cl
        .into_iter()
        .map(|i| ones[i])
        .chain(cr.into_iter().map(|j| zeros[j]))
        .collect();
    cover.sort_unstable();
    Ok(cover)
}
