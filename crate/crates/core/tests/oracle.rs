use proptest::prelude::*;
use symtest_core::oracle::{
    dilworth_width, enumerated_distance, exact_distance, kpart_distance, max_antichain_strict, monotone_distance,
    monotone_repair_set,
};
use symtest_core::property::{is_monotone, monotone_property};
use symtest_core::*;

#[test]
fn matching_distance_agrees_with_enumeration_on_4x4() {
    let dom = Domain::hypergrid(4, 2).unwrap();
    let mono = monotone_property(&dom).unwrap();
    assert_eq!(mono.member_words().unwrap().len(), 70);
    for f in enumerate_functions(&dom).unwrap() {
        assert_eq!(monotone_distance(&f).unwrap(), exact_distance(&f, &mono).unwrap(), "{f:?}");
    }
}

#[test]
fn repairing_the_cover_gives_a_monotone_function() {
    let dom = Domain::hypergrid(3, 2).unwrap();
    for f in enumerate_functions(&dom).unwrap() {
        let cover = monotone_repair_set(&f).unwrap();
        // The up-closure of the uncovered ones agrees with f off the cover.
        let keep: Vec<usize> = (0..f.len()).filter(|x| !cover.contains(x)).collect();
        let fixed = BoolFunction::from_fn(dom.clone(), |x| {
            let cx = dom.grid_coords(x).unwrap();
            keep.iter().any(|&y| {
                f.get(y) && dom.grid_coords(y).unwrap().iter().zip(&cx).all(|(a, b)| a <= b)
            })
        });
        assert!(is_monotone(&fixed));
        for &y in &keep {
            assert_eq!(fixed.get(y), f.get(y));
        }
    }
}

#[test]
fn antichain_bound_for_small_grids() {
    for k in 1..=4 {
        for d in 1..=2 {
            let a = max_antichain_strict(k, d).unwrap();
            assert!(a.exact);
            assert!(a.size <= d * k.pow(d as u32 - 1));
            assert_eq!(a.size, dilworth_width(k, d));
        }
    }
    assert_eq!(max_antichain_strict(3, 2).unwrap().size, 5);
}

fn structured(size: usize) -> impl Strategy<Value = KPartSymmetricProperty> {
    (1..=3usize, proptest::collection::vec(0..3usize, size), any::<u64>()).prop_map(move |(k, labels, bits)| {
        let dom = Domain::indexed(size).unwrap();
        let mut labels: Vec<usize> = labels.into_iter().map(|l| l % k).collect();
        for (i, l) in labels.iter_mut().take(k).enumerate() {
            *l = i;
        }
        let part = DomainPartition::from_labels(dom, &labels).unwrap();
        let sizes = part.part_sizes();
        let mut all = vec![vec![]];
        for &s in &sizes {
            all = all
                .into_iter()
                .flat_map(|c: Vec<usize>| (0..=s).map(move |v| [c.clone(), vec![v]].concat()))
                .collect();
        }
        let mut admissible: Vec<CountVector> = all
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> (i % 64) & 1 == 1)
            .map(|(_, c)| CountVector(c.clone()))
            .collect();
        if admissible.is_empty() {
            admissible.push(CountVector(all[0].clone()));
        }
        KPartSymmetricProperty::new(part, admissible).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_matches_enumeration(p in structured(10), word in 0u64..1024) {
        let f = BoolFunction::from_word(p.domain().clone(), word);
        let prop = Property::from(p.clone());
        prop_assert_eq!(kpart_distance(&f, &p).unwrap(), enumerated_distance(&f, &prop).unwrap());
    }

    #[test]
    fn distance_is_zero_exactly_on_members(p in structured(8), word in 0u64..256) {
        let f = BoolFunction::from_word(p.domain().clone(), word);
        let d = kpart_distance(&f, &p).unwrap();
        prop_assert_eq!(d == Rational::from(0), p.contains(&f));
        prop_assert!(d <= Rational::from(1));
    }

    #[test]
    fn one_flip_moves_distance_by_at_most_one_step(p in structured(8), word in 0u64..256, x in 0usize..8) {
        let f = BoolFunction::from_word(p.domain().clone(), word);
        let mut g = f.clone();
        g.flip(x);
        let step = Rational::new(1, 8);
        let (a, b) = (kpart_distance(&f, &p).unwrap(), kpart_distance(&g, &p).unwrap());
        prop_assert!(a - b <= step && b - a <= step);
    }
}
