use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use symtest_core::hp;
use symtest_core::regularity::{
    defect, extended_defect, max_defect_over_family, mutual_information_state, tao_inequality_check,
    weak_regularity_partition, SetFamily, VertexPartition, WeightedHypergraph,
};
use symtest_core::Rational;

fn r(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

fn partition_from_labels(labels: &[usize]) -> VertexPartition {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let parts: Vec<Vec<usize>> = (0..k)
        .map(|i| (0..labels.len()).filter(|&v| labels[v] == i).collect())
        .filter(|p: &Vec<usize>| !p.is_empty())
        .collect();
    VertexPartition::new(labels.len(), parts).unwrap()
}

fn instance() -> impl Strategy<Value = (WeightedHypergraph, VertexPartition, Vec<usize>)> {
    (3usize..=6, 1usize..=2, any::<u64>(), proptest::collection::vec(0usize..3, 6), any::<u8>()).prop_map(
        |(n, s, seed, labels, set)| {
            let g = WeightedHypergraph::random_granular(n, s, r(1, 4), seed, 0).unwrap();
            let p = partition_from_labels(&labels[..n]);
            let set: Vec<usize> = (0..n).filter(|&v| set >> v & 1 == 1).collect();
            (g, p, set)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_rule_and_tao(inst in instance()) {
        let (g, p, set) = inst;
        let st = mutual_information_state(&g, &p, &set, r(1, 4)).unwrap();
        prop_assert_eq!(st.total_probability(), BigRational::one());
        let gap = st.mi_y_zs() - st.mi_y_zprime() - st.mi_y_zs_given_zprime();
        prop_assert!(hp::to_f64(&gap).abs() <= 1e-30);
        prop_assert!(hp::to_f64(&st.mi_y_zs()) <= hp::to_f64(&st.entropy_y()) + 1e-30);
        prop_assert!(tao_inequality_check(&st).holds);
    }

    #[test]
    fn defects_are_bounded(inst in instance()) {
        let (g, p, set) = inst;
        let d = defect(&g, &p, &set).unwrap();
        prop_assert!(d >= BigRational::zero() && d <= BigRational::one());
        prop_assert!(extended_defect(&g, &p, &set).unwrap() >= d);
    }

    #[test]
    fn refinement_certifies(n in 2usize..=7, seed in any::<u64>(), eps in 2i64..=6) {
        let g = WeightedHypergraph::random_granular(n, 2, r(1, 6), seed, 1).unwrap();
        let eps = r(1, eps);
        let res = weak_regularity_partition(&g, eps, &SetFamily::AllSubsets).unwrap();
        prop_assert!(res.certificate.holds);
        prop_assert!(res.iterations <= res.iteration_bound);
        let replay = max_defect_over_family(&g, &res.partition, &SetFamily::AllSubsets).unwrap();
        prop_assert!(replay.0 <= BigRational::new((*eps.numer()).into(), (*eps.denom()).into()));
        // Every part is a union of earlier parts' pieces: refining by any part is a no-op.
        for part in res.partition.parts() {
            let mut member = vec![false; n];
            for &v in part {
                member[v] = true;
            }
            prop_assert_eq!(res.partition.refine(&member).k(), res.partition.k());
        }
    }
}

#[test]
fn planted_blocks() {
    let block = |v: usize| usize::from(v >= 5);
    let g = WeightedHypergraph::from_fn(10, 2, |e| if block(e[0]) == block(e[1]) { r(5, 6) } else { r(1, 6) }).unwrap();
    let planted = VertexPartition::new(10, vec![(0..5).collect(), (5..10).collect()]).unwrap();
    assert!(max_defect_over_family(&g, &planted, &SetFamily::AllSubsets).unwrap().0.is_zero());
    let res = weak_regularity_partition(&g, r(1, 2), &SetFamily::AllSubsets).unwrap();
    assert!(res.certificate.holds);
    assert!(res.iterations <= res.iteration_bound);
}
