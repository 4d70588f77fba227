//! Randomized structural properties, exercised at modest case counts so the
//! whole file stays fast in debug builds.

use proptest::prelude::*;

use groupext::abelian::Elem;
use groupext::cohomology::{
    coboundary, cohomologous, extension_from_cocycle, h2, rotation_cocycle, validate_cocycle,
    Cochain1, Cocycle2,
};
use groupext::corpus;
use groupext::extension::baer_sum;
use groupext::iso::properly_isomorphic;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coboundaries_are_cocycles_cohomologous_to_zero(
        n in 2i64..=5,
        m in 2i64..=4,
        vals in proptest::collection::vec(0i64..12, 8),
    ) {
        let act = corpus::cyclic_context(n, m).unwrap();
        let entries: Vec<(String, Elem)> = act
            .groupoid
            .arrow_ids()
            .iter()
            .enumerate()
            .filter(|&(a, _)| !act.groupoid.is_unit_arrow(a))
            .map(|(a, id)| (id.clone(), Elem(vec![vals[a % vals.len()] % m])))
            .collect();
        let c = Cochain1::new(&act, entries).unwrap();
        let delta = coboundary(&c).unwrap();
        prop_assert!(validate_cocycle(&delta).is_valid());
        let zero = Cocycle2::zero(&act);
        prop_assert!(cohomologous(&delta, &zero).unwrap().is_some());
    }

    #[test]
    fn baer_sum_realizes_class_addition(
        n in 2i64..=4,
        m in 2i64..=4,
        i in 0usize..4,
        j in 0usize..4,
    ) {
        let act = corpus::cyclic_context(n, m).unwrap();
        let reps = h2(&act).unwrap().class_representatives().unwrap();
        let phi1 = &reps[i % reps.len()];
        let phi2 = &reps[j % reps.len()];
        let e1 = extension_from_cocycle(phi1).unwrap();
        let e2 = extension_from_cocycle(phi2).unwrap();
        let summed = baer_sum(&e1, &e2).unwrap();
        let direct = extension_from_cocycle(&phi1.add(phi2).unwrap()).unwrap();
        prop_assert!(properly_isomorphic(&summed, &direct).unwrap().is_witness());
    }

    #[test]
    fn rotation_cocycle_matches_closed_form(n in 2i64..=7, m in 1i64..=6) {
        prop_assume!(gcd(m, n) == 1);
        let omega = rotation_cocycle(n, m).unwrap();
        prop_assert!(validate_cocycle(&omega).is_valid());
        let s = (1..=n).find(|s| (s * m).rem_euclid(n) == 1).unwrap();
        let g = &omega.action().groupoid;
        for k1 in 0..n {
            for k2 in 0..n {
                let a = g.arrow_idx(&k1.to_string()).unwrap();
                let b = g.arrow_idx(&k2.to_string()).unwrap();
                let expected = if k1 + k2 < n { 0 } else { n * s };
                prop_assert_eq!(omega.value(a, b).unwrap(), Elem(vec![expected]));
            }
        }
    }
}
