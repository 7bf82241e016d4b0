use proptest::collection::btree_set;
use proptest::prelude::*;

use sumsetlab::arith::gcd_all;
use sumsetlab::decomposition::{decompose, normalize};
use sumsetlab::modular::{check_e_transform, project, residue_sumset, ResidueSet};
use sumsetlab::sets::{
    add_dilated, add_dilated_naive, canonicalize, dilate, sumset, translate, IntSet,
};

fn int_set(max_len: usize, range: i64) -> impl Strategy<Value = IntSet> {
    btree_set(-range..=range, 1..=max_len).prop_map(IntSet::new)
}

fn dilated_len(a: &IntSet, k: i64) -> usize {
    add_dilated(a, k, a).unwrap().len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn translation_preserves_cardinality(a in int_set(12, 50), k in 2i64..12, t in -1000i64..1000) {
        prop_assert_eq!(dilated_len(&translate(&a, t).unwrap(), k), dilated_len(&a, k));
    }

    #[test]
    fn dilation_preserves_cardinality(a in int_set(12, 50), k in 2i64..12, d in 1i64..20) {
        prop_assert_eq!(dilated_len(&dilate(d, &a).unwrap(), k), dilated_len(&a, k));
    }

    #[test]
    fn reflection_preserves_cardinality(a in int_set(12, 50), k in 2i64..12) {
        prop_assert_eq!(dilated_len(&a.negate().unwrap(), k), dilated_len(&a, k));
    }

    #[test]
    fn kernel_matches_pairwise(a in int_set(20, 200), b in int_set(20, 200), k in 1i64..40) {
        prop_assert_eq!(add_dilated(&a, k, &b).unwrap(), add_dilated_naive(&a, k, &b).unwrap());
    }

    #[test]
    fn sumset_lower_bound(a in int_set(12, 60), b in int_set(12, 60)) {
        prop_assert!(sumset(&a, &b).unwrap().len() >= a.len() + b.len() - 1);
    }

    #[test]
    fn progressions_attain_the_sumset_bound(
        a0 in -50i64..50, b0 in -50i64..50, d in 1i64..9, m in 1i64..15, n in 1i64..15,
    ) {
        let a = IntSet::new((0..m).map(|i| a0 + d * i));
        let b = IntSet::new((0..n).map(|i| b0 + d * i));
        prop_assert_eq!(sumset(&a, &b).unwrap().len(), a.len() + b.len() - 1);
    }

    #[test]
    fn canonicalize_is_idempotent(a in btree_set(-60i64..60, 2..12).prop_map(IntSet::new)) {
        let c = canonicalize(&a).unwrap();
        prop_assert_eq!(c.smallest(), Some(0));
        prop_assert_eq!(gcd_all(c.as_slice()), 1);
        prop_assert_eq!(canonicalize(&c).unwrap(), c.clone());
        prop_assert_eq!(dilated_len(&c, 4), dilated_len(&a, 4));
    }

    #[test]
    fn projection_is_a_homomorphism(a in int_set(10, 80), b in int_set(10, 80), k in 2usize..17) {
        let lhs = residue_sumset(&project(&a, k).unwrap(), &project(&b, k).unwrap()).unwrap();
        prop_assert_eq!(lhs, project(&sumset(&a, &b).unwrap(), k).unwrap());
    }

    #[test]
    fn decomposition_reconstructs(a in int_set(16, 100), k in 2i64..13) {
        let d = decompose(&a, k).unwrap();
        prop_assert_eq!(d.reconstruct().unwrap(), a.clone());
        let total: usize = d.classes().iter().map(|c| c.size()).sum();
        prop_assert_eq!(total, a.len());
        let sizes: Vec<usize> = d.classes().iter().map(|c| c.size()).collect();
        prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
        let mut e_f: Vec<usize> = d.e_set().iter().chain(d.f_set()).copied().collect();
        e_f.sort_unstable();
        prop_assert_eq!(e_f, (1..=d.j()).collect::<Vec<_>>());
    }

    #[test]
    fn normalize_preserves_cardinality(a in btree_set(-60i64..60, 2..12).prop_map(IntSet::new), k in 2i64..10) {
        let n = normalize(&a, k).unwrap();
        for step in &n.steps {
            prop_assert_eq!(step.sumset_size, n.input_sumset_size);
        }
        prop_assert_eq!(dilated_len(&n.result, k), dilated_len(&a, k));
        prop_assert_eq!(gcd_all(n.result.as_slice()), 1);
        let d = decompose(&n.result, k).unwrap();
        prop_assert!(d.j() >= 2);
        prop_assert_eq!(d.classes()[0].offset, 0);
    }

    #[test]
    fn e_transform_over_residues(
        k in 2usize..13, am in 1u64..4096, bm in 1u64..4096, e in 0i64..13,
    ) {
        let mask = (1u64 << k) - 1;
        prop_assume!(am & mask != 0 && bm & mask != 0);
        let a = ResidueSet::from_mask(k, am & mask).unwrap();
        let b = ResidueSet::from_mask(k, bm & mask).unwrap();
        prop_assert!(check_e_transform(&a, &b, e).unwrap().all_hold());
    }
}
