use std::collections::BTreeSet;

use sumsetlab::bounds::{build_extremal, chs_bound};
use sumsetlab::search::{
    enumerate_canonical, find_violations, min_sumset_size, run_search, BoundKind, SearchMode,
    SearchSpec,
};
use sumsetlab::sets::{add_dilated_naive, IntSet};

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Every subset of `[0, D]` by bitmask, filtered straight from the
/// definitions, sorted lexicographically.
fn brute_family(size: usize, diameter: i64, gcd_one: bool, reflection: bool) -> Vec<Vec<i64>> {
    let mut out = BTreeSet::new();
    for mask in 0u32..1 << (diameter + 1) {
        let v: Vec<i64> = (0..=diameter).filter(|i| mask >> i & 1 == 1).collect();
        if v.len() != size || v[0] != 0 {
            continue;
        }
        if gcd_one && size >= 2 && v.iter().fold(0, |g, &x| gcd(g, x)) != 1 {
            continue;
        }
        if reflection {
            let max = *v.last().unwrap();
            let mut r: Vec<i64> = v.iter().map(|x| max - x).collect();
            r.sort_unstable();
            if r < v {
                continue;
            }
        }
        out.insert(v);
    }
    out.into_iter().collect()
}

fn naive_len(a: &IntSet, k: i64) -> i64 {
    add_dilated_naive(a, k, a).unwrap().len() as i64
}

#[test]
fn enumeration_matches_brute_force_family() {
    for size in 1..=4 {
        for diameter in (size as i64 - 1)..=8 {
            for gcd_one in [false, true] {
                for reflection in [false, true] {
                    let mut spec = SearchSpec::new(4, size, diameter);
                    spec.gcd_one = gcd_one;
                    spec.use_reflection = reflection;
                    let got: Vec<Vec<i64>> = enumerate_canonical(&spec)
                        .unwrap()
                        .into_iter()
                        .map(IntSet::into_vec)
                        .collect();
                    assert_eq!(
                        got,
                        brute_family(size, diameter, gcd_one, reflection),
                        "size {size}, diameter {diameter}, gcd {gcd_one}, reflection {reflection}"
                    );
                }
            }
        }
    }
}

#[test]
fn results_do_not_depend_on_workers() {
    for (k, size, diameter) in [(4, 5, 16), (3, 4, 18), (5, 6, 13)] {
        let mut spec = SearchSpec::new(k, size, diameter);
        spec.mode = SearchMode::Violations;
        spec.bound = BoundKind::Custom(chs_bound(k, size as i64).unwrap() + 3);
        spec.max_violations = 40;
        let base = run_search(&spec).unwrap();
        assert!(base.violation_count > 0);
        for workers in [4, 16] {
            spec.workers = workers;
            let r = run_search(&spec).unwrap();
            assert_eq!(r.min_value, base.min_value);
            assert_eq!(r.witnesses, base.witnesses);
            assert_eq!(r.violations, base.violations);
            assert_eq!(r.violation_count, base.violation_count);
            assert_eq!(r.sets_enumerated, base.sets_enumerated);
        }
    }
}

#[test]
fn reported_sets_reproduce_their_cardinalities() {
    let mut spec = SearchSpec::new(4, 4, 12);
    spec.mode = SearchMode::Violations;
    let r = find_violations(&spec).unwrap();
    assert!(r.violation_count > 0);
    for v in &r.violations {
        assert_eq!(naive_len(&v.set, 4), v.sumset_size);
        assert!(v.sumset_size < v.bound);
        assert_eq!(v.set.smallest(), Some(0));
        assert!(v.set.largest().unwrap() <= 12);
    }
    let min = r.min_value.unwrap();
    for w in &r.witnesses {
        assert_eq!(naive_len(w, 4), min);
    }
    let mut sorted = r.witnesses.clone();
    sorted.sort();
    assert_eq!(sorted, r.witnesses);
}

#[test]
fn violation_hunt_examples() {
    let mut spec = SearchSpec::new(4, 4, 12);
    spec.mode = SearchMode::Violations;
    let r = find_violations(&spec).unwrap();
    assert_eq!(r.bound, Some(14));
    assert!(r
        .violations
        .iter()
        .any(|v| v.set == IntSet::from([0, 1, 4, 5]) && v.sumset_size == 12));

    let mut spec = SearchSpec::new(4, 6, 24);
    spec.mode = SearchMode::Violations;
    spec.workers = 4;
    assert_eq!(find_violations(&spec).unwrap().violation_count, 0);
}

#[test]
fn size_four_minimum() {
    let r = min_sumset_size(&SearchSpec::new(4, 4, 16)).unwrap();
    assert_eq!(r.min_value, Some(12));
    assert!(r.witnesses.contains(&IntSet::from([0, 1, 4, 5])));
}

#[test]
fn larger_diameter_never_raises_the_minimum() {
    for (k, size) in [(4, 4), (3, 5), (5, 3)] {
        let mut prev = i64::MAX;
        for diameter in (size as i64 - 1)..=14 {
            let m = min_sumset_size(&SearchSpec::new(k, size, diameter))
                .unwrap()
                .min_value
                .unwrap();
            assert!(m <= prev, "k {k}, size {size}, diameter {diameter}");
            prev = m;
        }
    }
}

#[test]
fn filters_do_not_change_the_minimum() {
    for k in [2, 3, 4, 6] {
        for size in 2..=5 {
            let mut spec = SearchSpec::new(k, size, 12);
            spec.gcd_one = false;
            let plain = min_sumset_size(&spec).unwrap().min_value;
            spec.gcd_one = true;
            spec.use_reflection = true;
            assert_eq!(
                min_sumset_size(&spec).unwrap().min_value,
                plain,
                "k {k}, size {size}"
            );
        }
    }
}

#[test]
fn extremal_set_attains_the_size_six_minimum() {
    let mut spec = SearchSpec::new(4, 6, 24);
    spec.workers = 4;
    let r = min_sumset_size(&spec).unwrap();
    assert_eq!(r.min_value, Some(24));
    let f = build_extremal(4, 1, 3).unwrap();
    assert!(r.witnesses.contains(&f.set));
}
