//! Reduced-scale runs of every lemma driver; the full slices run in the
//! CLI acceptance target.

use sumsetlab::search::{verify_lemma, LemmaId, VerifyMode, VerifyParams};

fn quick(k: Option<i64>) -> VerifyParams {
    VerifyParams {
        k,
        diameter: Some(9),
        max_size: Some(5),
        samples: Some(2_000),
        seed: 11,
        workers: 2,
        ..VerifyParams::default()
    }
}

#[test]
fn every_lemma_passes_on_a_small_slice() {
    for id in LemmaId::ALL {
        let k = match id {
            LemmaId::Chowla | LemmaId::Stabilizer => Some(6),
            LemmaId::ImprovedChowla => Some(4),
            _ => None,
        };
        let r = verify_lemma(id.as_str(), &quick(k)).unwrap();
        assert!(r.passed(), "{id}: {:?}", r.failures);
        assert!(r.cases_checked > 0, "{id}");
        assert!(r.applicable_cases > 0, "{id}: no applicable cases");
    }
}

#[test]
fn lemma51_minima() {
    let r = verify_lemma("lemma51", &VerifyParams::default()).unwrap();
    assert_eq!(r.minima, Some(vec![(2, 4), (3, 8), (4, 12)]));
    assert!(r.passed());
}

#[test]
fn report_is_deterministic_for_a_seed() {
    let a = verify_lemma("wo", &quick(Some(8))).unwrap();
    let b = verify_lemma(
        "wo",
        &VerifyParams {
            workers: 1,
            ..quick(Some(8))
        },
    )
    .unwrap();
    assert_eq!(a, b);
    assert_eq!(a.mode, VerifyMode::ExhaustiveAndSampled);
}

#[test]
fn chowla_modulus_eight() {
    let r = verify_lemma(
        "chowla",
        &VerifyParams {
            k: Some(8),
            ..VerifyParams::default()
        },
    )
    .unwrap();
    assert_eq!(r.cases_checked, 255 * 255);
    assert!(r.applicable_cases > 0);
    assert_eq!(r.failure_count, 0);
}
