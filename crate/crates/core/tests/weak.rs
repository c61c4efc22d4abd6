mod common;

use common::{brute_force_weak_value as brute_force_value, tiny, weak_by_cells};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uncertain_frechet::oracle::{EnumerationSpec, Side};
use uncertain_frechet::precise::{weak_frechet_1d, Metric};
use uncertain_frechet::weak::{candidate_deltas, wfr_min_decide, wfr_min_value};
use uncertain_frechet::{Scalar, UncertainCurve};

#[test]
fn value_matches_realisation_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let (u, v) = (tiny(&mut rng), tiny(&mut rng));
        let got = wfr_min_value(&u, &v).unwrap();
        assert_eq!(got, brute_force_value(&u, &v), "{u} / {v}");
        assert!(candidate_deltas(&u, &v).contains(&got));
    }
}

#[test]
fn precise_inputs_reduce_to_the_weak_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let (m, n) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let p = common::random_precise(&mut rng, m, -4, 4);
        let q = common::random_precise(&mut rng, n, -4, 4);
        let w = weak_frechet_1d(&p, &q);
        assert_eq!(w, weak_by_cells(&p, &q));
        let (u, v) = (UncertainCurve::from_precise(&p), UncertainCurve::from_precise(&q));
        for d in [&w - &Scalar::new(1, 2), w.clone(), &w + &Scalar::one()] {
            if !d.is_negative() {
                assert_eq!(wfr_min_decide(&u, &v, &d).unwrap(), w <= d, "{p} / {q} at {d}");
            }
        }
    }
}

#[test]
fn decision_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let (u, v) = (tiny(&mut rng), tiny(&mut rng));
        let mut seen = false;
        for d in candidate_deltas(&u, &v) {
            let ok = wfr_min_decide(&u, &v, &d).unwrap();
            assert!(ok || !seen, "{u} / {v} at {d}");
            seen |= ok;
        }
    }
}

#[test]
fn value_is_attained_by_some_realisation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let (u, v) = (tiny(&mut rng), tiny(&mut rng));
        let got = wfr_min_value(&u, &v).unwrap();
        let fine = EnumerationSpec::new(9);
        let grid_min = uncertain_frechet::oracle::bound_oracle(&u, &v, Metric::Weak, Side::Lower, &fine).unwrap();
        assert!(got <= grid_min, "{u} / {v}");
    }
}
