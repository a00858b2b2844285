mod common;

use npchunk::mbl::{classify, distance, information_gain, train, FeatureWeights, InstanceBase, Weighting};
use npchunk::Instance;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn weights_match_entropy_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for _ in 0..500 {
        let data = common::random_base(&mut rng, 6, 3, 3);
        let base = InstanceBase::from_instances(&data).unwrap();
        for (weighting, ratio) in [(Weighting::Gain, false), (Weighting::GainRatio, true)] {
            let got = information_gain(&base, weighting).unwrap();
            let want = common::entropy_oracle(&data, ratio);
            for (g, w) in got.as_slice().iter().zip(&want) {
                assert!((g - w).abs() <= 1e-12, "{g} vs {w} for {data:?}");
            }
        }
    }
}

#[test]
fn uniform_duplication_keeps_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let data = common::random_base(&mut rng, 8, 3, 3);
        let doubled: Vec<Instance> = data.iter().chain(&data).cloned().collect();
        let (_, w1) = train(&data, Weighting::GainRatio).unwrap();
        let (b2, w2) = train(&doubled, Weighting::GainRatio).unwrap();
        assert_eq!(b2.len(), 2 * data.len());
        for (a, b) in w1.as_slice().iter().zip(w2.as_slice()) {
            assert!((a - b).abs() <= 1e-12);
        }
        let oracle = common::entropy_oracle(&doubled, true);
        for (a, b) in w2.as_slice().iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn classify_matches_exhaustive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for round in 0..1000 {
        let data = common::random_base(&mut rng, 50, 4, 3);
        let base = InstanceBase::from_instances(&data).unwrap();
        // Alternate learned weights with quarter-step weights that force
        // ties between different mismatch patterns.
        let weights = if round % 2 == 0 {
            information_gain(&base, Weighting::GainRatio).unwrap()
        } else {
            FeatureWeights::new((0..base.arity()).map(|_| rng.gen_range(0..4) as f64 * 0.25).collect()).unwrap()
        };
        let query: Vec<String> = (0..base.arity()).map(|_| format!("v{}", rng.gen_range(0..4))).collect();
        for k in 1..=3 {
            let got = classify(&base, &weights, &query, k).unwrap().label;
            assert_eq!(got, common::knn_oracle(&data, weights.as_slice(), &query, k));
        }
    }
}

#[test]
fn order_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..200 {
        let mut data = common::random_base(&mut rng, 30, 4, 3);
        let (b1, w1) = train(&data, Weighting::GainRatio).unwrap();
        data.shuffle(&mut rng);
        let (b2, w2) = train(&data, Weighting::GainRatio).unwrap();
        let query: Vec<String> = (0..b1.arity()).map(|_| format!("v{}", rng.gen_range(0..3))).collect();
        for k in 1..=3 {
            assert_eq!(
                classify(&b1, &w1, &query, k).unwrap(),
                classify(&b2, &w2, &query, k).unwrap()
            );
        }
    }
}

#[test]
fn constant_feature_is_irrelevant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let data = common::random_base(&mut rng, 30, 3, 3);
        let padded: Vec<Instance> = data
            .iter()
            .map(|i| {
                let mut f = i.features.clone();
                f.push("const".into());
                Instance::new(f, i.class.clone())
            })
            .collect();
        let (b1, w1) = train(&data, Weighting::GainRatio).unwrap();
        let (b2, w2) = train(&padded, Weighting::GainRatio).unwrap();
        assert_eq!(*w2.as_slice().last().unwrap(), 0.0);
        let q: Vec<String> = (0..b1.arity()).map(|_| format!("v{}", rng.gen_range(0..3))).collect();
        let mut q2 = q.clone();
        q2.push("const".into());
        for k in 1..=3 {
            assert_eq!(classify(&b1, &w1, &q, k).unwrap().label, classify(&b2, &w2, &q2, k).unwrap().label);
        }
    }
}

#[test]
fn exact_single_class_match_with_k1() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let data = common::random_base(&mut rng, 30, 4, 4);
        let (base, w) = train(&data, Weighting::GainRatio).unwrap();
        let target = &data[rng.gen_range(0..data.len())];
        let same: Vec<&Instance> = data.iter().filter(|i| i.features == target.features).collect();
        if same.iter().any(|i| i.class != target.class) {
            continue;
        }
        // Others at distance 0 (differing only in zero-weight features) may vote too.
        let zero_dist = data.iter().filter(|i| distance(&i.features, &target.features, &w).unwrap() == 0.0);
        if zero_dist.clone().any(|i| i.class != target.class) {
            continue;
        }
        assert_eq!(classify(&base, &w, &target.features, 1).unwrap().label, target.class);
    }
}

fn features3() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c"]).prop_map(String::from), 4)
}

proptest! {
    #[test]
    fn distance_is_a_pseudometric(x in features3(), y in features3(), z in features3(),
                                  w in prop::collection::vec(0.0f64..3.0, 4)) {
        let w = FeatureWeights::new(w).unwrap();
        let d = |a: &[String], b: &[String]| distance(a, b, &w).unwrap();
        prop_assert_eq!(d(&x, &x), 0.0);
        prop_assert!(d(&x, &y) >= 0.0);
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-12);
    }
}
