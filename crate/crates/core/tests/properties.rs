use proptest::prelude::*;

use wegan::batch::Batch;
use wegan::losses::{gen_loss_weighted_vanilla, GeneratorMode};
use wegan::metrics::{median_heuristic, mmd2, Bandwidth, Estimator, MmdConfig};
use wegan::nn::{Activation, Mlp};
use wegan::oracle::{direct_wegan_weights, naive_mmd2};
use wegan::rng::RngStream;
use wegan::weighting::{loss_margin, uniform_weights, wegan_weights, weight_variance};

fn open_unit() -> impl Strategy<Value = f64> {
    1e-9f64..1.0 - 1e-9
}

fn probabilities() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(open_unit(), 2..=64)
}

fn eta() -> impl Strategy<Value = f64> {
    prop_oneof![1e-6f64..=1.0, Just(1.0)]
}

fn points(max: usize) -> impl Strategy<Value = Batch> {
    (1usize..=3).prop_flat_map(move |dim| {
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, dim), 2..=max)
            .prop_map(|rows| Batch::from_rows(&rows).unwrap())
    })
}

fn pair(max: usize) -> impl Strategy<Value = (Batch, Batch)> {
    (1usize..=3).prop_flat_map(move |dim| {
        let set = move || prop::collection::vec(prop::collection::vec(-5.0f64..5.0, dim), 2..=max);
        (set(), set()).prop_map(|(a, b)| (Batch::from_rows(&a).unwrap(), Batch::from_rows(&b).unwrap()))
    })
}

fn reorder(b: &Batch, seed: u64) -> Batch {
    let mut rows: Vec<Vec<f64>> = b.iter_rows().map(<[f64]>::to_vec).collect();
    let mut rng = RngStream::from_seed(seed);
    for i in (1..rows.len()).rev() {
        rows.swap(i, rng.index(i + 1));
    }
    Batch::from_rows(&rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn margin_is_nonnegative(d in probabilities(), eta in eta()) {
        prop_assert!(loss_margin(&d, eta).unwrap() >= -1e-12);
    }

    #[test]
    fn weighted_loss_never_exceeds_uniform(d in probabilities(), eta in eta()) {
        let w = wegan_weights(&d, eta).unwrap();
        let u = uniform_weights(d.len()).unwrap();
        let lw = gen_loss_weighted_vanilla(&d, &w, GeneratorMode::Saturating).unwrap().value;
        let lu = gen_loss_weighted_vanilla(&d, &u, GeneratorMode::Saturating).unwrap().value;
        prop_assert!(lw <= lu + 1e-12);
    }

    #[test]
    fn weights_ignore_exponent_shift(d in probabilities(), eta in eta()) {
        let w = wegan_weights(&d, eta).unwrap();
        let raw: Vec<f64> = d.iter().map(|di| eta.powf(-di)).collect();
        let total: f64 = raw.iter().sum();
        for (a, b) in w.values().iter().zip(&raw) {
            prop_assert!((a - b / total).abs() <= 1e-15, "{a} vs {}", b / total);
        }
        for (a, b) in w.values().iter().zip(direct_wegan_weights(&d, eta)) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn weights_lie_on_simplex(d in prop::collection::vec(0.0f64..=1.0, 1..=64), eta in eta()) {
        let w = wegan_weights(&d, eta).unwrap();
        w.check_simplex().unwrap();
        prop_assert!(weight_variance(w.values()) >= 0.0);
    }

    #[test]
    fn weights_follow_discriminator_order(mut d in probabilities(), eta in 1e-6f64..1.0) {
        d.sort_by(f64::total_cmp);
        let w = wegan_weights(&d, eta).unwrap();
        prop_assert!(w.values().windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn mmd_matches_naive_oracle((x, y) in pair(64), sigma in 0.1f64..5.0) {
        for estimator in [Estimator::Biased, Estimator::Unbiased] {
            let cfg = MmdConfig { bandwidth: Bandwidth::Fixed(sigma), estimator };
            let fast = mmd2(&x, &y, &cfg).unwrap();
            prop_assert!((fast - naive_mmd2(&x, &y, sigma, estimator)).abs() <= 1e-12);
        }
    }

    #[test]
    fn biased_mmd_symmetric_nonnegative((x, y) in pair(40)) {
        let cfg = MmdConfig { bandwidth: Bandwidth::Median, estimator: Estimator::Biased };
        let xy = mmd2(&x, &y, &cfg).unwrap();
        let yx = mmd2(&y, &x, &cfg).unwrap();
        prop_assert!((xy - yx).abs() <= 1e-12);
        prop_assert!(xy >= -1e-12);
        prop_assert!(mmd2(&x, &x, &cfg).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn mmd_ignores_row_order((x, y) in pair(40), seed in any::<u64>()) {
        let (px, py) = (reorder(&x, seed), reorder(&y, seed ^ 1));
        for estimator in [Estimator::Biased, Estimator::Unbiased] {
            let cfg = MmdConfig { bandwidth: Bandwidth::Median, estimator };
            let a = mmd2(&x, &y, &cfg).unwrap();
            let b = mmd2(&px, &py, &cfg).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }
        prop_assert_eq!(median_heuristic(&x, &y).unwrap(), median_heuristic(&px, &py).unwrap());
    }

    #[test]
    fn median_bandwidth_is_positive(x in points(20)) {
        prop_assert!(median_heuristic(&x, &x).unwrap() > 0.0);
    }

    #[test]
    fn backward_is_linear_in_seeds(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = RngStream::from_seed(seed);
        let mlp = Mlp::init(&[3, 5, 1], Activation::Relu, Activation::Sigmoid, &mut rng).unwrap();
        let rows: Vec<Vec<f64>> = (0..6).map(|_| (0..3).map(|_| rng.standard_normal()).collect()).collect();
        let batch = Batch::from_rows(&rows).unwrap();
        let u: Vec<f64> = (0..6).map(|_| rng.standard_normal()).collect();
        let v: Vec<f64> = (0..6).map(|_| rng.standard_normal()).collect();
        let cache = mlp.forward(&batch).unwrap().cache;
        let gu = mlp.backward(&cache, &u).unwrap();
        let gv = mlp.backward(&cache, &v).unwrap();
        let mix: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let gm = mlp.backward(&cache, &mix).unwrap();
        for ((m, x), y) in gm.as_slice().iter().zip(gu.as_slice()).zip(gv.as_slice()) {
            let expect = a * x + b * y;
            prop_assert!((m - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn sigmoid_outputs_stay_open(seed in any::<u64>(), scale in 1.0f64..1e4) {
        let mut rng = RngStream::from_seed(seed);
        let mlp = Mlp::init(&[2, 4, 1], Activation::Relu, Activation::Sigmoid, &mut rng).unwrap();
        let rows: Vec<Vec<f64>> = (0..16).map(|_| vec![scale * rng.standard_normal(), scale * rng.standard_normal()]).collect();
        let out = mlp.forward(&Batch::from_rows(&rows).unwrap()).unwrap().outputs;
        prop_assert!(out.as_slice().iter().all(|&p| p > 0.0 && p < 1.0));
    }
}
