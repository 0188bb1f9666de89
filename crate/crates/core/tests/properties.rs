//! Randomized properties of features, updates, scoring, folds and model files.

mod common;

use common::*;
use lpdpl::classifier::{self, argmin, Classifier};
use lpdpl::datasets;
use lpdpl::dpl::{class_objective, update_a, update_p, update_w, ClassModel, ClassPartitionedDataset, Hyperparameters};
use lpdpl::eval::{make_folds, run_cv, Scheme};
use lpdpl::features::FeatureConfig;
use lpdpl::hog::{self, HogConfig};
use lpdpl::TrainedModel;
use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::Rng;

fn image(seed: u64, h: usize, w: usize, binary: bool) -> Array2<f64> {
    let mut r = rng(seed);
    Array2::from_shape_fn((h, w), |_| {
        if binary {
            f64::from(u8::from(r.random_bool(0.3)))
        } else {
            r.random_range(0.0..1.0)
        }
    })
}

fn histograms(img: &Array2<f64>) -> ndarray::Array3<f64> {
    let (gx, gy) = hog::gradients_of(img.view());
    hog::cell_histograms(&gx, &gy, &HogConfig::default())
}

/// The objective each closed-form step minimizes exactly: the relaxed
/// objective plus the P and W ridges.
fn ridged(i: &Instance, model: &ClassModel, a: &Array2<f64>) -> f64 {
    class_objective(i.x.view(), i.x_bar.view(), i.h.view(), model, a.view(), &i.hp)
        + i.hp.gamma * fro2(&model.p)
        + i.hp.lambda2 * i.hp.gamma * fro2(&model.w)
}

fn random_model(seed: u64, q: usize, n: usize, m: usize) -> TrainedModel {
    let mut r = rng(seed);
    let classes = (0..q)
        .map(|_| ClassModel {
            p: gaussian(&mut r, m, n),
            d: gaussian(&mut r, n, m),
            w: gaussian(&mut r, q, m),
        })
        .collect();
    let names = (0..q).map(|i| format!("k{i}")).collect();
    let hp = Hyperparameters { m, ..Hyperparameters::default() };
    TrainedModel::new(names, hp, FeatureConfig::precomputed(), classes).unwrap()
}

fn random_dataset(seed: u64, q: usize, per: &[usize]) -> ClassPartitionedDataset {
    let mut r = rng(seed);
    let total: usize = per.iter().sum();
    let mut labels: Vec<usize> = per.iter().enumerate().flat_map(|(c, &k)| std::iter::repeat_n(c, k)).collect();
    for j in (1..labels.len()).rev() {
        labels.swap(j, r.random_range(0..=j));
    }
    let names = (0..q).map(|i| i.to_string()).collect();
    ClassPartitionedDataset::new(gaussian(&mut r, 4, total), labels, names).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn hog_matches_voting_oracle(seed in any::<u64>(), binary in any::<bool>()) {
        let img = image(seed, 32, 32, binary);
        let got = hog::extract_intensity(img.view(), &HogConfig::default());
        let want = hog_oracle(img.as_slice().unwrap(), 32, 3, 9);
        prop_assert_eq!(got.len(), 900);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-12, "{} vs {}", g, w);
        }
    }

    #[test]
    fn histogram_mass_equals_gradient_mass(seed in any::<u64>(), side in 30usize..40) {
        let img = image(seed, side, side, false);
        let (gx, gy) = hog::gradients_of(img.view());
        let hist = hog::cell_histograms(&gx, &gy, &HogConfig::default());
        let mut mass = 0.0;
        for r in 0..30 {
            for c in 0..30 {
                mass += gx[[r, c]].hypot(gy[[r, c]]);
            }
        }
        prop_assert!((hist.sum() - mass).abs() <= 1e-9 * (1.0 + mass));
    }

    #[test]
    fn doubling_contrast_doubles_histograms(seed in any::<u64>()) {
        let img = image(seed, 32, 32, false);
        let once = histograms(&img);
        let twice = histograms(&(&img * 2.0));
        for (a, b) in once.iter().zip(twice.iter()) {
            prop_assert!((2.0 * a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn quarter_turn_permutes_cell_mass(seed in any::<u64>(), binary in any::<bool>()) {
        // 30×30 so the complete cells tile the whole image.
        let img = image(seed, 30, 30, binary);
        let turned = Array2::from_shape_fn((30, 30), |(r, c)| img[[c, 29 - r]]);
        let a = histograms(&img);
        let b = histograms(&turned);
        for cy in 0..10 {
            for cx in 0..10 {
                let before: f64 = (0..9).map(|k| a[[cx, 9 - cy, k]]).sum();
                let after: f64 = (0..9).map(|k| b[[cy, cx, k]]).sum();
                prop_assert!((before - after).abs() <= 1e-9 * (1.0 + before));
            }
        }
    }

    #[test]
    fn closed_form_steps_never_increase_their_objective(seed in 0u64..100_000) {
        let i = random_instance(seed);
        let mut model = ClassModel { p: i.p.clone(), d: i.d.clone(), w: i.w.clone() };
        let start = ridged(&i, &model, &i.a);
        let a = update_a(i.x.view(), model.d.view(), model.w.view(), model.p.view(), i.h.view(), &i.hp).unwrap();
        let after_a = ridged(&i, &model, &a);
        model.p = update_p(i.x.view(), i.x_bar.view(), a.view(), &i.hp).unwrap();
        let after_p = ridged(&i, &model, &a);
        model.w = update_w(a.view(), i.h.view(), &i.hp).unwrap();
        let after_w = ridged(&i, &model, &a);
        let slack = 1e-10 * (1.0 + start);
        prop_assert!(after_a <= start + slack, "A: {} -> {}", start, after_a);
        prop_assert!(after_p <= after_a + slack, "P: {} -> {}", after_a, after_p);
        prop_assert!(after_w <= after_p + slack, "W: {} -> {}", after_p, after_w);
    }

    #[test]
    fn shifting_every_total_keeps_the_label(seed in any::<u64>(), q in 2usize..6, shift in 0.0f64..1e3) {
        let model = random_model(seed, q, 7, 3);
        let x = Array1::from_iter(gaussian(&mut rng(seed ^ 1), 7, 1).into_iter());
        let scores = Classifier::new(&model).scores(x.view()).unwrap();
        let shifted: Vec<_> = scores
            .iter()
            .map(|s| classifier::ClassScore { total: s.total + shift, ..*s })
            .collect();
        prop_assert_eq!(argmin(&scores).class_index, argmin(&shifted).class_index);
    }

    #[test]
    fn precomputed_codes_score_identically(seed in any::<u64>(), q in 2usize..6) {
        let model = random_model(seed, q, 6, 4);
        let x = Array1::from_iter(gaussian(&mut rng(seed ^ 2), 6, 1).into_iter());
        let codes = classifier::codes(x.view(), &model);
        let from_codes = classifier::scores_from_codes(x.view(), &codes, &model);
        let direct = Classifier::new(&model).scores(x.view()).unwrap();
        prop_assert_eq!(from_codes, direct);
    }

    #[test]
    fn model_files_round_trip_bitwise(seed in any::<u64>(), q in 2usize..5, n in 1usize..9, m in 1usize..6) {
        let model = random_model(seed, q, n, m);
        let back = datasets::decode_model(&datasets::encode_model(&model)).unwrap();
        prop_assert_eq!(datasets::encode_model(&back), datasets::encode_model(&model));
        prop_assert_eq!(back, model);
    }

    #[test]
    fn conventional_folds_are_stratified_and_reproducible(
        seed in any::<u64>(),
        per in proptest::collection::vec(3usize..25, 2..5),
        k in 2usize..4,
    ) {
        let q = per.len();
        let d = random_dataset(seed, q, &per);
        let plan = make_folds(&d, Scheme::Conventional, k, seed).unwrap();
        let again = make_folds(&d, Scheme::Conventional, k, seed).unwrap();
        prop_assert_eq!(&plan.folds, &again.folds);
        plan.check(d.len()).unwrap();
        let mut seen = vec![0usize; d.len()];
        for f in &plan.folds {
            for &j in &f.test {
                seen[j] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        for c in 0..q {
            let counts: Vec<usize> = plan
                .folds
                .iter()
                .map(|f| f.test.iter().filter(|&&j| d.labels()[j] == c).count())
                .collect();
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            prop_assert!(hi - lo <= 1, "class {} counts {:?}", c, counts);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn confusion_diagonal_is_the_accuracy(seed in any::<u64>(), per in proptest::collection::vec(4usize..9, 2..4)) {
        let d = random_dataset(seed, per.len(), &per);
        let plan = make_folds(&d, Scheme::Conventional, 2, seed).unwrap();
        let hp = Hyperparameters { m: 2, outer_iters: 2, ..Hyperparameters::default() };
        let report = run_cv(&d, &plan, &hp, seed).unwrap();
        let diag: u64 = report.confusion().diag().sum();
        prop_assert_eq!(report.total_tested(), d.len() as u64);
        prop_assert_eq!(diag as f64 / report.total_tested() as f64, report.pooled_accuracy().unwrap());
    }
}
