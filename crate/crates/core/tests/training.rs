//! Properties of full training runs.

mod common;

use common::*;
use lpdpl::classifier::Classifier;
use lpdpl::dpl::{self, ClassProblem, Hyperparameters};
use lpdpl::Error;
use ndarray::Array2;
use proptest::prelude::*;

fn assert_monotone(trace: &[f64], context: &str) {
    for (t, w) in trace.windows(2).enumerate().skip(1) {
        assert!(
            w[1] <= w[0] + 1e-8,
            "{context}: objective rose from {} to {} at iteration {}",
            w[0],
            w[1],
            t + 1
        );
    }
}

#[test]
fn same_seed_same_run() {
    let d = orthogonal_subspaces(3, 24, 3, 30);
    let hp = small_hp(6);
    let (m1, o1) = dpl::train(&d, &hp, 17).unwrap();
    let (m2, o2) = dpl::train(&d, &hp, 17).unwrap();
    assert_eq!(o1.trace, o2.trace);
    assert_eq!(m1, m2);
    let (m3, _) = dpl::train(&d, &hp, 18).unwrap();
    assert_ne!(m1, m3);
}

#[test]
fn label_term_off_makes_dictionaries_ignore_labels() {
    let d = orthogonal_subspaces(5, 12, 3, 10);
    let hp = Hyperparameters {
        lambda2: 0.0,
        ..small_hp(4)
    };
    let problems = ClassProblem::from_dataset(&d);
    let mut r = rng(99);
    let scrambled: Vec<ClassProblem> = problems
        .iter()
        .map(|p| ClassProblem::new(p.x.clone(), p.complement_gram.clone(), gaussian(&mut r, p.h.nrows(), p.h.ncols())).unwrap())
        .collect();
    let a = dpl::train_problems(&problems, &hp, 2).unwrap();
    let b = dpl::train_problems(&scrambled, &hp, 2).unwrap();
    for (sa, sb) in a.states.iter().zip(&b.states) {
        assert_eq!(sa.model.p, sb.model.p);
        assert_eq!(sa.model.d, sb.model.d);
    }
    assert_eq!(a.trace, b.trace);
}

#[test]
fn separable_synthetic_resubstitution() {
    let d = orthogonal_subspaces(11, 24, 3, 30);
    let (model, out) = dpl::train(&d, &small_hp(8), 0).unwrap();
    assert_monotone(&out.trace, "separable");
    let pred = Classifier::new(&model).classify_batch(d.features().view()).unwrap();
    assert_eq!(pred, d.labels());
    assert!(model.max_atom_norm() <= 1.0 + 1e-9);
}

#[test]
fn trace_has_initial_point_plus_iterations() {
    let d = orthogonal_subspaces(1, 12, 3, 8);
    let hp = Hyperparameters {
        tol: 0.0,
        outer_iters: 7,
        ..small_hp(3)
    };
    let (_, out) = dpl::train(&d, &hp, 0).unwrap();
    assert_eq!(out.trace.len(), 8);
    let hp0 = Hyperparameters { outer_iters: 0, ..hp };
    let (_, out0) = dpl::train(&d, &hp0, 0).unwrap();
    assert_eq!(out0.trace.len(), 1);
}

#[test]
fn single_class_rejected() {
    let x = Array2::from_shape_fn((4, 5), |(r, c)| (r + c) as f64);
    let d = lpdpl::dpl::ClassPartitionedDataset::new(x, vec![0; 5], vec!["only".into()]).unwrap();
    assert!(matches!(dpl::train(&d, &small_hp(2), 0), Err(Error::InvalidConfig(_))));
}

#[test]
fn more_atoms_than_samples_still_trains() {
    let d = orthogonal_subspaces(8, 9, 3, 2);
    let (model, out) = dpl::train(&d, &small_hp(12), 0).unwrap();
    assert!(out.trace.iter().all(|v| v.is_finite()));
    assert_eq!(model.atoms(), 12);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn random_runs_descend_and_stay_feasible(
        seed in 0u64..10_000,
        n in 3usize..12,
        m in 1usize..8,
        per in 2usize..9,
        q in 2usize..5,
        l1 in -3.0f64..1.0,
        l2 in -3.0f64..1.0,
        l3 in -3.0f64..1.0,
    ) {
        let mut r = rng(seed);
        let x = gaussian(&mut r, n, q * per);
        let labels = (0..q * per).map(|j| j % q).collect();
        let names = (0..q).map(|i| i.to_string()).collect();
        let d = lpdpl::dpl::ClassPartitionedDataset::new(x, labels, names).unwrap();
        let hp = Hyperparameters {
            m,
            lambda1: 10f64.powf(l1),
            lambda2: 10f64.powf(l2),
            lambda3: 10f64.powf(l3),
            tol: 0.0,
            outer_iters: 8,
            ..Hyperparameters::default()
        };
        let (model, out) = dpl::train(&d, &hp, seed).unwrap();
        assert_monotone(&out.trace, &format!("seed {seed}"));
        prop_assert!(model.max_atom_norm() <= 1.0 + 1e-9);
    }
}
