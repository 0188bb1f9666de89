//! Corpus loading and model persistence against trained models.

mod common;

use std::fs;

use common::*;
use lpdpl::classifier::Classifier;
use lpdpl::datasets::{self, CorpusManifest};
use lpdpl::dpl;
use lpdpl::features::FeatureConfig;
use lpdpl::Error;

#[test]
fn saved_model_classifies_like_the_original() {
    let d = orthogonal_subspaces(4, 24, 3, 20);
    let (model, _) = dpl::train(&d, &small_hp(6), 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.bin");
    datasets::save_model(&model, &path).unwrap();
    let loaded = datasets::load_model(&path).unwrap();
    assert_eq!(loaded, model);
    for (a, b) in model.classes().iter().zip(loaded.classes()) {
        for (x, y) in [(&a.p, &b.p), (&a.d, &b.d), (&a.w, &b.w)] {
            assert!(x.iter().zip(y.iter()).all(|(u, v)| u.to_bits() == v.to_bits()));
        }
    }

    let probes = gaussian(&mut rng(77), 24, 100);
    let before = Classifier::new(&model).classify_batch(probes.view()).unwrap();
    let after = Classifier::new(&loaded).classify_batch(probes.view()).unwrap();
    assert_eq!(before, after);
}

#[test]
fn truncated_model_is_corrupt() {
    let d = orthogonal_subspaces(2, 12, 2, 6);
    let (model, _) = dpl::train(&d, &small_hp(3), 0).unwrap();
    let bytes = datasets::encode_model(&model);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cut.bin");
    fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
    assert!(matches!(datasets::load_model(&path), Err(Error::CorruptModel(_))));
}

#[test]
fn record_order_fixes_column_order() {
    let manifest = |order: &[usize]| {
        let text = "layout = \"csv_flat\"\n[features]\nkind = \"precomputed\"\n[csv]\nfile = \"v.csv\"\nwidth = 2\nheight = 1\nlabel_column = 0\n";
        let dir = tempfile::tempdir().unwrap();
        let rows = ["a,1,0", "b,0,1", "a,2,0", "b,0,2", "a,3,0"];
        let csv: String = order.iter().map(|&i| format!("{}\n", rows[i])).collect();
        fs::write(dir.path().join("v.csv"), csv).unwrap();
        let m = CorpusManifest::from_toml(text, dir.path()).unwrap();
        datasets::load_corpus(&m).unwrap().dataset
    };
    let d = manifest(&[0, 1, 2, 3, 4]);
    let first: Vec<f64> = d.class_columns(0).iter().map(|&j| d.features()[[0, j]]).collect();
    assert_eq!(first, [1.0, 2.0, 3.0]);
    let r = manifest(&[4, 3, 2, 1, 0]);
    let first: Vec<f64> = r.class_columns(0).iter().map(|&j| r.features()[[0, j]]).collect();
    assert_eq!(first, [3.0, 2.0, 1.0]);
    let again = manifest(&[0, 1, 2, 3, 4]);
    assert_eq!(again.features(), d.features());
    assert_eq!(again.labels(), d.labels());
}

#[test]
fn mnist_subset_loads_with_hog_features() {
    let corpus = load_mnist(&FeatureConfig::default());
    let d = &corpus.dataset;
    assert!(corpus.rejects.is_empty());
    assert_eq!(d.num_classes(), 10);
    assert_eq!(d.len(), 5000);
    assert_eq!(d.feature_len(), 900);
    let names: Vec<&str> = d.class_names().iter().map(String::as_str).collect();
    assert_eq!(names, ["0", "1", "2", "3", "4", "5", "6", "7", "8", "9"]);
    for i in 0..10 {
        assert_eq!(d.class_len(i), 500);
    }
    assert!(d.features().iter().all(|v| (0.0..=1.0).contains(v)));
}
